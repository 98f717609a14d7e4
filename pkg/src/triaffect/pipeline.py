"""End-to-end orchestration: channel ingest, filtering, and report suites.

Channels with different coverage are combined pairwise-complete (not
listwise), so a correlation uses every observation where both of its
series are present.  All outputs are deterministic functions of their
input files; CSV rendering is byte-identical across runs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import plotting
from .annotator import parse_response
from .circumplex import WeightTable, default_weight_table, project
from .errors import (
    DegenerateStatisticsError,
    InputError,
    JoinError,
    SchemaError,
    W_COMPARISON_UNAVAILABLE,
    W_EMPTY_CHANNEL,
    W_FILTERED_ROWS,
    warn,
)
from .model import ClassProbabilities, PathosScore, SegmentRecord, load_segments
from .rankstats import CorrelationResult, DescriptiveStats, describe, pairwise_complete, spearman

CHANNELS = ("gemini_arousal", "gemini_valence", "e2v_arousal", "e2v_valence", "pathos")

COMPARISONS = ("gemV_pathos", "gemA_pathos", "e2vV_pathos", "e2vA_pathos", "e2vA_gemA", "e2vV_gemV")

_COMPARISON_CHANNELS = {
    "gemV_pathos": ("gemini_valence", "pathos"),
    "gemA_pathos": ("gemini_arousal", "pathos"),
    "e2vV_pathos": ("e2v_valence", "pathos"),
    "e2vA_pathos": ("e2v_arousal", "pathos"),
    "e2vA_gemA": ("e2v_arousal", "gemini_arousal"),
    "e2vV_gemV": ("e2v_valence", "gemini_valence"),
}


def channel_value(record: SegmentRecord, channel: str) -> float | None:
    """Extract one channel value from a record, or None when absent."""
    if channel == "gemini_arousal":
        return None if record.llm_annotation is None else record.llm_annotation.arousal
    if channel == "gemini_valence":
        return None if record.llm_annotation is None else record.llm_annotation.valence
    if channel == "e2v_arousal":
        return None if record.e2v_point is None else record.e2v_point.arousal
    if channel == "e2v_valence":
        return None if record.e2v_point is None else record.e2v_point.valence
    if channel == "pathos":
        return None if record.pathos is None else float(record.pathos)
    raise InputError(f"unknown channel {channel!r}; expected one of {CHANNELS}")


@dataclass(frozen=True)
class AnalysisTable:
    """Joined segment records, ordered by start time, with channel provenance."""

    rows: tuple[SegmentRecord, ...]
    provenance: Mapping[str, str]

    def __post_init__(self) -> None:
        ids = [r.segment_id for r in self.rows]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise SchemaError(f"analysis table has duplicate segment ids: {dupes}")
        starts = [(r.start_s, r.segment_id) for r in self.rows]
        if starts != sorted(starts):
            raise SchemaError("analysis table rows must be sorted by start time")
        object.__setattr__(self, "provenance", MappingProxyType(dict(self.provenance)))

    def channel(self, name: str) -> list[float | None]:
        return [channel_value(r, name) for r in self.rows]


def table_from_records(
    records: Iterable[SegmentRecord], provenance: Mapping[str, str] | None = None
) -> AnalysisTable:
    rows = tuple(sorted(records, key=lambda r: (r.start_s, r.segment_id)))
    return AnalysisTable(rows=rows, provenance=dict(provenance or {}))


def _read_json(path, what: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{what} file {path} is not valid JSON: {exc}") from exc


def ingest(
    segments_path,
    e2v_path=None,
    llm_path=None,
    trust_path=None,
    weights: WeightTable | None = None,
) -> AnalysisTable:
    """Left-join optional channel files onto the segment table.

    Acoustic probability maps are validated and projected to circumplex
    points here, at ingest, so every downstream consumer sees the same
    projection.  A channel entry for an id that is not in the segment
    table is a join error naming that id.
    """
    records = {r.segment_id: r for r in load_segments(segments_path)}
    provenance = {"segments": str(segments_path)}
    if e2v_path is not None:
        doc = _read_json(e2v_path, "e2v probabilities")
        if not isinstance(doc, dict):
            raise SchemaError(f"e2v probabilities file {e2v_path} must map segment ids to objects")
        wt = default_weight_table() if weights is None else weights
        for sid in sorted(doc):
            if sid not in records:
                raise JoinError(f"e2v channel references unknown segment_id {sid!r}")
            try:
                probs = ClassProbabilities.from_dict(doc[sid])
            except SchemaError as exc:
                raise SchemaError(f"e2v probabilities for {sid}: {exc}") from None
            records[sid] = replace(records[sid], e2v_probs=probs, e2v_point=project(probs, wt))
        provenance["e2v"] = str(e2v_path)
    if llm_path is not None:
        response = parse_response(_read_json(llm_path, "llm annotations"))
        for sid in sorted(response.annotations):
            if sid not in records:
                raise JoinError(f"llm channel references unknown segment_id {sid!r}")
            records[sid] = replace(records[sid], llm_annotation=response.annotations[sid])
        provenance["llm"] = str(llm_path)
    if trust_path is not None:
        doc = _read_json(trust_path, "trust scores")
        if not isinstance(doc, dict):
            raise SchemaError(f"trust scores file {trust_path} must map segment ids to objects")
        for sid in sorted(doc):
            if sid not in records:
                raise JoinError(f"trust channel references unknown segment_id {sid!r}")
            entry = doc[sid]
            if not isinstance(entry, dict) or set(entry) - {"pathos", "relevant"}:
                raise SchemaError(f"trust entry for {sid} must have only pathos and relevant")
            relevant = entry.get("relevant", True)
            if not isinstance(relevant, bool):
                raise SchemaError(f"trust entry for {sid}: relevant must be a boolean")
            raw_pathos = entry.get("pathos")
            if not relevant and raw_pathos is not None:
                raise SchemaError(
                    f"trust entry for {sid}: relevant=false forbids a pathos score"
                )
            pathos = None if raw_pathos is None else PathosScore(raw_pathos)
            records[sid] = replace(records[sid], pathos=pathos, relevant=relevant)
        provenance["trust"] = str(trust_path)
    return table_from_records(records.values(), provenance)


def apply_relevance_filter(table: AnalysisTable) -> AnalysisTable:
    """Drop rows flagged not relevant; retained rows are untouched."""
    kept = tuple(r for r in table.rows if r.relevant)
    removed = len(table.rows) - len(kept)
    if removed:
        warn(W_FILTERED_ROWS, f"relevance filter removed {removed} of {len(table.rows)} rows")
    if not kept:
        warn(W_FILTERED_ROWS, "relevance filter removed every row")
    return AnalysisTable(rows=kept, provenance=dict(table.provenance))


@dataclass(frozen=True)
class CorrelationSuiteResult:
    """The six named cross-modality comparisons; unavailable ones are None."""

    gemV_pathos: CorrelationResult | None
    gemA_pathos: CorrelationResult | None
    e2vV_pathos: CorrelationResult | None
    e2vA_pathos: CorrelationResult | None
    e2vA_gemA: CorrelationResult | None
    e2vV_gemV: CorrelationResult | None

    def as_mapping(self) -> dict[str, CorrelationResult | None]:
        return {name: getattr(self, name) for name in COMPARISONS}


def correlation_suite(
    table: AnalysisTable, method: str = "t_approx", rng: np.random.Generator | None = None
) -> CorrelationSuiteResult:
    """Run all six comparisons over pairwise-complete observations.

    A comparison without enough complete pairs (or with a constant series)
    is marked unavailable and warned about; the others still run.
    """
    columns = {ch: table.channel(ch) for ch in CHANNELS}
    results: dict[str, CorrelationResult | None] = {}
    for name in COMPARISONS:
        ch_x, ch_y = _COMPARISON_CHANNELS[name]
        xs, ys = pairwise_complete(columns[ch_x], columns[ch_y])
        try:
            if len(xs) < 3:
                raise DegenerateStatisticsError(f"only {len(xs)} complete pairs")
            results[name] = spearman(xs, ys, method=method, rng=rng)
        except DegenerateStatisticsError as exc:
            warn(W_COMPARISON_UNAVAILABLE, f"{name} unavailable: {exc}")
            results[name] = None
    return CorrelationSuiteResult(**results)


def descriptive_suite(table: AnalysisTable) -> dict[str, DescriptiveStats]:
    """Descriptive statistics per channel over its present values."""
    out: dict[str, DescriptiveStats] = {}
    for ch in CHANNELS:
        values = [v for v in table.channel(ch) if v is not None]
        if not values:
            warn(W_EMPTY_CHANNEL, f"channel {ch} has no values; omitted from descriptives")
            continue
        out[ch] = describe(values)
    return out


def rhetoric_distribution(table: AnalysisTable) -> list[tuple[str, int, float]]:
    """Counts of rhetorical-function labels, descending, with percentages."""
    labels = [
        r.llm_annotation.rhetorical_function for r in table.rows if r.llm_annotation is not None
    ]
    if not labels:
        return []
    counts: dict[str, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    total = len(labels)
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(label, n, 100.0 * n / total) for label, n in ordered]


def _fmt(value: float) -> str:
    # >= 6 significant digits, no trailing zero noise.
    if value is None:
        return ""
    if float(value).is_integer():
        return str(int(value))
    return format(float(value), ".6g")


def table_series(table: AnalysisTable, channels: Sequence[str]) -> dict[str, dict[int, float]]:
    """Index-aligned channel series from a table.

    When every segment id ends in a distinct integer (s0042 -> 42), those
    ordinals are used as indices so table exports align with the bundled
    index series; otherwise row positions are used.
    """
    ordinals = []
    for r in table.rows:
        m = re.search(r"(\d+)$", r.segment_id)
        ordinals.append(int(m.group(1)) if m else None)
    if None in ordinals or len(set(ordinals)) != len(ordinals):
        ordinals = list(range(len(table.rows)))
    out: dict[str, dict[int, float]] = {}
    for ch in channels:
        series = {}
        for idx, record in zip(ordinals, table.rows):
            value = channel_value(record, ch)
            if value is not None:
                series[idx] = value
        out[ch] = series
    return out


def bundle_series(
    series_doc: Mapping[str, Sequence[float | None]], channels: Sequence[str]
) -> dict[str, dict[int, float]]:
    """Index-aligned channel series from a bundled aligned-series mapping."""
    out: dict[str, dict[int, float]] = {}
    for ch in channels:
        if ch not in series_doc:
            raise InputError(f"unknown channel {ch!r}; available: {sorted(series_doc)}")
        out[ch] = {i: v for i, v in enumerate(series_doc[ch]) if v is not None}
    return out


def timeseries_export(
    source: AnalysisTable | Mapping[str, Sequence[float | None]],
    channels: Sequence[str],
    fmt: str,
) -> str | bytes:
    """Export index-aligned channels as CSV text or SVG bytes.

    CSV has one row per index in the union of the channels, with empty
    cells where a channel is absent.  SVG draws lines for continuous
    channels, point markers for pathos, on a fixed [-1.2, +1.2] axis.
    """
    if not channels:
        raise InputError("timeseries export needs at least one channel")
    if isinstance(source, AnalysisTable):
        for ch in channels:
            if ch not in CHANNELS:
                raise InputError(f"unknown channel {ch!r}; expected one of {CHANNELS}")
        series = table_series(source, channels)
    else:
        series = bundle_series(source, channels)
    if fmt == "csv":
        indices = sorted(set().union(*(series[ch] for ch in channels)))
        lines = ["index," + ",".join(channels)]
        for i in indices:
            cells = [_fmt(series[ch][i]) if i in series[ch] else "" for ch in channels]
            lines.append(f"{i}," + ",".join(cells))
        return "\n".join(lines) + "\n"
    if fmt == "svg":
        return plotting.render_timeseries_svg(series, channels)
    raise InputError(f"unknown timeseries format {fmt!r}; expected 'csv' or 'svg'")


def correlations_csv(result: CorrelationSuiteResult) -> str:
    lines = ["comparison,rho,p,n"]
    for name in COMPARISONS:
        res = result.as_mapping()[name]
        if res is None:
            lines.append(f"{name},,,")
        else:
            lines.append(f"{name},{_fmt(res.rho)},{_fmt(res.p_value)},{res.n}")
    return "\n".join(lines) + "\n"


def descriptives_csv(stats: Mapping[str, DescriptiveStats]) -> str:
    lines = ["channel,mean,sd,min,max,n"]
    for ch in CHANNELS:
        if ch not in stats:
            continue
        s = stats[ch]
        lines.append(f"{ch},{_fmt(s.mean)},{_fmt(s.sd)},{_fmt(s.min)},{_fmt(s.max)},{s.n}")
    return "\n".join(lines) + "\n"


def rhetoric_csv(distribution: Sequence[tuple[str, int, float]]) -> str:
    lines = ["rhetorical_function,n,pct"]
    for label, n, pct in distribution:
        lines.append(f"{label},{n},{_fmt(round(pct, 4))}")
    return "\n".join(lines) + "\n"
