"""Semantic mapping of open-vocabulary emotion labels onto a closed set.

Open-ended annotators name emotions freely ("Sachlichkeit", "Empörung",
...); before match rates against a closed ground-truth taxonomy can be
computed, each free-text label is normalized (trimmed and case-folded,
diacritics preserved) and looked up in a mapping table.  Labels absent
from the table stay Unmatched: they count as non-matches and are surfaced
separately so vocabulary drift is visible instead of silently penalized.

Only the primary label participates in matching; secondary labels are
reported by callers but never matched.
"""

from __future__ import annotations

import functools
import json
import unicodedata
from dataclasses import dataclass
from importlib import resources
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from .errors import InputError, SchemaError, W_UNMATCHED_LABEL, warn
from .model import CORPUS_EMOTIONS, CorpusEmotion, SegmentAnnotation


def normalize_label(label: str) -> str:
    """Trim and case-fold a label; diacritics are preserved."""
    return unicodedata.normalize("NFC", label).strip().casefold()


@dataclass(frozen=True)
class MappingTable:
    """Normalized label -> closed category lookup table."""

    entries: Mapping[str, CorpusEmotion]

    def __post_init__(self) -> None:
        entries = dict(self.entries)
        for key, cat in entries.items():
            if not isinstance(key, str) or normalize_label(key) != key or not key:
                raise SchemaError(f"mapping key {key!r} is not a normalized label")
            if not isinstance(cat, CorpusEmotion):
                raise SchemaError(f"mapping value for {key!r} is not a closed category: {cat!r}")
        object.__setattr__(self, "entries", MappingProxyType(entries))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Any]]) -> "MappingTable":
        entries: dict[str, CorpusEmotion] = {}
        for raw_label, cat_name in pairs:
            if not isinstance(raw_label, str) or not raw_label.strip():
                raise SchemaError(f"mapping label must be a non-empty string, got {raw_label!r}")
            key = normalize_label(raw_label)
            if key in entries:
                raise SchemaError(f"duplicate mapping key after normalization: {key!r}")
            try:
                entries[key] = CorpusEmotion(cat_name)
            except ValueError:
                raise SchemaError(
                    f"unknown target category {cat_name!r} for label {raw_label!r}"
                ) from None
        return cls(entries)


@functools.lru_cache(maxsize=1)
def default_mapping() -> MappingTable:
    """The shipped default table for German open-vocabulary labels."""
    text = resources.files("triaffect").joinpath("data", "default_mapping.json").read_text("utf-8")
    return MappingTable.from_pairs(json.loads(text, object_pairs_hook=lambda p: p))


def load_mapping(path) -> MappingTable:
    """Load a mapping.json file (flat object: label -> category name)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read mapping file {path}: {exc}") from exc
    try:
        pairs = json.loads(text, object_pairs_hook=lambda p: p)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"mapping file {path} is not valid JSON: {exc}") from exc
    if not isinstance(pairs, list):
        raise SchemaError(f"mapping file {path} must be a flat JSON object")
    try:
        return MappingTable.from_pairs(pairs)
    except SchemaError as exc:
        raise SchemaError(f"mapping file {path}: {exc}") from None


def canonicalize(label: str, table: MappingTable) -> CorpusEmotion | None:
    """Map a free-text label to its closed category, or None when unmatched."""
    if not isinstance(label, str) or not label.strip():
        raise InputError(f"canonicalize: empty label {label!r}")
    return table.entries.get(normalize_label(label))


@dataclass(frozen=True)
class CategoryMatch:
    n: int
    match_pct: float
    avg_conf: float


@dataclass(frozen=True)
class MatchReport:
    """Per-category and overall match rates for annotated records.

    ``total_match_pct`` is the micro-average (matched count over total
    count), not the mean of the per-category percentages.
    """

    per_category: Mapping[CorpusEmotion, CategoryMatch]
    total_n: int
    total_match_pct: float
    total_avg_conf: float
    unmatched_labels: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_category", MappingProxyType(dict(self.per_category)))
        object.__setattr__(self, "unmatched_labels", MappingProxyType(dict(self.unmatched_labels)))
        if self.total_n != sum(c.n for c in self.per_category.values()):
            raise SchemaError("match report total_n does not equal the sum of category counts")


def match_report(
    records: Iterable[tuple[CorpusEmotion, SegmentAnnotation]],
    table: MappingTable | None = None,
) -> MatchReport:
    """Compare annotations against ground-truth categories.

    A record matches when its canonicalized primary label equals the
    ground truth.  Confidence is averaged arithmetically per category and
    overall.
    """
    table = default_mapping() if table is None else table
    rows = list(records)
    if not rows:
        raise InputError("match_report: no records")
    n: dict[CorpusEmotion, int] = {}
    matched: dict[CorpusEmotion, int] = {}
    conf_sum: dict[CorpusEmotion, float] = {}
    unmatched: dict[str, int] = {}
    for gt, ann in rows:
        if not isinstance(gt, CorpusEmotion):
            raise SchemaError(f"ground truth must be a closed category, got {gt!r}")
        mapped = canonicalize(ann.primary_emotion, table)
        if mapped is None:
            key = normalize_label(ann.primary_emotion)
            unmatched[key] = unmatched.get(key, 0) + 1
        n[gt] = n.get(gt, 0) + 1
        matched[gt] = matched.get(gt, 0) + (1 if mapped is gt else 0)
        conf_sum[gt] = conf_sum.get(gt, 0.0) + ann.confidence
    for label in sorted(unmatched):
        warn(W_UNMATCHED_LABEL, f"unmatched label {label!r} x{unmatched[label]}")
    per = {
        cat: CategoryMatch(
            n=n[cat],
            match_pct=100.0 * matched[cat] / n[cat],
            avg_conf=conf_sum[cat] / n[cat],
        )
        for cat in CORPUS_EMOTIONS
        if cat in n
    }
    total_n = sum(n.values())
    total_matched = sum(matched.values())
    return MatchReport(
        per_category=per,
        total_n=total_n,
        total_match_pct=100.0 * total_matched / total_n,
        total_avg_conf=sum(conf_sum.values()) / total_n,
        unmatched_labels=dict(sorted(unmatched.items())),
    )


def match_report_csv(report: MatchReport) -> str:
    """Render a report as CSV: category, n, match_pct, avg_conf, plus a Total row.

    Categories are ordered by descending match rate, ties by canonical
    category order.
    """
    order = sorted(
        report.per_category,
        key=lambda c: (-report.per_category[c].match_pct, CORPUS_EMOTIONS.index(c)),
    )
    lines = ["category,n,match_pct,avg_conf"]
    for cat in order:
        row = report.per_category[cat]
        lines.append(f"{cat.value},{row.n},{row.match_pct:.1f},{row.avg_conf:.2f}")
    lines.append(
        f"Total,{report.total_n},{report.total_match_pct:.1f},{report.total_avg_conf:.2f}"
    )
    return "\n".join(lines) + "\n"
