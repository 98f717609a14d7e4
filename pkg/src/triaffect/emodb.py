"""Acted-corpus audits from filename metadata.

Acted emotion corpora encode speaker, sentence, and emotion in the file
name.  This module parses such names under a configurable convention,
aggregates a speaker-by-emotion count matrix, flags structural gaps
(cells at or below a count threshold), and assembles a corpus-quality
report.  The convention is configuration rather than code because the
published documentation of such corpora and the actual files are known to
disagree; the shipped default covers the standard scheme of the Berlin
acted corpus (speaker at characters 0-2, sentence code at 2-5, emotion
letter at 5), and the gender table follows the bundled count matrix.

Audio content is never read here; audits operate on manifests and
annotation records only.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import PurePath
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from .errors import InputError, ParseError, SchemaError
from .labelmap import MatchReport
from .model import CORPUS_EMOTIONS, CorpusEmotion, SpeakerEmotionMatrix

# Annotation-quality flag: confidently wrong categories.
FLAG_MATCH_BELOW = 20.0
FLAG_CONF_ABOVE = 0.75


@dataclass(frozen=True)
class FilenameConvention:
    """Character spans and lookup tables for parsing corpus file names."""

    speaker_span: tuple[int, int]
    text_span: tuple[int, int]
    emotion_code_span: tuple[int, int]
    code_table: Mapping[str, CorpusEmotion]
    gender_table: Mapping[str, str]
    name: str = "custom"

    def __post_init__(self) -> None:
        spans = {
            "speaker_span": tuple(self.speaker_span),
            "text_span": tuple(self.text_span),
            "emotion_code_span": tuple(self.emotion_code_span),
        }
        for label, (lo, hi) in spans.items():
            if not (isinstance(lo, int) and isinstance(hi, int) and 0 <= lo < hi):
                raise SchemaError(f"{label} must be a character range [lo, hi), got {(lo, hi)}")
            object.__setattr__(self, label, (lo, hi))
        ordered = sorted(spans.values())
        for (_, prev_hi), (lo, _) in zip(ordered, ordered[1:]):
            if lo < prev_hi:
                raise SchemaError(f"convention spans overlap: {sorted(spans.values())}")
        code_width = spans["emotion_code_span"][1] - spans["emotion_code_span"][0]
        codes = dict(self.code_table)
        for code, cat in codes.items():
            if not isinstance(code, str) or len(code) != code_width:
                raise SchemaError(f"emotion code {code!r} does not fill its span (width {code_width})")
            if not isinstance(cat, CorpusEmotion):
                raise SchemaError(f"emotion code {code!r} maps outside the closed set: {cat!r}")
        genders = dict(self.gender_table)
        for spk, g in genders.items():
            if g not in ("F", "M"):
                raise SchemaError(f"gender for speaker {spk!r} must be 'F' or 'M', got {g!r}")
        object.__setattr__(self, "code_table", MappingProxyType(codes))
        object.__setattr__(self, "gender_table", MappingProxyType(genders))

    @property
    def min_stem_length(self) -> int:
        return max(self.speaker_span[1], self.text_span[1], self.emotion_code_span[1])


@dataclass(frozen=True)
class UtteranceMeta:
    speaker_id: str
    text_code: str
    emotion: CorpusEmotion
    gender: str
    filename: str


@functools.lru_cache(maxsize=1)
def default_convention() -> FilenameConvention:
    text = resources.files("triaffect").joinpath("data", "default_convention.json").read_text("utf-8")
    return _convention_from_doc(json.loads(text), "default convention")


def _convention_from_doc(doc: Any, source: str) -> FilenameConvention:
    if not isinstance(doc, dict):
        raise SchemaError(f"{source}: expected a JSON object")
    required = {"speaker_span", "text_span", "emotion_code_span", "code_table", "gender_table"}
    missing = sorted(required - set(doc))
    if missing:
        raise SchemaError(f"{source}: missing fields {missing}")
    try:
        codes = {
            code: CorpusEmotion(cat) for code, cat in dict(doc["code_table"]).items()
        }
    except ValueError as exc:
        raise SchemaError(f"{source}: code_table maps to unknown category ({exc})") from None
    try:
        return FilenameConvention(
            speaker_span=tuple(doc["speaker_span"]),
            text_span=tuple(doc["text_span"]),
            emotion_code_span=tuple(doc["emotion_code_span"]),
            code_table=codes,
            gender_table=dict(doc["gender_table"]),
            name=doc.get("name", "custom"),
        )
    except SchemaError as exc:
        raise SchemaError(f"{source}: {exc}") from None


def load_convention(path) -> FilenameConvention:
    """Load a convention.json file (spans, code table, gender table)."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read convention file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"convention file {path} is not valid JSON: {exc}") from exc
    return _convention_from_doc(doc, f"convention file {path}")


def parse_filename(name: str, conv: FilenameConvention | None = None) -> UtteranceMeta:
    """Extract speaker, sentence code, emotion, and gender from a file name."""
    conv = default_convention() if conv is None else conv
    stem = PurePath(name.strip()).stem
    if len(stem) < conv.min_stem_length:
        raise ParseError(
            f"{name!r}: stem {stem!r} is shorter than the convention spans"
            f" (need {conv.min_stem_length} characters)"
        )
    speaker = stem[slice(*conv.speaker_span)]
    text_code = stem[slice(*conv.text_span)]
    code = stem[slice(*conv.emotion_code_span)]
    if code not in conv.code_table:
        raise ParseError(f"{name!r}: unknown emotion_code {code!r}")
    if speaker not in conv.gender_table:
        raise ParseError(f"{name!r}: unknown speaker_id {speaker!r}")
    return UtteranceMeta(
        speaker_id=speaker,
        text_code=text_code,
        emotion=conv.code_table[code],
        gender=conv.gender_table[speaker],
        filename=name.strip(),
    )


def read_manifest(path) -> list[str]:
    """Read a manifest file: one file name per line, blanks ignored."""
    try:
        with open(path, encoding="utf-8") as fh:
            return [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from exc


def build_matrix(metas: Iterable[UtteranceMeta]) -> SpeakerEmotionMatrix:
    """Count utterances per (speaker, emotion); absent combinations are 0."""
    metas = list(metas)
    gender: dict[str, str] = {}
    for m in metas:
        if gender.setdefault(m.speaker_id, m.gender) != m.gender:
            raise InputError(f"speaker {m.speaker_id!r} appears with conflicting genders")
    counts = {(s, c): 0 for s in gender for c in CORPUS_EMOTIONS}
    for m in metas:
        counts[(m.speaker_id, m.emotion)] += 1
    return SpeakerEmotionMatrix(counts=counts, speaker_gender=gender)


def detect_gaps(
    matrix: SpeakerEmotionMatrix, threshold: int
) -> list[tuple[str, CorpusEmotion, int]]:
    """All cells with count <= threshold, sorted by (count, speaker, emotion)."""
    if not isinstance(threshold, int) or threshold < 0:
        raise InputError(f"threshold must be a non-negative integer, got {threshold!r}")
    hits = [
        (spk, cat, matrix.cell(spk, cat))
        for spk in matrix.speakers
        for cat in CORPUS_EMOTIONS
        if matrix.cell(spk, cat) <= threshold
    ]
    hits.sort(key=lambda t: (t[2], t[0], CORPUS_EMOTIONS.index(t[1])))
    return hits


def audit_report(
    matrix: SpeakerEmotionMatrix,
    match_report: MatchReport | None = None,
    gap_threshold: int = 1,
    convention_name: str | None = None,
) -> dict[str, Any]:
    """Assemble the corpus-quality report as a JSON-ready dict.

    Includes the count matrix, the class-imbalance ratio (largest over
    smallest category total), cells at or below ``gap_threshold``, and,
    when annotation results are supplied, per-category match/confidence
    pairs with confidently-wrong categories flagged.
    """
    if not matrix.speakers:
        raise InputError("audit_report: empty matrix")
    col_totals = {c.value: matrix.column_total(c) for c in CORPUS_EMOTIONS}
    smallest = min(col_totals.values())
    imbalance = max(col_totals.values()) / smallest if smallest else None
    report: dict[str, Any] = {
        "convention": convention_name,
        "speakers": matrix.speakers,
        "categories": [c.value for c in CORPUS_EMOTIONS],
        "matrix": {
            spk: {c.value: matrix.cell(spk, c) for c in CORPUS_EMOTIONS}
            for spk in matrix.speakers
        },
        "speaker_gender": {spk: matrix.speaker_gender[spk] for spk in matrix.speakers},
        "row_totals": {spk: matrix.row_total(spk) for spk in matrix.speakers},
        "column_totals": col_totals,
        "grand_total": matrix.grand_total(),
        "imbalance_ratio": imbalance,
        "gap_threshold": gap_threshold,
        "gaps": [
            {"speaker_id": spk, "category": cat.value, "count": n}
            for spk, cat, n in detect_gaps(matrix, gap_threshold)
        ],
        "annotation_quality": None,
    }
    if match_report is not None:
        per = {}
        flagged = []
        for cat in CORPUS_EMOTIONS:
            row = match_report.per_category.get(cat)
            if row is None:
                continue
            flag = row.match_pct < FLAG_MATCH_BELOW and row.avg_conf > FLAG_CONF_ABOVE
            per[cat.value] = {
                "n": row.n,
                "match_pct": row.match_pct,
                "avg_conf": row.avg_conf,
                "flagged": flag,
            }
            if flag:
                flagged.append(cat.value)
        report["annotation_quality"] = {
            "per_category": per,
            "flagged": flagged,
            "total_n": match_report.total_n,
            "total_match_pct": match_report.total_match_pct,
            "total_avg_conf": match_report.total_avg_conf,
        }
    return report


def render_audit_text(report: Mapping[str, Any]) -> str:
    """Human-readable rendering of an audit report."""
    cats = report["categories"]
    lines = []
    if report.get("convention"):
        lines.append(f"convention: {report['convention']}")
    header = ["speaker", "G"] + [c[:3] for c in cats] + ["total"]
    lines.append("  ".join(f"{h:>7}" for h in header))
    for spk in report["speakers"]:
        row = report["matrix"][spk]
        cells = [spk, report["speaker_gender"][spk]]
        cells += [str(row[c]) for c in cats]
        cells.append(str(report["row_totals"][spk]))
        lines.append("  ".join(f"{c:>7}" for c in cells))
    totals = ["total", ""] + [str(report["column_totals"][c]) for c in cats]
    totals.append(str(report["grand_total"]))
    lines.append("  ".join(f"{c:>7}" for c in totals))
    if report["imbalance_ratio"] is None:
        lines.append("class imbalance: undefined (a category has zero utterances)")
    else:
        lines.append(f"class imbalance (max/min category): {report['imbalance_ratio']:.2f}")
    if report["gaps"]:
        lines.append(f"cells with count <= {report['gap_threshold']}:")
        for gap in report["gaps"]:
            lines.append(f"  speaker {gap['speaker_id']} {gap['category']}: {gap['count']}")
    else:
        lines.append(f"no cells with count <= {report['gap_threshold']}")
    quality = report.get("annotation_quality")
    if quality:
        lines.append(
            f"annotation match: {quality['total_match_pct']:.1f}% of {quality['total_n']}"
            f" at mean confidence {quality['total_avg_conf']:.2f}"
        )
        for cat in quality["flagged"]:
            row = quality["per_category"][cat]
            lines.append(
                f"  flagged {cat}: {row['match_pct']:.1f}% match at"
                f" {row['avg_conf']:.2f} confidence (confident but wrong)"
            )
    return "\n".join(lines) + "\n"
