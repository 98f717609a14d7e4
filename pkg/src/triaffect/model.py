"""Shared domain types, their JSON serialization, and the bundled datasets.

All types are immutable after construction and validate their invariants in
``__post_init__``, so a successfully constructed value is always safe to
share across threads.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from importlib import resources
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from .errors import InputError, IntegrityError, SchemaError


class EmotionClass(enum.Enum):
    """The eight acoustic emotion classes, in canonical alphabetical order."""

    ANGRY = "angry"
    DISGUSTED = "disgusted"
    FEARFUL = "fearful"
    HAPPY = "happy"
    NEUTRAL = "neutral"
    OTHER = "other"
    SAD = "sad"
    SURPRISED = "surprised"


EMOTION_CLASSES: tuple[EmotionClass, ...] = tuple(EmotionClass)


class CorpusEmotion(enum.Enum):
    """The seven closed categories of the acted German benchmark corpus."""

    ANGER = "Anger"
    BOREDOM = "Boredom"
    DISGUST = "Disgust"
    FEAR = "Fear"
    HAPPINESS = "Happiness"
    NEUTRAL = "Neutral"
    SADNESS = "Sadness"


CORPUS_EMOTIONS: tuple[CorpusEmotion, ...] = tuple(CorpusEmotion)

# Probability maps whose sum is within _RENORM_TOL of 1 are renormalized
# (float serialization noise); anything further off is rejected as corrupt.
_SUM_TOL = 1e-6
_RENORM_TOL = 1e-3


def _require_number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{what} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise SchemaError(f"{what} must be finite, got {value!r}")
    return float(value)


def _require_range(value: Any, lo: float, hi: float, what: str) -> float:
    v = _require_number(value, what)
    if not lo <= v <= hi:
        raise SchemaError(f"{what} out of [{lo:g}, {hi:g}]: {v!r}")
    return v


@dataclass(frozen=True)
class ClassProbabilities:
    """A probability distribution over the eight emotion classes.

    Every class must be present with a value in [0, 1]; the values must sum
    to 1 within 1e-6 after construction.
    """

    prob: Mapping[EmotionClass, float]

    def __post_init__(self) -> None:
        items = dict(self.prob)
        if set(items) != set(EmotionClass):
            missing = sorted(c.value for c in EmotionClass if c not in items)
            extra = sorted(repr(k) for k in items if k not in EMOTION_CLASSES)
            raise SchemaError(
                "probability map must cover exactly the eight classes"
                f" (missing={missing}, unexpected={extra})"
            )
        values = {c: _require_number(p, f"probability[{c.value}]") for c, p in items.items()}
        for c, p in values.items():
            if p < 0.0 or p > 1.0 + _RENORM_TOL:
                raise SchemaError(f"probability[{c.value}] out of [0, 1]: {p!r}")
        total = sum(values[c] for c in EMOTION_CLASSES)
        if abs(total - 1.0) > _RENORM_TOL:
            raise SchemaError(
                f"probabilities sum to {total:.6f}; expected 1 within {_RENORM_TOL:g}"
            )
        if abs(total - 1.0) > _SUM_TOL:
            values = {c: p / total for c, p in values.items()}
        object.__setattr__(
            self, "prob", MappingProxyType({c: values[c] for c in EMOTION_CLASSES})
        )

    def __getitem__(self, cls: EmotionClass) -> float:
        return self.prob[cls]

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "ClassProbabilities":
        if not isinstance(raw, Mapping):
            raise SchemaError(f"probability map must be an object, got {type(raw).__name__}")
        keyed = {}
        for name, value in raw.items():
            try:
                keyed[EmotionClass(name)] = value
            except ValueError:
                raise SchemaError(f"unknown emotion class {name!r} in probability map") from None
        return cls(keyed)

    def to_dict(self) -> dict[str, float]:
        return {c.value: self.prob[c] for c in EMOTION_CLASSES}


@dataclass(frozen=True)
class CircumplexPoint:
    """A continuous affect location: arousal and valence, both in [-1, +1]."""

    arousal: float
    valence: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "arousal", _require_range(self.arousal, -1.0, 1.0, "arousal"))
        object.__setattr__(self, "valence", _require_range(self.valence, -1.0, 1.0, "valence"))

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "CircumplexPoint":
        if not isinstance(raw, Mapping) or set(raw) != {"arousal", "valence"}:
            raise SchemaError(f"point must have exactly arousal and valence fields, got {raw!r}")
        return cls(arousal=raw["arousal"], valence=raw["valence"])

    def to_dict(self) -> dict[str, float]:
        return {"arousal": self.arousal, "valence": self.valence}


class PathosScore(int):
    """An integer societal-impact score on the five-point scale -2..+2."""

    __slots__ = ()

    def __new__(cls, value: Any) -> "PathosScore":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"pathos score must be an integer, got {value!r}")
        iv = int(value)
        if iv != value or iv not in (-2, -1, 0, 1, 2):
            raise SchemaError(f"pathos score must be an integer in -2..+2, got {value!r}")
        return super().__new__(cls, iv)

    def __repr__(self) -> str:
        return f"PathosScore({int(self):+d})"


@dataclass(frozen=True)
class SegmentAnnotation:
    """One open-ended annotation for a speech segment."""

    primary_emotion: str
    arousal: float
    valence: float
    rhetorical_function: str
    confidence: float
    secondary_emotion: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.primary_emotion, str) or not self.primary_emotion.strip():
            raise SchemaError(f"primary_emotion must be non-empty, got {self.primary_emotion!r}")
        if not isinstance(self.rhetorical_function, str):
            raise SchemaError(
                f"rhetorical_function must be a string, got {self.rhetorical_function!r}"
            )
        if self.secondary_emotion is not None and not isinstance(self.secondary_emotion, str):
            raise SchemaError(
                f"secondary_emotion must be a string or absent, got {self.secondary_emotion!r}"
            )
        object.__setattr__(self, "arousal", _require_range(self.arousal, -1.0, 1.0, "arousal"))
        object.__setattr__(self, "valence", _require_range(self.valence, -1.0, 1.0, "valence"))
        object.__setattr__(
            self, "confidence", _require_range(self.confidence, 0.0, 1.0, "confidence")
        )

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "SegmentAnnotation":
        if not isinstance(raw, Mapping):
            raise SchemaError(f"annotation must be an object, got {type(raw).__name__}")
        required = {"primary_emotion", "arousal", "valence", "rhetorical_function", "confidence"}
        missing = sorted(required - set(raw))
        if missing:
            raise SchemaError(f"annotation missing fields: {missing}")
        unknown = sorted(set(raw) - required - {"secondary_emotion"})
        if unknown:
            raise SchemaError(f"annotation has unknown fields: {unknown}")
        return cls(
            primary_emotion=raw["primary_emotion"],
            secondary_emotion=raw.get("secondary_emotion"),
            arousal=raw["arousal"],
            valence=raw["valence"],
            rhetorical_function=raw["rhetorical_function"],
            confidence=raw["confidence"],
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "primary_emotion": self.primary_emotion,
            "secondary_emotion": self.secondary_emotion,
            "arousal": self.arousal,
            "valence": self.valence,
            "rhetorical_function": self.rhetorical_function,
            "confidence": self.confidence,
        }


@dataclass(frozen=True)
class SegmentRecord:
    """One utterance with its time span, transcript, and measurement channels.

    ``relevant=False`` marks segments excluded from impact scoring; such
    records must not carry a pathos score.
    """

    segment_id: str
    start_s: float
    end_s: float
    transcript: str
    e2v_probs: ClassProbabilities | None = None
    e2v_point: CircumplexPoint | None = None
    llm_annotation: SegmentAnnotation | None = None
    pathos: PathosScore | None = None
    relevant: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.segment_id, str) or not self.segment_id:
            raise SchemaError(f"segment_id must be a non-empty string, got {self.segment_id!r}")
        if not isinstance(self.transcript, str):
            raise SchemaError(f"transcript must be a string, got {self.transcript!r}")
        start = _require_number(self.start_s, "start_s")
        end = _require_number(self.end_s, "end_s")
        if not (end > start >= 0.0):
            raise SchemaError(
                f"segment {self.segment_id}: need end_s > start_s >= 0, got [{start}, {end}]"
            )
        object.__setattr__(self, "start_s", start)
        object.__setattr__(self, "end_s", end)
        if self.pathos is not None and not isinstance(self.pathos, PathosScore):
            object.__setattr__(self, "pathos", PathosScore(self.pathos))
        if not isinstance(self.relevant, bool):
            raise SchemaError(f"relevant must be a boolean, got {self.relevant!r}")
        if not self.relevant and self.pathos is not None:
            raise SchemaError(
                f"segment {self.segment_id}: relevant=false forbids a pathos score"
            )

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "SegmentRecord":
        if not isinstance(raw, Mapping):
            raise SchemaError(f"segment record must be an object, got {type(raw).__name__}")
        known = {
            "segment_id", "start_s", "end_s", "transcript",
            "e2v_probs", "e2v_point", "llm_annotation", "pathos", "relevant",
        }
        unknown = sorted(set(raw) - known)
        if unknown:
            raise SchemaError(f"segment record has unknown fields: {unknown}")
        missing = sorted(k for k in ("segment_id", "start_s", "end_s", "transcript") if k not in raw)
        if missing:
            raise SchemaError(f"segment record missing fields: {missing}")
        probs = raw.get("e2v_probs")
        point = raw.get("e2v_point")
        ann = raw.get("llm_annotation")
        pathos = raw.get("pathos")
        return cls(
            segment_id=raw["segment_id"],
            start_s=raw["start_s"],
            end_s=raw["end_s"],
            transcript=raw["transcript"],
            e2v_probs=None if probs is None else ClassProbabilities.from_dict(probs),
            e2v_point=None if point is None else CircumplexPoint.from_dict(point),
            llm_annotation=None if ann is None else SegmentAnnotation.from_dict(ann),
            pathos=None if pathos is None else PathosScore(pathos),
            relevant=raw.get("relevant", True),
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "segment_id": self.segment_id,
            "start_s": self.start_s,
            "end_s": self.end_s,
            "transcript": self.transcript,
        }
        if self.e2v_probs is not None:
            out["e2v_probs"] = self.e2v_probs.to_dict()
        if self.e2v_point is not None:
            out["e2v_point"] = self.e2v_point.to_dict()
        if self.llm_annotation is not None:
            out["llm_annotation"] = self.llm_annotation.to_dict()
        if self.pathos is not None:
            out["pathos"] = int(self.pathos)
        out["relevant"] = self.relevant
        return out


def load_segments(path) -> list[SegmentRecord]:
    """Read a segments.json file (array of segment records)."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read segments file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"segments file {path} is not valid JSON: {exc}") from exc
    return parse_segments(doc, source=str(path))


def parse_segments(doc: Any, source: str = "segments") -> list[SegmentRecord]:
    if not isinstance(doc, list):
        raise SchemaError(f"{source}: expected a JSON array of segment records")
    records = []
    seen: set[str] = set()
    for i, raw in enumerate(doc):
        try:
            rec = SegmentRecord.from_dict(raw)
        except SchemaError as exc:
            raise SchemaError(f"{source}[{i}]: {exc}") from None
        if rec.segment_id in seen:
            raise SchemaError(f"{source}: duplicate segment_id {rec.segment_id!r}")
        seen.add(rec.segment_id)
        records.append(rec)
    return records


def dump_segments(records: Iterable[SegmentRecord]) -> str:
    return json.dumps([r.to_dict() for r in records], ensure_ascii=False, indent=1) + "\n"


@dataclass(frozen=True)
class SpeakerEmotionMatrix:
    """Utterance counts per (speaker, category) plus speaker genders."""

    counts: Mapping[tuple[str, CorpusEmotion], int]
    speaker_gender: Mapping[str, str]

    def __post_init__(self) -> None:
        counts = dict(self.counts)
        gender = dict(self.speaker_gender)
        for (spk, cat), n in counts.items():
            if not isinstance(spk, str) or not isinstance(cat, CorpusEmotion):
                raise SchemaError(f"bad matrix cell key ({spk!r}, {cat!r})")
            if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                raise SchemaError(f"count for ({spk}, {cat.value}) must be a non-negative integer")
            if spk not in gender:
                raise SchemaError(f"speaker {spk!r} has no gender entry")
        for spk, g in gender.items():
            if g not in ("F", "M"):
                raise SchemaError(f"gender for speaker {spk!r} must be 'F' or 'M', got {g!r}")
        object.__setattr__(self, "counts", MappingProxyType(counts))
        object.__setattr__(self, "speaker_gender", MappingProxyType(gender))

    @property
    def speakers(self) -> list[str]:
        return sorted(self.speaker_gender)

    def cell(self, speaker: str, category: CorpusEmotion) -> int:
        return self.counts.get((speaker, category), 0)

    def row_total(self, speaker: str) -> int:
        return sum(self.cell(speaker, c) for c in CORPUS_EMOTIONS)

    def column_total(self, category: CorpusEmotion) -> int:
        return sum(self.cell(s, category) for s in self.speakers)

    def grand_total(self) -> int:
        return sum(self.counts.values())


BUNDLED_DATASETS = ("appendix_b", "figure1_series", "table6_counts")


def _read_bundled(name: str) -> Any:
    text = resources.files("triaffect").joinpath("data", name).read_text(encoding="utf-8")
    return json.loads(text)


def load_bundled_dataset(name: str):
    """Load one of the bundled reference datasets by identifier.

    * ``appendix_b``: 41 fully measured segment records from the shipped
      parliamentary-speech case study.
    * ``figure1_series``: three aligned index series over all 51 segments
      (LLM valence, acoustic arousal, pathos markers).
    * ``table6_counts``: the speaker-by-emotion utterance count matrix of
      the acted benchmark corpus.
    """
    if name == "appendix_b":
        return parse_appendix_b(_read_bundled("appendix_b.json"))
    if name == "figure1_series":
        return parse_figure1_series(_read_bundled("figure1_series.json"))
    if name == "table6_counts":
        return parse_table6_counts(_read_bundled("table6_counts.json"))
    raise InputError(f"unknown bundled dataset {name!r}; expected one of {BUNDLED_DATASETS}")


def parse_appendix_b(doc: Any) -> tuple[SegmentRecord, ...]:
    try:
        records = parse_segments(doc, source="appendix_b")
    except SchemaError as exc:
        raise IntegrityError(f"appendix_b bundle corrupt: {exc}") from None
    if len(records) != 41:
        raise IntegrityError(f"appendix_b bundle must hold 41 records, found {len(records)}")
    for rec in records:
        if not rec.relevant:
            raise IntegrityError(f"appendix_b record {rec.segment_id} must be relevant")
        if rec.e2v_point is None or rec.llm_annotation is None or rec.pathos is None:
            raise IntegrityError(
                f"appendix_b record {rec.segment_id} must carry all measurement channels"
            )
    return tuple(records)


_FIGURE1_EXPECTED = {"gemini_valence": 51, "e2v_arousal": 51, "pathos": 46}


def parse_figure1_series(doc: Any) -> dict[str, tuple]:
    if not isinstance(doc, dict) or set(doc) != set(_FIGURE1_EXPECTED):
        raise IntegrityError(
            f"figure1_series bundle must hold exactly the series {sorted(_FIGURE1_EXPECTED)}"
        )
    series: dict[str, tuple] = {}
    for name, values in doc.items():
        if not isinstance(values, list) or len(values) != 51:
            raise IntegrityError(f"figure1_series[{name}] must be a list of 51 entries")
        present = [v for v in values if v is not None]
        if len(present) != _FIGURE1_EXPECTED[name]:
            raise IntegrityError(
                f"figure1_series[{name}] must have {_FIGURE1_EXPECTED[name]} points,"
                f" found {len(present)}"
            )
        checked = []
        for i, v in enumerate(values):
            if v is None:
                checked.append(None)
            elif name == "pathos":
                checked.append(int(PathosScore(v)))
            else:
                checked.append(_require_range(v, -1.0, 1.0, f"figure1_series[{name}][{i}]"))
        series[name] = tuple(checked)
    return series


def parse_table6_counts(doc: Any) -> SpeakerEmotionMatrix:
    if not isinstance(doc, dict) or "speakers" not in doc:
        raise IntegrityError("table6_counts bundle must be an object with a speakers list")
    counts: dict[tuple[str, CorpusEmotion], int] = {}
    gender: dict[str, str] = {}
    for entry in doc["speakers"]:
        spk = entry["speaker_id"]
        gender[spk] = entry["gender"]
        row = 0
        for cat in CORPUS_EMOTIONS:
            n = entry["counts"].get(cat.value)
            if n is None:
                raise IntegrityError(f"table6_counts speaker {spk}: missing {cat.value} count")
            counts[(spk, cat)] = n
            row += n
        if row != entry["total"]:
            raise IntegrityError(
                f"table6_counts speaker {spk}: row sum {row} != stated total {entry['total']}"
            )
    try:
        matrix = SpeakerEmotionMatrix(counts=counts, speaker_gender=gender)
    except SchemaError as exc:
        raise IntegrityError(f"table6_counts bundle corrupt: {exc}") from None
    for cat in CORPUS_EMOTIONS:
        stated = doc.get("column_totals", {}).get(cat.value)
        if stated is not None and matrix.column_total(cat) != stated:
            raise IntegrityError(
                f"table6_counts column {cat.value}: sum {matrix.column_total(cat)}"
                f" != stated total {stated}"
            )
    stated_grand = doc.get("grand_total")
    if stated_grand is not None and matrix.grand_total() != stated_grand:
        raise IntegrityError(
            f"table6_counts grand total {matrix.grand_total()} != stated {stated_grand}"
        )
    return matrix
