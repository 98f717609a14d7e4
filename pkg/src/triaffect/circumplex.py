"""Projection of discrete emotion-class probabilities onto arousal/valence.

The projection is a plain weighted sum: each class contributes its
probability times a per-class arousal weight and valence weight.  Weights
are data, not code; the embedded default table can be overridden from a
weights.json file so the mapping can be recalibrated without a release.
No clamping is applied after the sum: validation already confines every
weight to [-1, +1], so a valid table cannot push a distribution outside
the circumplex square, and clamping would mask a bad custom table.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from importlib import resources
from types import MappingProxyType
from typing import Any, Mapping

from .errors import InputError, SchemaError
from .model import EMOTION_CLASSES, ClassProbabilities, CircumplexPoint, EmotionClass


@dataclass(frozen=True)
class WeightTable:
    """Per-class arousal and valence weights, each within [-1, +1]."""

    arousal_w: Mapping[EmotionClass, float]
    valence_w: Mapping[EmotionClass, float]

    def __post_init__(self) -> None:
        for attr, table in (("arousal_w", self.arousal_w), ("valence_w", self.valence_w)):
            items = dict(table)
            if set(items) != set(EmotionClass):
                missing = sorted(c.value for c in EmotionClass if c not in items)
                raise SchemaError(f"{attr}: weight table must cover every class (missing={missing})")
            for c, w in items.items():
                if not isinstance(w, (int, float)) or isinstance(w, bool):
                    raise SchemaError(f"{attr}[{c.value}] must be a number, got {w!r}")
                if not -1.0 <= w <= 1.0:
                    raise SchemaError(f"{attr}[{c.value}] out of [-1, +1]: {w!r}")
            object.__setattr__(
                self, attr, MappingProxyType({c: float(items[c]) for c in EMOTION_CLASSES})
            )


def _reject_duplicate_keys(pairs):
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise SchemaError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _table_from_doc(doc: Any, source: str) -> WeightTable:
    if not isinstance(doc, dict) or set(doc) != {"arousal", "valence"}:
        raise SchemaError(
            f"{source}: expected an object with exactly 'arousal' and 'valence' tables"
        )
    tables = {}
    for axis in ("arousal", "valence"):
        raw = doc[axis]
        if not isinstance(raw, dict):
            raise SchemaError(f"{source}: {axis} table must be an object")
        keyed = {}
        for name, w in raw.items():
            try:
                cls = EmotionClass(name)
            except ValueError:
                raise SchemaError(f"{source}: unknown class {name!r} in {axis} table") from None
            keyed[cls] = w
        tables[axis] = keyed
    return WeightTable(arousal_w=tables["arousal"], valence_w=tables["valence"])


@functools.lru_cache(maxsize=1)
def default_weight_table() -> WeightTable:
    """The embedded default projection weights."""
    text = resources.files("triaffect").joinpath("data", "default_weights.json").read_text("utf-8")
    return _table_from_doc(json.loads(text), "default weights")


def load_weight_table(path) -> WeightTable:
    """Load and validate a weights.json file.

    Rejects missing classes, out-of-range weights, and duplicate keys,
    naming the offending class in the error.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read weights file {path}: {exc}") from exc
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"weights file {path} is not valid JSON: {exc}") from exc
    except SchemaError as exc:
        raise SchemaError(f"weights file {path}: {exc}") from None
    return _table_from_doc(doc, f"weights file {path}")


def project(probs: ClassProbabilities, weights: WeightTable | None = None) -> CircumplexPoint:
    """Project a class distribution to a continuous arousal/valence point."""
    wt = default_weight_table() if weights is None else weights
    arousal = sum(probs.prob[c] * wt.arousal_w[c] for c in EMOTION_CLASSES)
    valence = sum(probs.prob[c] * wt.valence_w[c] for c in EMOTION_CLASSES)
    return CircumplexPoint(arousal=arousal, valence=valence)
