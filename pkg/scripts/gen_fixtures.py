#!/usr/bin/env python3
"""Rebuild the committed test fixtures under tests/data/.

Everything here is derived deterministically from the bundled datasets, so
the fixtures can be regenerated at any time:

* segments.json / trust_scores.json / llm_annotations.json: the bundled
  case-study table split back into its per-channel input files, extended
  with the ten excluded segments (present in the index series but carrying
  no impact score).
* e2v_probs.json: eight-class probability maps solved (linear program) so
  that the default projection reproduces each bundled acoustic point
  exactly; excluded segments get their index-series arousal and valence 0.
* table2_fixture.json: ground-truth/annotation pairs built so the match
  report reproduces the reference per-category rates below.
* emodb_manifest.txt: one filename per utterance realizing the bundled
  speaker-by-emotion count matrix under the default naming convention.
"""

import json
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from triaffect.circumplex import default_weight_table
from triaffect.emodb import default_convention
from triaffect.model import CORPUS_EMOTIONS, EMOTION_CLASSES, load_bundled_dataset

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"

EXCLUDED_IDS = ["s0000", "s0001", "s0002", "s0010", "s0011", "s0012",
                "s0021", "s0026", "s0049", "s0050"]

# Reference per-category annotation rates the table2 fixture realizes:
# category -> (n, match %, mean confidence).
TABLE2_TARGETS = {
    "Neutral": (79, 65.8, 0.83),
    "Sadness": (62, 35.5, 0.80),
    "Happiness": (71, 29.6, 0.83),
    "Anger": (127, 29.1, 0.86),
    "Fear": (69, 27.5, 0.77),
    "Boredom": (81, 12.3, 0.81),
    "Disgust": (46, 0.0, 0.81),
}

# One label that maps to the category, and wrong labels that do not.
MATCHED_LABEL = {
    "Anger": "Verärgerung",
    "Boredom": "Langeweile",
    "Disgust": "Ekel",
    "Fear": "Angst",
    "Happiness": "Freude",
    "Neutral": "Sachlichkeit",
    "Sadness": "Trauer",
}
WRONG_LABELS = {
    "Anger": ["Sachlichkeit", "Bedauern"],
    "Boredom": ["Sachlichkeit", "Gleichgültigkeit"],
    "Disgust": ["Verärgerung", "Verachtung", "Resignation"],
    "Fear": ["Anspannung", "Trauer"],
    "Happiness": ["Sachlichkeit", "Überraschung"],
    "Neutral": ["Langeweile", "Nachdenklichkeit"],
    "Sadness": ["Müdigkeit", "Sachlichkeit"],
}


def dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print("wrote", path.relative_to(ROOT))


def solve_probs(arousal: float, valence: float) -> dict[str, float]:
    """Find an eight-class distribution projecting exactly to (arousal, valence)."""
    wt = default_weight_table()
    wa = np.array([wt.arousal_w[c] for c in EMOTION_CLASSES])
    wv = np.array([wt.valence_w[c] for c in EMOTION_CLASSES])
    a_eq = np.vstack([wa, wv, np.ones(len(EMOTION_CLASSES))])
    b_eq = np.array([arousal, valence, 1.0])
    # Tiny graded objective keeps the chosen vertex deterministic.
    cost = np.linspace(0.0, 0.01, len(EMOTION_CLASSES))
    res = linprog(c=cost, A_eq=a_eq, b_eq=b_eq, bounds=[(0.0, 1.0)] * 8, method="highs")
    if not res.success:
        raise SystemExit(f"no distribution projects to ({arousal}, {valence})")
    p = np.clip(res.x, 0.0, 1.0)
    p = p / p.sum()
    return {c.value: float(v) for c, v in zip(EMOTION_CLASSES, p)}


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    records = load_bundled_dataset("appendix_b")
    fig = load_bundled_dataset("figure1_series")
    span = 232.0 / 51.0

    segments = []
    trust = {}
    e2v = {}
    annotations = {}
    all_ids = sorted({r.segment_id for r in records} | set(EXCLUDED_IDS))
    by_id = {r.segment_id: r for r in records}
    for sid in all_ids:
        idx = int(sid[1:])
        rec = by_id.get(sid)
        segments.append(
            {
                "segment_id": sid,
                "start_s": round(idx * span, 2),
                "end_s": round((idx + 1) * span, 2),
                "transcript": rec.transcript if rec else "",
                "relevant": True,
            }
        )
        if rec is not None:
            trust[sid] = {"pathos": int(rec.pathos), "relevant": True}
            e2v[sid] = solve_probs(rec.e2v_point.arousal, rec.e2v_point.valence)
            annotations[sid] = rec.llm_annotation.to_dict()
        else:
            trust[sid] = {"pathos": None, "relevant": False}
            e2v[sid] = solve_probs(fig["e2v_arousal"][idx], 0.0)
    dump(DATA / "segments.json", segments)
    dump(DATA / "trust_scores.json", trust)
    dump(DATA / "e2v_probs.json", e2v)
    dump(DATA / "llm_annotations.json", {"annotations": annotations})

    # table2 fixture: exact matched counts per category, fixed confidences
    fixture = []
    for cat, (n, pct, conf) in TABLE2_TARGETS.items():
        matched = round(n * pct / 100.0)
        for i in range(n):
            if i < matched:
                label = MATCHED_LABEL[cat]
            else:
                wrong = WRONG_LABELS[cat]
                label = wrong[i % len(wrong)]
            fixture.append(
                {
                    "gt": cat,
                    "annotation": {
                        "primary_emotion": label,
                        "secondary_emotion": None,
                        "arousal": 0.0,
                        "valence": 0.0,
                        "rhetorical_function": "keines",
                        "confidence": conf,
                    },
                }
            )
    dump(DATA / "table2_fixture.json", fixture)

    # manifest realizing the bundled count matrix under the default convention
    conv = default_convention()
    matrix = load_bundled_dataset("table6_counts")
    code_for = {cat: code for code, cat in conv.code_table.items()}
    texts = ["a01", "a02", "a04", "a05", "a07", "b01", "b02", "b03", "b09", "b10"]
    lines = []
    for spk in matrix.speakers:
        for cat in CORPUS_EMOTIONS:
            for k in range(matrix.cell(spk, cat)):
                text = texts[k % len(texts)]
                version = chr(ord("a") + k // len(texts))
                lines.append(f"{spk}{text}{code_for[cat]}{version}.wav")
    (DATA / "emodb_manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("wrote", (DATA / "emodb_manifest.txt").relative_to(ROOT), f"({len(lines)} files)")


if __name__ == "__main__":
    main()
