import json
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from triaffect.errors import InputError, IntegrityError, SchemaError
from triaffect.model import (
    CORPUS_EMOTIONS,
    EMOTION_CLASSES,
    ClassProbabilities,
    CircumplexPoint,
    CorpusEmotion,
    EmotionClass,
    PathosScore,
    SegmentAnnotation,
    SegmentRecord,
    SpeakerEmotionMatrix,
    load_bundled_dataset,
    parse_appendix_b,
    parse_figure1_series,
    parse_table6_counts,
)


def one_hot(cls):
    return ClassProbabilities({c: (1.0 if c is cls else 0.0) for c in EmotionClass})


class TestClassProbabilities:
    def test_uniform_ok(self):
        p = ClassProbabilities({c: 1 / 8 for c in EmotionClass})
        assert abs(sum(p.prob.values()) - 1.0) < 1e-12

    def test_small_drift_renormalized(self):
        raw = {c: 1 / 8 for c in EmotionClass}
        raw[EmotionClass.ANGRY] += 5e-4
        p = ClassProbabilities(raw)
        assert abs(sum(p.prob.values()) - 1.0) < 1e-12

    def test_large_drift_rejected(self):
        raw = {c: 1 / 8 for c in EmotionClass}
        raw[EmotionClass.ANGRY] += 5e-3
        with pytest.raises(SchemaError, match="sum"):
            ClassProbabilities(raw)

    def test_missing_class_rejected(self):
        raw = {c: 1 / 7 for c in EmotionClass if c is not EmotionClass.SURPRISED}
        with pytest.raises(SchemaError, match="surprised"):
            ClassProbabilities(raw)

    def test_negative_rejected(self):
        raw = {c: 1 / 8 for c in EmotionClass}
        raw[EmotionClass.SAD] = -0.1
        raw[EmotionClass.HAPPY] = 1 / 8 + 0.1
        with pytest.raises(SchemaError, match="sad"):
            ClassProbabilities(raw)

    def test_from_dict_unknown_class(self):
        raw = one_hot(EmotionClass.HAPPY).to_dict()
        raw["ecstatic"] = raw.pop("happy")
        with pytest.raises(SchemaError, match="ecstatic"):
            ClassProbabilities.from_dict(raw)

    def test_dict_round_trip(self):
        p = one_hot(EmotionClass.FEARFUL)
        assert ClassProbabilities.from_dict(p.to_dict()) == p


class TestScalarTypes:
    def test_point_bounds(self):
        with pytest.raises(SchemaError):
            CircumplexPoint(arousal=1.5, valence=0.0)
        with pytest.raises(SchemaError):
            CircumplexPoint(arousal=0.0, valence=float("nan"))

    @pytest.mark.parametrize("value", [-2, -1, 0, 1, 2])
    def test_pathos_accepts_scale(self, value):
        assert int(PathosScore(value)) == value

    @pytest.mark.parametrize("value", [-3, 3, 0.5, "1", None, True])
    def test_pathos_rejects(self, value):
        with pytest.raises(SchemaError):
            PathosScore(value)

    def test_annotation_ranges(self):
        with pytest.raises(SchemaError, match="confidence"):
            SegmentAnnotation(
                primary_emotion="Wut", arousal=0.1, valence=0.1,
                rhetorical_function="Kritik", confidence=1.2,
            )
        with pytest.raises(SchemaError, match="primary_emotion"):
            SegmentAnnotation(
                primary_emotion="  ", arousal=0.1, valence=0.1,
                rhetorical_function="Kritik", confidence=0.5,
            )


class TestSegmentRecord:
    def test_time_span_invariant(self):
        with pytest.raises(SchemaError, match="end_s > start_s"):
            SegmentRecord(segment_id="x", start_s=2.0, end_s=2.0, transcript="")
        with pytest.raises(SchemaError, match="end_s > start_s"):
            SegmentRecord(segment_id="x", start_s=-1.0, end_s=2.0, transcript="")

    def test_irrelevant_forbids_pathos(self):
        with pytest.raises(SchemaError, match="relevant"):
            SegmentRecord(
                segment_id="x", start_s=0.0, end_s=1.0, transcript="",
                pathos=PathosScore(0), relevant=False,
            )

    def test_round_trip_with_channels(self, appendix_b):
        rec = appendix_b[0]
        again = SegmentRecord.from_dict(rec.to_dict())
        assert again == rec

    def test_umlauts_preserved(self, appendix_b):
        by_id = {r.segment_id: r for r in appendix_b}
        assert by_id["s0004"].transcript.startswith("Über")
        text = json.dumps(by_id["s0004"].to_dict(), ensure_ascii=False)
        assert "Über" in text


annotation_strategy = st.builds(
    SegmentAnnotation,
    primary_emotion=st.text(min_size=1).filter(lambda s: s.strip()),
    arousal=st.floats(-1, 1),
    valence=st.floats(-1, 1),
    rhetorical_function=st.text(max_size=10),
    confidence=st.floats(0, 1),
    secondary_emotion=st.none() | st.text(max_size=10),
)

record_strategy = st.builds(
    lambda sid, start, length, transcript, ann, pathos, relevant: SegmentRecord(
        segment_id=sid,
        start_s=start,
        end_s=start + length,
        transcript=transcript,
        llm_annotation=ann,
        pathos=None if not relevant else pathos,
        relevant=relevant,
    ),
    sid=st.text(min_size=1, max_size=8),
    start=st.floats(0, 1e3),
    length=st.floats(0.01, 60),
    transcript=st.text(max_size=40),
    ann=st.none() | annotation_strategy,
    pathos=st.none() | st.integers(-2, 2).map(PathosScore),
    relevant=st.booleans(),
)


@given(record_strategy)
def test_record_serialization_round_trip(rec):
    assert SegmentRecord.from_dict(json.loads(json.dumps(rec.to_dict()))) == rec


class TestBundledAppendixB:
    def test_shape_and_channels(self, appendix_b):
        assert len(appendix_b) == 41
        assert all(r.relevant for r in appendix_b)
        assert all(r.pathos is not None for r in appendix_b)
        assert all(r.e2v_point is not None for r in appendix_b)
        assert all(r.llm_annotation is not None for r in appendix_b)

    def test_pathos_histogram(self, appendix_b):
        hist = Counter(int(r.pathos) for r in appendix_b)
        assert dict(hist) == {-2: 1, -1: 18, 0: 21, 1: 1}

    def test_anchor_record(self, appendix_b):
        rec = {r.segment_id: r for r in appendix_b}["s0042"]
        assert int(rec.pathos) == 1
        assert rec.llm_annotation.valence == pytest.approx(0.40)
        assert rec.llm_annotation.primary_emotion == "Zuversicht"
        assert rec.llm_annotation.rhetorical_function == "Appell"

    def test_corruption_detected(self, appendix_b):
        doc = [r.to_dict() for r in appendix_b]
        with pytest.raises(IntegrityError, match="41"):
            parse_appendix_b(doc[:40])
        broken = [dict(d) for d in doc]
        del broken[0]["pathos"]
        with pytest.raises(IntegrityError, match="channels"):
            parse_appendix_b(broken)


class TestBundledFigure1:
    def test_counts(self, figure1):
        present = {k: sum(v is not None for v in s) for k, s in figure1.items()}
        assert present == {"gemini_valence": 51, "e2v_arousal": 51, "pathos": 46}

    def test_known_coordinates(self, figure1):
        assert figure1["gemini_valence"][49] == pytest.approx(0.6)
        assert figure1["pathos"][42] == 1

    def test_corruption_detected(self, figure1):
        doc = {k: list(v) for k, v in figure1.items()}
        doc["pathos"][0] = 0
        with pytest.raises(IntegrityError, match="pathos"):
            parse_figure1_series(doc)
        with pytest.raises(IntegrityError, match="series"):
            parse_figure1_series({"gemini_valence": [0.0] * 51})


class TestBundledTable6:
    def test_totals(self, table6):
        assert table6.grand_total() == 535
        assert table6.column_total(CorpusEmotion.ANGER) == 127
        assert table6.row_total("16") == 71
        assert table6.cell("16", CorpusEmotion.DISGUST) == 11
        assert table6.cell("08", CorpusEmotion.DISGUST) == 0

    def test_row_sums_match_stated_totals(self, table6):
        from triaffect.model import _read_bundled

        doc = _read_bundled("table6_counts.json")
        for entry in doc["speakers"]:
            assert table6.row_total(entry["speaker_id"]) == entry["total"]

    def test_corruption_detected(self, table6):
        from triaffect.model import _read_bundled

        doc = _read_bundled("table6_counts.json")
        doc["speakers"][0]["counts"]["Anger"] += 1
        with pytest.raises(IntegrityError, match="row sum"):
            parse_table6_counts(doc)


def test_unknown_bundle_name():
    with pytest.raises(InputError, match="unknown bundled dataset"):
        load_bundled_dataset("appendix_c")


def test_matrix_invariants():
    with pytest.raises(SchemaError, match="non-negative"):
        SpeakerEmotionMatrix(
            counts={("03", CorpusEmotion.ANGER): -1}, speaker_gender={"03": "F"}
        )
    with pytest.raises(SchemaError, match="gender"):
        SpeakerEmotionMatrix(
            counts={("03", CorpusEmotion.ANGER): 1}, speaker_gender={"03": "X"}
        )
    assert CORPUS_EMOTIONS[0] is CorpusEmotion.ANGER
    assert [c.value for c in EMOTION_CLASSES] == sorted(c.value for c in EMOTION_CLASSES)
