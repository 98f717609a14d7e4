"""Three-modality emotion analytics for segmented political speech.

Compares acoustic class-probability projections, open-ended LLM
annotations, and ordinal impact scores over the same speech segments:
circumplex projection, tie-aware rank correlation, descriptive and
rhetorical reports, corpus audits, and an annotation client.
"""

from .circumplex import WeightTable, default_weight_table, load_weight_table, project
from .errors import (
    DegenerateStatisticsError,
    InputError,
    IntegrityError,
    JoinError,
    ParseError,
    ProtocolError,
    SchemaError,
    ToolkitError,
    TransportError,
)
from .model import (
    BUNDLED_DATASETS,
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
)
from .rankstats import (
    CorrelationResult,
    DescriptiveStats,
    average_ranks,
    describe,
    median_consensus,
    p_value,
    pairwise_complete,
    spearman,
)

__version__ = "0.1.0"

__all__ = [
    "BUNDLED_DATASETS",
    "CORPUS_EMOTIONS",
    "EMOTION_CLASSES",
    "ClassProbabilities",
    "CircumplexPoint",
    "CorpusEmotion",
    "CorrelationResult",
    "DegenerateStatisticsError",
    "DescriptiveStats",
    "EmotionClass",
    "InputError",
    "IntegrityError",
    "JoinError",
    "ParseError",
    "PathosScore",
    "ProtocolError",
    "SchemaError",
    "SegmentAnnotation",
    "SegmentRecord",
    "SpeakerEmotionMatrix",
    "ToolkitError",
    "TransportError",
    "WeightTable",
    "average_ranks",
    "default_weight_table",
    "describe",
    "load_bundled_dataset",
    "load_weight_table",
    "median_consensus",
    "p_value",
    "pairwise_complete",
    "project",
    "spearman",
]
