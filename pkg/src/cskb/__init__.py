"""cskb: materialize, rank, query and evaluate commonsense knowledge bases
generated by fine-tuned language models."""

from .core import (
    Assertion,
    Dimension,
    GenerationRecord,
    GroundTruthSentence,
    JudgementRow,
    PredicateKind,
    PREDICATES,
    ResourceId,
    ResourceKind,
    SentenceEmbedding,
    parse_predicate,
)
from .pipeline import (
    PipelineConfig,
    assign_ranks,
    build_resource,
    compute_beam_score,
    deduplicate,
    normalize_text,
    retain_top_k,
)
from .query import Catalog, Resource

__version__ = "0.1.0"

__all__ = [
    "Assertion",
    "Catalog",
    "Dimension",
    "GenerationRecord",
    "GroundTruthSentence",
    "JudgementRow",
    "PREDICATES",
    "PipelineConfig",
    "PredicateKind",
    "Resource",
    "ResourceId",
    "ResourceKind",
    "SentenceEmbedding",
    "assign_ranks",
    "build_resource",
    "compute_beam_score",
    "deduplicate",
    "normalize_text",
    "parse_predicate",
    "retain_top_k",
    "__version__",
]
