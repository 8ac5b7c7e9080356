"""Domain types and the closed 13-predicate vocabulary."""

from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import UnknownPredicate


class PredicateKind(Enum):
    """The 13 commonsense predicates. Declaration order is the canonical
    order used for deterministic tie-breaking."""

    AtLocation = "AtLocation"
    CapableOf = "CapableOf"
    Causes = "Causes"
    Desires = "Desires"
    HasA = "HasA"
    HasPrerequisite = "HasPrerequisite"
    HasProperty = "HasProperty"
    HasSubevent = "HasSubevent"
    MadeOf = "MadeOf"
    MotivatedByGoal = "MotivatedByGoal"
    PartOf = "PartOf"
    UsedFor = "UsedFor"
    ReceivesAction = "ReceivesAction"

    @property
    def order(self) -> int:
        """Position in the canonical predicate order (0-based)."""
        return _PREDICATE_ORDER[self]

    def __str__(self) -> str:
        return self.value


PREDICATES: tuple[PredicateKind, ...] = tuple(PredicateKind)
_PREDICATE_ORDER = {p: i for i, p in enumerate(PREDICATES)}
_PREDICATE_BY_LOWER = {p.value.lower(): p for p in PREDICATES}


def parse_predicate(text: str) -> PredicateKind:
    """Parse a predicate name, case-insensitively, into the closed vocabulary.

    Raises UnknownPredicate for anything outside the 13 canonical names
    (e.g. "IsA", "RelatedTo").
    """
    predicate = _PREDICATE_BY_LOWER.get(text.strip().lower())
    if predicate is None:
        raise UnknownPredicate(f"not one of the 13 predicates: {text!r}")
    return predicate


class ResourceKind(str, Enum):
    training = "training"
    generated = "generated"


class ResourceId(NamedTuple):
    """Identifies one knowledge base, e.g. ("GPT2-XL-ConceptNet", generated)."""

    name: str
    kind: ResourceKind


class Assertion(NamedTuple):
    """One (subject, predicate, object) triple with its beam score and ranks.

    score is the natural-log beam score (sum of token log-probabilities,
    always <= 0) or None for training KBs that carry no scores. Rank fields
    are 0 until assigned by the pipeline; afterwards they are 1-based
    positions within the subject-predicate pair (local_rank), the subject
    (subject_rank) and the whole resource (global_rank).
    """

    subject: str
    predicate: PredicateKind
    object: str
    score: float | None = None
    local_rank: int = 0
    subject_rank: int = 0
    global_rank: int = 0
    resource: ResourceId | None = None

    @property
    def key(self) -> tuple[str, PredicateKind, str]:
        return (self.subject, self.predicate, self.object)


class GenerationRecord(NamedTuple):
    """One beam completion emitted by a generator, before scoring."""

    subject: str
    predicate: PredicateKind
    object_text: str
    token_logprobs: tuple[float, ...]
    model: str = ""
    beam_index: int = 0


class GroundTruthSentence(NamedTuple):
    """One human-written property-norm sentence attached to a concept."""

    concept: str
    sentence: str


class SentenceEmbedding(NamedTuple):
    """A dense vector keyed by the exact sentence text it embeds."""

    key: str
    vector: np.ndarray


class Dimension(str, Enum):
    """The two precision dimensions assessed by human annotators."""

    typicality = "typicality"
    saliency = "saliency"


# Rating value meaning "no judgement": the annotator was not familiar
# with the concepts. Excluded from majority votes.
NO_JUDGEMENT = None


class JudgementRow(NamedTuple):
    """One worker's rating of one assertion on one dimension.

    rating is an integer 1..4 on the Likert scale, or None (no judgement).
    """

    assertion_key: tuple[str, str, str]
    worker: str
    dimension: Dimension
    rating: int | None
