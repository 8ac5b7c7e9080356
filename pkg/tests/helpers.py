"""Shared fixture builders: messy-but-valid generation records and literal
resources."""

import random

from cskb.core import (
    Assertion,
    GenerationRecord,
    PREDICATES,
    PredicateKind,
    ResourceId,
    ResourceKind,
)
from cskb.pipeline import assign_ranks
from cskb.query import Resource

SUBJECT_POOL = [
    "rabbit", "elephant", "doctor", "bike", "chicken", "librarian",
    "airplane", "scrap paper", "car", "lion", "supermarket", "wombat",
]

OBJECT_WORDS = [
    "meadow", "wilderness", "zoo", "cage", "pet store", "library", "desk",
    "cabinet", "sock drawer", "wheels", "patients", "patient", "medication",
    "drug", "roar", "seeds", "peel", "beaches", "airport", "paper airplane",
    "two", "four", "good", "useful", "plastic", "wood", "breathe", "swallow",
    # overlap with the subject pool so join queries find matches
    "chicken", "doctor", "bike", "rabbit", "eat chicken", "eat rabbits",
]

# A fixed logprob list so that some distinct records share an exact score,
# exercising the deterministic tie-breaks.
TIE_LOGPROBS = (-0.25, -0.5)


def random_records(rng: random.Random, n: int) -> list[GenerationRecord]:
    """Messy but valid generation records: repeated objects (dedup), casing
    and whitespace noise (normalization), shared scores (tie-breaks)."""
    records = []
    for i in range(n):
        subject = rng.choice(SUBJECT_POOL)
        if rng.random() < 0.2:
            subject = "  " + subject.title() + " "
        predicate = rng.choice(PREDICATES)
        words = rng.sample(OBJECT_WORDS, rng.randint(1, 3))
        object_text = " ".join(words)
        if rng.random() < 0.2:
            object_text = object_text.title() + "."
        if rng.random() < 0.15:
            logprobs = TIE_LOGPROBS
        else:
            logprobs = tuple(
                round(rng.uniform(-3.0, 0.0), 6) for _ in range(rng.randint(1, 6))
            )
        records.append(
            GenerationRecord(
                subject=subject,
                predicate=predicate,
                object_text=object_text,
                token_logprobs=logprobs,
                model="test-lm",
                beam_index=i % 10,
            )
        )
    return records


def make_resource(
    triples: list[tuple[str, PredicateKind, str, float | None]],
    name: str = "fixture",
    kind: ResourceKind = ResourceKind.generated,
) -> Resource:
    """Resource from literal (subject, predicate, object, score) rows."""
    rid = ResourceId(name=name, kind=kind)
    assertions = [
        Assertion(subject=s, predicate=p, object=o, score=score, resource=rid)
        for s, p, o, score in triples
    ]
    return Resource(rid, assign_ranks(assertions))
