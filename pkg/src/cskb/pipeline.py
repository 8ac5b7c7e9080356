"""Turns raw generation records into a finished, ranked resource:
beam scoring -> normalization -> deduplication -> per-pair top-k -> ranks.
"""

import json
import math
from pathlib import Path
from typing import IO, Iterable, NamedTuple

from .core import Assertion, GenerationRecord, PredicateKind, ResourceId
from .errors import EmptySequence
from .ingest import IngestReport, write_assertion_table
from .query import Resource
from .text import collapse_whitespace, normalize_text

__all__ = [
    "PipelineConfig",
    "compute_beam_score",
    "normalize_text",
    "deduplicate",
    "retain_top_k",
    "assign_ranks",
    "build_resource",
    "write_resource",
]


class PipelineConfig(NamedTuple):
    top_k_per_pair: int = 10
    keep_training_duplicates: bool = False


def compute_beam_score(token_logprobs: Iterable[float]) -> float:
    """Beam score of a completion: the sum of its per-token log-probabilities.

    Uses exact summation, so the result is independent of token order and
    additive over concatenated token lists. Not length-normalized.
    """
    values = list(token_logprobs)
    if not values:
        raise EmptySequence("cannot score an empty token list")
    return math.fsum(values)


def _sort_key(assertion: Assertion) -> tuple:
    # Descending score; scoreless assertions sort after all scored ones and
    # keep their input (ingestion) order via sort stability. Ties among
    # scored assertions break by canonical predicate order, then object,
    # then subject, so ranks are reproducible across runs and platforms.
    if assertion.score is None:
        return (1, 0.0, 0, "", "")
    return (
        0,
        -assertion.score,
        assertion.predicate.order,
        normalize_text(assertion.object),
        assertion.subject,
    )


def deduplicate(assertions: list[Assertion]) -> list[Assertion]:
    """One survivor per (subject, predicate, normalized object).

    The survivor is the copy with the highest score (an absent score loses
    to any present one; equal scores keep the first copy seen) and retains
    its own surface object, so natural casing survives into presentation.
    """
    best: dict[tuple[str, PredicateKind, str], Assertion] = {}
    for a in assertions:
        key = (a.subject, a.predicate, normalize_text(a.object))
        incumbent = best.get(key)
        if incumbent is None:
            best[key] = a
        elif a.score is not None and (incumbent.score is None or a.score > incumbent.score):
            best[key] = a
    return list(best.values())


def retain_top_k(assertions: list[Assertion], config: PipelineConfig) -> list[Assertion]:
    """Keep the top_k_per_pair highest-scored assertions of each
    (subject, predicate) pair, using the same ordering as rank assignment."""
    pairs: dict[tuple[str, PredicateKind], list[Assertion]] = {}
    for a in assertions:
        pairs.setdefault((a.subject, a.predicate), []).append(a)
    kept: list[Assertion] = []
    for members in pairs.values():
        members.sort(key=_sort_key)
        kept.extend(members[: config.top_k_per_pair])
    return kept


def assign_ranks(assertions: list[Assertion]) -> list[Assertion]:
    """Assign 1-based local (per subject-predicate pair), subject and global
    ranks by descending score with deterministic tie-breaks.

    Training assertions without scores are ranked by ingestion order.
    Returns a new list in global-rank order.
    """
    ordered = sorted(assertions, key=_sort_key)
    local_seen: dict[tuple[str, PredicateKind], int] = {}
    subject_seen: dict[str, int] = {}
    ranked: list[Assertion] = []
    for global_rank, a in enumerate(ordered, start=1):
        subject_key = normalize_text(a.subject)
        pair_key = (subject_key, a.predicate)
        local = local_seen.get(pair_key, 0) + 1
        local_seen[pair_key] = local
        per_subject = subject_seen.get(subject_key, 0) + 1
        subject_seen[subject_key] = per_subject
        ranked.append(
            a._replace(local_rank=local, subject_rank=per_subject, global_rank=global_rank)
        )
    return ranked


def build_resource(
    records: Iterable[GenerationRecord],
    resource: ResourceId,
    config: PipelineConfig = PipelineConfig(),
    training: Resource | None = None,
) -> Resource:
    """Run the full pipeline over generation records and return the finished,
    indexed resource.

    Subjects are normalized; objects keep a whitespace-cleaned surface form
    and are deduplicated on their normalized form. Records whose subject or
    object normalizes to the empty string are dropped (counted in metadata).
    When a training resource is supplied and keep_training_duplicates is
    False, generations exactly matching a training triple are dropped; by
    default nothing is dropped against training data.
    """
    scored: list[Assertion] = []
    dropped_empty = 0
    record_count = 0
    for record in records:
        record_count += 1
        subject = normalize_text(record.subject)
        surface = collapse_whitespace(record.object_text)
        if not subject or not normalize_text(surface):
            dropped_empty += 1
            continue
        scored.append(
            Assertion(
                subject=subject,
                predicate=record.predicate,
                object=surface,
                score=compute_beam_score(record.token_logprobs),
                resource=resource,
            )
        )

    deduped = deduplicate(scored)

    dropped_training = 0
    if training is not None and not config.keep_training_duplicates:
        known = {
            (a.subject, a.predicate, normalize_text(a.object)) for a in training.assertions
        }
        before = len(deduped)
        deduped = [
            a for a in deduped if (a.subject, a.predicate, normalize_text(a.object)) not in known
        ]
        dropped_training = before - len(deduped)

    kept = retain_top_k(deduped, config)
    ranked = assign_ranks(kept)
    meta = {
        "config": {
            "top_k_per_pair": config.top_k_per_pair,
            "keep_training_duplicates": config.keep_training_duplicates,
        },
        "counts": {
            "records_in": record_count,
            "dropped_empty": dropped_empty,
            "after_dedup": len(deduped) + dropped_training,
            "dropped_training_duplicates": dropped_training,
            "assertions": len(ranked),
        },
        # Stage order is fixed: dedup runs before per-pair top-k retention.
        "stage_order": ["score", "normalize", "deduplicate", "retain_top_k", "assign_ranks"],
    }
    return Resource(resource, ranked, meta=meta)


def write_resource(resource: Resource, path: str | Path, out: IO[str] | None = None) -> Path:
    """Emit the 4-column assertion TSV plus a JSON metadata sidecar
    (<path>.meta.json) describing the resource and its build counts."""
    path = Path(path)
    if out is not None:
        write_assertion_table(resource.assertions, out)
    else:
        with path.open("w", encoding="utf-8") as fh:
            write_assertion_table(resource.assertions, fh)
    sidecar = path.with_name(path.name + ".meta.json")
    sidecar.write_text(
        json.dumps(
            {
                "name": resource.id.name,
                "kind": resource.id.kind.value,
                "size": len(resource),
                **resource.meta,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return path
