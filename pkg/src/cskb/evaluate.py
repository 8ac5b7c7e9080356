"""Quantitative evaluation: recall against property-norm ground truth via
embedding similarity, precision sampling for crowdsourcing, and judgement
aggregation."""

import csv
import random
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, NamedTuple

import numpy as np

from .core import Assertion, Dimension, GroundTruthSentence, JudgementRow, SentenceEmbedding
from .errors import DimensionMismatch, EmptySample, PoolTooSmall
from .ingest import EmbeddingStore, IngestReport
from .query import Resource
from .text import normalize_text
from .verbalize import TemplateTable, verbalize


class RecallConfig(NamedTuple):
    top_n_per_subject: int = 100
    threshold: float = 0.98

    def validated(self) -> "RecallConfig":
        if self.top_n_per_subject < 1:
            raise ValueError(f"top_n_per_subject must be >= 1: {self.top_n_per_subject}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1]: {self.threshold}")
        return self


@dataclass
class RecallResult:
    """Coverage of the ground truth by one resource.

    `total`/`recall` use all ground-truth sentences as the denominator;
    `covered_total`/`covered_recall` restrict it to sentences whose concept
    occurs among the resource's subjects (both readings are reported since
    the choice moves the number).
    """

    matched: int
    total: int
    covered_total: int
    per_concept: dict[str, tuple[int, int]]
    config: RecallConfig

    @property
    def recall(self) -> float:
        return self.matched / self.total if self.total else 0.0

    @property
    def covered_recall(self) -> float:
        return self.matched / self.covered_total if self.covered_total else 0.0


def cosine_similarity(u: SentenceEmbedding, v: SentenceEmbedding) -> float:
    """Cosine of the angle between two embeddings, in [-1, 1].

    Clamped to the codomain: denormal-scale components can make the raw
    quotient overshoot +/-1 by rounding.
    """
    if u.vector.shape != v.vector.shape:
        raise DimensionMismatch(
            f"dimension {u.vector.shape[0]} vs {v.vector.shape[0]}"
        )
    nu = float(np.linalg.norm(u.vector))
    nv = float(np.linalg.norm(v.vector))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity is undefined for zero vectors")
    value = float(np.dot(u.vector, v.vector) / (nu * nv))
    return max(-1.0, min(1.0, value))


# Guards the threshold comparison against float rounding in unit-vector dot
# products, so exact-duplicate sentences always count as similarity 1.0.
_SIM_EPSILON = 1e-12


def _best_match_ranks(
    resource: Resource,
    ground_truth: list[GroundTruthSentence],
    embeddings: EmbeddingStore,
    threshold: float,
    max_n: int,
    templates: TemplateTable | None,
) -> list[int | None]:
    """For each ground-truth sentence, the smallest subject rank at which
    some same-concept assertion verbalizes to a sentence with similarity
    >= threshold; None when nothing within max_n matches.

    Raises MissingEmbedding for any ground-truth or candidate sentence
    absent from the store: silent drops would bias recall.
    """
    by_subject = resource.indexes.by_subject
    # One candidate matrix per concept, shared by all its sentences.
    concept_cache: dict[str, tuple[np.ndarray, list[int]]] = {}

    def candidates(concept: str) -> tuple[np.ndarray, list[int]]:
        cached = concept_cache.get(concept)
        if cached is None:
            rows = [a for a in by_subject.get(concept, []) if a.subject_rank <= max_n]
            vectors = [embeddings.unit(verbalize(a, templates)) for a in rows]
            matrix = np.vstack(vectors) if vectors else np.empty((0, embeddings.dim or 0))
            cached = (matrix, [a.subject_rank for a in rows])
            concept_cache[concept] = cached
        return cached

    ranks: list[int | None] = []
    for gt in ground_truth:
        matrix, subject_ranks = candidates(normalize_text(gt.concept))
        if not subject_ranks:
            ranks.append(None)
            continue
        sims = matrix @ embeddings.unit(gt.sentence)
        matched = [r for r, s in zip(subject_ranks, sims) if s >= threshold - _SIM_EPSILON]
        ranks.append(min(matched) if matched else None)
    return ranks


def recall_at(
    resource: Resource,
    ground_truth: list[GroundTruthSentence],
    embeddings: EmbeddingStore,
    config: RecallConfig = RecallConfig(),
    templates: TemplateTable | None = None,
) -> RecallResult:
    """Fraction of ground-truth sentences covered by the resource when it is
    restricted to its top-n assertions per subject.

    A sentence counts as matched iff some assertion whose subject equals
    the sentence's concept, within the restriction, verbalizes to a
    sentence with cosine similarity >= the threshold.
    """
    config = config.validated()
    ranks = _best_match_ranks(
        resource, ground_truth, embeddings, config.threshold, config.top_n_per_subject, templates
    )
    by_subject = resource.indexes.by_subject
    matched = 0
    covered_total = 0
    per_concept: dict[str, tuple[int, int]] = {}
    for gt, rank in zip(ground_truth, ranks):
        concept = normalize_text(gt.concept)
        hit = rank is not None
        matched += hit
        covered_total += concept in by_subject
        m, t = per_concept.get(concept, (0, 0))
        per_concept[concept] = (m + hit, t + 1)
    return RecallResult(
        matched=matched,
        total=len(ground_truth),
        covered_total=covered_total,
        per_concept=per_concept,
        config=config,
    )


def recall_curve(
    resource: Resource,
    ground_truth: list[GroundTruthSentence],
    embeddings: EmbeddingStore,
    threshold: float,
    n_values: list[int],
    templates: TemplateTable | None = None,
) -> list[tuple[int, float]]:
    """Recall at each top-n restriction (ascending n); non-decreasing in n.

    Similarities are computed once at the largest n; each point counts the
    sentences whose best match sits within that n, which is exactly
    recall_at's definition restated.
    """
    if list(n_values) != sorted(n_values):
        raise ValueError("n_values must be ascending")
    if not n_values:
        return []
    ranks = _best_match_ranks(
        resource, ground_truth, embeddings, threshold, max(n_values), templates
    )
    total = len(ground_truth)
    curve = []
    for n in n_values:
        matched = sum(1 for r in ranks if r is not None and r <= n)
        curve.append((n, matched / total if total else 0.0))
    return curve


# ---------------------------------------------------------------------------
# Precision sampling and judgement aggregation


class SamplingConfig(NamedTuple):
    dimension: Dimension
    sample_size: int = 500
    top_n_per_subject: int = 100
    seed: int = 0


def default_sampling(dimension: Dimension, seed: int = 0) -> SamplingConfig:
    """Standard configs: typicality samples from top-100 assertions per
    subject, saliency from top-10; 500 draws either way."""
    top_n = 10 if dimension is Dimension.saliency else 100
    return SamplingConfig(dimension=dimension, top_n_per_subject=top_n, seed=seed)


def sample_for_annotation(
    resource: Resource,
    config: SamplingConfig,
    templates: TemplateTable | None = None,
) -> list[tuple[Assertion, str]]:
    """Uniform sample without replacement from the top-n-per-subject pool,
    verbalized for annotators. Deterministic for a fixed seed."""
    if config.sample_size < 1:
        raise ValueError(f"sample_size must be >= 1: {config.sample_size}")
    pool = [a for a in resource.assertions if a.subject_rank <= config.top_n_per_subject]
    if len(pool) < config.sample_size:
        raise PoolTooSmall(len(pool), config.sample_size)
    rng = random.Random(config.seed)
    picked = rng.sample(range(len(pool)), config.sample_size)
    return [(pool[i], verbalize(pool[i], templates)) for i in picked]


class Label(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNLABELLED = "unlabelled"


def label_from_judgements(
    rows: Iterable[JudgementRow], dimension: Dimension
) -> dict[tuple[str, str, str], Label]:
    """Majority-vote labels per assertion on one dimension.

    Ratings 3 and 4 are positive votes (Typical/Salient), 1 and 2 negative;
    no-judgement rows are excluded from the vote. A strict majority decides;
    an exact tie or zero remaining votes leaves the assertion Unlabelled.
    """
    votes: dict[tuple[str, str, str], list[int]] = {}
    for row in rows:
        if row.dimension != dimension:
            continue
        votes.setdefault(row.assertion_key, [])
        if row.rating is None:
            continue
        if row.rating not in (1, 2, 3, 4):
            raise ValueError(f"rating must be 1..4 or no-judgement: {row.rating!r}")
        votes[row.assertion_key].append(1 if row.rating >= 3 else -1)
    labels: dict[tuple[str, str, str], Label] = {}
    for key, cast in votes.items():
        balance = sum(cast)
        if balance > 0:
            labels[key] = Label.POSITIVE
        elif balance < 0:
            labels[key] = Label.NEGATIVE
        else:
            labels[key] = Label.UNLABELLED
    return labels


class PrecisionReport(NamedTuple):
    dimension: Dimension
    positive_pct: float
    negative_pct: float
    unlabelled_pct: float
    sample_size: int


def precision_report(
    labels: dict[tuple[str, str, str], Label], dimension: Dimension
) -> PrecisionReport:
    """Positive/negative/unlabelled percentages over the sampled assertions,
    rounded to one decimal."""
    if not labels:
        raise EmptySample("no labelled assertions")
    n = len(labels)
    counts = {label: 0 for label in Label}
    for label in labels.values():
        counts[label] += 1
    return PrecisionReport(
        dimension=dimension,
        positive_pct=round(100.0 * counts[Label.POSITIVE] / n, 1),
        negative_pct=round(100.0 * counts[Label.NEGATIVE] / n, 1),
        unlabelled_pct=round(100.0 * counts[Label.UNLABELLED] / n, 1),
        sample_size=n,
    )


# ---------------------------------------------------------------------------
# Crowdsourcing interchange files

_TASK_FIELDS = ["task_id", "subject", "predicate", "object", "sentence", "dimension"]
_JUDGEMENT_FIELDS = ["task_id", "worker", "dimension", "rating"]


def export_annotation_tasks(
    samples: list[tuple[Assertion, str]], dimension: Dimension, out: IO[str]
) -> list[str]:
    """Write the annotation-task CSV and return the generated task ids."""
    writer = csv.DictWriter(out, fieldnames=_TASK_FIELDS)
    writer.writeheader()
    task_ids = []
    for i, (assertion, sentence) in enumerate(samples, start=1):
        task_id = f"{dimension.value}-{i:04d}"
        writer.writerow(
            {
                "task_id": task_id,
                "subject": assertion.subject,
                "predicate": assertion.predicate.value,
                "object": assertion.object,
                "sentence": sentence,
                "dimension": dimension.value,
            }
        )
        task_ids.append(task_id)
    return task_ids


def load_judgements(
    judgements: IO[str], tasks: IO[str]
) -> tuple[list[JudgementRow], IngestReport]:
    """Join the crowd-judgement CSV (task_id, worker, dimension, rating with
    "NA" for no judgement) against the exported task CSV to recover
    assertion keys. Unknown task ids and bad ratings are reported, not fatal.
    """
    key_by_task: dict[str, tuple[str, str, str]] = {}
    for row in csv.DictReader(tasks):
        key_by_task[row["task_id"]] = (row["subject"], row["predicate"], row["object"])

    rows: list[JudgementRow] = []
    report = IngestReport()
    for line_no, row in enumerate(csv.DictReader(judgements), start=2):
        task_id = (row.get("task_id") or "").strip()
        key = key_by_task.get(task_id)
        if key is None:
            report.reject(line_no, f"unknown task_id: {task_id!r}")
            continue
        raw_rating = (row.get("rating") or "").strip()
        rating: int | None
        if raw_rating.upper() == "NA":
            rating = None
        else:
            try:
                rating = int(raw_rating)
            except ValueError:
                report.reject(line_no, f"unparsable rating: {raw_rating!r}")
                continue
            if rating not in (1, 2, 3, 4):
                report.reject(line_no, f"rating out of range: {rating}")
                continue
        try:
            dimension = Dimension((row.get("dimension") or "").strip())
        except ValueError:
            report.reject(line_no, f"unknown dimension: {row.get('dimension')!r}")
            continue
        rows.append(
            JudgementRow(
                assertion_key=key,
                worker=(row.get("worker") or "").strip(),
                dimension=dimension,
                rating=rating,
            )
        )
        report.records_read += 1
    return rows, report


# ---------------------------------------------------------------------------
# Optional embedding service client


class EmbeddingServiceClient:
    """Client for the pluggable embedding HTTP service:
    POST {base}/embed with {"sentences": [...]} -> {"vectors": [[...]]}."""

    def __init__(self, base_url: str, timeout: float = 60.0, batch_size: int = 256):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.batch_size = batch_size

    def embed(self, sentences: list[str], store: EmbeddingStore | None = None) -> EmbeddingStore:
        """Fetch embeddings for the sentences, adding them to (and
        returning) the store."""
        import requests

        store = store or EmbeddingStore()
        for start in range(0, len(sentences), self.batch_size):
            batch = sentences[start : start + self.batch_size]
            response = requests.post(
                f"{self.base_url}/embed", json={"sentences": batch}, timeout=self.timeout
            )
            response.raise_for_status()
            vectors = response.json()["vectors"]
            if len(vectors) != len(batch):
                raise ValueError(
                    f"embedding service returned {len(vectors)} vectors for {len(batch)} sentences"
                )
            for sentence, vector in zip(batch, vectors):
                store.add(sentence, np.asarray(vector, dtype=np.float64))
        return store
