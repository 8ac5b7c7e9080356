"""Parsers for the external data formats: generation records (JSON-Lines),
assertion tables (TSV), ground-truth sentences (TSV) and embedding stores.

Every parser is fault-tolerant per line: bad rows go into an IngestReport
instead of aborting the run, because million-line dumps contain stray rows
and evaluation must state exactly what was dropped. Only stream-level
problems (unreadable input, embedding dimension drift) are hard errors.
"""

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .core import (
    Assertion,
    GenerationRecord,
    GroundTruthSentence,
    ResourceId,
    SentenceEmbedding,
    parse_predicate,
)
from .errors import DimensionMismatch, MissingEmbedding, UnknownPredicate
from .text import normalize_text

Lines = Iterable[str] | IO[str]


@dataclass
class IngestReport:
    """What a parser accepted and what it dropped, line by line."""

    records_read: int = 0
    records_rejected: int = 0
    rejection_reasons: list[tuple[int, str]] = field(default_factory=list)

    def reject(self, line_no: int, reason: str) -> None:
        self.records_rejected += 1
        self.rejection_reasons.append((line_no, reason))

    def summary(self) -> str:
        return f"read {self.records_read}, rejected {self.records_rejected}"


def _lines(stream: Lines) -> Iterable[tuple[int, str]]:
    """(1-based line number, line without trailing newline), BOM stripped."""
    for i, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if i == 1:
            line = line.lstrip("﻿")
        yield i, line


def read_generation_records(stream: Lines) -> tuple[list[GenerationRecord], IngestReport]:
    """Parse JSON-Lines generation records.

    Each line must carry subject, predicate, object_text, token_logprobs,
    model and beam_index. Lines violating the contract (unknown predicate,
    empty or positive log-probabilities, missing fields) are reported, not
    fatal. Blank lines are ignored.
    """
    records: list[GenerationRecord] = []
    report = IngestReport()
    for line_no, line in _lines(stream):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            report.reject(line_no, f"invalid JSON: {exc.msg}")
            continue
        if not isinstance(payload, dict):
            report.reject(line_no, "not a JSON object")
            continue
        try:
            record = _record_from_payload(payload)
        except UnknownPredicate:
            report.reject(line_no, f"unknown predicate: {payload.get('predicate')!r}")
            continue
        except (KeyError, TypeError, ValueError) as exc:
            report.reject(line_no, str(exc))
            continue
        records.append(record)
        report.records_read += 1
    return records, report


def _record_from_payload(payload: dict) -> GenerationRecord:
    missing = [
        k
        for k in ("subject", "predicate", "object_text", "token_logprobs", "model", "beam_index")
        if k not in payload
    ]
    if missing:
        raise KeyError(f"missing fields: {', '.join(missing)}")
    subject = payload["subject"]
    object_text = payload["object_text"]
    if not isinstance(subject, str) or not isinstance(object_text, str):
        raise TypeError("subject and object_text must be strings")
    logprobs = payload["token_logprobs"]
    if not isinstance(logprobs, list) or not logprobs:
        raise ValueError("token_logprobs empty or not a list")
    values = []
    for v in logprobs:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise TypeError("token_logprobs must be numbers")
        if v > 0:
            raise ValueError(f"token logprob > 0: {v}")
        values.append(float(v))
    beam_index = payload["beam_index"]
    if not isinstance(beam_index, int) or isinstance(beam_index, bool) or beam_index < 0:
        raise ValueError(f"beam_index must be a non-negative integer: {beam_index!r}")
    return GenerationRecord(
        subject=subject,
        predicate=parse_predicate(payload["predicate"]),
        object_text=object_text,
        token_logprobs=tuple(values),
        model=str(payload["model"]),
        beam_index=beam_index,
    )


def read_assertion_table(
    stream: Lines, resource: ResourceId
) -> tuple[list[Assertion], IngestReport]:
    """Parse a 3- or 4-column assertion TSV (subject, predicate, object,
    optional score).

    Ranks stay 0 until the pipeline assigns them. Rows with a wrong column
    count, an unparsable or positive score, an unknown predicate or an
    empty subject/object are reported and skipped.
    """
    assertions: list[Assertion] = []
    report = IngestReport()
    for line_no, line in _lines(stream):
        if not line.strip():
            continue
        columns = line.split("\t")
        if len(columns) not in (3, 4):
            report.reject(line_no, f"expected 3 or 4 columns, got {len(columns)}")
            continue
        subject, predicate_text, obj = (c.strip() for c in columns[:3])
        if not normalize_text(subject) or not normalize_text(obj):
            report.reject(line_no, "empty subject or object")
            continue
        try:
            predicate = parse_predicate(predicate_text)
        except UnknownPredicate:
            report.reject(line_no, f"unknown predicate: {predicate_text!r}")
            continue
        score: float | None = None
        if len(columns) == 4:
            try:
                score = float(columns[3])
            except ValueError:
                report.reject(line_no, f"unparsable score: {columns[3]!r}")
                continue
            if score > 0:
                report.reject(line_no, f"score > 0: {score}")
                continue
        assertions.append(
            Assertion(subject=subject, predicate=predicate, object=obj, score=score, resource=resource)
        )
        report.records_read += 1
    return assertions, report


def write_assertion_table(assertions: Iterable[Assertion], out: IO[str]) -> int:
    """Write the 4-column TSV (3 columns when the score is absent).

    Returns the number of rows written. Floats use their shortest
    round-tripping representation, so read(write(x)) is loss-free.
    """
    n = 0
    for a in assertions:
        if a.score is None:
            out.write(f"{a.subject}\t{a.predicate.value}\t{a.object}\n")
        else:
            out.write(f"{a.subject}\t{a.predicate.value}\t{a.object}\t{a.score!r}\n")
        n += 1
    return n


def read_ground_truth(stream: Lines) -> tuple[list[GroundTruthSentence], IngestReport]:
    """Parse 2-column ground-truth TSV: concept, human-written sentence.

    Concepts are normalized on read; sentences keep their surface form.
    Blank lines and rows with an empty concept or sentence are reported
    and skipped.
    """
    sentences: list[GroundTruthSentence] = []
    report = IngestReport()
    for line_no, line in _lines(stream):
        if not line.strip():
            report.reject(line_no, "blank line")
            continue
        columns = line.split("\t")
        if len(columns) != 2:
            report.reject(line_no, f"expected 2 columns, got {len(columns)}")
            continue
        concept = normalize_text(columns[0])
        sentence = columns[1].strip()
        if not concept or not sentence:
            report.reject(line_no, "empty concept or sentence")
            continue
        sentences.append(GroundTruthSentence(concept=concept, sentence=sentence))
        report.records_read += 1
    return sentences, report


class EmbeddingStore:
    """Sentence text -> embedding vector, all sharing one dimension."""

    def __init__(self, dim: int | None = None):
        if dim is not None and dim <= 0:
            raise DimensionMismatch(f"dimension must be positive, got {dim}")
        self._dim = dim
        self._vectors: dict[str, np.ndarray] = {}
        self._units: dict[str, np.ndarray] = {}

    @property
    def dim(self) -> int | None:
        return self._dim

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, sentence: str) -> bool:
        return sentence in self._vectors

    def add(self, sentence: str, vector: np.ndarray) -> bool:
        """Insert or replace. Returns True when an existing key was replaced.

        Rejects vectors of a different dimension (hard error) and zero
        vectors (ValueError; callers report and skip).
        """
        vector = np.asarray(vector, dtype=np.float64)
        if vector.ndim != 1:
            raise DimensionMismatch(f"expected a 1-d vector, got shape {vector.shape}")
        if self._dim is None:
            self._dim = int(vector.shape[0])
        elif vector.shape[0] != self._dim:
            raise DimensionMismatch(
                f"vector of dimension {vector.shape[0]} in a store of dimension {self._dim}"
            )
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise ValueError("zero vector")
        replaced = sentence in self._vectors
        self._vectors[sentence] = vector
        self._units.pop(sentence, None)
        return replaced

    def get(self, sentence: str) -> SentenceEmbedding:
        vector = self._vectors.get(sentence)
        if vector is None:
            raise MissingEmbedding(sentence)
        return SentenceEmbedding(key=sentence, vector=vector)

    def unit(self, sentence: str) -> np.ndarray:
        """Unit-normalized vector, cached (recall evaluation hot path)."""
        cached = self._units.get(sentence)
        if cached is None:
            vector = self._vectors.get(sentence)
            if vector is None:
                raise MissingEmbedding(sentence)
            cached = vector / np.linalg.norm(vector)
            self._units[sentence] = cached
        return cached

    def keys(self) -> Iterable[str]:
        return self._vectors.keys()


def read_embeddings(stream: Lines) -> tuple[EmbeddingStore, IngestReport]:
    """Parse "sentence<TAB>v1 v2 ... vd" lines into an EmbeddingStore.

    The first valid line fixes the dimension d; any later line with a
    different d is a hard DimensionMismatch error. Zero vectors and
    unparsable rows are reported and skipped; duplicate sentence keys
    keep the last vector and add one report row.
    """
    store = EmbeddingStore()
    report = IngestReport()
    for line_no, line in _lines(stream):
        if not line.strip():
            continue
        sentence, sep, vector_text = line.partition("\t")
        if not sep or not sentence:
            report.reject(line_no, "expected 'sentence<TAB>values'")
            continue
        try:
            vector = np.array([float(v) for v in vector_text.split()], dtype=np.float64)
        except ValueError:
            report.reject(line_no, "unparsable vector component")
            continue
        if vector.size == 0:
            report.reject(line_no, "empty vector")
            continue
        try:
            replaced = store.add(sentence, vector)
        except ValueError:
            report.reject(line_no, "zero vector")
            continue
        if replaced:
            report.reject(line_no, f"duplicate sentence key: {sentence!r} (last wins)")
            continue
        report.records_read += 1
    return store, report
