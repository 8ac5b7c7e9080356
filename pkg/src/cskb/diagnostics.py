"""Mechanical detectors for known generation error patterns (subject
copying, quantity confusion, singular/plural redundancy) plus resource
statistics. All detectors are exact scans over the immutable indexes."""

import json
from dataclasses import dataclass, field
from typing import NamedTuple

from .core import Assertion, PredicateKind
from .query import Resource
from .text import contains_phrase, fold_plural, normalize_text, tokenize

# Closed number lexicon: digit tokens 0..9999 plus small count words.
_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
    "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19, "twenty": 20,
    "dozen": 12,
}
_NUMBER_MASK = "#"


def _is_number_token(token: str) -> bool:
    if token in _NUMBER_WORDS:
        return True
    return token.isdigit() and len(token) <= 4


class CopyRate(NamedTuple):
    copies: int
    total: int
    rate: float
    known_subject: bool = True


def subject_copy_rate(resource: Resource, subject: str) -> CopyRate:
    """How often the subject is echoed inside its own objects.

    Counts objects containing the normalized subject as a consecutive token
    run. An unknown subject yields (0, 0, 0.0) with known_subject=False.
    """
    subject_norm = normalize_text(subject)
    members = resource.indexes.by_subject.get(subject_norm)
    if not members:
        return CopyRate(0, 0, 0.0, known_subject=False)
    needle = tokenize(subject_norm)
    copies = sum(1 for a in members if contains_phrase(tokenize(a.object), needle))
    return CopyRate(copies, len(members), copies / len(members))


class ConflictGroup(NamedTuple):
    """Assertions of one subject-predicate pair whose objects are identical
    up to number tokens ("four wheels" / "two wheels" / ...)."""

    subject: str
    predicate: PredicateKind
    masked_object: str
    members: tuple[Assertion, ...]


def quantity_conflicts(
    resource: Resource,
    subject: str | None = None,
    predicate: PredicateKind | None = None,
) -> list[ConflictGroup]:
    """Find objects that differ only in a number word.

    Objects are tokenized; tokens in the number lexicon are masked; objects
    of one subject-predicate pair that are identical after masking, with at
    least two distinct number-token sequences, form one group ordered by
    local rank. Digit and word forms unify ("2 legs" conflicts with
    "two legs").
    """
    groups: list[ConflictGroup] = []
    subject_norm = normalize_text(subject) if subject is not None else None
    for (pair_subject, pair_predicate), members in resource.indexes.by_subject_predicate.items():
        if subject_norm is not None and pair_subject != subject_norm:
            continue
        if predicate is not None and pair_predicate != predicate:
            continue
        masked: dict[str, list[tuple[Assertion, tuple[str, ...]]]] = {}
        for a in members:
            tokens = tokenize(a.object)
            numbers = tuple(t for t in tokens if _is_number_token(t))
            if not numbers:
                continue
            form = " ".join(_NUMBER_MASK if _is_number_token(t) else t for t in tokens)
            masked.setdefault(form, []).append((a, numbers))
        for form, entries in masked.items():
            if len(entries) < 2 or len({numbers for _, numbers in entries}) < 2:
                continue
            ordered = tuple(a for a, _ in sorted(entries, key=lambda e: e[0].local_rank))
            groups.append(
                ConflictGroup(
                    subject=pair_subject,
                    predicate=pair_predicate,
                    masked_object=form,
                    members=ordered,
                )
            )
    groups.sort(key=lambda g: (g.subject, g.predicate.order, g.masked_object))
    return groups


def plural_redundancy(
    resource: Resource,
    subject: str | None = None,
    predicate: PredicateKind | None = None,
) -> list[tuple[Assertion, Assertion]]:
    """Pairs of same-pair assertions whose objects become equal after
    plural-folding the final token ("visit patient" / "visit patients").

    Deliberately naive suffix folding, not a lemmatizer. Each unordered
    pair is reported once, lower local rank first.
    """
    pairs: list[tuple[Assertion, Assertion]] = []
    subject_norm = normalize_text(subject) if subject is not None else None
    for (pair_subject, pair_predicate), members in resource.indexes.by_subject_predicate.items():
        if subject_norm is not None and pair_subject != subject_norm:
            continue
        if predicate is not None and pair_predicate != predicate:
            continue
        folded: dict[str, list[tuple[Assertion, tuple[str, ...]]]] = {}
        for a in members:
            tokens = tokenize(a.object)
            if not tokens:
                continue
            form = " ".join(tokens[:-1] + (fold_plural(tokens[-1]),))
            folded.setdefault(form, []).append((a, tokens))
        for entries in folded.values():
            if len(entries) < 2:
                continue
            ordered = sorted(entries, key=lambda e: e[0].local_rank)
            for i in range(len(ordered)):
                for j in range(i + 1, len(ordered)):
                    # Same folded form but identical final tokens means the
                    # difference is elsewhere; dedup already rules out full
                    # equality, so require a suffix-level difference.
                    if ordered[i][1][-1] != ordered[j][1][-1]:
                        pairs.append((ordered[i][0], ordered[j][0]))
    pairs.sort(
        key=lambda p: (p[0].subject, p[0].predicate.order, p[0].local_rank, p[1].local_rank)
    )
    return pairs


class ResourceStats(NamedTuple):
    total: int
    per_predicate: dict[PredicateKind, int]
    subjects: int
    mean_objects_per_pair: float


def resource_stats(resource: Resource, top_n: int | None = None) -> ResourceStats:
    """Exact counts over the resource, optionally restricted to the top-n
    assertions per subject (e.g. size at the top-100 restriction)."""
    if top_n is None:
        rows = resource.assertions
    else:
        rows = [a for a in resource.assertions if a.subject_rank <= top_n]
    per_predicate: dict[PredicateKind, int] = {}
    pairs: set[tuple[str, PredicateKind]] = set()
    subjects: set[str] = set()
    for a in rows:
        per_predicate[a.predicate] = per_predicate.get(a.predicate, 0) + 1
        subject = normalize_text(a.subject)
        subjects.add(subject)
        pairs.add((subject, a.predicate))
    mean = len(rows) / len(pairs) if pairs else 0.0
    return ResourceStats(
        total=len(rows),
        per_predicate=per_predicate,
        subjects=len(subjects),
        mean_objects_per_pair=mean,
    )


@dataclass
class DiagnosticsReport:
    """Error-pattern summary for one resource (JSON- and text-renderable)."""

    resource: str
    stats: ResourceStats
    copy_rates: dict[str, CopyRate] = field(default_factory=dict)
    quantity_groups: list[ConflictGroup] = field(default_factory=list)
    plural_pairs: list[tuple[Assertion, Assertion]] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "resource": self.resource,
            "stats": {
                "total": self.stats.total,
                "per_predicate": {p.value: n for p, n in sorted(
                    self.stats.per_predicate.items(), key=lambda kv: kv[0].order
                )},
                "subjects": self.stats.subjects,
                "mean_objects_per_pair": self.stats.mean_objects_per_pair,
            },
            "subject_copy_rates": {
                s: {"copies": r.copies, "total": r.total, "rate": r.rate}
                for s, r in self.copy_rates.items()
            },
            "quantity_conflicts": [
                {
                    "subject": g.subject,
                    "predicate": g.predicate.value,
                    "masked_object": g.masked_object,
                    "objects": [a.object for a in g.members],
                    "local_ranks": [a.local_rank for a in g.members],
                }
                for g in self.quantity_groups
            ],
            "plural_redundancy": [
                {
                    "subject": a.subject,
                    "predicate": a.predicate.value,
                    "objects": [a.object, b.object],
                }
                for a, b in self.plural_pairs
            ],
        }
        return json.dumps(payload, indent=2)

    def to_text(self) -> str:
        lines = [
            f"resource: {self.resource}",
            f"assertions: {self.stats.total}  subjects: {self.stats.subjects}  "
            f"mean objects/pair: {self.stats.mean_objects_per_pair:.2f}",
            "per-predicate counts:",
        ]
        for predicate, count in sorted(self.stats.per_predicate.items(), key=lambda kv: kv[0].order):
            lines.append(f"  {predicate.value:<16} {count}")
        if self.copy_rates:
            lines.append("subject copy rates:")
            for subject, r in self.copy_rates.items():
                lines.append(f"  {subject}: {r.copies}/{r.total} ({r.rate:.1%})")
        if self.quantity_groups:
            lines.append("quantity conflicts:")
            for g in self.quantity_groups:
                objects = ", ".join(a.object for a in g.members)
                lines.append(f"  {g.subject} {g.predicate.value}: {objects}")
        if self.plural_pairs:
            lines.append("plural redundancy:")
            for a, b in self.plural_pairs:
                lines.append(f"  {a.subject} {a.predicate.value}: {a.object!r} / {b.object!r}")
        return "\n".join(lines)


def build_report(resource: Resource, subjects: list[str] | None = None) -> DiagnosticsReport:
    """Full diagnostics for a resource; copy rates restricted to the given
    subjects (all subjects when omitted; pass a few on large resources)."""
    if subjects is None:
        subject_keys = sorted(resource.indexes.by_subject)
    else:
        subject_keys = [normalize_text(s) for s in subjects]
    return DiagnosticsReport(
        resource=resource.name,
        stats=resource_stats(resource),
        copy_rates={s: subject_copy_rate(resource, s) for s in subject_keys},
        quantity_groups=quantity_conflicts(resource),
        plural_pairs=plural_redundancy(resource),
    )
