"""Indexed resources and the analysis surface over them: top-k retrieval,
frequency aggregation, conjunctive (join) queries and phrase search.

Indexes are immutable once built; every operation here is read-only and
safe for any number of concurrent readers.
"""

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

from .core import PREDICATES, Assertion, PredicateKind, ResourceId, parse_predicate
from .errors import MalformedQuery, UnknownPredicate, UnknownResource
from .text import contains_phrase, fold_last_token, normalize_text, tokenize


class IndexSet:
    """Lookup structures over one resource's assertion list.

    Input order must be global-rank order; per-key lists then come out in
    local-rank (pair index) and subject-rank (subject index) order for free,
    because both are restrictions of the global ordering.
    """

    def __init__(self, assertions: list[Assertion]):
        by_pair: dict[tuple[str, PredicateKind], list[Assertion]] = {}
        by_subject: dict[str, list[Assertion]] = {}
        by_predicate: dict[PredicateKind, list[Assertion]] = {p: [] for p in PREDICATES}
        for a in assertions:
            subject = normalize_text(a.subject)
            by_pair.setdefault((subject, a.predicate), []).append(a)
            by_subject.setdefault(subject, []).append(a)
            by_predicate[a.predicate].append(a)
        self.by_subject_predicate = by_pair
        self.by_subject = by_subject
        self.by_predicate = by_predicate
        self._assertions = assertions
        self._token_postings: dict[str, list[int]] | None = None

    def token_postings(self) -> dict[str, list[int]]:
        """Inverted index: token -> positions of assertions whose subject or
        object contains it. Built on first use (search only)."""
        if self._token_postings is None:
            postings: dict[str, list[int]] = {}
            for pos, a in enumerate(self._assertions):
                seen = set(tokenize(a.subject))
                seen.update(tokenize(a.object))
                for token in seen:
                    postings.setdefault(token, []).append(pos)
            self._token_postings = postings
        return self._token_postings


class Resource:
    """A named, indexed, immutable collection of assertions.

    The assertion list is expected in global-rank order (the pipeline and
    the snapshot loader both produce it that way).
    """

    def __init__(self, resource_id: ResourceId, assertions: list[Assertion], meta: dict | None = None):
        self.id = resource_id
        self.assertions = assertions
        self.meta = meta or {}
        self._indexes: IndexSet | None = None

    @property
    def name(self) -> str:
        return self.id.name

    @property
    def kind(self) -> str:
        return self.id.kind.value

    @property
    def indexes(self) -> IndexSet:
        if self._indexes is None:
            self._indexes = IndexSet(self.assertions)
        return self._indexes

    def __len__(self) -> int:
        return len(self.assertions)

    def __repr__(self) -> str:
        return f"Resource({self.name!r}, {len(self)} assertions)"


class Catalog:
    """Registry of resources by unique name."""

    def __init__(self, resources: Iterable[Resource] = ()):
        self._resources: dict[str, Resource] = {}
        for r in resources:
            self.register(r)

    def register(self, resource: Resource) -> None:
        if resource.name in self._resources:
            raise ValueError(f"resource name already registered: {resource.name!r}")
        self._resources[resource.name] = resource

    def get(self, name: str) -> Resource:
        resource = self._resources.get(name)
        if resource is None:
            raise UnknownResource(f"no resource named {name!r}")
        return resource

    def names(self) -> list[str]:
        return list(self._resources)

    def resources(self) -> list[Resource]:
        return list(self._resources.values())

    def __len__(self) -> int:
        return len(self._resources)

    def __contains__(self, name: str) -> bool:
        return name in self._resources


# ---------------------------------------------------------------------------
# Simple retrieval and aggregation


def top_assertions(
    resource: Resource, subject: str, predicate: PredicateKind | None = None, k: int = 10
) -> list[Assertion]:
    """Top-k assertions for a subject: by local rank within one predicate,
    or by subject rank across predicates when no predicate is given."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    subject = normalize_text(subject)
    if predicate is not None:
        return resource.indexes.by_subject_predicate.get((subject, predicate), [])[:k]
    return resource.indexes.by_subject.get(subject, [])[:k]


def aggregate_objects(
    resource: Resource, predicate: PredicateKind, k: int = 10
) -> list[tuple[str, int]]:
    """The k most frequent objects of a predicate, grouped by normalized
    form; descending frequency, ties lexicographic."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    counts: dict[str, int] = {}
    for a in resource.indexes.by_predicate.get(predicate, []):
        obj = normalize_text(a.object)
        counts[obj] = counts.get(obj, 0) + 1
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]


class PredicateSlot(NamedTuple):
    top: list[Assertion]
    total: int


def subject_summary(
    subject: str, resources: Iterable[Resource], k: int = 10
) -> dict[str, dict[PredicateKind, PredicateSlot]]:
    """Per-resource, per-predicate view of one subject: top-k assertions and
    the total pair count (the grey number in the browsing interface).
    Covers all 13 predicates; empty slots are included."""
    subject = normalize_text(subject)
    summary: dict[str, dict[PredicateKind, PredicateSlot]] = {}
    for resource in resources:
        slots: dict[PredicateKind, PredicateSlot] = {}
        for predicate in PREDICATES:
            members = resource.indexes.by_subject_predicate.get((subject, predicate), [])
            slots[predicate] = PredicateSlot(top=members[:k], total=len(members))
        summary[resource.name] = slots
    return summary


# ---------------------------------------------------------------------------
# Conjunctive queries


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    text: str


@dataclass(frozen=True)
class TemplateTerm:
    """Constant text with one embedded variable, e.g. "eat ?x"."""

    prefix: str
    var: str
    suffix: str


Term = Union[Var, Const, TemplateTerm]


class Pattern(NamedTuple):
    subject: Var | Const
    predicate: PredicateKind
    object: Term

    def variables(self) -> set[str]:
        names = set()
        if isinstance(self.subject, Var):
            names.add(self.subject.name)
        if isinstance(self.object, Var):
            names.add(self.object.name)
        elif isinstance(self.object, TemplateTerm):
            names.add(self.object.var)
        return names


class ConjunctiveQuery(NamedTuple):
    patterns: tuple[Pattern, ...]
    projection: str
    aggregate: bool = False


class Binding(NamedTuple):
    """One solution row: variable assignments plus a flag marking matches
    that needed the plural fold (best-effort, see join semantics)."""

    values: tuple[tuple[str, str], ...]
    plural_fold: bool = False

    def as_dict(self) -> dict[str, str]:
        return dict(self.values)


_VAR_RE = re.compile(r"\?(\w+)")


def parse_pattern(text: str) -> Pattern:
    """Parse the query text syntax: "(?x, CapableOf, eat ?x)".

    Subject is a constant or a ?variable; the object may additionally be a
    template (constant text with exactly one embedded ?variable).
    """
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = body.split(",", 2)
    if len(parts) != 3:
        raise MalformedQuery(f"pattern needs 3 comma-separated terms: {text!r}")
    subject_text, predicate_text, object_text = (p.strip() for p in parts)
    try:
        predicate = parse_predicate(predicate_text)
    except UnknownPredicate as exc:
        raise MalformedQuery(str(exc)) from exc

    subject: Var | Const
    if subject_text.startswith("?"):
        if not _VAR_RE.fullmatch(subject_text):
            raise MalformedQuery(f"bad variable name: {subject_text!r}")
        subject = Var(subject_text[1:])
    elif subject_text:
        subject = Const(subject_text)
    else:
        raise MalformedQuery("empty subject term")

    markers = _VAR_RE.findall(object_text)
    obj: Term
    if not markers:
        if not object_text:
            raise MalformedQuery("empty object term")
        obj = Const(object_text)
    elif len(markers) > 1:
        raise MalformedQuery(f"object template must contain exactly one variable: {object_text!r}")
    elif object_text == f"?{markers[0]}":
        obj = Var(markers[0])
    else:
        prefix, _, suffix = object_text.partition(f"?{markers[0]}")
        obj = TemplateTerm(prefix=prefix, var=markers[0], suffix=suffix)

    pattern = Pattern(subject=subject, predicate=predicate, object=obj)
    if not pattern.variables():
        raise MalformedQuery(f"pattern has no variable: {text!r}")
    return pattern


def parse_query(
    patterns: Iterable[str], projection: str | None = None, aggregate: bool = False
) -> ConjunctiveQuery:
    """Build and validate a query from pattern text; the projection defaults
    to the sole variable when there is exactly one."""
    parsed = tuple(parse_pattern(p) for p in patterns)
    variables = set()
    for p in parsed:
        variables |= p.variables()
    if projection is None:
        if len(variables) != 1:
            raise MalformedQuery("projection required when the query has several variables")
        projection = next(iter(variables))
    query = ConjunctiveQuery(patterns=parsed, projection=projection.lstrip("?"), aggregate=aggregate)
    _validate(query)
    return query


def _validate(query: ConjunctiveQuery) -> None:
    if not 1 <= len(query.patterns) <= 2:
        raise MalformedQuery(f"queries take 1 or 2 patterns, got {len(query.patterns)}")
    variables = set()
    for pattern in query.patterns:
        if not pattern.variables():
            raise MalformedQuery("every pattern needs at least one variable")
        variables |= pattern.variables()
    if query.projection not in variables:
        raise MalformedQuery(f"projection ?{query.projection} does not occur in any pattern")
    if len(query.patterns) == 2:
        if not (query.patterns[0].variables() & query.patterns[1].variables()):
            raise MalformedQuery("two-pattern queries must share a variable")


def _template_parts(term: TemplateTerm) -> tuple[str, str]:
    # Normalize around a sentinel so the placeholder's neighbouring spaces
    # survive whitespace collapsing.
    marked = normalize_text(f"{term.prefix}\x00{term.suffix}")
    prefix, _, suffix = marked.partition("\x00")
    return prefix, suffix


def _match_pattern(resource: Resource, pattern: Pattern) -> list[tuple[dict[str, str], bool]]:
    """All (bindings, used_plural_fold) rows satisfying one pattern."""
    indexes = resource.indexes
    if isinstance(pattern.subject, Const):
        candidates = indexes.by_subject_predicate.get(
            (normalize_text(pattern.subject.text), pattern.predicate), []
        )
    else:
        candidates = indexes.by_predicate.get(pattern.predicate, [])

    template_parts = None
    if isinstance(pattern.object, TemplateTerm):
        template_parts = _template_parts(pattern.object)

    rows: list[tuple[dict[str, str], bool]] = []
    for a in candidates:
        bindings: dict[str, str] = {}
        fold = False
        if isinstance(pattern.subject, Var):
            bindings[pattern.subject.name] = normalize_text(a.subject)

        obj = normalize_text(a.object)
        term = pattern.object
        if isinstance(term, Const):
            if obj != normalize_text(term.text):
                continue
        elif isinstance(term, Var):
            bound = bindings.get(term.name)
            if bound is not None:
                if obj != bound:
                    continue
            else:
                bindings[term.name] = obj
        else:  # TemplateTerm
            prefix, suffix = template_parts
            if not (obj.startswith(prefix) and obj.endswith(suffix)):
                continue
            middle = obj[len(prefix) : len(obj) - len(suffix)]
            if not middle or middle != middle.strip():
                continue
            bound = bindings.get(term.var)
            if bound is None:
                bindings[term.var] = middle
            elif middle != bound:
                # Self-reference: fold a trailing plural on both sides
                # ("chicken" vs "eat chickens"); flagged as best-effort.
                if fold_last_token(middle) != fold_last_token(bound):
                    continue
                fold = True
        rows.append((bindings, fold))
    return rows


def evaluate_conjunctive(
    resource: Resource, query: ConjunctiveQuery
) -> list[Binding] | list[tuple[str, int]]:
    """Evaluate a 1- or 2-pattern conjunctive query.

    Two patterns are combined with a hash join on their shared variables.
    Without aggregation the result is the distinct binding rows, sorted;
    an exact match wins over a plural-fold match for the same row. With
    aggregation, rows are counted per projected value (bag semantics) and
    returned as (value, count) sorted by descending count, ties
    lexicographic.
    """
    _validate(query)
    rows = _match_pattern(resource, query.patterns[0])
    if len(query.patterns) == 2:
        left, right = rows, _match_pattern(resource, query.patterns[1])
        shared = sorted(query.patterns[0].variables() & query.patterns[1].variables())
        table: dict[tuple[str, ...], list[tuple[dict[str, str], bool]]] = {}
        for bindings, fold in left:
            table.setdefault(tuple(bindings[v] for v in shared), []).append((bindings, fold))
        joined: list[tuple[dict[str, str], bool]] = []
        for bindings, fold in right:
            for other, other_fold in table.get(tuple(bindings[v] for v in shared), ()):
                joined.append(({**other, **bindings}, fold or other_fold))
        rows = joined

    if query.aggregate:
        counts: dict[str, int] = {}
        for bindings, _ in rows:
            value = bindings[query.projection]
            counts[value] = counts.get(value, 0) + 1
        return sorted(counts.items(), key=lambda item: (-item[1], item[0]))

    distinct: dict[tuple[tuple[str, str], ...], bool] = {}
    for bindings, fold in rows:
        values = tuple(sorted(bindings.items()))
        distinct[values] = distinct.get(values, True) and fold
    return [Binding(values=v, plural_fold=f) for v, f in sorted(distinct.items())]


# ---------------------------------------------------------------------------
# Text search


def search_text(resources: Iterable[Resource], needle: str) -> list[Assertion]:
    """Assertions whose subject or object contains the normalized needle as
    a consecutive token sequence, ordered by (resource, global rank)."""
    needle_tokens = tokenize(needle)
    if not needle_tokens:
        return []
    hits: list[Assertion] = []
    for resource in resources:
        postings = resource.indexes.token_postings()
        lists = [postings.get(t) for t in set(needle_tokens)]
        if any(lst is None for lst in lists):
            continue
        lists.sort(key=len)
        candidates = set(lists[0])
        for lst in lists[1:]:
            candidates &= set(lst)
            if not candidates:
                break
        single = len(needle_tokens) == 1
        for pos in sorted(candidates):
            a = resource.assertions[pos]
            if single or contains_phrase(tokenize(a.subject), needle_tokens) or contains_phrase(
                tokenize(a.object), needle_tokens
            ):
                hits.append(a)
    return hits
