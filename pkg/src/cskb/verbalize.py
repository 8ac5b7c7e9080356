"""Templated rendering of assertions as natural-language sentences, used
for recall matching and annotation export."""

import json
from dataclasses import dataclass
from pathlib import Path

from .core import PREDICATES, Assertion, PredicateKind, parse_predicate
from .errors import TemplateError, UnknownPredicate
from .text import collapse_whitespace


@dataclass(frozen=True)
class TemplateTable:
    """One template per predicate; each contains {s} and {o} exactly once."""

    templates: dict[PredicateKind, str]

    def __post_init__(self):
        missing = [p.value for p in PREDICATES if p not in self.templates]
        if missing:
            raise TemplateError(f"missing templates for: {', '.join(missing)}")
        extra = set(self.templates) - set(PREDICATES)
        if extra:
            raise TemplateError(f"templates for unknown predicates: {extra}")
        for predicate, template in self.templates.items():
            for placeholder in ("{s}", "{o}"):
                if template.count(placeholder) != 1:
                    raise TemplateError(
                        f"template for {predicate.value} must contain {placeholder} "
                        f"exactly once: {template!r}"
                    )

    def __getitem__(self, predicate: PredicateKind) -> str:
        return self.templates[predicate]


_DEFAULT_TEMPLATES = {
    PredicateKind.AtLocation: "you are likely to find {s} in {o}",
    PredicateKind.CapableOf: "{s} can {o}",
    PredicateKind.Causes: "{s} causes {o}",
    PredicateKind.Desires: "{s} wants {o}",
    PredicateKind.HasA: "{s} has {o}",
    PredicateKind.HasPrerequisite: "{s} requires {o}",
    PredicateKind.HasProperty: "{s} is {o}",
    PredicateKind.HasSubevent: "while {s}, {o}",
    PredicateKind.MadeOf: "{s} is made of {o}",
    PredicateKind.MotivatedByGoal: "{s} is motivated by {o}",
    PredicateKind.PartOf: "{s} is part of {o}",
    PredicateKind.ReceivesAction: "{s} can be {o}",
    PredicateKind.UsedFor: "{s} is used for {o}",
}


def default_templates() -> TemplateTable:
    """The built-in 13-entry template table.

    The wording is this project's fixed choice and can be swapped for any
    externally published template set via load_templates, since recall
    numbers are sensitive to it.
    """
    return TemplateTable(dict(_DEFAULT_TEMPLATES))


def load_templates(path: str | Path) -> TemplateTable:
    """Load a template override file: JSON mapping predicate name -> template."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TemplateError(f"template file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise TemplateError("template file must be a JSON object")
    templates: dict[PredicateKind, str] = {}
    for name, template in payload.items():
        try:
            predicate = parse_predicate(name)
        except UnknownPredicate as exc:
            raise TemplateError(str(exc)) from exc
        if not isinstance(template, str):
            raise TemplateError(f"template for {name} must be a string")
        templates[predicate] = template
    return TemplateTable(templates)


_CACHED_DEFAULT: TemplateTable | None = None


def verbalize(assertion: Assertion, table: TemplateTable | None = None) -> str:
    """Render one assertion as a sentence by literal placeholder substitution.

    Substitution is segment-based, so subjects or objects that happen to
    contain placeholder text are inserted verbatim, never re-expanded.
    """
    global _CACHED_DEFAULT
    if table is None:
        if _CACHED_DEFAULT is None:
            _CACHED_DEFAULT = default_templates()
        table = _CACHED_DEFAULT
    template = table[assertion.predicate]
    out = _substitute(template, assertion.subject, assertion.object)
    return collapse_whitespace(out)


def _substitute(template: str, subject: str, obj: str) -> str:
    s_at = template.index("{s}")
    o_at = template.index("{o}")
    if s_at < o_at:
        first_at, first_len, first_value = s_at, 3, subject
        second_at, second_value = o_at, obj
    else:
        first_at, first_len, first_value = o_at, 3, obj
        second_at, second_value = s_at, subject
    return (
        template[:first_at]
        + first_value
        + template[first_at + first_len : second_at]
        + second_value
        + template[second_at + 3 :]
    )
