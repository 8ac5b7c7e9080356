"""Beam-search decoder configurations per model family."""

from typing import NamedTuple


class UnknownFamily(Exception):
    """A model family outside the supported set."""


FAMILIES = ("gpt2xl", "bart")

# The 13 predicate names of the target vocabulary, as they appear on the
# wire (the consumer rejects anything else).
PREDICATES = (
    "AtLocation", "CapableOf", "Causes", "Desires", "HasA",
    "HasPrerequisite", "HasProperty", "HasSubevent", "MadeOf",
    "MotivatedByGoal", "PartOf", "UsedFor", "ReceivesAction",
)


class DecoderConfig(NamedTuple):
    num_beams: int = 10
    temperature: float = 1.0
    top_p: float = 1.0
    repetition_penalty: float = 1.0
    max_length: int = 16
    no_repeat_ngram_size: int = 0
    early_stopping: bool = True
    do_sample: bool = False

    def validated(self) -> "DecoderConfig":
        if self.num_beams < 1:
            raise ValueError(f"num_beams must be >= 1: {self.num_beams}")
        if self.temperature <= 0:
            raise ValueError(f"temperature must be > 0: {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p must be in (0, 1]: {self.top_p}")
        return self


_DEFAULTS = {
    "gpt2xl": DecoderConfig(
        num_beams=10,
        temperature=1.0,
        top_p=0.9,
        repetition_penalty=1.0,
        max_length=16,
        no_repeat_ngram_size=0,
        early_stopping=True,
        do_sample=False,
    ),
    "bart": DecoderConfig(
        num_beams=10,
        temperature=1.0,
        top_p=1.0,
        repetition_penalty=1.0,
        max_length=24,
        no_repeat_ngram_size=3,
        early_stopping=True,
        do_sample=False,
    ),
}


def default_config(model_family: str) -> DecoderConfig:
    """The published beam-search configuration for a model family."""
    config = _DEFAULTS.get(model_family)
    if config is None:
        raise UnknownFamily(f"unknown model family {model_family!r}, expected one of {FAMILIES}")
    return config
