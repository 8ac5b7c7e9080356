"""Text normalization and tokenization shared by the pipeline, queries
and diagnostics."""

import re

_WS_RUN = re.compile(r"\s+")
_TOKEN = re.compile(r"\w+")


def normalize_text(text: str) -> str:
    """Canonical form used for deduplication keys and index lookups.

    Case-folds, trims, collapses internal whitespace runs to one space and
    strips trailing sentence periods. May return the empty string; callers
    decide whether that is an error.
    """
    out = _WS_RUN.sub(" ", text.casefold().strip())
    out = out.rstrip(".").rstrip()
    return out


def collapse_whitespace(text: str) -> str:
    """Whitespace cleanup only, preserving case (surface forms)."""
    return _WS_RUN.sub(" ", text.strip())


def tokenize(text: str) -> tuple[str, ...]:
    """Normalized word tokens, punctuation dropped."""
    return tuple(_TOKEN.findall(normalize_text(text)))


def contains_phrase(haystack: tuple[str, ...], needle: tuple[str, ...]) -> bool:
    """True when needle occurs in haystack as a consecutive token run."""
    if not needle or len(needle) > len(haystack):
        return False
    first = needle[0]
    span = len(needle)
    for i in range(len(haystack) - span + 1):
        if haystack[i] == first and haystack[i : i + span] == needle:
            return True
    return False


def fold_plural(token: str) -> str:
    """Naive plural fold: strip a trailing "es" or "s" from tokens longer
    than 3 characters. Deliberately not a lemmatizer."""
    if len(token) > 3:
        if token.endswith("es"):
            return token[:-2]
        if token.endswith("s"):
            return token[:-1]
    return token


def fold_last_token(text: str) -> str:
    """The text with its final token plural-folded (for redundancy checks)."""
    tokens = list(tokenize(text))
    if not tokens:
        return text
    tokens[-1] = fold_plural(tokens[-1])
    return " ".join(tokens)
