"""genadapter: beam-search generation harness emitting generation-record
JSON-Lines for the cskb ingest contract."""

from .config import DecoderConfig, FAMILIES, PREDICATES, UnknownFamily, default_config
from .runner import DEFAULT_PROMPT_TEMPLATE, GenerationStats, generate_records

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PROMPT_TEMPLATE",
    "DecoderConfig",
    "FAMILIES",
    "GenerationStats",
    "PREDICATES",
    "UnknownFamily",
    "default_config",
    "generate_records",
    "__version__",
]
