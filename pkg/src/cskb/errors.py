"""Exception hierarchy shared across the package."""


class CskbError(Exception):
    """Base class for all errors raised by this package."""


class UnknownPredicate(CskbError):
    """A predicate name outside the closed 13-predicate vocabulary."""


class UnknownResource(CskbError):
    """A resource name that is not registered in the catalog."""


class UnknownSubject(CskbError):
    """A subject that does not occur in the resource."""


class EmptySequence(CskbError):
    """An operation that requires a non-empty sequence got an empty one."""


class DimensionMismatch(CskbError):
    """Embedding vectors of different dimensions were combined."""


class MissingEmbedding(CskbError):
    """A sentence required for recall evaluation has no embedding."""

    def __init__(self, sentence: str):
        super().__init__(f"no embedding for sentence: {sentence!r}")
        self.sentence = sentence


class PoolTooSmall(CskbError):
    """The sampling pool has fewer elements than the requested sample."""

    def __init__(self, pool_size: int, sample_size: int):
        super().__init__(
            f"sampling pool has {pool_size} assertions, need {sample_size}"
        )
        self.pool_size = pool_size
        self.sample_size = sample_size


class EmptySample(CskbError):
    """Percentages over an empty sample are undefined."""


class MalformedQuery(CskbError):
    """A conjunctive query violates the pattern grammar or its invariants."""


class TemplateError(CskbError):
    """A verbalization template table is incomplete or malformed."""


class IngestFailure(CskbError):
    """The input stream itself is unreadable (not a per-line problem)."""


class SnapshotError(CskbError):
    """Base class for snapshot persistence failures."""


class ChecksumMismatch(SnapshotError):
    """Snapshot payload does not match its embedded checksum."""


class VersionMismatch(SnapshotError):
    """Snapshot was written by an incompatible format version."""

    def __init__(self, found: int, expected: int):
        super().__init__(f"snapshot format version {found}, expected {expected}")
        self.found = found
        self.expected = expected


class IoFailure(SnapshotError):
    """Snapshot file is unreadable or not a snapshot at all."""
