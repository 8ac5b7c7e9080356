import hashlib
import random

import pytest

from cskb.core import PredicateKind, ResourceId, ResourceKind
from cskb.errors import ChecksumMismatch, IoFailure, VersionMismatch
from cskb.pipeline import build_resource
from cskb.query import Catalog, IndexSet
from cskb.snapshot import FORMAT_VERSION, MAGIC, snapshot_load, snapshot_save

from helpers import make_resource, random_records

P = PredicateKind


@pytest.fixture
def small_catalog(rng):
    generated = build_resource(
        random_records(rng, 300), ResourceId("gen", ResourceKind.generated)
    )
    training = make_resource(
        [
            ("rabbit", P.AtLocation, "a meadow", None),
            ("lion", P.CapableOf, "roar", None),
        ],
        name="train",
        kind=ResourceKind.training,
    )
    return Catalog([generated, training])


def test_round_trip_identity(tmp_path, small_catalog):
    path = tmp_path / "cat.snap"
    digest = snapshot_save(small_catalog, path)
    assert len(digest) == 64
    loaded = snapshot_load(path)
    assert loaded.names() == small_catalog.names()
    for name in small_catalog.names():
        original = small_catalog.get(name)
        restored = loaded.get(name)
        assert restored.assertions == original.assertions
        assert restored.id == original.id
        assert restored.meta == original.meta


def test_round_trip_preserves_scoreless_rows(tmp_path, small_catalog):
    path = tmp_path / "cat.snap"
    snapshot_save(small_catalog, path)
    restored = snapshot_load(path).get("train")
    assert all(a.score is None for a in restored.assertions)


def test_loaded_indexes_match_fresh_build(tmp_path, small_catalog):
    path = tmp_path / "cat.snap"
    snapshot_save(small_catalog, path)
    restored = snapshot_load(path).get("gen")
    fresh = IndexSet(restored.assertions)
    loaded = restored.indexes
    assert loaded.by_subject_predicate == fresh.by_subject_predicate
    assert loaded.by_subject == fresh.by_subject
    assert loaded.by_predicate == fresh.by_predicate


def test_checksum_catches_truncation(tmp_path, small_catalog):
    path = tmp_path / "cat.snap"
    snapshot_save(small_catalog, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(ChecksumMismatch):
        snapshot_load(path)


def test_checksum_catches_single_byte_corruption(tmp_path, small_catalog):
    path = tmp_path / "cat.snap"
    snapshot_save(small_catalog, path)
    data = bytearray(path.read_bytes())
    rng = random.Random(99)
    for _ in range(10):
        pos = rng.randrange(len(data))
        corrupted = bytearray(data)
        corrupted[pos] ^= 1 + rng.randrange(255)
        path.write_bytes(bytes(corrupted))
        with pytest.raises(ChecksumMismatch):
            snapshot_load(path)


def test_version_gate(tmp_path):
    # A structurally valid file written with an older version number and a
    # correct checksum must fail the version gate, naming both versions.
    payload = MAGIC + (0).to_bytes(4, "little") + (0).to_bytes(4, "little")
    digest = hashlib.sha256(payload).digest()
    path = tmp_path / "old.snap"
    path.write_bytes(payload + digest)
    with pytest.raises(VersionMismatch) as exc:
        snapshot_load(path)
    assert exc.value.found == 0
    assert exc.value.expected == FORMAT_VERSION
    assert "0" in str(exc.value) and str(FORMAT_VERSION) in str(exc.value)


def test_not_a_snapshot(tmp_path):
    path = tmp_path / "nope.snap"
    path.write_text("just text")
    with pytest.raises(IoFailure):
        snapshot_load(path)


def test_wrong_magic_with_valid_checksum(tmp_path):
    payload = b"NOTASNAP" + (1).to_bytes(4, "little") + (0).to_bytes(4, "little")
    path = tmp_path / "odd.snap"
    path.write_bytes(payload + hashlib.sha256(payload).digest())
    with pytest.raises(IoFailure):
        snapshot_load(path)


def test_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        snapshot_load(tmp_path / "does-not-exist.snap")


def test_empty_catalog_round_trip(tmp_path):
    path = tmp_path / "empty.snap"
    snapshot_save(Catalog(), path)
    assert snapshot_load(path).names() == []


def test_unicode_strings_survive(tmp_path):
    resource = make_resource(
        [("café", P.AtLocation, "plaza mayor – madrid", -0.5)], name="uni"
    )
    path = tmp_path / "uni.snap"
    snapshot_save(Catalog([resource]), path)
    restored = snapshot_load(path).get("uni")
    assert restored.assertions[0].subject == "café"
    assert restored.assertions[0].object == "plaza mayor – madrid"
