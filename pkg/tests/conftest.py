import random

import pytest

from cskb.core import ResourceId, ResourceKind
from cskb.pipeline import build_resource
from cskb.query import Resource

from helpers import random_records


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)


@pytest.fixture
def generated_resource(rng) -> Resource:
    """A mid-sized pipeline-built resource for query and diagnostics tests."""
    rid = ResourceId(name="test-generated", kind=ResourceKind.generated)
    return build_resource(random_records(rng, 2000), rid)
