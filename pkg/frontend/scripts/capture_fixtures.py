#!/usr/bin/env python3
"""Regenerate the frontend test fixtures from a seeded cskb server.

Run from the repository root after changing the API or the seed data:
    python3 frontend/scripts/capture_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from cskb.core import Assertion, PredicateKind, ResourceId, ResourceKind
from cskb.pipeline import assign_ranks
from cskb.query import Catalog, Resource
from cskb.server import create_app

P = PredicateKind

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SEED_GENERATED = [
    ("elephant", P.AtLocation, "Africa", -0.05),
    ("elephant", P.AtLocation, "the zoo", -0.21),
    ("elephant", P.AtLocation, "a circus", -0.47),
    ("elephant", P.CapableOf, "remember", -0.11),
    ("elephant", P.CapableOf, "climb tree", -0.839),
    ("elephant", P.HasA, "a trunk", -0.08),
    ("elephant", P.HasA, "four legs", -0.3),
    ("elephant", P.HasProperty, "large", -0.19),
    ("elephant", P.MadeOf, "flesh and bone", -1.2),
    ("elephant", P.Desires, "peanuts", -0.6),
    ("airplane", P.AtLocation, "airport", -0.1),
    ("scrap paper", P.UsedFor, "making paper airplane", -0.4),
    ("flight attendant", P.CapableOf, "travel on airplane", -0.5),
    ("traveling", P.HasSubevent, "sleeping on airplane", -0.7),
    ("rabbit", P.AtLocation, "a meadow", -0.2),
    ("rabbit", P.AtLocation, "wilderness", -0.35),
]

SEED_TRAINING = [
    ("elephant", P.AtLocation, "Africa", None),
    ("rabbit", P.AtLocation, "a meadow", None),
]


def seed_catalog() -> Catalog:
    def build(name, kind, rows):
        rid = ResourceId(name, kind)
        assertions = [
            Assertion(subject=s, predicate=p, object=o, score=score, resource=rid)
            for s, p, o, score in rows
        ]
        return Resource(rid, assign_ranks(assertions))

    return Catalog([
        build("GPT2-XL-demo", ResourceKind.generated, SEED_GENERATED),
        build("ConceptNet-demo", ResourceKind.training, SEED_TRAINING),
    ])


def main() -> None:
    client = TestClient(create_app(seed_catalog()))
    FIXTURES.mkdir(parents=True, exist_ok=True)
    captures = {
        "subjects_elephant.json":
            "/api/subjects/elephant?resources=GPT2-XL-demo,ConceptNet-demo",
        "search_airplane.json": "/api/search?q=airplane&page=1",
        "resources.json": "/api/resources",
        "subject_names_ele.json": "/api/subject-names?prefix=ele",
    }
    for filename, url in captures.items():
        response = client.get(url)
        response.raise_for_status()
        out = FIXTURES / filename
        out.write_text(json.dumps(response.json(), indent=2) + "\n", encoding="utf-8")
        print(f"{url} -> {out}")


if __name__ == "__main__":
    main()
