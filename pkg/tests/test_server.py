import concurrent.futures

import pytest
from fastapi.testclient import TestClient

from cskb.core import PredicateKind, ResourceId, ResourceKind
from cskb.pipeline import build_resource
from cskb.query import Catalog
from cskb.server import ServiceConfig, create_app, load_catalog
from cskb.snapshot import snapshot_save

from helpers import make_resource, random_records

P = PredicateKind


@pytest.fixture
def catalog(rng):
    generated = build_resource(
        random_records(rng, 500), ResourceId("gen", ResourceKind.generated)
    )
    curated = make_resource(
        [
            ("elephant", P.AtLocation, "Africa", None),
            ("elephant", P.CapableOf, "remember", None),
            ("rabbit", P.AtLocation, "a meadow", None),
        ],
        name="curated",
        kind=ResourceKind.training,
    )
    return Catalog([generated, curated])


@pytest.fixture
def client(catalog):
    return TestClient(create_app(catalog, page_size=5))


def test_resources_listing(client, catalog):
    body = client.get("/api/resources").json()
    names = {r["name"]: r for r in body["resources"]}
    assert names["curated"]["size"] == 3
    assert names["curated"]["kind"] == "training"
    assert names["gen"]["size"] == len(catalog.get("gen"))


def test_subject_view_covers_all_predicates(client):
    body = client.get("/api/subjects/elephant?resources=curated").json()
    assert body["subject"] == "elephant"
    predicates = body["resources"]["curated"]["predicates"]
    assert len(predicates) == 13
    assert predicates["AtLocation"]["total"] == 1
    assert predicates["AtLocation"]["top"][0]["object"] == "Africa"
    assert predicates["MadeOf"] == {"top": [], "total": 0}


def test_subject_view_unknown_resource_is_404(client):
    response = client.get("/api/subjects/elephant?resources=nope")
    assert response.status_code == 404
    body = response.json()
    assert body["error"]["code"] == "unknown_resource"
    assert "nope" in body["error"]["message"]


def test_search_pagination(client):
    first = client.get("/api/search?q=meadow&resources=gen&page=1").json()
    assert first["page_size"] == 5
    assert len(first["results"]) <= 5
    if first["total"] > 5:
        second = client.get("/api/search?q=meadow&resources=gen&page=2").json()
        assert second["results"] != first["results"]
        assert second["results"][0] not in first["results"]


def test_search_requires_query(client):
    response = client.get("/api/search?q=")
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "invalid_request"


def test_aggregate_rows_shape(client):
    body = client.get("/api/aggregate?resource=gen&predicate=AtLocation&k=3").json()
    assert body["predicate"] == "AtLocation"
    assert len(body["rows"]) <= 3
    rows = body["rows"]
    assert all(set(r) == {"object", "frequency"} for r in rows)
    frequencies = [r["frequency"] for r in rows]
    assert frequencies == sorted(frequencies, reverse=True)


def test_aggregate_unknown_predicate(client):
    response = client.get("/api/aggregate?resource=gen&predicate=IsA")
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "unknown_predicate"


def test_top_endpoint(client):
    body = client.get("/api/top?resource=curated&subject=elephant&k=5").json()
    assert [r["object"] for r in body["results"]] == ["Africa", "remember"]


def test_join_endpoint_bindings(client, catalog):
    response = client.post(
        "/api/join",
        json={"resource": "gen", "patterns": ["(?x, CapableOf, eat ?x)"]},
    )
    assert response.status_code == 200
    body = response.json()
    for row in body["rows"]:
        assert set(row) == {"bindings", "plural_fold"}


def test_join_endpoint_aggregate(client):
    response = client.post(
        "/api/join",
        json={
            "resource": "gen",
            "patterns": ["(?a, AtLocation, ?l)", "(?l, HasA, ?p)"],
            "project": "p",
            "aggregate": True,
        },
    )
    body = response.json()
    assert body["aggregate"] is True
    counts = [row["count"] for row in body["rows"]]
    assert counts == sorted(counts, reverse=True)


def test_join_malformed_query(client):
    response = client.post(
        "/api/join", json={"resource": "gen", "patterns": ["(rabbit, AtLocation, meadow)"]}
    )
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "malformed_query"


def test_subject_names_prefix(client):
    body = client.get("/api/subject-names?prefix=ele").json()
    assert "elephant" in body["names"]
    assert all(name.startswith("ele") for name in body["names"])


def test_replay_yields_identical_bodies(client):
    url = "/api/subjects/rabbit?resources=gen,curated"
    assert client.get(url).content == client.get(url).content


def test_concurrent_readers_see_identical_results(client):
    url = "/api/search?q=meadow&resources=gen"
    expected = client.get(url).content
    with concurrent.futures.ThreadPoolExecutor(max_workers=16) as pool:
        bodies = list(pool.map(lambda _: client.get(url).content, range(100)))
    assert all(body == expected for body in bodies)


def test_service_config_requires_resources():
    with pytest.raises(ValueError):
        ServiceConfig(snapshot_paths=[])


def test_load_catalog_from_snapshots(tmp_path, catalog):
    first = tmp_path / "a.snap"
    second = tmp_path / "b.snap"
    snapshot_save(Catalog([catalog.get("gen")]), first)
    snapshot_save(Catalog([catalog.get("curated")]), second)
    merged = load_catalog([first, second])
    assert set(merged.names()) == {"gen", "curated"}
