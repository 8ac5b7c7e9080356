"""Read-only HTTP service over built resources: browse, search, aggregate
and join. Every response is a pure function of the loaded snapshots and the
request, so replays and concurrent readers always see identical bodies."""

from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .core import Assertion, parse_predicate
from .errors import MalformedQuery, UnknownPredicate, UnknownResource
from .query import (
    Binding,
    Catalog,
    Resource,
    aggregate_objects,
    evaluate_conjunctive,
    parse_query,
    search_text,
    subject_summary,
    top_assertions,
)
from .snapshot import snapshot_load

PAGE_SIZE = 50


@dataclass
class ServiceConfig:
    snapshot_paths: list[Path]
    host: str = "127.0.0.1"
    port: int = 8080
    static_dir: Path | None = None
    embedding_service_url: str | None = None
    page_size: int = PAGE_SIZE

    def __post_init__(self):
        if not self.snapshot_paths:
            raise ValueError("at least one snapshot must be configured")


def load_catalog(snapshot_paths: list[Path]) -> Catalog:
    """Load every snapshot into one catalog; failures name the bad path."""
    catalog = Catalog()
    for path in snapshot_paths:
        for resource in snapshot_load(path).resources():
            catalog.register(resource)
    return catalog


def _assertion_json(a: Assertion) -> dict:
    return {
        "subject": a.subject,
        "predicate": a.predicate.value,
        "object": a.object,
        "score": a.score,
        "local_rank": a.local_rank,
        "subject_rank": a.subject_rank,
        "global_rank": a.global_rank,
        "resource": a.resource.name if a.resource else None,
    }


def _error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


class JoinRequest(BaseModel):
    resource: str
    patterns: list[str]
    project: str | None = None
    aggregate: bool = False
    limit: int | None = None


def create_app(catalog: Catalog, page_size: int = PAGE_SIZE) -> FastAPI:
    app = FastAPI(title="cskb", docs_url=None, redoc_url=None)

    @app.exception_handler(UnknownResource)
    async def _unknown_resource(request: Request, exc: UnknownResource):
        return JSONResponse(status_code=404, content=_error_body("unknown_resource", str(exc)))

    @app.exception_handler(UnknownPredicate)
    async def _unknown_predicate(request: Request, exc: UnknownPredicate):
        return JSONResponse(status_code=400, content=_error_body("unknown_predicate", str(exc)))

    @app.exception_handler(MalformedQuery)
    async def _malformed_query(request: Request, exc: MalformedQuery):
        return JSONResponse(status_code=400, content=_error_body("malformed_query", str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _invalid_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content=_error_body("invalid_request", str(exc)))

    def _pick(resources_param: str | None) -> list[Resource]:
        if not resources_param:
            return catalog.resources()
        return [catalog.get(name.strip()) for name in resources_param.split(",") if name.strip()]

    @app.get("/api/resources")
    def resources():
        return {
            "resources": [
                {"name": r.name, "kind": r.kind, "size": len(r)} for r in catalog.resources()
            ]
        }

    @app.get("/api/subjects/{subject}")
    def subjects(subject: str, resources: str | None = Query(default=None)):
        picked = _pick(resources)
        summary = subject_summary(subject, picked)
        return {
            "subject": subject,
            "resources": {
                name: {
                    "predicates": {
                        predicate.value: {
                            "top": [_assertion_json(a) for a in slot.top],
                            "total": slot.total,
                        }
                        for predicate, slot in slots.items()
                    }
                }
                for name, slots in summary.items()
            },
        }

    @app.get("/api/subject-names")
    def subject_names(prefix: str = Query(default=""), limit: int = Query(default=20, ge=1, le=200)):
        names: set[str] = set()
        needle = prefix.casefold()
        for resource in catalog.resources():
            for subject in resource.indexes.by_subject:
                if subject.startswith(needle):
                    names.add(subject)
        return {"names": sorted(names)[:limit]}

    @app.get("/api/search")
    def search(
        q: str = Query(min_length=1),
        resources: str | None = Query(default=None),
        page: int = Query(default=1, ge=1),
    ):
        picked = _pick(resources)
        hits = search_text(picked, q)
        start = (page - 1) * page_size
        return {
            "query": q,
            "page": page,
            "page_size": page_size,
            "total": len(hits),
            "results": [_assertion_json(a) for a in hits[start : start + page_size]],
        }

    @app.get("/api/aggregate")
    def aggregate(
        resource: str,
        predicate: str,
        k: int = Query(default=10, ge=1),
    ):
        rows = aggregate_objects(catalog.get(resource), parse_predicate(predicate), k)
        return {
            "resource": resource,
            "predicate": parse_predicate(predicate).value,
            "rows": [{"object": obj, "frequency": n} for obj, n in rows],
        }

    @app.get("/api/top")
    def top(
        resource: str,
        subject: str,
        predicate: str | None = Query(default=None),
        k: int = Query(default=10, ge=1),
    ):
        kind = parse_predicate(predicate) if predicate else None
        rows = top_assertions(catalog.get(resource), subject, kind, k)
        return {"results": [_assertion_json(a) for a in rows]}

    @app.post("/api/join")
    def join(body: JoinRequest):
        resource = catalog.get(body.resource)
        query = parse_query(body.patterns, body.project, body.aggregate)
        result = evaluate_conjunctive(resource, query)
        limit = body.limit or len(result)
        if body.aggregate:
            rows = [{"value": value, "count": count} for value, count in result[:limit]]
        else:
            rows = [
                {"bindings": b.as_dict(), "plural_fold": b.plural_fold}
                for b in result[:limit]
                if isinstance(b, Binding)
            ]
        return {"projection": query.projection, "aggregate": body.aggregate, "rows": rows}

    return app


def serve(config: ServiceConfig) -> None:
    """Load the configured snapshots and run the service until signalled."""
    import uvicorn

    catalog = load_catalog(config.snapshot_paths)
    app = create_app(catalog, page_size=config.page_size)
    if config.static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="static")
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
