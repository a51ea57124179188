"""HTTP face of the triage pipeline.

Exposes classification, the moderation queue, per-domain evidence, model
statistics, and the plain-text blocklist feed consumed by the browser
extension. The feed lists moderator-confirmed disinformation domains by
default; ``?include=machine`` widens it with machine-flagged domains still
awaiting review. Moderation is the one mutating surface and every verdict
also banks a labeled example for retraining.
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .forest import feature_importance
from .pipeline import (
    Config,
    ModerationQueue,
    UnknownItemError,
    VerdictConflictError,
    classify_domain,
    normalize_domain,
    record_verdict,
)
from .store import Archive, model_load, model_version


class ClassifyRequest(BaseModel):
    domain: str


class VerdictRequest(BaseModel):
    label: str
    note: str = ""


def create_app(config: Config) -> FastAPI:
    app = FastAPI(title="domain triage", docs_url=None, redoc_url=None)

    forest = model_load(config.model)
    if forest.encoder is None:
        raise RuntimeError(f"model {config.model} has no encoder attached")
    archive = Archive(config.archive)
    queue = ModerationQueue(config.queue)
    asn_table, geo_table = config.load_tables()
    transport = config.make_transport()
    # one probe-and-append at a time; reads stay concurrent
    classify_lock = threading.Lock()

    app.state.config = config
    app.state.forest = forest
    app.state.archive = archive
    app.state.queue = queue

    @app.post("/api/classify")
    def classify(body: ClassifyRequest) -> dict[str, Any]:
        try:
            with classify_lock:
                prediction, entry, reprobed = classify_domain(
                    body.domain,
                    transport=transport,
                    forest=forest,
                    archive=archive,
                    asn_table=asn_table,
                    geo_table=geo_table,
                    freshness=config.freshness_window(),
                )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            **prediction.to_dict(),
            "reprobed": reprobed,
            "probed_at": entry.probed_at.isoformat(),
        }

    @app.get("/api/queue")
    def list_queue(state: str | None = None) -> dict[str, Any]:
        try:
            items = queue.items(state)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"items": [item.to_dict() for item in items]}

    @app.get("/api/queue/{item_id}")
    def get_item(item_id: int) -> dict[str, Any]:
        try:
            return queue.get(item_id).to_dict()
        except UnknownItemError:
            raise HTTPException(status_code=404, detail=f"no item {item_id}")

    @app.post("/api/queue/{item_id}/verdict")
    def submit_verdict(item_id: int, body: VerdictRequest) -> dict[str, Any]:
        try:
            item = record_verdict(
                queue, archive, config.dataset,
                item_id, body.label, body.note, transport.now(),
            )
        except UnknownItemError:
            raise HTTPException(status_code=404, detail=f"no item {item_id}")
        except VerdictConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return item.to_dict()

    @app.get("/feed.txt", response_class=PlainTextResponse)
    def get_feed(include: str | None = None) -> str:
        domains = {
            item.domain
            for item in queue.items("labeled")
            if item.verdict and item.verdict["label"] == "disinformation"
        }
        if include == "machine":
            domains.update(item.domain for item in queue.items("pending"))
        return "".join(f"{d}\n" for d in sorted(domains))

    @app.get("/api/stats")
    def get_stats() -> dict[str, Any]:
        per_class: dict[str, int] = {}
        archived = 0
        for _, entry in archive.scan():
            archived += 1
            if entry.prediction is not None:
                cls = entry.prediction["predicted_class"]
                per_class[cls] = per_class.get(cls, 0) + 1
        return {
            "archived": archived,
            "per_class": per_class,
            "queue": {
                "pending": len(queue.items("pending")),
                "labeled": len(queue.items("labeled")),
            },
            "feature_importance": feature_importance(forest),
            "model_version": model_version(forest),
        }

    @app.get("/api/records/{domain}")
    def get_record(domain: str) -> dict[str, Any]:
        try:
            canonical = normalize_domain(domain)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        offset = archive.build_index().get(canonical)
        if offset is None:
            raise HTTPException(status_code=404, detail=f"no evidence for {canonical}")
        return archive.read_at(offset).to_dict()

    return app


def serve(config: Config):
    """Run the service on the configured bind address (blocking)."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.bind_host, port=config.bind_port)
