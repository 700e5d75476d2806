"""HTTP service over the session layer.

Endpoints mirror the session lifecycle: create a session against a registered
dataset, stream throttled mouse moves into it, update the viewport on
zoom/pan, trigger pipeline runs, and read back regions, highlights and the
feedback vector. An event-stream channel pushes each finished pipeline result
to subscribed clients.
"""

from __future__ import annotations

import asyncio
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from fastapi import BackgroundTasks, FastAPI, HTTPException, Query, Request
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from .errors import (
    EmptyEligibleSetError,
    GeoHighlightError,
    OutOfRangeError,
    UnknownDatasetError,
    UnknownSessionError,
)
from .geometry import MovePoint, ViewportRef
from .highlight import get_highlights
from .ingestion import load_dataset
from .session import Session, SessionManager

log = logging.getLogger(__name__)


class ViewportBody(BaseModel):
    gamma: float = Field(description="latitude of the viewport center, degrees")
    theta: float = Field(description="longitude of the viewport center, degrees")
    scale: float = Field(gt=0, description="degrees per pixel")

    def to_ref(self) -> ViewportRef:
        return ViewportRef(gamma=self.gamma, theta=self.theta, scale=self.scale)


class CreateSessionBody(BaseModel):
    dataset_id: str
    viewport: ViewportBody
    config: Optional[Dict[str, Any]] = None


class MoveBody(BaseModel):
    x: float
    y: float
    t: float = Field(ge=0, description="epoch milliseconds")


class MovesBody(BaseModel):
    moves: List[MoveBody]


class _SessionHub:
    """Fan-out of pipeline result documents to SSE subscribers."""

    def __init__(self):
        self._subscribers: Dict[str, List[asyncio.Queue]] = {}
        self._loop: Optional[asyncio.AbstractEventLoop] = None

    def subscribe(self, session_id: str) -> asyncio.Queue:
        self._loop = asyncio.get_running_loop()
        q: asyncio.Queue = asyncio.Queue()
        self._subscribers.setdefault(session_id, []).append(q)
        return q

    def unsubscribe(self, session_id: str, q: asyncio.Queue) -> None:
        subs = self._subscribers.get(session_id, [])
        if q in subs:
            subs.remove(q)

    def publish(self, session_id: str, doc: dict) -> None:
        # called from worker threads; hop onto the loop if one is listening
        loop = self._loop
        if loop is None or loop.is_closed():
            return
        for q in list(self._subscribers.get(session_id, [])):
            loop.call_soon_threadsafe(q.put_nowait, doc)


def create_app(manager: Optional[SessionManager] = None, data_dir: Optional[str] = None) -> FastAPI:
    """Build the service; datasets come from the manager or a data directory.

    A data directory is scanned for ``<name>.csv``/``<name>.jsonl`` files with
    a matching ``<name>.config.json`` mapping config; each pair is registered
    as dataset id ``<name>``.
    """
    manager = manager or SessionManager()
    if data_dir:
        _register_directory(manager, Path(data_dir))
    app = FastAPI(title="geohighlight", version="0.1.0")
    hub = _SessionHub()
    app.state.manager = manager
    app.state.hub = hub

    def _session(session_id: str) -> Session:
        try:
            return manager.get(session_id)
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    def _run_and_publish(session: Session) -> dict:
        doc = None
        try:
            session.run_pipeline()
            doc = session.result_document(include_timings=True)
        finally:
            if doc is not None:
                hub.publish(session.id, doc)
        return doc

    @app.exception_handler(GeoHighlightError)
    async def _domain_error(request: Request, exc: GeoHighlightError):
        from fastapi.responses import JSONResponse

        status = 404 if isinstance(exc, (UnknownSessionError, UnknownDatasetError)) else 422
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.get("/datasets")
    def list_datasets():
        return {"datasets": manager.dataset_listing()}

    @app.get("/datasets/{dataset_id}/points")
    def dataset_points(dataset_id: str):
        entries = manager.dataset_entries()
        if dataset_id not in entries:
            raise HTTPException(status_code=404, detail=f"no dataset {dataset_id!r}")
        points = entries[dataset_id].dataset.points
        return {
            "dataset_id": dataset_id,
            "points": [
                {"id": p.id, "lat": p.location.lat, "lon": p.location.lon,
                 "attributes": dict(p.attributes)}
                for p in points
            ],
        }

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        try:
            session = manager.create_session(
                body.dataset_id, body.viewport.to_ref(), body.config
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {"session_id": session.id, "started_at_ms": session.started_at_ms}

    @app.post("/sessions/{session_id}/moves")
    def ingest_moves(session_id: str, body: MovesBody | MoveBody, background: BackgroundTasks):
        session = _session(session_id)
        moves = body.moves if isinstance(body, MovesBody) else [body]
        try:
            accepted = session.ingest_moves(
                [MovePoint(x=m.x, y=m.y, t=m.t) for m in moves]
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if session.should_auto_run():
            background.add_task(_run_and_publish, session)
        return {"accepted_count": accepted, "stored_total": session.stored_moves}

    @app.put("/sessions/{session_id}/viewport")
    def update_viewport(session_id: str, body: ViewportBody):
        session = _session(session_id)
        try:
            session.update_viewport(body.to_ref())
        except OutOfRangeError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {"ok": True}

    @app.post("/sessions/{session_id}/run")
    def run_pipeline(session_id: str):
        session = _session(session_id)
        return _run_and_publish(session)

    @app.get("/sessions/{session_id}/idrs")
    def get_idrs(session_id: str):
        session = _session(session_id)
        doc = session.result_document()
        if not doc.get("run", True):
            return {"session_id": session.id, "run": False, "idrs": {"count": 0, "idrs": []}}
        return {"session_id": session.id, "run": True, "computed_at": doc["computed_at"], "idrs": doc["idrs"]}

    @app.get("/sessions/{session_id}/highlights")
    def get_session_highlights(session_id: str, k: Optional[int] = Query(default=None, ge=1)):
        session = _session(session_id)
        latest = session.latest
        if latest is None:
            return {"session_id": session.id, "run": False, "highlights": None}
        if k is None or k == len(latest.highlights.points):
            doc = session.result_document()
            return {"session_id": session.id, "run": True, "highlights": doc["highlights"]}
        # re-rank against the current feedback snapshot without touching state
        engine = session.engine
        eligible = [p.id for p in engine.points_ if p.id not in latest.match_result.all_matched]
        try:
            hl = get_highlights(
                engine.index_, eligible, session.feedback, k, session.config.time_limit_ms
            )
        except EmptyEligibleSetError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        points_by_id = {p.id: p for p in engine.points_}
        from .highlight import similarity_to_feedback

        return {
            "session_id": session.id,
            "run": True,
            "highlights": {
                "anchor": hl.anchor,
                "cold_start": hl.cold_start,
                "achieved_diversity_m": hl.achieved_diversity_m,
                "normalized_diversity": hl.normalized_diversity,
                "swaps": hl.swaps,
                "points": [
                    {
                        "id": pid,
                        "lat": points_by_id[pid].location.lat,
                        "lon": points_by_id[pid].location.lon,
                        "similarity": similarity_to_feedback(points_by_id[pid], session.feedback),
                        "attributes": dict(points_by_id[pid].attributes),
                    }
                    for pid in hl.points
                ],
            },
        }

    @app.get("/sessions/{session_id}/feedback")
    def get_feedback(session_id: str):
        session = _session(session_id)
        return {"session_id": session.id, "feedback": session.feedback.to_document()}

    @app.get("/sessions/{session_id}/events")
    async def events(session_id: str, request: Request):
        session = _session(session_id)  # 404 for unknown ids before streaming
        queue = hub.subscribe(session.id)

        async def stream():
            try:
                yield "event: subscribed\ndata: {}\n\n"
                while True:
                    if await request.is_disconnected():
                        break
                    try:
                        doc = await asyncio.wait_for(queue.get(), timeout=0.5)
                    except asyncio.TimeoutError:
                        yield ": keepalive\n\n"  # lets clients detect a live but idle stream
                        continue
                    yield f"event: result\ndata: {json.dumps(doc, sort_keys=True)}\n\n"
            finally:
                hub.unsubscribe(session.id, queue)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


def _register_directory(manager: SessionManager, data_dir: Path) -> None:
    """Register every dataset file in the directory that has a mapping config."""
    for cfg_path in sorted(data_dir.glob("*.config.json")):
        name = cfg_path.name[: -len(".config.json")]
        for ext in (".csv", ".jsonl", ".ndjson"):
            src = data_dir / f"{name}{ext}"
            if src.exists():
                dataset = load_dataset(src, cfg_path)
                manager.register_dataset(name, dataset)
                log.info("registered dataset %s (%d points)", name, len(dataset))
                break
        else:
            log.warning("config %s has no matching data file", cfg_path)
