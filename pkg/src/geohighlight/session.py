"""Per-analyst sessions: throttled move ingestion, pipeline runs, result docs.

A session owns the mutable per-analyst state (move log, accumulated feedback,
latest pipeline result, viewport) while the fitted engine and its index
structures stay immutable and shared across sessions. Stored moves keep their
geo position from capture time, so a zoom or pan only changes how they are
re-expressed in pixels at the next pipeline run.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from .clustering import MoveLog
from .errors import UnknownDatasetError, UnknownSessionError
from .estimator import PipelineResult, SpatialHighlighter
from .feedback import FeedbackVector
from .geometry import GeoPoint, MovePoint, ViewportRef, check_viewport, geo_to_pixel, pixel_to_geo
from .highlight import similarity_to_feedback
from .idr import idr_set_to_document
from .ingestion import Dataset


@dataclass(frozen=True)
class SessionConfig:
    """Online pipeline settings; fitted index structures are unaffected by these."""

    g: int = 3
    eps: float = 40.0
    min_pts: int = 5
    delta: float = 1.0
    k: int = 5
    time_limit_ms: Optional[float] = 200.0
    idr_min_area: float = 1.0
    auto_run_interval_ms: Optional[float] = None  # periodic trigger; None = explicit only

    _FIELDS = ("g", "eps", "min_pts", "delta", "k", "time_limit_ms", "idr_min_area",
               "auto_run_interval_ms")

    @classmethod
    def from_overrides(cls, overrides: Optional[Mapping[str, Any]]) -> "SessionConfig":
        overrides = dict(overrides or {})
        unknown = set(overrides) - set(cls._FIELDS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**overrides)
        if cfg.g < 1 or int(cfg.g) != cfg.g:
            raise ValueError(f"g must be an integer >= 1, got {cfg.g}")
        if not (cfg.eps > 0):
            raise ValueError(f"eps must be > 0, got {cfg.eps}")
        if cfg.min_pts < 2 or int(cfg.min_pts) != cfg.min_pts:
            raise ValueError(f"min_pts must be an integer >= 2, got {cfg.min_pts}")
        if not (cfg.delta > 0):
            raise ValueError(f"delta must be > 0, got {cfg.delta}")
        if cfg.k < 1 or int(cfg.k) != cfg.k:
            raise ValueError(f"k must be an integer >= 1, got {cfg.k}")
        if cfg.time_limit_ms is not None and not (cfg.time_limit_ms > 0):
            raise ValueError(f"time_limit_ms must be > 0 or None, got {cfg.time_limit_ms}")
        if not (cfg.idr_min_area >= 0):
            raise ValueError(f"idr_min_area must be >= 0, got {cfg.idr_min_area}")
        if cfg.auto_run_interval_ms is not None and not (cfg.auto_run_interval_ms > 0):
            raise ValueError(f"auto_run_interval_ms must be > 0 or None")
        return cfg


class Session:
    """One analyst's live exploration state."""

    def __init__(
        self,
        session_id: str,
        dataset_id: str,
        engine: SpatialHighlighter,
        viewport: ViewportRef,
        config: SessionConfig,
        started_at_ms: Optional[float] = None,
        clock: Callable[[], float] = time.time,
    ):
        check_viewport(viewport)
        self.id = session_id
        self.dataset_id = dataset_id
        self.engine = engine
        self.config = config
        self._clock = clock
        self.started_at_ms = clock() * 1000.0 if started_at_ms is None else started_at_ms
        self._viewport = viewport
        self._log = MoveLog()
        self._geos: List[GeoPoint] = []
        self._feedback = engine.fresh_feedback()
        self._latest: Optional[PipelineResult] = None
        self._run_count = 0
        self._last_run_ms: Optional[float] = None
        self._moves_since_run = 0
        self._state_lock = threading.Lock()
        self._run_lock = threading.Lock()
        self._listeners: List[Callable[[dict], None]] = []

    @property
    def viewport(self) -> ViewportRef:
        return self._viewport

    @property
    def feedback(self) -> FeedbackVector:
        return self._feedback

    @property
    def latest(self) -> Optional[PipelineResult]:
        return self._latest

    @property
    def stored_moves(self) -> int:
        return len(self._log)

    def add_listener(self, fn: Callable[[dict], None]) -> None:
        """Register a callback invoked with each finished pipeline result document."""
        with self._state_lock:
            self._listeners.append(fn)

    def remove_listener(self, fn: Callable[[dict], None]) -> None:
        with self._state_lock:
            if fn in self._listeners:
                self._listeners.remove(fn)

    def ingest_move(self, move: MovePoint) -> bool:
        """Store the move if it clears the 200 ms throttle; returns acceptance."""
        with self._state_lock:
            accepted = self._log.append(move)
            if accepted:
                self._geos.append(pixel_to_geo(move, self._viewport))
                self._moves_since_run += 1
            return accepted

    def ingest_moves(self, moves: List[MovePoint]) -> int:
        """Batch ingestion; returns how many samples were stored."""
        return sum(1 for m in moves if self.ingest_move(m))

    def update_viewport(self, viewport: ViewportRef) -> None:
        """Swap the viewport; stored moves keep their geo positions."""
        check_viewport(viewport)
        with self._state_lock:
            self._viewport = viewport

    def _snapshot(self) -> Tuple[List[MovePoint], ViewportRef, FeedbackVector]:
        """Moves re-expressed in pixels under the current viewport, session-relative t."""
        with self._state_lock:
            viewport = self._viewport
            moves = []
            for raw, geo in zip(self._log, self._geos):
                px = geo_to_pixel(geo, viewport)
                moves.append(MovePoint(px.x, px.y, max(0.0, raw.t - self.started_at_ms)))
            return moves, viewport, self._feedback

    def run_pipeline(self, now_ms: Optional[float] = None) -> PipelineResult:
        """Execute the pipeline on a snapshot of the stored moves at t_c = now.

        Runs are mutually exclusive per session; ingestion stays open while a
        run computes because stages only see the snapshot.
        """
        with self._run_lock:
            if now_ms is None:
                now_ms = self._clock() * 1000.0
            moves, viewport, feedback = self._snapshot()
            t_c = max(0.0, now_ms - self.started_at_ms)
            last = max((m.t for m in moves), default=0.0)
            if t_c < last:
                t_c = last  # clock skew guard: t_c must cover every stored move
            cfg = self.config
            result = self.engine.run(
                moves,
                viewport,
                t_c=t_c,
                feedback=feedback,
                g=cfg.g,
                eps=cfg.eps,
                min_pts=cfg.min_pts,
                delta=cfg.delta,
                k=cfg.k,
                time_limit_ms=cfg.time_limit_ms,
                idr_min_area=cfg.idr_min_area,
            )
            with self._state_lock:
                self._feedback = result.feedback
                self._latest = result
                self._run_count += 1
                self._last_run_ms = now_ms
                self._moves_since_run = 0
                listeners = list(self._listeners)
            doc = self.result_document(result, include_timings=True)
            for fn in listeners:
                fn(doc)
            return result

    def should_auto_run(self, now_ms: Optional[float] = None) -> bool:
        """True when the periodic trigger is enabled, due and there is new activity."""
        interval = self.config.auto_run_interval_ms
        if interval is None:
            return False
        if now_ms is None:
            now_ms = self._clock() * 1000.0
        with self._state_lock:
            if self._moves_since_run == 0:
                return False
            if self._last_run_ms is None:
                return now_ms - self.started_at_ms >= interval
            return now_ms - self._last_run_ms >= interval

    def result_document(self, result: Optional[PipelineResult] = None, include_timings: bool = False) -> dict:
        """Serialize a pipeline result for clients; deterministic when timings are off."""
        result = result if result is not None else self._latest
        if result is None:
            return {"session_id": self.id, "run": False}
        doc = serialize_result(
            result,
            viewport=self._viewport,
            points_by_id={p.id: p for p in self.engine.points_},
            n_points=self.engine.n_points_,
            include_timings=include_timings,
        )
        doc["session_id"] = self.id
        return doc


def serialize_result(
    result: PipelineResult,
    viewport: ViewportRef,
    points_by_id: Mapping[Any, Any],
    n_points: int,
    include_timings: bool = False,
) -> dict:
    """Pipeline result as a plain JSON-ready document.

    Wall-clock figures are included only on request so replay reports stay
    byte-identical across runs.
    """
    hl = result.highlights
    highlight_points = []
    for pid in hl.points:
        p = points_by_id[pid]
        highlight_points.append(
            {
                "id": pid,
                "lat": p.location.lat,
                "lon": p.location.lon,
                "similarity": similarity_to_feedback(p, result.feedback),
                "attributes": dict(p.attributes),
            }
        )
    matched_total = result.match_result.count()
    doc = {
        "computed_at": result.idr_set.computed_at,
        "regions": {"per_segment": list(result.region_counts), "total": result.n_regions},
        "idrs": idr_set_to_document(result.idr_set, viewport),
        "matches": {
            "per_idr": {str(rid): sorted(ids, key=str) for rid, ids in sorted(result.match_result.matched.items())},
            "matched_total": matched_total,
            "coverage_pct": 100.0 * matched_total / n_points,
        },
        "feedback": result.feedback.to_document(),
        "highlights": {
            "anchor": hl.anchor,
            "cold_start": hl.cold_start,
            "achieved_diversity_m": hl.achieved_diversity_m,
            "normalized_diversity": hl.normalized_diversity,
            "swaps": hl.swaps,
            "points": highlight_points,
        },
        "warnings": list(result.warnings),
        "n_points": n_points,
    }
    if include_timings:
        doc["timings_ms"] = dict(result.timings_ms)
        doc["highlights"]["elapsed_ms"] = hl.elapsed_ms
    return doc


@dataclass
class DatasetEntry:
    dataset: Dataset
    engine: SpatialHighlighter


class SessionManager:
    """Registry of loaded datasets (with fitted engines) and live sessions."""

    def __init__(self, clock: Callable[[], float] = time.time):
        self._datasets: Dict[str, DatasetEntry] = {}
        self._sessions: Dict[str, Session] = {}
        self._clock = clock
        self._lock = threading.Lock()

    def register_dataset(self, dataset_id: str, dataset: Dataset, **engine_params) -> SpatialHighlighter:
        engine = SpatialHighlighter(**engine_params).fit(dataset)
        with self._lock:
            self._datasets[dataset_id] = DatasetEntry(dataset=dataset, engine=engine)
        return engine

    def dataset_entries(self) -> Dict[str, DatasetEntry]:
        with self._lock:
            return dict(self._datasets)

    def dataset_listing(self) -> List[dict]:
        out = []
        for did, entry in sorted(self.dataset_entries().items()):
            ds = entry.dataset
            out.append(
                {
                    "dataset_id": did,
                    "n_points": len(ds),
                    "bbox": {
                        "min_lat": ds.bbox[0],
                        "min_lon": ds.bbox[1],
                        "max_lat": ds.bbox[2],
                        "max_lon": ds.bbox[3],
                    },
                    "attributes": [
                        {"name": a.name, "kind": a.kind, "n_facets": len(a.values)}
                        for a in ds.schema
                    ],
                }
            )
        return out

    def create_session(
        self,
        dataset_id: str,
        viewport: ViewportRef,
        overrides: Optional[Mapping[str, Any]] = None,
    ) -> Session:
        with self._lock:
            if dataset_id not in self._datasets:
                raise UnknownDatasetError(f"no dataset registered as {dataset_id!r}")
            entry = self._datasets[dataset_id]
        config = SessionConfig.from_overrides(overrides)
        session = Session(
            session_id=uuid.uuid4().hex,
            dataset_id=dataset_id,
            engine=entry.engine,
            viewport=viewport,
            config=config,
            clock=self._clock,
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSessionError(f"no session {session_id!r}") from None

    def close_session(self, session_id: str) -> None:
        with self._lock:
            self._sessions.pop(session_id, None)
