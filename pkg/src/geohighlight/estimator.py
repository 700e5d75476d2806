"""Scikit-learn style engine: fit on a dataset, run the highlighting pipeline.

``fit`` performs the offline work (quadtree over the points, full inverted
similarity index); ``run`` executes the four online stages in order -- find
dense regions, match points, update feedback, pick highlights -- against a
throttled move stream. The fitted artifacts are immutable, so one fitted
engine can serve any number of concurrent sessions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .clustering import DbscanParams
from .errors import EmptyEligibleSetError
from .feedback import FeedbackVector, update_feedback
from .geometry import MovePoint, ViewportRef, check_viewport
from .highlight import HighlightResult, InvertedIndex, build_inverted_indexes, get_highlights
from .idr import IdrSet, pair_intersections, segment_hulls
from .ingestion import AttributeSchema, Dataset, PointRecord
from .quadtree import MatchResult, Quadtree, build_quadtree, match_points


@dataclass
class PipelineResult:
    """Everything one pipeline invocation produced, stage by stage."""

    idr_set: IdrSet
    match_result: MatchResult
    feedback: FeedbackVector
    highlights: HighlightResult
    region_counts: List[int]  # cluster hulls per segment
    timings_ms: Dict[str, float] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def n_regions(self) -> int:
        return sum(self.region_counts)


class SpatialHighlighter(BaseEstimator):
    """Implicit-feedback spatial highlighting engine.

    Parameters
    ----------
    g : number of time segments the move stream is split into.
    eps : DBSCAN neighborhood radius in pixels.
    min_pts : DBSCAN minimum neighborhood size (self included).
    delta : increment added to a facet's raw count per matched point.
    k : number of highlight points returned.
    time_limit_ms : budget for the highlight diversification scan; None = unbounded.
    idr_min_area : intersections below this pixel area are discarded as slivers.
    quad_capacity, quad_max_depth : quadtree leaf capacity and depth limit.
    """

    def __init__(
        self,
        g: int = 3,
        eps: float = 40.0,
        min_pts: int = 5,
        delta: float = 1.0,
        k: int = 5,
        time_limit_ms: Optional[float] = 200.0,
        idr_min_area: float = 1.0,
        quad_capacity: int = 64,
        quad_max_depth: int = 12,
    ):
        self.g = g
        self.eps = eps
        self.min_pts = min_pts
        self.delta = delta
        self.k = k
        self.time_limit_ms = time_limit_ms
        self.idr_min_area = idr_min_area
        self.quad_capacity = quad_capacity
        self.quad_max_depth = quad_max_depth

    def _validate_params(self) -> None:
        if self.g < 1 or int(self.g) != self.g:
            raise ValueError(f"g must be an integer >= 1, got {self.g}")
        if not (self.delta > 0):
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if self.k < 1 or int(self.k) != self.k:
            raise ValueError(f"k must be an integer >= 1, got {self.k}")
        if not (self.idr_min_area >= 0):
            raise ValueError(f"idr_min_area must be >= 0, got {self.idr_min_area}")
        DbscanParams(eps=self.eps, min_pts=self.min_pts)  # validates

    def fit(self, X: Dataset | Sequence[PointRecord], y=None, schema: AttributeSchema | None = None):
        """Build the offline structures over the dataset points.

        ``X`` is a Dataset (carrying its schema) or a sequence of PointRecord
        with ``schema`` passed explicitly.
        """
        self._validate_params()
        if isinstance(X, Dataset):
            points, schema = X.points, X.schema
            self.dataset_ = X
        else:
            points = tuple(X)
            if schema is None:
                raise ValueError("schema is required when fitting on bare point records")
            self.dataset_ = None
        self.schema_ = schema
        self.points_ = points
        self.quadtree_: Quadtree = build_quadtree(
            points, capacity=self.quad_capacity, max_depth=self.quad_max_depth
        )
        self.index_: InvertedIndex = build_inverted_indexes(points, schema)
        self.n_points_ = len(points)
        return self

    def fresh_feedback(self) -> FeedbackVector:
        check_is_fitted(self, "schema_")
        return FeedbackVector.zeros(self.schema_)

    def find_regions(self, moves: Iterable[MovePoint], t_c: float) -> IdrSet:
        """Dense-region discovery only (no matching or highlighting)."""
        check_is_fitted(self, "index_")
        params = DbscanParams(eps=self.eps, min_pts=self.min_pts)
        return pair_intersections(
            segment_hulls(moves, t_c, self.g, params), t_c, min_area=self.idr_min_area
        )

    def run(
        self,
        moves: Iterable[MovePoint],
        viewport: ViewportRef,
        t_c: Optional[float] = None,
        feedback: Optional[FeedbackVector] = None,
        *,
        g: Optional[int] = None,
        eps: Optional[float] = None,
        min_pts: Optional[int] = None,
        delta: Optional[float] = None,
        k: Optional[int] = None,
        time_limit_ms: Optional[float] | str = "default",
        idr_min_area: Optional[float] = None,
    ) -> PipelineResult:
        """Execute the four pipeline stages in order on a move snapshot.

        ``moves`` carry session-relative timestamps; ``t_c`` defaults to the
        last move's timestamp. ``feedback`` is the session's accumulated
        vector (a fresh zero vector when omitted); the returned result holds
        the updated vector, this method never mutates its inputs. The keyword
        overrides let sessions with different online settings share one
        fitted engine; fitted structures depend only on the dataset.
        """
        check_is_fitted(self, "index_")
        check_viewport(viewport)
        moves = list(moves)
        if t_c is None:
            t_c = max((m.t for m in moves), default=0.0)
        f = feedback if feedback is not None else FeedbackVector.zeros(self.schema_)
        g = self.g if g is None else g
        delta = self.delta if delta is None else delta
        k = self.k if k is None else k
        min_area = self.idr_min_area if idr_min_area is None else idr_min_area
        limit = self.time_limit_ms if time_limit_ms == "default" else time_limit_ms
        params = DbscanParams(
            eps=self.eps if eps is None else eps,
            min_pts=self.min_pts if min_pts is None else min_pts,
        )
        if not (delta > 0):
            raise ValueError(f"delta must be > 0, got {delta}")
        timings: Dict[str, float] = {}
        warnings: List[str] = []

        t0 = time.perf_counter()
        hulls = segment_hulls(moves, t_c, g, params)
        idr_set = pair_intersections(hulls, t_c, min_area=min_area)
        timings["find_regions"] = (time.perf_counter() - t0) * 1000.0

        t0 = time.perf_counter()
        matches = match_points(self.quadtree_, idr_set, viewport)
        timings["match_points"] = (time.perf_counter() - t0) * 1000.0

        t0 = time.perf_counter()
        by_id = {p.id: p for p in self.points_}
        matched_records = [by_id[pid] for pid in matches.all_matched]
        f = update_feedback(f, matched_records, delta)
        timings["update_feedback"] = (time.perf_counter() - t0) * 1000.0

        t0 = time.perf_counter()
        eligible = [p.id for p in self.points_ if p.id not in matches.all_matched]
        try:
            highlights = get_highlights(self.index_, eligible, f, k, limit)
        except EmptyEligibleSetError:
            warnings.append("every dataset point lies inside the current dense regions")
            highlights = HighlightResult(
                points=[], anchor=None, achieved_diversity_m=0.0, elapsed_ms=0.0
            )
        timings["get_highlights"] = (time.perf_counter() - t0) * 1000.0

        return PipelineResult(
            idr_set=idr_set,
            match_result=matches,
            feedback=f,
            highlights=highlights,
            region_counts=[len(h) for h in hulls],
            timings_ms=timings,
            warnings=warnings,
        )

    def predict(
        self,
        moves: Iterable[MovePoint],
        viewport: ViewportRef,
        t_c: Optional[float] = None,
    ) -> np.ndarray:
        """Highlight ids for a move stream against a fresh feedback vector."""
        result = self.run(moves, viewport, t_c=t_c)
        return np.asarray(result.highlights.points)
