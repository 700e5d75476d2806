"""Similarity scoring, the per-point inverted similarity index, and the
time-budgeted greedy selection of similar-but-diverse highlight points.

Similarity to the feedback vector averages a per-attribute score: the weight
of the point's facet divided by the attribute's maximum facet weight (zero
when the whole attribute is untouched). Point-to-point similarity for the
index is the fraction of attributes on which two points share a facet, which
keeps index order consistent with the feedback-similarity semantics. Both are
pluggable per attribute.

Diversity of a result set is the mean pairwise great-circle distance, so the
greedy swap phase pushes the selected points geographically apart.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Any, Callable, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .errors import DegenerateGeometryError, EmptyEligibleSetError, TooFewPointsError
from .feedback import FeedbackVector
from .geometry import EARTH_RADIUS_M, GeoPoint, haversine_distance, quickhull
from .ingestion import AttributeSchema, PointRecord

FeedbackSim = Callable[[FeedbackVector, str, Any], float]
PairSim = Callable[[str, Any, Any], float]


def similarity_to_feedback(
    p: PointRecord,
    f: FeedbackVector,
    overrides: Optional[Mapping[str, FeedbackSim]] = None,
) -> float:
    """Average per-attribute similarity between a point and the feedback vector.

    The default per-attribute score is weight(point's facet) / max weight over
    the attribute's facets, defined as 0 when every facet of the attribute is
    untouched. ``overrides`` swaps in a different scorer for named attributes.
    """
    schema = f.schema
    total = 0.0
    for attr in schema:
        label = attr.facet_value(p.attributes[attr.name])
        if overrides and attr.name in overrides:
            total += overrides[attr.name](f, attr.name, label)
            continue
        mx = f.max_weight(attr.name)
        total += (f.weight(attr.name, label) / mx) if mx > 0.0 else 0.0
    return total / len(schema)


def pairwise_similarity(
    p: PointRecord,
    q: PointRecord,
    schema: AttributeSchema,
    overrides: Optional[Mapping[str, PairSim]] = None,
) -> float:
    """Average per-attribute agreement between two points (1 same facet, else 0)."""
    total = 0.0
    for attr in schema:
        lp = attr.facet_value(p.attributes[attr.name])
        lq = attr.facet_value(q.attributes[attr.name])
        if overrides and attr.name in overrides:
            total += overrides[attr.name](attr.name, lp, lq)
        else:
            total += 1.0 if lp == lq else 0.0
    return total / len(schema)


def diversity(points: Iterable[PointRecord | GeoPoint]) -> float:
    """Mean pairwise great-circle distance in meters; 0 for fewer than two points."""
    locs = [p.location if isinstance(p, PointRecord) else p for p in points]
    n = len(locs)
    if n < 2:
        return 0.0
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            total += haversine_distance(locs[i], locs[j])
    return total / (n * (n - 1) / 2)


def dataset_diameter_m(points: Sequence[PointRecord]) -> float:
    """Largest pairwise great-circle distance, via the hull of the projected points.

    Points are projected onto an equirectangular plane around the dataset's
    mid-latitude; the farthest pair lies on the convex hull there, which keeps
    the scan quadratic only in hull size.
    """
    if len(points) < 2:
        return 0.0
    locs = [p.location for p in points]
    mid_lat = (min(p.lat for p in locs) + max(p.lat for p in locs)) / 2.0
    c = math.cos(math.radians(mid_lat))
    planar = [(p.lon * c, p.lat) for p in locs]
    try:
        hull = quickhull(planar)
        back = {(p.lon * c, p.lat): p for p in locs}
        candidates = [back[v] for v in hull.vertices]
    except DegenerateGeometryError:
        candidates = locs
    best = 0.0
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            best = max(best, haversine_distance(candidates[i], candidates[j]))
    return best


class InvertedIndex:
    """Per-point ranking of all other points by descending pairwise similarity.

    Rows are stored over internal positions assigned in ascending-id order, so
    similarity ties resolve to the smaller id. Coordinates and facet codes are
    cached alongside the rows for fast anchoring and distance work during
    highlight selection.
    """

    def __init__(
        self,
        points: Sequence[PointRecord],
        schema: AttributeSchema,
        rows: np.ndarray,
        codes: np.ndarray,
    ):
        self.points = tuple(points)  # ascending-id order
        self.schema = schema
        self.rows = rows
        self.codes = codes
        self.ids = tuple(p.id for p in self.points)
        self.pos_of = {pid: i for i, pid in enumerate(self.ids)}
        self.lat_rad = np.array([math.radians(p.location.lat) for p in self.points])
        self.lon_rad = np.array([math.radians(p.location.lon) for p in self.points])
        self.cos_lat = np.cos(self.lat_rad)
        self.diameter_m = dataset_diameter_m(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def row_ids(self, point_id: Any) -> List[Any]:
        """The ranked list for one point, as ids."""
        return [self.ids[j] for j in self.rows[self.pos_of[point_id]]]

    def _distance(self, i: int, j: int) -> float:
        """Haversine between two internal positions, meters."""
        dphi = self.lat_rad[j] - self.lat_rad[i]
        dlam = self.lon_rad[j] - self.lon_rad[i]
        a = math.sin(dphi / 2.0) ** 2 + self.cos_lat[i] * self.cos_lat[j] * math.sin(dlam / 2.0) ** 2
        return 2.0 * EARTH_RADIUS_M * math.atan2(math.sqrt(a), math.sqrt(1.0 - a))


def _facet_codes(points: Sequence[PointRecord], schema: AttributeSchema) -> np.ndarray:
    """(n_points, n_attributes) matrix of facet indexes into each attribute's domain."""
    n, a = len(points), len(schema)
    codes = np.empty((n, a), dtype=np.int32)
    for ai, attr in enumerate(schema):
        lookup = {v: i for i, v in enumerate(attr.values)}
        for pi, p in enumerate(points):
            codes[pi, ai] = lookup[attr.facet_value(p.attributes[attr.name])]
    return codes


def build_inverted_indexes(
    points: Sequence[PointRecord],
    schema: AttributeSchema,
    pair_overrides: Optional[Mapping[str, PairSim]] = None,
    block: int = 256,
) -> InvertedIndex:
    """Precompute the full similarity ranking for every point (the offline step).

    Quadratic in the number of points by design; the default agreement
    similarity is evaluated blockwise in numpy, while attribute overrides fall
    back to a scalar loop.
    """
    pts = sorted(points, key=lambda p: p.id)
    n = len(pts)
    if n < 2:
        raise TooFewPointsError(f"index needs >= 2 points, got {n}")
    codes = _facet_codes(pts, schema)
    n_attrs = len(schema)
    dtype = np.uint16 if n <= np.iinfo(np.uint16).max else np.uint32
    rows = np.empty((n, n - 1), dtype=dtype)

    if pair_overrides:
        for i, p in enumerate(pts):
            sims = np.array([pairwise_similarity(p, q, schema, pair_overrides) for q in pts])
            order = np.argsort(-sims, kind="stable")
            rows[i] = order[order != i].astype(dtype)
        return InvertedIndex(pts, schema, rows, codes)

    for lo in range(0, n, block):
        hi = min(lo + block, n)
        sims = np.zeros((hi - lo, n))
        for ai in range(n_attrs):
            sims += codes[lo:hi, ai, None] == codes[None, :, ai]
        sims /= n_attrs
        order = np.argsort(-sims, axis=1, kind="stable")
        for r in range(hi - lo):
            row = order[r]
            rows[lo + r] = row[row != lo + r].astype(dtype)
    return InvertedIndex(pts, schema, rows, codes)


def feedback_similarities(
    index: InvertedIndex,
    f: FeedbackVector,
    overrides: Optional[Mapping[str, FeedbackSim]] = None,
) -> np.ndarray:
    """Vector of similarity_to_feedback over all indexed points.

    The default path accumulates the same per-attribute terms in the same
    order as the scalar function, so the two agree bit for bit.
    """
    if overrides:
        return np.array([similarity_to_feedback(p, f, overrides) for p in index.points])
    n = len(index)
    sims = np.zeros(n)
    for ai, attr in enumerate(index.schema):
        w = np.array([f.weight(attr.name, v) for v in attr.values])
        mx = f.max_weight(attr.name)
        if mx > 0.0:
            sims += w[index.codes[:, ai]] / mx
    return sims / len(index.schema)


@dataclass
class HighlightResult:
    """Outcome of one highlight selection."""

    points: List[Any]  # point ids, current selection order
    anchor: Any  # id of the anchor point (feedback-similarity argmax)
    achieved_diversity_m: float
    elapsed_ms: float
    normalized_diversity: Optional[float] = None  # vs dataset diameter, if known
    swaps: int = 0
    scanned: int = 0
    cold_start: bool = False


def get_highlights(
    index: InvertedIndex,
    eligible_ids: Iterable[Any],
    f: FeedbackVector,
    k: int,
    time_limit_ms: Optional[float] = 200.0,
    sim_overrides: Optional[Mapping[str, FeedbackSim]] = None,
) -> HighlightResult:
    """Pick up to k eligible points, similar to the feedback and mutually far apart.

    The anchor is the eligible point most similar to the feedback vector (ties
    to the smaller id; with an all-zero vector the smallest eligible id, so a
    cold session still gets an answer). The selection starts as the anchor
    ranking's top k eligible entries (plus the anchor itself when fewer than k
    exist) and is then refined by a sequential scan of the ranking: the first
    member whose replacement strictly raises mean pairwise distance is swapped
    out. The scan stops at the end of the ranking or once ``time_limit_ms``
    is spent; ``None`` disables the budget.
    """
    start = time.perf_counter()
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be an integer >= 1, got {k}")
    if time_limit_ms is not None and not (time_limit_ms > 0):
        raise ValueError(f"time_limit_ms must be > 0 or None, got {time_limit_ms}")
    eligible = sorted(index.pos_of[pid] for pid in eligible_ids)
    if not eligible:
        raise EmptyEligibleSetError("every dataset point lies inside a dense region")
    elig = np.zeros(len(index), dtype=bool)
    elig[eligible] = True

    cold = f.total <= 0.0
    if cold:
        p_star = eligible[0]
    else:
        sims = feedback_similarities(index, f, sim_overrides)
        sub = sims[eligible]
        p_star = eligible[int(np.argmax(sub))]  # argmax takes the first max: lowest id

    row = index.rows[p_star]
    ranked = row[elig[row]]  # eligible candidates in ranking order
    members = [int(x) for x in ranked[:k]]
    if len(members) < k:
        members.append(p_star)  # everything eligible is selected, anchor included

    dist = index._distance
    m = len(members)
    pair = [[0.0] * m for _ in range(m)]
    row_sums = [0.0] * m
    total = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            d = dist(members[i], members[j])
            pair[i][j] = pair[j][i] = d
            row_sums[i] += d
            row_sums[j] += d
            total += d

    swaps = 0
    scanned = 0
    budget_s = None if time_limit_ms is None else time_limit_ms / 1000.0
    if m >= 2:
        for cand in ranked[k:]:
            if budget_s is not None and time.perf_counter() - start > budget_s:
                break
            scanned += 1
            cand = int(cand)
            cand_d = [dist(cand, mem) for mem in members]
            cand_sum = sum(cand_d)
            for mi in range(m):
                new_total = total - row_sums[mi] + (cand_sum - cand_d[mi])
                if new_total > total:
                    # replace members[mi] with cand and refresh the pair cache
                    for j in range(m):
                        if j == mi:
                            continue
                        old = pair[mi][j]
                        row_sums[j] += cand_d[j] - old
                        pair[mi][j] = pair[j][mi] = cand_d[j]
                    row_sums[mi] = cand_sum - cand_d[mi]
                    total = new_total
                    members[mi] = cand
                    swaps += 1
                    break

    n_pairs = m * (m - 1) / 2
    achieved = total / n_pairs if n_pairs else 0.0
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return HighlightResult(
        points=[index.ids[i] for i in members],
        anchor=index.ids[p_star],
        achieved_diversity_m=achieved,
        elapsed_ms=elapsed_ms,
        normalized_diversity=(achieved / index.diameter_m) if index.diameter_m > 0 else None,
        swaps=swaps,
        scanned=scanned,
        cold_start=cold,
    )
