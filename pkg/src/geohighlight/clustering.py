"""Time segmentation of the mouse-move stream and density clustering per segment.

Timestamps handed to :func:`segment_moves` are session-relative milliseconds
(t = 0 when the session started). Clustering runs on pixel coordinates with
plain Euclidean distance; the time dimension is already isolated by the
segmentation, so no temporal distance enters the cluster definition.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence

import numpy as np

from .geometry import MovePoint

THROTTLE_MS = 200.0


class MoveLog:
    """Time-ordered mouse samples with the ingestion throttle applied.

    Consecutive stored samples are at least 200 ms apart; samples arriving
    earlier than that after the last stored one are acknowledged but dropped.
    """

    __slots__ = ("_moves",)

    def __init__(self, moves: Iterable[MovePoint] = ()):
        self._moves: List[MovePoint] = []
        for m in moves:
            self.append(m)

    def append(self, move: MovePoint) -> bool:
        """Store the sample if the throttle allows it; return whether it was stored."""
        if move.t is None or not np.isfinite([move.x, move.y, move.t]).all() or move.t < 0:
            raise ValueError(f"move point {move!r} has no finite coordinates/timestamp")
        if self._moves and move.t - self._moves[-1].t < THROTTLE_MS:
            return False
        self._moves.append(move)
        return True

    def __len__(self) -> int:
        return len(self._moves)

    def __iter__(self) -> Iterator[MovePoint]:
        return iter(self._moves)

    def __getitem__(self, i):
        return self._moves[i]

    def last_t(self) -> float | None:
        return self._moves[-1].t if self._moves else None


@dataclass(frozen=True)
class DbscanParams:
    """Density parameters: neighborhood radius in pixels and minimum neighborhood size."""

    eps: float = 40.0
    min_pts: int = 5

    def __post_init__(self):
        if not (self.eps > 0):
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if int(self.min_pts) != self.min_pts or self.min_pts < 2:
            raise ValueError(f"min_pts must be an integer >= 2, got {self.min_pts}")


@dataclass(frozen=True)
class Cluster:
    """A maximal density-connected set of mouse samples within one time segment."""

    members: tuple[MovePoint, ...]
    segment_index: int


def segment_moves(
    moves: Iterable[MovePoint], t_c: float, g: int
) -> List[List[MovePoint]]:
    """Split session-relative moves into g consecutive equal time spans.

    Segment i covers [t_c*i/g, t_c*(i+1)/g]; a move landing exactly on an
    interior boundary belongs to the earlier segment only.
    """
    if g < 1 or int(g) != g:
        raise ValueError(f"g must be an integer >= 1, got {g}")
    stored = list(moves)
    if any(m.t is None for m in stored):
        raise ValueError("moves must carry timestamps")
    if stored and max(m.t for m in stored) > t_c:
        raise ValueError("t_c must be >= every stored timestamp")
    segments: List[List[MovePoint]] = [[] for _ in range(g)]
    for i in range(g):
        lo = t_c * i / g
        hi = t_c * (i + 1) / g
        for m in stored:
            if (m.t > lo or (i == 0 and m.t >= lo)) and m.t <= hi:
                segments[i].append(m)
    return segments


def _neighborhoods(coords: np.ndarray, eps: float) -> list[np.ndarray]:
    """Index arrays of eps-neighbors (inclusive of self) per point."""
    d2 = ((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=-1)
    within = d2 <= eps * eps
    return [np.flatnonzero(row) for row in within]


def dbscan_cluster(
    segment: Sequence[MovePoint], params: DbscanParams, segment_index: int = 0
) -> List[Cluster]:
    """Density-based clustering of one segment's samples in pixel space.

    A point is a core point when at least ``min_pts`` samples (itself
    included) lie within ``eps`` of it. Clusters are the maximal sets of
    points density-reachable from a core point; remaining points are noise.
    Points are visited in stored order, so border points reachable from
    several clusters deterministically join the first cluster that reaches
    them and repeated runs produce identical output.
    """
    pts = list(segment)
    n = len(pts)
    if n == 0:
        return []
    coords = np.array([(m.x, m.y) for m in pts], dtype=float)
    neighborhoods = _neighborhoods(coords, params.eps)
    is_core = [len(nb) >= params.min_pts for nb in neighborhoods]

    UNVISITED = -2
    NOISE = -1
    labels = [UNVISITED] * n
    n_clusters = 0
    for start in range(n):
        if labels[start] != UNVISITED or not is_core[start]:
            continue
        cluster_id = n_clusters
        n_clusters += 1
        labels[start] = cluster_id
        queue = deque([start])
        while queue:
            j = queue.popleft()
            for nb in neighborhoods[j]:
                if labels[nb] in (UNVISITED, NOISE):
                    labels[nb] = cluster_id
                    if is_core[nb]:
                        queue.append(nb)
    for i in range(n):
        if labels[i] == UNVISITED:
            labels[i] = NOISE

    clusters = []
    for cid in range(n_clusters):
        members = tuple(pts[i] for i in range(n) if labels[i] == cid)
        clusters.append(Cluster(members=members, segment_index=segment_index))
    return clusters
