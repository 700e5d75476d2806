"""Quadtree over dataset points in geo space, and region-to-point matching.

The tree is built once per dataset (offline) and shared read-only. Matching
projects each dense region's pixel vertices into the lon/lat plane, prunes
tree cells with a rectangle-vs-convex-polygon separating-axis test, and runs
the exact containment test only on points in surviving leaves, so the result
is identical to brute-force containment over every point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, Sequence

from .errors import EmptyDatasetError
from .geometry import Point2, ViewportRef, check_viewport, pixel_to_lonlat, point_in_convex
from .idr import IdrSet
from .ingestion import PointRecord

DEFAULT_CAPACITY = 64
DEFAULT_MAX_DEPTH = 12


class _Node:
    __slots__ = ("x0", "y0", "x1", "y1", "depth", "points", "children")

    def __init__(self, x0: float, y0: float, x1: float, y1: float, depth: int):
        self.x0 = x0
        self.y0 = y0
        self.x1 = x1
        self.y1 = y1
        self.depth = depth
        self.points: List[int] | None = []  # dataset positions; None once split
        self.children: List["_Node"] | None = None

    def is_leaf(self) -> bool:
        return self.children is None


class Quadtree:
    """Static quadtree; leaves hold at most ``capacity`` points unless at max depth."""

    def __init__(
        self,
        points: Sequence[PointRecord],
        capacity: int = DEFAULT_CAPACITY,
        max_depth: int = DEFAULT_MAX_DEPTH,
    ):
        if not points:
            raise EmptyDatasetError("cannot index an empty dataset")
        if capacity < 1 or int(capacity) != capacity:
            raise ValueError(f"capacity must be an integer >= 1, got {capacity}")
        if max_depth < 1 or int(max_depth) != max_depth:
            raise ValueError(f"max_depth must be an integer >= 1, got {max_depth}")
        self.points = tuple(points)
        self.capacity = int(capacity)
        self.max_depth = int(max_depth)
        xs = [p.location.lon for p in points]
        ys = [p.location.lat for p in points]
        self.root = _Node(min(xs), min(ys), max(xs), max(ys), depth=0)
        self._coords = [(p.location.lon, p.location.lat) for p in points]
        self._leaf_of: Dict[int, _Node] = {}
        for pos in range(len(points)):
            self._insert(self.root, pos)

    def _insert(self, node: _Node, pos: int) -> None:
        while not node.is_leaf():
            node = node.children[self._child_index(node, pos)]
        node.points.append(pos)
        self._leaf_of[pos] = node
        if len(node.points) > self.capacity and node.depth < self.max_depth:
            self._split(node)

    def _child_index(self, node: _Node, pos: int) -> int:
        x, y = self._coords[pos]
        mx = (node.x0 + node.x1) / 2.0
        my = (node.y0 + node.y1) / 2.0
        return (1 if x >= mx else 0) + (2 if y >= my else 0)

    def _split(self, node: _Node) -> None:
        mx = (node.x0 + node.x1) / 2.0
        my = (node.y0 + node.y1) / 2.0
        d = node.depth + 1
        node.children = [
            _Node(node.x0, node.y0, mx, my, d),
            _Node(mx, node.y0, node.x1, my, d),
            _Node(node.x0, my, mx, node.y1, d),
            _Node(mx, my, node.x1, node.y1, d),
        ]
        staged = node.points
        node.points = None
        for pos in staged:
            child = node.children[self._child_index(node, pos)]
            child.points.append(pos)
            self._leaf_of[pos] = child
        for child in node.children:
            if len(child.points) > self.capacity and child.depth < self.max_depth:
                self._split(child)

    def leaves(self) -> List[_Node]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf():
                out.append(node)
            else:
                stack.extend(node.children)
        return out

    def leaf_of(self, pos: int) -> _Node:
        """The single leaf holding the dataset position ``pos``."""
        return self._leaf_of[pos]

    def candidate_positions(self, ring: Sequence[Point2]) -> List[int]:
        """Positions in every leaf whose rectangle intersects the convex CCW ring."""
        out: List[int] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not _rect_intersects_convex(node.x0, node.y0, node.x1, node.y1, ring):
                continue
            if node.is_leaf():
                out.extend(node.points)
            else:
                stack.extend(node.children)
        return out


def _rect_intersects_convex(
    x0: float, y0: float, x1: float, y1: float, ring: Sequence[Point2]
) -> bool:
    """Separating-axis test between an axis-aligned rectangle and a convex CCW ring.

    Borderline cases count as intersecting, so pruning stays conservative.
    """
    rx = [v[0] for v in ring]
    ry = [v[1] for v in ring]
    eps = 1e-12 * max(x1 - x0, y1 - y0, max(rx) - min(rx), max(ry) - min(ry), 1e-9)
    if min(rx) > x1 + eps or max(rx) < x0 - eps:
        return False
    if min(ry) > y1 + eps or max(ry) < y0 - eps:
        return False
    corners = ((x0, y0), (x1, y0), (x0, y1), (x1, y1))
    n = len(ring)
    for i in range(n):
        ax, ay = ring[i]
        bx, by = ring[(i + 1) % n]
        # ring lies on the left of each edge; rect fully on the right = separated
        nx, ny = -(by - ay), bx - ax
        norm = math.hypot(nx, ny)
        if norm == 0.0:
            continue
        best = max(nx * (cx - ax) + ny * (cy - ay) for cx, cy in corners)
        if best < -eps * norm:
            return False
    return True


@dataclass(frozen=True)
class MatchResult:
    """Points found inside each dense region, plus the deduplicated union."""

    matched: Dict[int, FrozenSet[Any]]  # region id -> point ids
    all_matched: FrozenSet[Any]

    def count(self) -> int:
        return len(self.all_matched)


def build_quadtree(
    points: Sequence[PointRecord],
    capacity: int = DEFAULT_CAPACITY,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Quadtree:
    """Index the dataset; every point ends up in exactly one leaf."""
    return Quadtree(points, capacity=capacity, max_depth=max_depth)


def match_points(tree: Quadtree, idrs: IdrSet, ref: ViewportRef) -> MatchResult:
    """Find the dataset points inside each region of ``idrs``.

    Region vertices are projected from pixel to lon/lat space (edges stay
    straight under the equirectangular approximation), candidate leaves are
    collected with the separating-axis test, and candidates get the exact
    boundary-inclusive containment check.
    """
    check_viewport(ref)
    matched: Dict[int, FrozenSet[Any]] = {}
    union: set = set()
    for idr in idrs:
        ring = [pixel_to_lonlat(x, y, ref) for x, y in idr.region.vertices]
        hits = set()
        for pos in tree.candidate_positions(ring):
            if point_in_convex(ring, tree._coords[pos]):
                hits.add(tree.points[pos].id)
        matched[idr.id] = frozenset(hits)
        union |= hits
    return MatchResult(matched=matched, all_matched=frozenset(union))
