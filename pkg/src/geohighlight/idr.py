"""Interesting dense regions: cluster hulls intersected across time segments.

A region of the screen counts as interesting when the analyst's mouse was
dense there in two distinct time segments; the IDR is the intersection of the
two cluster hulls. Intersections are taken over unordered segment pairs so a
region is never emitted twice, and hulls that collapse to a point or line are
dropped because a zero-area region can never contain a dataset point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence

from .clustering import DbscanParams, dbscan_cluster, segment_moves
from .errors import DegenerateGeometryError
from .geometry import ConvexPolygon, MovePoint, ViewportRef, convex_intersect, pixel_to_lonlat, quickhull

DEFAULT_MIN_AREA_PX2 = 1.0


@dataclass(frozen=True)
class IDR:
    """One interesting dense region in pixel space."""

    id: int
    region: ConvexPolygon
    source_segments: tuple[int, int]  # distinct segment indexes, ascending


@dataclass(frozen=True)
class IdrSet:
    """All IDRs found at one pipeline invocation time."""

    idrs: tuple[IDR, ...]
    computed_at: float  # session-relative ms of the invocation

    def __len__(self) -> int:
        return len(self.idrs)

    def __iter__(self):
        return iter(self.idrs)


def segment_hulls(
    moves: Iterable[MovePoint], t_c: float, g: int, params: DbscanParams
) -> List[List[ConvexPolygon]]:
    """Cluster each time segment and hull every cluster; degenerate hulls are dropped."""
    segments = segment_moves(moves, t_c, g)
    hulls: List[List[ConvexPolygon]] = []
    for i, segment in enumerate(segments):
        polys: List[ConvexPolygon] = []
        for cluster in dbscan_cluster(segment, params, segment_index=i):
            try:
                polys.append(quickhull((m.x, m.y) for m in cluster.members))
            except DegenerateGeometryError:
                continue
        hulls.append(polys)
    return hulls


def pair_intersections(
    hulls: Sequence[Sequence[ConvexPolygon]],
    t_c: float,
    min_area: float = DEFAULT_MIN_AREA_PX2,
) -> IdrSet:
    """Intersect every hull pair from distinct segments, in deterministic order.

    Pairs are visited ascending by (i, j) with i < j, then by each segment's
    cluster creation order; surviving intersections get sequential ids.
    """
    idrs: List[IDR] = []
    g = len(hulls)
    for i in range(g):
        for j in range(i + 1, g):
            for a in hulls[i]:
                for b in hulls[j]:
                    region = convex_intersect(a, b, min_area=min_area)
                    if region is not None:
                        idrs.append(IDR(id=len(idrs), region=region, source_segments=(i, j)))
    return IdrSet(idrs=tuple(idrs), computed_at=t_c)


def find_idrs(
    moves: Iterable[MovePoint],
    t_c: float,
    g: int,
    params: DbscanParams,
    min_area: float = DEFAULT_MIN_AREA_PX2,
) -> IdrSet:
    """Full region discovery: segment, cluster, hull, intersect."""
    return pair_intersections(segment_hulls(moves, t_c, g, params), t_c, min_area=min_area)


def idr_set_to_document(idr_set: IdrSet, ref: ViewportRef) -> dict:
    """Serializable listing of the IDRs with pixel and geo vertices."""
    items = []
    for idr in idr_set:
        geo = [pixel_to_lonlat(x, y, ref) for x, y in idr.region.vertices]
        items.append(
            {
                "id": idr.id,
                "source_segments": list(idr.source_segments),
                "vertices_px": [[x, y] for x, y in idr.region.vertices],
                "vertices_geo": [{"lat": lat, "lon": lon} for lon, lat in geo],
                "area_px2": idr.region.area(),
            }
        )
    return {"computed_at": idr_set.computed_at, "count": len(idr_set), "idrs": items}
