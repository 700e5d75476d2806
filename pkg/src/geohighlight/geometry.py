"""Planar and spherical geometry primitives.

Coordinates live in two planes: the interaction plane (pixels, origin at the
viewport center, y growing north) and the spatial plane (degrees latitude and
longitude). The two are linked by an equirectangular approximation around the
viewport center; convex polygons, hulls and containment tests work on either
plane because both are plain 2D coordinate systems.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple

from .errors import DegenerateGeometryError, OutOfRangeError, PoleSingularityError

EARTH_RADIUS_M = 6_371_000.0

Point2 = Tuple[float, float]


class GeoPoint(NamedTuple):
    """A latitude/longitude pair in degrees."""

    lat: float
    lon: float


class MovePoint(NamedTuple):
    """A mouse sample in centered pixel coordinates; ``t`` is epoch milliseconds.

    ``t`` is None for synthetic pixel positions that never came from an input
    device (e.g. re-projected dataset points).
    """

    x: float
    y: float
    t: Optional[float] = None


class ViewportRef(NamedTuple):
    """Viewport anchor: geo coordinates of the pixel origin plus degrees-per-pixel."""

    gamma: float  # latitude of the viewport center
    theta: float  # longitude of the viewport center
    scale: float  # degrees per pixel, > 0


def check_viewport(ref: ViewportRef) -> None:
    """Validate a viewport reference, raising OutOfRangeError on bad fields."""
    if not (math.isfinite(ref.gamma) and -90.0 <= ref.gamma <= 90.0):
        raise OutOfRangeError(f"viewport latitude {ref.gamma!r} outside [-90, 90]")
    if not (math.isfinite(ref.theta) and -180.0 < ref.theta <= 180.0):
        raise OutOfRangeError(f"viewport longitude {ref.theta!r} outside (-180, 180]")
    if not (math.isfinite(ref.scale) and ref.scale > 0.0):
        raise OutOfRangeError(f"viewport scale {ref.scale!r} must be > 0")


def check_geo_point(lat: float, lon: float) -> None:
    """Validate a latitude/longitude pair in degrees."""
    if not (math.isfinite(lat) and -90.0 <= lat <= 90.0):
        raise OutOfRangeError(f"latitude {lat!r} outside [-90, 90]")
    if not (math.isfinite(lon) and -180.0 < lon <= 180.0):
        raise OutOfRangeError(f"longitude {lon!r} outside (-180, 180]")


def _require_off_pole(ref: ViewportRef) -> float:
    """Return cos(gamma), refusing viewports centered on a pole."""
    if abs(ref.gamma) >= 90.0:
        raise PoleSingularityError("viewport centered on a pole; longitude is undefined")
    return math.cos(math.radians(ref.gamma))


def _wrap_lon(lon: float) -> float:
    """Wrap a longitude in degrees into (-180, 180]."""
    wrapped = math.fmod(lon + 180.0, 360.0)
    if wrapped <= 0.0:
        wrapped += 360.0
    return wrapped - 180.0


def pixel_to_lonlat(x: float, y: float, ref: ViewportRef) -> Point2:
    """Raw equirectangular pixel-to-degree transform; no clamping, no wrapping."""
    cos_gamma = _require_off_pole(ref)
    lon = (x * ref.scale) / cos_gamma + ref.theta
    lat = y * ref.scale + ref.gamma
    return lon, lat


def pixel_to_geo(m: MovePoint, ref: ViewportRef, clamp: bool = True) -> GeoPoint:
    """Project a pixel position onto the spatial plane.

    With ``clamp`` (the default) the latitude is clamped to [-90, 90] and the
    longitude wrapped into (-180, 180]; with ``clamp=False`` an out-of-range
    result raises OutOfRangeError instead.
    """
    check_viewport(ref)
    lon, lat = pixel_to_lonlat(m.x, m.y, ref)
    if clamp:
        lat = min(90.0, max(-90.0, lat))
        if lon <= -180.0 or lon > 180.0:
            lon = _wrap_lon(lon)
    else:
        check_geo_point(lat, lon)
    return GeoPoint(lat=lat, lon=lon)


def geo_to_pixel(p: GeoPoint, ref: ViewportRef) -> MovePoint:
    """Project a geo point onto the interaction plane; the result carries no timestamp."""
    check_viewport(ref)
    cos_gamma = _require_off_pole(ref)
    x = ((p.lon - ref.theta) * cos_gamma) / ref.scale
    y = (p.lat - ref.gamma) / ref.scale
    return MovePoint(x=x, y=y, t=None)


def haversine_distance(p: GeoPoint, q: GeoPoint) -> float:
    """Great-circle distance in meters on a sphere of radius 6,371,000 m."""
    phi1 = math.radians(p.lat)
    phi2 = math.radians(q.lat)
    dphi = math.radians(q.lat - p.lat)
    dlambda = math.radians(q.lon - p.lon)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlambda / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.atan2(math.sqrt(a), math.sqrt(1.0 - a))


# ---------------------------------------------------------------------------
# Convex polygons
# ---------------------------------------------------------------------------


def _cross(a: Point2, b: Point2, p: Point2) -> float:
    """z of (b - a) x (p - a); positive when p is left of the directed line a->b."""
    return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])


def _extent(vertices: Sequence[Point2]) -> float:
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    return max(max(xs) - min(xs), max(ys) - min(ys), 1e-12)


def _clean_ring(vertices: Sequence[Point2], eps: float) -> list[Point2]:
    """Drop repeated and collinear vertices from a closed ring."""
    verts = [(float(x), float(y)) for x, y in vertices]
    out: list[Point2] = []
    for v in verts:
        if not out or abs(v[0] - out[-1][0]) > eps or abs(v[1] - out[-1][1]) > eps:
            out.append(v)
    while len(out) > 1 and abs(out[0][0] - out[-1][0]) <= eps and abs(out[0][1] - out[-1][1]) <= eps:
        out.pop()
    if len(out) < 3:
        return out
    # collinear elimination: keep a vertex only if the ring actually turns there
    kept: list[Point2] = []
    n = len(out)
    for i, v in enumerate(out):
        a, b = out[i - 1], out[(i + 1) % n]
        edge = math.hypot(b[0] - a[0], b[1] - a[1])
        if abs(_cross(a, b, v)) > eps * max(edge, eps):
            kept.append(v)
    return kept


def signed_area(vertices: Sequence[Point2]) -> float:
    """Shoelace area; positive for counter-clockwise rings."""
    total = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return total / 2.0


class ConvexPolygon:
    """A strictly convex polygon with canonical vertex order.

    Vertices are stored counter-clockwise starting from the lexicographically
    smallest vertex, so equal regions compare equal regardless of how their
    vertex lists were produced.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Sequence[Point2]):
        raw = [(float(x), float(y)) for x, y in vertices]
        if len(raw) < 3:
            raise DegenerateGeometryError(f"need >= 3 vertices, got {len(raw)}")
        eps = 1e-9 * _extent(raw)
        verts = _clean_ring(raw, eps)
        if len(verts) < 3:
            raise DegenerateGeometryError("polygon collapses to a point or segment")
        if signed_area(verts) < 0.0:
            verts.reverse()
        n = len(verts)
        for i in range(n):
            if _cross(verts[i], verts[(i + 1) % n], verts[(i + 2) % n]) <= 0.0:
                raise DegenerateGeometryError("vertices do not form a convex ring")
        start = min(range(n), key=lambda i: verts[i])
        self.vertices: tuple[Point2, ...] = tuple(verts[start:] + verts[:start])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConvexPolygon) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"ConvexPolygon({list(self.vertices)!r})"

    def area(self) -> float:
        return signed_area(self.vertices)

    def contains(self, pt: Point2) -> bool:
        return point_in_convex(self.vertices, pt)

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(min_x, min_y, max_x, max_y)."""
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


def point_in_convex(vertices: Sequence[Point2], pt: Point2, eps: float | None = None) -> bool:
    """True iff pt lies inside or on the boundary of a CCW convex ring."""
    if eps is None:
        eps = 1e-9 * _extent(vertices)
    n = len(vertices)
    px, py = float(pt[0]), float(pt[1])
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        edge = math.hypot(b[0] - a[0], b[1] - a[1])
        if _cross(a, b, (px, py)) < -eps * max(edge, eps):
            return False
    return True


def quickhull(points: Iterable[Point2]) -> ConvexPolygon:
    """Convex hull of a point set via recursive farthest-point partitioning.

    Raises DegenerateGeometryError when fewer than three distinct points are
    given or all points are collinear. Hull vertices are a subset of the
    inputs; points lying on a hull edge are not emitted as vertices.
    """
    pts = sorted({(float(x), float(y)) for x, y in points})
    if len(pts) < 3:
        raise DegenerateGeometryError(f"hull needs >= 3 distinct points, got {len(pts)}")
    eps = 1e-9 * _extent(pts)
    a, b = pts[0], pts[-1]

    def side(p: Point2, u: Point2, v: Point2) -> float:
        edge = math.hypot(v[0] - u[0], v[1] - u[1])
        return _cross(u, v, p) / max(edge, eps)

    def expand(candidates: list[Point2], u: Point2, v: Point2) -> list[Point2]:
        # chain of hull vertices strictly left of u->v, ordered u..v exclusive
        if not candidates:
            return []
        far = max(candidates, key=lambda p: (side(p, u, v), p))
        left_uf = [p for p in candidates if side(p, u, far) > eps]
        left_fv = [p for p in candidates if side(p, far, v) > eps]
        return expand(left_uf, u, far) + [far] + expand(left_fv, far, v)

    upper = [p for p in pts if side(p, a, b) > eps]
    lower = [p for p in pts if side(p, b, a) > eps]
    if not upper and not lower:
        raise DegenerateGeometryError("all points are collinear")
    ring = [a] + expand(upper, a, b) + [b] + expand(lower, b, a)
    ring.reverse()  # constructed clockwise; polygons are CCW
    return ConvexPolygon(ring)


def _clip_by_halfplane(subject: list[Point2], a: Point2, b: Point2) -> list[Point2]:
    """Keep the part of the subject ring on/left of the directed edge a->b."""
    if not subject:
        return []
    out: list[Point2] = []
    prev = subject[-1]
    prev_side = _cross(a, b, prev)
    for cur in subject:
        cur_side = _cross(a, b, cur)
        if cur_side >= 0.0:
            if prev_side < 0.0:
                out.append(_edge_intersection(prev, cur, a, b))
            out.append(cur)
        elif prev_side >= 0.0:
            out.append(_edge_intersection(prev, cur, a, b))
        prev, prev_side = cur, cur_side
    return out


def _edge_intersection(s: Point2, e: Point2, a: Point2, b: Point2) -> Point2:
    dx_se = e[0] - s[0]
    dy_se = e[1] - s[1]
    dx_ba = b[0] - a[0]
    dy_ba = b[1] - a[1]
    denom = dx_se * dy_ba - dy_se * dx_ba
    if denom == 0.0:
        return e
    t = ((a[0] - s[0]) * dy_ba - (a[1] - s[1]) * dx_ba) / denom
    return (s[0] + t * dx_se, s[1] + t * dy_se)


def convex_intersect(
    a: ConvexPolygon, b: ConvexPolygon, min_area: float = 0.0
) -> Optional[ConvexPolygon]:
    """Intersection of two convex polygons, or None when it is empty.

    The intersection is computed by clipping ``a`` against each edge of ``b``
    (Sutherland-Hodgman, valid here because the clip region is convex).
    Results that degenerate to a point or segment, or whose area does not
    exceed ``min_area``, count as empty.
    """
    ring = list(a.vertices)
    bv = b.vertices
    for i in range(len(bv)):
        ring = _clip_by_halfplane(ring, bv[i], bv[(i + 1) % len(bv)])
        if not ring:
            return None
    eps = 1e-9 * max(_extent(a.vertices), _extent(b.vertices))
    ring = _clean_ring(ring, eps)
    if len(ring) < 3:
        return None
    area = abs(signed_area(ring))
    if area <= max(min_area, eps * eps):
        return None
    return ConvexPolygon(ring)


def contains(poly: ConvexPolygon, pt: Point2) -> bool:
    """True iff pt is inside ``poly`` or on its boundary."""
    return poly.contains(pt)
