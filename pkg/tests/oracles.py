"""Independent brute-force oracles used to check the library's fast paths.

Everything here is deliberately naive (gift wrapping, ray casting, transitive
closure, exhaustive scans) and shares no code with the implementations it
verifies.
"""

from __future__ import annotations

import math


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def gift_wrap_hull(points):
    """Jarvis march; returns CCW hull vertices, collinear edge points excluded.

    Intended for integer coordinates, where collinearity tests are exact.
    """
    pts = sorted(set((float(x), float(y)) for x, y in points))
    start = pts[0]
    hull = [start]
    current = start
    while True:
        candidate = None
        for p in pts:
            if p == current:
                continue
            if candidate is None:
                candidate = p
                continue
            c = cross(current, candidate, p)
            if c > 0:
                candidate = p  # p lies left of current->candidate: more counter-clockwise
            elif c == 0:
                # collinear: keep the farthest so edge-interior points never become vertices
                d_p = (p[0] - current[0]) ** 2 + (p[1] - current[1]) ** 2
                d_c = (candidate[0] - current[0]) ** 2 + (candidate[1] - current[1]) ** 2
                if d_p > d_c:
                    candidate = p
        if candidate == start:
            break
        hull.append(candidate)
        current = candidate
        if len(hull) > len(pts) + 1:
            raise RuntimeError("gift wrapping failed to close")
    return hull


def ray_cast_contains(vertices, pt):
    """Even-odd ray casting with an explicit on-boundary check (counts as inside)."""
    x, y = pt
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        if _on_segment(x, y, ax, ay, bx, by):
            return True
    inside = False
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        if (ay > y) != (by > y):
            x_at = (bx - ax) * (y - ay) / (by - ay) + ax
            if x < x_at:
                inside = not inside
    return inside


def _on_segment(px, py, ax, ay, bx, by, eps=1e-12):
    c = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if abs(c) > eps * max(abs(bx - ax) + abs(by - ay), 1.0):
        return False
    dot = (px - ax) * (px - bx) + (py - ay) * (py - by)
    return dot <= eps


def segment_filter(moves, t_c, g):
    """Direct evaluation of the segment membership predicate per move."""
    segments = [[] for _ in range(g)]
    for m in moves:
        for i in range(g):
            lo = t_c * i / g
            hi = t_c * (i + 1) / g
            lower_ok = m.t >= lo if i == 0 else m.t > lo
            if lower_ok and m.t <= hi:
                segments[i].append(m)
                break
    return segments


def dbscan_closure(coords, eps, min_pts):
    """Cluster core points by transitive closure over the eps-graph.

    Returns (core_labels, core_flags): labels index connected components of
    core points; non-core entries get None. Border assignment is order
    dependent in any DBSCAN, so only core memberships are compared. The
    adjacency matrix uses numpy for speed; the closure itself is a plain BFS.
    """
    import numpy as np

    pts = np.asarray(coords, dtype=float)
    n = len(pts)
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
    adjacent = d2 <= eps * eps
    core = [int(adjacent[i].sum()) >= min_pts for i in range(n)]
    labels = [None] * n
    current = 0
    for i in range(n):
        if not core[i] or labels[i] is not None:
            continue
        stack = [i]
        labels[i] = current
        while stack:
            u = stack.pop()
            for v in range(n):
                if core[v] and labels[v] is None and adjacent[u, v]:
                    labels[v] = current
                    stack.append(v)
        current += 1
    return labels, core


def brute_force_matches(points, rings):
    """Containment of every point in every ring, no index: {ring_idx: set of ids}."""
    out = {}
    for ri, ring in enumerate(rings):
        hits = set()
        for p in points:
            if ray_cast_contains(ring, (p.location.lon, p.location.lat)):
                hits.add(p.id)
        out[ri] = hits
    return out


def polygon_area(vertices):
    total = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return abs(total) / 2.0


def sphere_distance(lat1, lon1, lat2, lon2, radius=6_371_000.0):
    """Great-circle via 3D chord and atan2; algebraically independent of haversine."""
    p1 = math.radians(lat1), math.radians(lon1)
    p2 = math.radians(lat2), math.radians(lon2)
    v1 = (math.cos(p1[0]) * math.cos(p1[1]), math.cos(p1[0]) * math.sin(p1[1]), math.sin(p1[0]))
    v2 = (math.cos(p2[0]) * math.cos(p2[1]), math.cos(p2[0]) * math.sin(p2[1]), math.sin(p2[0]))
    cx = v1[1] * v2[2] - v1[2] * v2[1]
    cy = v1[2] * v2[0] - v1[0] * v2[2]
    cz = v1[0] * v2[1] - v1[1] * v2[0]
    cross_norm = math.sqrt(cx * cx + cy * cy + cz * cz)
    dot = v1[0] * v2[0] + v1[1] * v2[1] + v1[2] * v2[2]
    return radius * math.atan2(cross_norm, dot)
