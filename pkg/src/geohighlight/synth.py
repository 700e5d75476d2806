"""Seeded generators for synthetic datasets and mouse traces.

The trace generator emits dwell-and-move trajectories: the cursor lingers in
Gaussian clouds around a few waypoints and travels linearly between them.
Revisiting the first waypoint at the end makes recurrence across time
segments likely, which is what turns dwell areas into dense regions.
"""

from __future__ import annotations

import math
from typing import List, Tuple

import numpy as np

from .geometry import GeoPoint, MovePoint, ViewportRef
from .ingestion import Attribute, AttributeSchema, Dataset, PointRecord, bin_labels, bin_numeric

PARIS_CENTER = (48.8566, 2.3522)


def synthetic_dataset(
    n: int,
    seed: int = 0,
    center: Tuple[float, float] = PARIS_CENTER,
    spread_deg: float = 0.05,
    price_bins: int = 8,
) -> Dataset:
    """Uniform points around a city center with lodging-style attributes."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    lat0, lon0 = center
    lats = rng.uniform(lat0 - spread_deg, lat0 + spread_deg, size=n)
    lons = rng.uniform(lon0 - spread_deg, lon0 + spread_deg, size=n)
    prices = np.round(rng.gamma(shape=3.0, scale=40.0, size=n) + 20.0, 2)
    beds = rng.choice(["1", "2", "+2"], size=n, p=[0.55, 0.3, 0.15])
    balcony = rng.choice(["Yes", "No"], size=n, p=[0.4, 0.6])
    aircon = rng.choice(["Yes", "No"], size=n, p=[0.25, 0.75])
    rating = rng.choice([1, 2, 3, 4, 5], size=n, p=[0.05, 0.1, 0.2, 0.35, 0.3])

    edges = bin_numeric(prices.tolist(), price_bins)
    schema = AttributeSchema(
        [
            Attribute("price", "numeric", bin_labels(edges), tuple(edges)),
            Attribute("beds", "categorical", ("1", "2", "+2")),
            Attribute("balcony", "categorical", ("Yes", "No")),
            Attribute("aircon", "categorical", ("Yes", "No")),
            Attribute("rating", "ordinal", (1, 2, 3, 4, 5)),
        ]
    )
    points = tuple(
        PointRecord(
            id=i,
            location=GeoPoint(lat=float(lats[i]), lon=float(lons[i])),
            attributes={
                "price": float(prices[i]),
                "beds": str(beds[i]),
                "balcony": str(balcony[i]),
                "aircon": str(aircon[i]),
                "rating": int(rating[i]),
            },
        )
        for i in range(n)
    )
    return Dataset(
        points=points,
        schema=schema,
        bbox=(float(lats.min()), float(lons.min()), float(lats.max()), float(lons.max())),
        source=f"synthetic(n={n}, seed={seed})",
    )


def synthetic_trace(
    seed: int = 0,
    duration_ms: float = 30_000.0,
    waypoints: int = 4,
    box: Tuple[float, float] = (800.0, 600.0),
    hz: float = 5.0,
    dwell_sigma_px: float = 12.0,
    revisit_first: bool = True,
) -> List[MovePoint]:
    """Dwell-and-move cursor trajectory over a centered pixel box.

    Session-relative timestamps, ``hz`` samples per second. With
    ``revisit_first`` the trajectory returns to its first dwell area, so the
    same screen region is dense in more than one time segment.
    """
    if waypoints < 2:
        raise ValueError(f"waypoints must be >= 2, got {waypoints}")
    rng = np.random.default_rng(seed)
    half_w, half_h = box[0] / 2.0, box[1] / 2.0
    anchors = [
        (rng.uniform(-half_w, half_w), rng.uniform(-half_h, half_h)) for _ in range(waypoints)
    ]
    if revisit_first:
        anchors.append(anchors[0])
    step_ms = 1000.0 / hz
    # split time 70% dwelling / 30% traveling
    n_dwells = len(anchors)
    n_travels = len(anchors) - 1
    dwell_ms = duration_ms * 0.7 / n_dwells
    travel_ms = duration_ms * 0.3 / max(n_travels, 1)

    moves: List[MovePoint] = []
    t = 0.0
    for i, (ax, ay) in enumerate(anchors):
        end_dwell = t + dwell_ms
        while t < end_dwell:
            moves.append(
                MovePoint(
                    x=ax + rng.normal(0.0, dwell_sigma_px),
                    y=ay + rng.normal(0.0, dwell_sigma_px),
                    t=t,
                )
            )
            t += step_ms
        if i + 1 < len(anchors):
            bx, by = anchors[i + 1]
            end_travel = t + travel_ms
            start_travel = t
            while t < end_travel:
                frac = (t - start_travel) / travel_ms
                moves.append(MovePoint(x=ax + (bx - ax) * frac, y=ay + (by - ay) * frac, t=t))
                t += step_ms
    return moves


def default_viewport(dataset: Dataset, view_px: float = 800.0) -> ViewportRef:
    """Viewport centered on the dataset with the longer bbox side spanning view_px."""
    min_lat, min_lon, max_lat, max_lon = dataset.bbox
    gamma = (min_lat + max_lat) / 2.0
    theta = (min_lon + max_lon) / 2.0
    cos_g = math.cos(math.radians(gamma))
    extent = max(max_lat - min_lat, (max_lon - min_lon) * cos_g)
    scale = extent / view_px if extent > 0 else 1e-4
    return ViewportRef(gamma=gamma, theta=theta, scale=scale)
