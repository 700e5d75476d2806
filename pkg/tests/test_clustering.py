import random

import pytest

from geohighlight.clustering import (
    Cluster,
    DbscanParams,
    MoveLog,
    dbscan_cluster,
    segment_moves,
)
from geohighlight.geometry import MovePoint

from .oracles import dbscan_closure, segment_filter


def mp(x, y, t=0.0):
    return MovePoint(float(x), float(y), float(t))


# --- MoveLog throttle --------------------------------------------------------


def test_movelog_first_event_accepted():
    log = MoveLog()
    assert log.append(mp(0, 0, 1000.0))
    assert len(log) == 1


def test_movelog_throttles_fast_events():
    log = MoveLog()
    assert log.append(mp(0, 0, 1000.0))
    assert not log.append(mp(1, 1, 1050.0))  # 50 ms later
    assert log.append(mp(2, 2, 1200.0))  # exactly 200 ms after the stored one
    assert [m.t for m in log] == [1000.0, 1200.0]


def test_movelog_throttle_measures_from_stored_not_rejected():
    log = MoveLog()
    log.append(mp(0, 0, 0.0))
    assert not log.append(mp(0, 0, 150.0))
    assert not log.append(mp(0, 0, 199.0))  # still within 200 of the stored event
    assert log.append(mp(0, 0, 210.0))


def test_movelog_rejects_invalid():
    log = MoveLog()
    with pytest.raises(ValueError):
        log.append(MovePoint(0.0, 0.0, None))
    with pytest.raises(ValueError):
        log.append(mp(float("nan"), 0, 0))
    with pytest.raises(ValueError):
        log.append(mp(0, 0, -5))


def test_movelog_poisson_stream_matches_replayed_throttle():
    rng = random.Random(77)
    t = 0.0
    events = []
    while t < 60_000.0:
        t += rng.expovariate(10.0) * 1000.0  # ~10 Hz
        events.append(mp(rng.uniform(-100, 100), rng.uniform(-100, 100), t))
    log = MoveLog()
    stored = sum(1 for e in events if log.append(e))
    # independent replay of the rule: keep iff >= 200ms after last kept
    last = None
    expected = 0
    for e in events:
        if last is None or e.t - last >= 200.0:
            expected += 1
            last = e.t
    assert stored == expected == len(log)


# --- segmentation ------------------------------------------------------------


def test_segment_empty_log():
    segments = segment_moves([], t_c=1000.0, g=3)
    assert segments == [[], [], []]


def test_segment_uniform_spacing():
    moves = [mp(0, 0, 10), mp(1, 1, 20), mp(2, 2, 30)]
    segments = segment_moves(moves, t_c=30.0, g=3)
    assert [[m.t for m in s] for s in segments] == [[10.0], [20.0], [30.0]]


def test_segment_boundary_goes_to_earlier_segment():
    moves = [mp(0, 0, 0), mp(0, 0, 50), mp(0, 0, 100)]
    segments = segment_moves(moves, t_c=100.0, g=2)
    assert [m.t for m in segments[0]] == [0.0, 50.0]  # 50 is the boundary
    assert [m.t for m in segments[1]] == [100.0]


def test_segment_all_at_zero():
    segments = segment_moves([mp(0, 0, 0), mp(1, 1, 0)], t_c=0.0, g=3)
    assert len(segments[0]) == 2
    assert segments[1] == [] and segments[2] == []


def test_segment_requires_t_c_covering_moves():
    with pytest.raises(ValueError):
        segment_moves([mp(0, 0, 500)], t_c=100.0, g=2)


def test_segment_matches_predicate_oracle():
    rng = random.Random(55)
    t_c = 90_000.0
    moves = [mp(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, t_c)) for _ in range(500)]
    moves.sort(key=lambda m: m.t)
    for g in (1, 2, 4, 7):
        ours = segment_moves(moves, t_c, g)
        ref = segment_filter(moves, t_c, g)
        assert [[m.t for m in s] for s in ours] == [[m.t for m in s] for s in ref]
    # partition: every move in exactly one segment
    ours = segment_moves(moves, t_c, 4)
    assert sum(len(s) for s in ours) == len(moves)


# --- dbscan ------------------------------------------------------------------


def test_params_validation():
    with pytest.raises(ValueError):
        DbscanParams(eps=0.0)
    with pytest.raises(ValueError):
        DbscanParams(min_pts=1)


def test_single_dense_blob_is_one_cluster():
    pts = [mp(i % 3, i // 3, i * 300) for i in range(9)]  # all within eps of each other
    clusters = dbscan_cluster(pts, DbscanParams(eps=5.0, min_pts=5))
    assert len(clusters) == 1
    assert set(clusters[0].members) == set(pts)


def test_sparse_points_are_noise():
    pts = [mp(i * 100, 0, i * 300) for i in range(6)]
    assert dbscan_cluster(pts, DbscanParams(eps=10.0, min_pts=2)) == []


def test_two_blobs_two_clusters():
    rng = random.Random(3)
    blob_a = [mp(rng.gauss(0, 3), rng.gauss(0, 3), i * 250) for i in range(50)]
    blob_b = [mp(rng.gauss(500, 3), rng.gauss(500, 3), (50 + i) * 250) for i in range(50)]
    clusters = dbscan_cluster(blob_a + blob_b, DbscanParams(eps=15.0, min_pts=5))
    assert len(clusters) == 2
    assert set(clusters[0].members) == set(blob_a)
    assert set(clusters[1].members) == set(blob_b)


def test_deterministic_under_rerun():
    rng = random.Random(11)
    pts = [mp(rng.uniform(0, 100), rng.uniform(0, 100), i * 210) for i in range(120)]
    params = DbscanParams(eps=12.0, min_pts=4)
    a = dbscan_cluster(pts, params)
    b = dbscan_cluster(pts, params)
    assert a == b


def test_cluster_segment_index_recorded():
    pts = [mp(0, i, i * 210) for i in range(6)]
    clusters = dbscan_cluster(pts, DbscanParams(eps=2.0, min_pts=3), segment_index=4)
    assert clusters and all(c.segment_index == 4 for c in clusters)


def _assert_matches_closure(pts, params):
    coords = [(m.x, m.y) for m in pts]
    ref_labels, core = dbscan_closure(coords, params.eps, params.min_pts)
    clusters = dbscan_cluster(pts, params)
    # each point -> our cluster index
    ours = {}
    for ci, cluster in enumerate(clusters):
        for m in cluster.members:
            assert m not in ours, "clusters must be disjoint"
            ours[m] = ci
    # core points: cluster partition must equal the closure components exactly
    core_to_ours = {}
    core_to_ref = {}
    for i, m in enumerate(pts):
        if core[i]:
            assert m in ours, "every core point belongs to a cluster"
            assert core_to_ours.setdefault(ref_labels[i], ours[m]) == ours[m]
            assert core_to_ref.setdefault(ours[m], ref_labels[i]) == ref_labels[i]
        if ref_labels[i] is None and not core[i]:
            # border or noise: if clustered, must be within eps of a core point of that cluster
            if m in ours:
                ci = ours[m]
                assert any(
                    core[j]
                    and ours.get(pts[j]) == ci
                    and (pts[j].x - m.x) ** 2 + (pts[j].y - m.y) ** 2 <= params.eps ** 2
                    for j in range(len(pts))
                )


def test_dbscan_matches_closure_oracle():
    rng = random.Random(2025)
    for trial in range(30):
        n = rng.randint(20, 150)
        pts = []
        for i in range(n):
            if rng.random() < 0.7:
                cx, cy = rng.choice([(0, 0), (60, 10), (30, 80)])
                pts.append(mp(rng.gauss(cx, 6), rng.gauss(cy, 6), i * 210))
            else:
                pts.append(mp(rng.uniform(-50, 130), rng.uniform(-50, 130), i * 210))
        _assert_matches_closure(pts, DbscanParams(eps=10.0, min_pts=4))


def test_union_of_clusters_subset_of_segment():
    rng = random.Random(17)
    pts = [mp(rng.uniform(0, 50), rng.uniform(0, 50), i * 200) for i in range(80)]
    clusters = dbscan_cluster(pts, DbscanParams(eps=6.0, min_pts=4))
    clustered = [m for c in clusters for m in c.members]
    assert len(clustered) == len(set(clustered))  # pairwise disjoint
    assert set(clustered) <= set(pts)
