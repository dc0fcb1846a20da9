import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ofa_polygon.geometry import (
    ProcessTerminated,
    Segment,
    cost_profile,
    cycle_distance,
    edge_walk_distance,
    nearest_free,
)
from oracles import point_distance, sampled_nearest, walk_distances


@pytest.mark.parametrize(
    "u, v, n, expected",
    [
        (2, 0, 5, 2),
        (3, 0, 5, 2),
        (3, 3, 7, 0),
        (0, 5, 8, 3),
    ],
)
def test_cycle_distance_examples(u, v, n, expected):
    assert cycle_distance(u, v, n) == expected


def test_cycle_distance_matches_walk_enumeration():
    for n in range(3, 13):
        for u in range(n):
            ref = walk_distances(n, u)
            for v in range(n):
                d = cycle_distance(u, v, n)
                assert d == ref[v] == cycle_distance(v, u, n)
                assert 0 <= d <= n // 2
                assert (d == 0) == (u == v)


@pytest.mark.parametrize("u, v", [(-1, 0), (0, 5), (5, 5)])
def test_cycle_distance_rejects_bad_vertex(u, v):
    with pytest.raises(ValueError):
        cycle_distance(u, v, 5)


def test_edge_walk_pentagon_figure():
    for t in np.linspace(0, 1, 41):
        assert edge_walk_distance(5, 2, t, 0) == pytest.approx(2 + min(t, 1 - t), abs=1e-15)


def test_edge_walk_examples():
    assert edge_walk_distance(6, 0, 0.0, 0) == 0.0
    assert edge_walk_distance(6, 0, 0.3, 4) == pytest.approx(2.3, abs=1e-15)


def test_edge_walk_rejects_position_outside_edge():
    with pytest.raises(ValueError):
        edge_walk_distance(5, 0, 1.5, 0)


def test_edge_walk_matches_enumeration():
    rng = random.Random(3)
    for n in range(3, 13):
        for e in range(n):
            ts = [rng.random() for _ in range(60)] + [0.0, 0.5, 1.0]
            for v in range(n):
                for t in ts:
                    d = edge_walk_distance(n, e, t, v)
                    assert d == pytest.approx(point_distance(n, e, t, v), abs=1e-12)
                    assert 0 <= d <= n / 2 + 1


@given(
    n=st.integers(3, 40),
    data=st.data(),
    t=st.floats(0, 1, allow_nan=False),
)
def test_endpoint_identities(n, data, t):
    e = data.draw(st.integers(0, n - 1))
    assert edge_walk_distance(n, e, t, e) == t
    assert edge_walk_distance(n, e, t, (e + 1) % n) == 1 - t


def test_nearest_free_examples():
    assert nearest_free(4, 0b0001, 0, 0.2) == (pytest.approx(0.8), [1])
    for t in (0.0, 0.25, 0.5, 0.9):
        cost, mins = nearest_free(3, 0b011, 0, t)
        assert mins == [2]
        assert cost == pytest.approx(min(t, 1 - t) + 1)
    cost, mins = nearest_free(6, 0, 0, 0.5)
    assert cost == 0.5 and mins == [0, 1]
    assert [edge_walk_distance(6, 0, 0.5, v) for v in range(6)] == [0.5, 0.5, 1.5, 2.5, 2.5, 1.5]


def test_nearest_free_rejects_full_state():
    with pytest.raises(ProcessTerminated):
        nearest_free(4, 0b1111, 0, 0.3)


def test_cost_profile_single_free_endpoint():
    # Only vertex 0 free: it starts edge (0, 1) and ends edge (3, 0).
    assert cost_profile(4, 0b1110, 0) == [Segment(0.0, 1.0, (0,), 1, 0)]
    assert cost_profile(4, 0b1110, 3) == [Segment(0.0, 1.0, (0,), -1, 1)]


def test_cost_profile_empty_triangle():
    assert cost_profile(3, 0, 0) == [
        Segment(0.0, 0.5, (0,), 1, 0),
        Segment(0.5, 1.0, (1,), -1, 1),
    ]


def _check_profile_against_sampling(n, occupied, edge, points=1000, tol=1e-9):
    segs = cost_profile(n, occupied, edge)
    assert segs[0].lo == 0.0 and segs[-1].hi == 1.0
    for a, b in zip(segs, segs[1:]):
        assert a.hi == b.lo
    for seg in segs:
        assert seg.lo < seg.hi and seg.lo in (0.0, 0.5) and seg.hi in (0.5, 1.0)
        assert seg.slope in (-1, 1) and seg.minimizers
        ts = seg.lo + (np.arange(points) + 0.5) / points * seg.length
        best, sets = sampled_nearest(n, occupied, edge, ts, tol)
        assert np.allclose(seg.slope * ts + seg.intercept, best, atol=tol, rtol=0)
        assert all(s == frozenset(seg.minimizers) for s in sets)


def test_cost_profile_pentagon_two_occupied():
    segs = cost_profile(5, 0b00011, 0)
    assert len(segs) == 2
    _check_profile_against_sampling(5, 0b00011, 0)


def test_cost_profile_sampling_random_states():
    rng = random.Random(11)
    for n in range(3, 9):
        for _ in range(40):
            occupied = rng.randrange((1 << n) - 1)
            for e in range(n):
                _check_profile_against_sampling(n, occupied, e, points=200)


def test_cost_profile_agrees_with_nearest_free():
    rng = random.Random(5)
    for n in range(3, 10):
        for _ in range(15):
            occupied = rng.randrange((1 << n) - 1)
            e = rng.randrange(n)
            for seg in cost_profile(n, occupied, e):
                for _ in range(20):
                    t = rng.uniform(seg.lo, seg.hi)
                    if t in (seg.lo, seg.hi):
                        continue
                    cost, mins = nearest_free(n, occupied, e, t)
                    assert cost == pytest.approx(seg.cost(t), abs=1e-12)
                    assert tuple(mins) == seg.minimizers


def test_cost_is_affine_on_each_half():
    for n in range(3, 11):
        for occupied in range((1 << n) - 1):
            for e in range(n):
                for lo, hi in ((0.0, 0.5), (0.5, 1.0)):
                    f = lambda t: nearest_free(n, occupied, e, t)[0]  # noqa: E731
                    assert abs(f((lo + hi) / 2) - (f(lo) + f(hi)) / 2) <= 1e-12
            if n == 10 and occupied > 300:
                break
