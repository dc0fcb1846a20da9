import random

import numpy as np
import pytest

from ofa_polygon.dihedral import apply_symmetry, canonicalize, enumerate_canonical_states, group_elements
from ofa_polygon.exact_dp import (
    ExactLimitExceeded,
    TableFormatError,
    ValueTable,
    edge_integral,
    full_value_function,
    load_table,
    parse_table,
    per_arrival_expectations,
    save_table,
    transition_kernel,
    value_function,
)
from ofa_polygon.geometry import ProcessTerminated, cost_profile, nearest_free
from oracles import point_distance

ZERO = lambda mask: 0.0  # noqa: E731


def _grid_mean(f, points=200_000):
    ts = (np.arange(points) + 0.5) / points
    return float(np.mean([f(t) for t in ts]))


def test_edge_integral_single_free_endpoint():
    full = 0b1111
    lookup = {full: 0.0}.__getitem__
    assert edge_integral(4, 0b1110, 0, lookup) == 0.5
    assert edge_integral(4, 0b1110, 3, lookup) == 0.5


def test_edge_integral_far_vertex():
    # Only vertex 2 free on the triangle; edge (0, 1) is opposite to it.
    ref = _grid_mean(lambda t: point_distance(3, 0, t, 2), points=20_000)
    assert ref == pytest.approx(1.25, abs=1e-6)
    assert edge_integral(3, 0b011, 0, ZERO) == 1.25


def test_edge_integral_first_arrival_square():
    assert edge_integral(4, 0, 0, ZERO) == 0.25


def test_edge_integral_rejects_full_state():
    with pytest.raises(ProcessTerminated):
        edge_integral(4, 0b1111, 0, ZERO)


def test_value_function_square_closed_form():
    table = value_function(4)
    assert abs(table.empty_value - 71 / 32) <= 1e-12
    assert len(table) == 6


def test_value_function_boundary_and_keys():
    for n in range(3, 9):
        table = value_function(n)
        assert table[(1 << n) - 1] == 0.0
        assert all(canonicalize(m, n) == m for m in table.values)
        assert all(v >= 0 for v in table.values.values())


def test_value_function_pentagon_near_reported():
    assert value_function(5).empty_value == pytest.approx(3.138, abs=0.03)


def test_value_function_limit():
    with pytest.raises(ExactLimitExceeded):
        value_function(17)
    assert value_function(5, exact_limit=5).empty_value == value_function(5).empty_value


def test_value_function_threads_bit_identical():
    assert value_function(10, threads=2).values == value_function(10).values


def test_transition_kernel_square():
    row = transition_kernel(4, 0b0001)
    assert row.probabilities == {1: 3 / 8, 2: 1 / 4, 3: 3 / 8}
    assert row.immediate_cost == pytest.approx(3 / 8, abs=1e-15)


def test_transition_kernel_forced_choice():
    row = transition_kernel(3, 0b011)
    assert row.probabilities == {2: 1.0}
    # Edge averages of the distance to vertex 2: 1.25, 0.5, 0.5.
    assert row.immediate_cost == pytest.approx(0.75, abs=1e-15)


def test_probability_conservation():
    for n in range(3, 10):
        for k in range(n):
            for s in enumerate_canonical_states(n, k):
                row = transition_kernel(n, s)
                assert abs(sum(row.probabilities.values()) - 1) <= 1e-12
                assert all(0 <= p <= 1 for p in row.probabilities.values())
                assert set(row.probabilities) == {v for v in range(n) if not s >> v & 1}


def test_recurrence_fixed_point_via_kernel():
    rng = random.Random(1)
    for n in range(3, 9):
        table = value_function(n)
        states = [m for m in table.values if m != (1 << n) - 1]
        for s in rng.choices(states, k=200):
            row = transition_kernel(n, s)
            again = row.immediate_cost + sum(p * table[s | 1 << v] for v, p in row.probabilities.items())
            assert abs(again - table.values[s]) <= 1e-12


def _gauss_state_value(n, occupied, lookup, nodes=8):
    # Integrand evaluated pointwise through nearest_free, so segment lines are not reused.
    x, w = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for e in range(n):
        for seg in cost_profile(n, occupied, e):
            half = seg.length / 2
            for xi, wi in zip(x, w):
                t = seg.lo + half * (xi + 1)
                cost, mins = nearest_free(n, occupied, e, t)
                future = sum(lookup(occupied | 1 << v) for v in mins) / len(mins)
                total += wi * half * (cost + future)
    return total / n


def test_gauss_quadrature_agrees():
    for n in range(3, 9):
        table = value_function(n)
        for s in table.values:
            if s == (1 << n) - 1:
                continue
            assert abs(_gauss_state_value(n, s, table.__getitem__) - table.values[s]) <= 1e-12


def test_full_dp_dihedral_invariance():
    for n in range(4, 9):
        full = full_value_function(n)
        reduced = value_function(n)
        for s, v in full.items():
            assert abs(v - reduced[s]) <= 1e-12
            for g in group_elements(n):
                assert abs(full[apply_symmetry(s, g, n)] - v) <= 1e-12


def test_per_arrival_square():
    got = per_arrival_expectations(4)
    for want, x in zip((0.25, 0.375, 0.59375, 1.0), got):
        assert abs(x - want) <= 1e-10


def test_per_arrival_triangle_last_is_forced():
    assert per_arrival_expectations(3)[-1] == pytest.approx(0.75, abs=1e-12)


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_per_arrival_sums_to_value(n):
    assert abs(sum(per_arrival_expectations(n)) - value_function(n).empty_value) <= 1e-10


def test_table_roundtrip(tmp_path):
    table = value_function(4)
    path = tmp_path / "v4.csv"
    save_table(table, path)
    text = path.read_text().splitlines()
    assert text[0] == "# n=4" and text[1] == "mask,popcount,value"
    assert [int(r.split(",")[1]) for r in text[2:]] == [4, 3, 2, 2, 1, 0]
    back = load_table(path)
    assert back == table and len(back) == 6
    for n in (7, 9):
        t = value_function(n)
        save_table(t, tmp_path / "t.csv")
        assert load_table(tmp_path / "t.csv").values == t.values


def test_table_empty_path():
    with pytest.raises(ValueError):
        save_table(value_function(3), "")
    with pytest.raises(ValueError):
        load_table("")


def test_table_rejects_noncanonical_key(tmp_path):
    bad = ValueTable(4, {0b0100: 1.0, 0b1111: 0.0})
    with pytest.raises(ValueError, match="not canonical"):
        save_table(bad, tmp_path / "bad.csv")


@pytest.mark.parametrize(
    "text, where",
    [
        ("mask,popcount,value\n", "line 1"),
        ("# n=four\nmask,popcount,value\n", "line 1: field n"),
        ("# n=4\nmask,value\n", "line 2"),
        ("# n=4\nmask,popcount,value\n15,4,0\n3,2,x\n", "line 4: field value"),
        ("# n=4\nmask,popcount,value\n3,1,0.5\n", "line 3: field popcount"),
        ("# n=4\nmask,popcount,value\n4,1,0.5\n", "line 3: field mask"),
        ("# n=4\nmask,popcount,value\n1,1\n", "line 3"),
    ],
)
def test_table_malformed(text, where):
    with pytest.raises(TableFormatError, match=where):
        parse_table(text)
