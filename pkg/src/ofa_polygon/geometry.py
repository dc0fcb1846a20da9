"""Polygon metric: cycle distance, edge-walk distance and per-edge cost profiles.

Vertices are ``0..n-1``. Edge ``k`` joins ``k`` and ``(k + 1) % n``; an arrival at
position ``t`` on edge ``k`` is ``t`` away from vertex ``k`` and ``1 - t`` away
from vertex ``(k + 1) % n``.

Occupancy states are plain ints: bit ``v`` is set iff vertex ``v`` is occupied.
"""

from __future__ import annotations

from dataclasses import dataclass

TIE_TOL = 1e-12


class ProcessTerminated(ValueError):
    """Raised when asked for a free facility but every vertex is occupied."""


def _check_n(n: int) -> None:
    if n < 3:
        raise ValueError(f"polygon needs n >= 3 vertices, got {n}")


def _check_vertex(v: int, n: int) -> None:
    if not 0 <= v < n:
        raise ValueError(f"vertex {v} out of range for n={n}")


def _check_full(n: int, occupied: int) -> None:
    if occupied >> n:
        raise ValueError(f"state mask {occupied:#x} has bits beyond n={n}")
    if occupied == (1 << n) - 1:
        raise ProcessTerminated("all facilities are occupied")


def cycle_distance(u: int, v: int, n: int) -> int:
    """Hop count between ``u`` and ``v`` along the shorter way round the cycle."""
    _check_vertex(u, n)
    _check_vertex(v, n)
    d = abs(u - v)
    return min(d, n - d)


def edge_walk_distance(n: int, edge: int, t: float, v: int) -> float:
    """Shortest walk along polygon edges from position ``t`` on ``edge`` to ``v``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"edge position t={t} outside [0, 1]")
    i = edge
    j = (edge + 1) % n
    return min(t + cycle_distance(i, v, n), (1.0 - t) + cycle_distance(j, v, n))


def free_vertices(n: int, occupied: int) -> list[int]:
    return [v for v in range(n) if not occupied >> v & 1]


def nearest_free(
    n: int, occupied: int, edge: int, t: float, tol: float = TIE_TOL
) -> tuple[float, list[int]]:
    """Return the cost to the nearest free facility and every free vertex within ``tol`` of it.

    Minimizers are listed in ascending vertex order; tie-breaking draws index into
    this list.
    """
    _check_n(n)
    _check_full(n, occupied)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    dists = [(edge_walk_distance(n, edge, t, v), v) for v in free_vertices(n, occupied)]
    best = min(d for d, _ in dists)
    return best, [v for d, v in dists if d <= best + tol]


@dataclass(frozen=True)
class Segment:
    """Interval ``[lo, hi]`` of edge positions with a fixed nearest-facility set.

    On the interval the nearest-facility cost is ``slope * t + intercept``.
    """

    lo: float
    hi: float
    minimizers: tuple[int, ...]
    slope: int
    intercept: int

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def cost(self, t: float) -> float:
        return self.slope * t + self.intercept

    def cost_integral(self) -> float:
        """Exact integral of the affine cost over the segment (midpoint rule)."""
        return self.cost(0.5 * (self.lo + self.hi)) * self.length


def _vertex_line(n: int, edge: int, v: int, lo: float, hi: float) -> tuple[int, int]:
    # Both walk routes are lines with integer offsets; they cross only at
    # half-integer t, so on [0, 1/2] and [1/2, 1] exactly one route is active.
    via_i = cycle_distance(edge, v, n)
    via_j = 1 + cycle_distance((edge + 1) % n, v, n)
    mid = 0.5 * (lo + hi)
    if mid + via_i <= via_j - mid:
        return 1, via_i
    return -1, via_j


def cost_profile(
    n: int, occupied: int, edge: int, tol: float = TIE_TOL
) -> list[Segment]:
    """Split edge positions ``[0, 1]`` into segments of constant nearest-facility set.

    Every candidate distance is ``+-t`` plus an integer, so two candidates can only
    cross at ``t`` in ``{0, 1/2, 1}``; at most two segments are ever needed.
    Adjacent halves with the same minimizers and cost line are merged.
    """
    _check_n(n)
    _check_full(n, occupied)
    free = free_vertices(n, occupied)
    halves = []
    for lo, hi in ((0.0, 0.5), (0.5, 1.0)):
        mid = 0.5 * (lo + hi)
        lines = {v: _vertex_line(n, edge, v, lo, hi) for v in free}
        values = {v: s * mid + c for v, (s, c) in lines.items()}
        best = min(values.values())
        minimizers = tuple(v for v in free if values[v] <= best + tol)
        slope, intercept = lines[minimizers[0]]
        halves.append(Segment(lo, hi, minimizers, slope, intercept))

    first, second = halves
    if (first.minimizers, first.slope, first.intercept) == (
        second.minimizers,
        second.slope,
        second.intercept,
    ):
        return [Segment(0.0, 1.0, first.minimizers, first.slope, first.intercept)]
    return halves
