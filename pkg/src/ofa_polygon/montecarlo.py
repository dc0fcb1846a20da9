"""Monte Carlo estimation: direct simulation of whole episodes and a sampled state-level DP.

Every run draws from its own stream, ``SeedSequence(base_seed, spawn_key=(run,))``
fed to PCG64, so results do not depend on batching or worker count. Each arrival
consumes three uniforms in a fixed order: edge, position, tie-break.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ofa_polygon.exact_dp import ValueTable
from ofa_polygon.geometry import TIE_TOL, _check_n, nearest_free

GENERATOR = "numpy.PCG64(SeedSequence(base_seed, spawn_key=(stream,)))"
Z95 = 1.96
CHUNK = 1000
MCDP_MAX_N = 20
MCDP_DEFAULT_SEED = 123456789


@dataclass(frozen=True)
class SeedSpec:
    base_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.base_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass
class RunTrace:
    n: int
    per_arrival_cost: list[float]
    chosen_vertex: list[int]
    total: float
    arrivals: list[tuple[int, float]]


@dataclass(frozen=True)
class Estimate:
    mean: float
    std: float
    runs: int
    ci_low: float
    ci_high: float

    @property
    def half_width(self) -> float:
        return Z95 * self.std / math.sqrt(self.runs)

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.runs)

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> Estimate:
        x = np.asarray(samples, dtype=float)
        if x.size < 2:
            raise ValueError("need at least two runs for a standard deviation")
        mean = float(np.mean(x))
        std = float(np.std(x, ddof=1))
        hw = Z95 * std / math.sqrt(x.size)
        return cls(mean, std, int(x.size), mean - hw, mean + hw)

    def scaled(self, factor: float) -> Estimate:
        """Estimate of ``factor * X``, e.g. per-customer cost with ``factor = 1/n``."""
        return Estimate(
            self.mean * factor,
            self.std * abs(factor),
            self.runs,
            min(self.ci_low * factor, self.ci_high * factor),
            max(self.ci_low * factor, self.ci_high * factor),
        )


def _arrival_draws(n: int, seed: SeedSpec) -> np.ndarray:
    return seed.generator().random((n, 3))


def _edge_index(u: float | np.ndarray, n: int):
    return np.minimum((np.asarray(u) * n).astype(np.int64), n - 1)


def _tie_pick(u: float | np.ndarray, k):
    return np.minimum((np.asarray(u) * k).astype(np.int64), np.asarray(k) - 1)


def simulate_run(n: int, seed: SeedSpec) -> RunTrace:
    """One episode of ``n`` greedy arrivals, scanning every free vertex per arrival."""
    _check_n(n)
    draws = _arrival_draws(n, seed)
    occupied = 0
    costs, chosen, arrivals = [], [], []
    total = 0.0
    for ue, t, ut in draws:
        edge = int(_edge_index(ue, n))
        best, minimizers = nearest_free(n, occupied, edge, float(t), TIE_TOL)
        v = minimizers[int(_tie_pick(ut, len(minimizers)))]
        occupied |= 1 << v
        costs.append(best)
        chosen.append(v)
        arrivals.append((edge, float(t)))
        total += best
    return RunTrace(n, costs, chosen, total, arrivals)


def _delta_table(n: int) -> np.ndarray:
    idx = np.arange(n)
    d = np.abs(idx[:, None] - idx[None, :])
    return np.minimum(d, n - d).astype(float)


def _simulate_chunk(args: tuple[int, int, int, int]) -> np.ndarray:
    """Per-arrival costs for runs ``start .. stop - 1``, vectorized over runs."""
    n, base_seed, start, stop = args
    draws = np.stack([_arrival_draws(n, SeedSpec(base_seed, r)) for r in range(start, stop)])
    batch = stop - start
    delta = _delta_table(n)
    occupied = np.zeros((batch, n), dtype=bool)
    costs = np.empty((batch, n))
    rows = np.arange(batch)
    for k in range(n):
        edge = _edge_index(draws[:, k, 0], n)
        t = draws[:, k, 1]
        d = np.minimum(t[:, None] + delta[edge], (1.0 - t)[:, None] + delta[(edge + 1) % n])
        d[occupied] = np.inf
        best = d.min(axis=1)
        ties = d <= (best + TIE_TOL)[:, None]
        pick = _tie_pick(draws[:, k, 2], ties.sum(axis=1))
        chosen = np.argmax(np.cumsum(ties, axis=1) > pick[:, None], axis=1)
        occupied[rows, chosen] = True
        costs[:, k] = best
    return costs


def simulate_costs(n: int, runs: int, base_seed: int, threads: int = 1) -> np.ndarray:
    """``(runs, n)`` array of per-arrival costs, identical for any ``threads``."""
    _check_n(n)
    jobs = [(n, base_seed, s, min(s + CHUNK, runs)) for s in range(0, runs, CHUNK)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(threads) as pool:
            parts = list(pool.map(_simulate_chunk, jobs))
    else:
        parts = [_simulate_chunk(j) for j in jobs]
    return np.concatenate(parts) if parts else np.empty((0, n))


def _row_totals(costs: np.ndarray) -> np.ndarray:
    # Left-to-right accumulation, matching RunTrace.total.
    total = np.zeros(costs.shape[0])
    for k in range(costs.shape[1]):
        total += costs[:, k]
    return total


def estimate_total(n: int, runs: int, base_seed: int, threads: int = 1) -> Estimate:
    """Mean total cost over ``runs`` episodes with a 1.96-sigma normal interval."""
    if runs < 2:
        raise ValueError("runs must be >= 2")
    return Estimate.from_samples(_row_totals(simulate_costs(n, runs, base_seed, threads)))


def estimate_per_arrival(n: int, runs: int, base_seed: int, threads: int = 1) -> list[Estimate]:
    if runs < 2:
        raise ValueError("runs must be >= 2")
    costs = simulate_costs(n, runs, base_seed, threads)
    return [Estimate.from_samples(costs[:, k]) for k in range(n)]


def _mcdp_state(
    n: int, mask: int, samples: int, base_seed: int, values: np.ndarray
) -> tuple[float, float, np.ndarray, np.ndarray]:
    """Sampled value of one state, its own sampling variance, and successor visit counts."""
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(base_seed, spawn_key=(mask,)))
    )
    free = np.array([v for v in range(n) if not mask >> v & 1])
    edge = rng.integers(0, n, size=samples)
    t = rng.random(samples)
    u = rng.random(samples)
    j = (edge + 1) % n
    di = np.abs(edge[:, None] - free[None, :])
    dj = np.abs(j[:, None] - free[None, :])
    di = np.minimum(di, n - di)
    dj = np.minimum(dj, n - dj)
    d = np.minimum(t[:, None] + di, (1.0 - t)[:, None] + dj)
    best = d.min(axis=1)
    ties = d <= (best + TIE_TOL)[:, None]
    pick = _tie_pick(u, ties.sum(axis=1))
    chosen = free[np.argmax(np.cumsum(ties, axis=1) > pick[:, None], axis=1)]
    nxt = mask | (1 << chosen)
    terms = best + values[nxt]
    var = float(np.var(terms, ddof=1)) / samples if samples > 1 else 0.0
    succ, counts = np.unique(nxt, return_counts=True)
    return float(np.mean(terms)), var, succ, counts


def _mcdp_level(args: tuple[int, list[int], int, int, np.ndarray]) -> list[tuple]:
    n, masks, samples, base_seed, values = args
    return [_mcdp_state(n, m, samples, base_seed, values) for m in masks]


def _empty_state_stderr(n: int, own_var: np.ndarray, visits: dict, samples: int) -> float:
    # V(empty) is linear in every state's own sampling noise, weighted by the
    # empirical probability of reaching that state; those noises are independent.
    reach = np.zeros(own_var.size)
    reach[0] = 1.0
    for mask in sorted(visits, key=int.bit_count):
        if reach[mask]:
            succ, counts = visits[mask]
            reach[succ] += reach[mask] * counts / samples
    return math.sqrt(float(np.sum(reach**2 * own_var)))


def mc_state_dp(
    n: int, samples_per_state: int = 5000, base_seed: int = MCDP_DEFAULT_SEED, threads: int = 1
) -> ValueTable:
    """Sampled backward induction over all ``2**n`` states, no symmetry reduction.

    Each state averages ``best cost + V(next state)`` over sampled arrivals, drawing
    from a stream keyed by its mask. The table's ``empty_stderr`` is the combined
    standard error of ``V(empty)``.
    """
    _check_n(n)
    if n > MCDP_MAX_N:
        raise ValueError(f"n={n} too large for a 2**n table (max {MCDP_MAX_N})")
    if samples_per_state < 1:
        raise ValueError("samples_per_state must be >= 1")
    size = 1 << n
    values = np.zeros(size)
    own_var = np.zeros(size)
    visits = {}
    masks = np.arange(size - 1)
    popcounts = np.array([int(m).bit_count() for m in masks])
    pool = ProcessPoolExecutor(threads) if threads > 1 else None
    try:
        for pc in range(n - 1, -1, -1):
            level = masks[popcounts == pc].tolist()
            if pool is None or len(level) < 2 * threads:
                results = _mcdp_level((n, level, samples_per_state, base_seed, values))
            else:
                step = -(-len(level) // threads)
                jobs = [
                    (n, level[k : k + step], samples_per_state, base_seed, values)
                    for k in range(0, len(level), step)
                ]
                results = [r for part in pool.map(_mcdp_level, jobs) for r in part]
            for mask, (value, var, succ, counts) in zip(level, results):
                values[mask], own_var[mask] = value, var
                visits[mask] = (succ, counts)
    finally:
        if pool is not None:
            pool.shutdown()
    return ValueTable(
        n,
        dict(enumerate(values.tolist())),
        canonical=False,
        empty_stderr=_empty_state_stderr(n, own_var, visits, samples_per_state),
    )
