"""Self-check suite behind ``ofa-polygon validate``."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ofa_polygon.dihedral import (
    apply_symmetry,
    burnside_orbit_count,
    enumerate_canonical_states,
    group_elements,
)
from ofa_polygon.exact_dp import (
    full_value_function,
    per_arrival_expectations,
    transition_kernel,
    value_function,
)
from ofa_polygon.montecarlo import MCDP_DEFAULT_SEED, estimate_total, mc_state_dp

SQUARE_TOTAL = 71 / 32
SQUARE_PER_ARRIVAL = (0.25, 0.375, 0.59375, 1.0)
SQUARE_TRANSITION = {1: 3 / 8, 2: 1 / 4, 3: 3 / 8}
SMALL_N_REFERENCE = {3: 1.414, 4: 2.222, 5: 3.138, 6: 4.159, 7: 5.284, 8: 6.493, 9: 7.783}
LARGE_N_REFERENCE_CI = {20: (22.67, 22.77), 50: (73.08, 73.32), 100: (171.02, 171.42)}


@dataclass
class Check:
    name: str
    expected: str
    observed: str
    tolerance: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.name}: expected {self.expected}, "
            f"observed {self.observed}, tol {self.tolerance}"
        )


def _abs_check(name: str, expected: float, observed: float, tol: float) -> Check:
    return Check(
        name, f"{expected:.12g}", f"{observed:.12g}", f"{tol:g}", abs(observed - expected) <= tol
    )


def check_square() -> list[Check]:
    out = [_abs_check("n=4 exact = 71/32", SQUARE_TOTAL, value_function(4).empty_value, 1e-12)]
    for k, (want, got) in enumerate(zip(SQUARE_PER_ARRIVAL, per_arrival_expectations(4)), 1):
        out.append(_abs_check(f"n=4 E[C_{k}]", want, got, 1e-10))
    row = transition_kernel(4, 0b0001)
    for v, want in SQUARE_TRANSITION.items():
        out.append(_abs_check(f"n=4 q({{0}} -> {v})", want, row.probabilities[v], 1e-12))
    return out


def check_small_n_reference() -> list[Check]:
    return [
        _abs_check(f"n={n} exact vs small-n reference", ref, value_function(n).empty_value, 0.04)
        for n, ref in SMALL_N_REFERENCE.items()
    ]


def check_orbits(n_max: int = 12) -> list[Check]:
    out = []
    for n in range(3, n_max + 1):
        got = sum(len(enumerate_canonical_states(n, k)) for k in range(n + 1))
        want = burnside_orbit_count(n)
        out.append(Check(f"n={n} orbit count vs Burnside", str(want), str(got), "exact", got == want))
    return out


def check_symmetry(n_range=range(4, 9), states: int = 100, seed: int = 0) -> list[Check]:
    rng = random.Random(seed)
    out = []
    for n in n_range:
        full = full_value_function(n)
        reduced = value_function(n)
        err = max(abs(full[m] - reduced[m]) for m in full)
        for mask in rng.sample(range(1 << n), min(states, 1 << n)):
            for g in group_elements(n):
                err = max(err, abs(full[mask] - full[apply_symmetry(mask, g, n)]))
        out.append(Check(f"n={n} full vs reduced DP, dihedral invariance", "0", f"{err:.3g}", "1e-12", err <= 1e-12))
    return out


def check_state_dp_oracle(samples: int = 5000, seed: int = MCDP_DEFAULT_SEED) -> list[Check]:
    table = mc_state_dp(9, samples, seed)
    exact = value_function(9).empty_value
    tol = 3 * table.empty_stderr
    return [_abs_check("n=9 sampled state DP vs exact", exact, table.empty_value, tol)]


def check_simulation(runs: int = 20000, seed: int = 42, threads: int = 1) -> list[Check]:
    est = estimate_total(4, runs, seed, threads)
    out = [_abs_check("n=4 simulation vs 71/32", SQUARE_TOTAL, est.mean, 3 * est.stderr)]
    for n, (lo, hi) in LARGE_N_REFERENCE_CI.items():
        est = estimate_total(n, runs, seed, threads)
        out.append(
            Check(
                f"n={n} simulated 95% CI overlaps large-n reference",
                f"[{lo}, {hi}]",
                f"[{est.ci_low:.4f}, {est.ci_high:.4f}]",
                "overlap",
                est.ci_low <= hi and lo <= est.ci_high,
            )
        )
    return out


def run_checks(fast: bool = False, threads: int = 1) -> list[Check]:
    checks = check_square() + check_small_n_reference() + check_orbits() + check_symmetry()
    checks += check_state_dp_oracle()
    if not fast:
        checks += check_simulation(threads=threads)
    return checks
