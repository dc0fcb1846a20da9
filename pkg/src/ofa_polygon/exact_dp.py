"""Exact value function of the greedy process by symmetry-reduced backward induction.

``V(S)`` is the expected remaining cost from occupancy state ``S``. Each state is the
average over edges of the integral over positions of immediate cost plus the
tie-split successor value; integrands are affine on every cost-profile segment so
integration is exact.
"""

from __future__ import annotations

import csv
import io
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ofa_polygon.dihedral import canonicalize, enumerate_canonical_states
from ofa_polygon.geometry import _check_full, _check_n, cost_profile, free_vertices

DEFAULT_EXACT_LIMIT = 16


class ExactLimitExceeded(ValueError):
    """The requested polygon is too large for exact DP; use Monte Carlo instead."""


class TableFormatError(ValueError):
    pass


@dataclass
class ValueTable:
    """Expected remaining cost per state.

    Keys are canonical masks unless ``canonical`` is False (the full-table Monte
    Carlo oracle). ``empty_stderr`` is only set by sampled tables.
    """

    n: int
    values: dict[int, float]
    canonical: bool = True
    empty_stderr: float | None = field(default=None, compare=False)

    def __getitem__(self, mask: int) -> float:
        if self.canonical:
            mask = canonicalize(mask, self.n)
        return self.values[mask]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def empty_value(self) -> float:
        return self.values[0]


@dataclass
class TransitionRow:
    """Position- and edge-averaged one-step kernel out of ``state``.

    ``probabilities[v]`` is the chance the next arrival takes vertex ``v``;
    ``cost_share[v]`` is the part of the expected immediate cost paid on those
    arrivals, so ``sum(cost_share.values()) == immediate_cost``.
    """

    state: int
    probabilities: dict[int, float]
    cost_share: dict[int, float]
    immediate_cost: float


def edge_integral(
    n: int, occupied: int, edge: int, successor_value: Callable[[int], float]
) -> float:
    """Integral over ``t`` of immediate cost plus expected successor value on one edge."""
    total = 0.0
    for seg in cost_profile(n, occupied, edge):
        share = seg.length / len(seg.minimizers)
        future = sum(successor_value(occupied | 1 << v) for v in seg.minimizers)
        total += seg.cost_integral() + share * future
    return total


def state_value(n: int, occupied: int, successor_value: Callable[[int], float]) -> float:
    return sum(edge_integral(n, occupied, e, successor_value) for e in range(n)) / n


def transition_kernel(n: int, occupied: int) -> TransitionRow:
    _check_n(n)
    _check_full(n, occupied)
    free = free_vertices(n, occupied)
    prob = dict.fromkeys(free, 0.0)
    cost = dict.fromkeys(free, 0.0)
    for e in range(n):
        for seg in cost_profile(n, occupied, e):
            k = len(seg.minimizers)
            for v in seg.minimizers:
                prob[v] += seg.length / k
                cost[v] += seg.cost_integral() / k
    prob = {v: p / n for v, p in prob.items()}
    cost = {v: c / n for v, c in cost.items()}
    return TransitionRow(occupied, prob, cost, sum(cost.values()))


def _check_limit(n: int, exact_limit: int) -> None:
    _check_n(n)
    if n > exact_limit:
        raise ExactLimitExceeded(
            f"n={n} exceeds the exact-mode limit {exact_limit}; use Monte Carlo simulation"
        )


def _level_worker(args: tuple[int, list[int], dict[int, float]]) -> list[float]:
    n, masks, upper = args
    lookup = lambda m: upper[canonicalize(m, n)]  # noqa: E731
    return [state_value(n, m, lookup) for m in masks]


def _chunks(items: list[int], size: int) -> Iterable[list[int]]:
    for k in range(0, len(items), size):
        yield items[k : k + size]


def value_function(
    n: int, exact_limit: int = DEFAULT_EXACT_LIMIT, threads: int = 1
) -> ValueTable:
    """Backward induction over canonical states from the full state down to the empty one.

    With ``threads > 1`` each popcount level is split across worker processes;
    each state's arithmetic is the same either way, so results are bit-identical.
    """
    _check_limit(n, exact_limit)
    full = (1 << n) - 1
    values: dict[int, float] = {full: 0.0}
    pool = ProcessPoolExecutor(threads) if threads > 1 else None
    try:
        for k in range(n - 1, -1, -1):
            masks = enumerate_canonical_states(n, k)
            upper = {m: values[m] for m in enumerate_canonical_states(n, k + 1)}
            if pool is None or len(masks) < 2 * threads:
                level = _level_worker((n, masks, upper))
            else:
                size = -(-len(masks) // threads)
                jobs = [(n, chunk, upper) for chunk in _chunks(masks, size)]
                level = [v for part in pool.map(_level_worker, jobs) for v in part]
            values.update(zip(masks, level))
    finally:
        if pool is not None:
            pool.shutdown()
    return ValueTable(n, dict(sorted(values.items())))


def full_value_function(n: int) -> dict[int, float]:
    """Same recurrence over all ``2**n`` states with no symmetry reduction."""
    _check_n(n)
    full = (1 << n) - 1
    values = {full: 0.0}
    for mask in sorted(range(full), key=lambda m: -m.bit_count()):
        values[mask] = state_value(n, mask, values.__getitem__)
    return values


def per_arrival_expectations(n: int, exact_limit: int = DEFAULT_EXACT_LIMIT) -> list[float]:
    """Expected cost of the k-th arrival, k = 1..n, by pushing orbit mass forward from the empty state."""
    _check_limit(n, exact_limit)
    mass = {0: 1.0}
    out = []
    for _ in range(n):
        step = 0.0
        nxt: dict[int, float] = {}
        for state in sorted(mass):
            row = transition_kernel(n, state)
            step += mass[state] * row.immediate_cost
            for v, p in row.probabilities.items():
                target = canonicalize(state | 1 << v, n)
                nxt[target] = nxt.get(target, 0.0) + mass[state] * p
        out.append(step)
        mass = nxt
    return out


HEADER = ["mask", "popcount", "value"]


def _table_rows(table: ValueTable) -> list[tuple[int, int, float]]:
    return sorted(
        ((m, m.bit_count(), v) for m, v in table.values.items()),
        key=lambda row: (-row[1], row[0]),
    )


def dump_table(table: ValueTable) -> str:
    if table.canonical:
        for m in table.values:
            if canonicalize(m, table.n) != m:
                raise ValueError(f"mask {m} is not canonical for n={table.n}")
    buf = io.StringIO()
    buf.write(f"# n={table.n}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for mask, pc, value in _table_rows(table):
        writer.writerow([mask, pc, format(value, ".17g")])
    return buf.getvalue()


def save_table(table: ValueTable, path: str | os.PathLike) -> None:
    """Write ``table`` as CSV with a leading ``# n=<n>`` line."""
    if not str(path):
        raise ValueError("empty output path")
    Path(path).write_text(dump_table(table))


def parse_table(text: str) -> ValueTable:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# n="):
        raise TableFormatError("line 1: expected '# n=<n>' header")
    try:
        n = int(lines[0][4:])
    except ValueError:
        raise TableFormatError(f"line 1: field n: not an integer: {lines[0][4:]!r}") from None
    if len(lines) < 2 or lines[1].split(",") != HEADER:
        raise TableFormatError(f"line 2: expected header {','.join(HEADER)}")
    values = {}
    for lineno, line in enumerate(lines[2:], start=3):
        parts = line.split(",")
        if len(parts) != 3:
            raise TableFormatError(f"line {lineno}: expected 3 fields, got {len(parts)}")
        parsed = []
        for name, raw, conv in zip(HEADER, parts, (int, int, float)):
            try:
                parsed.append(conv(raw))
            except ValueError:
                raise TableFormatError(f"line {lineno}: field {name}: bad value {raw!r}") from None
        mask, pc, value = parsed
        if mask < 0 or mask >> n:
            raise TableFormatError(f"line {lineno}: field mask: {mask} is not an {n}-bit state")
        if pc != mask.bit_count():
            raise TableFormatError(f"line {lineno}: field popcount: {pc} != popcount of mask")
        if canonicalize(mask, n) != mask:
            raise TableFormatError(f"line {lineno}: field mask: {mask} is not canonical")
        values[mask] = value
    return ValueTable(n, dict(sorted(values.items())))


def load_table(path: str | os.PathLike) -> ValueTable:
    if not str(path):
        raise ValueError("empty input path")
    return parse_table(Path(path).read_text())
