"""Dihedral group action on occupancy bitmasks and orbit-minimal canonical forms."""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np


class Symmetry(NamedTuple):
    """Element of D_n: ``v -> (rotation + v) % n``, or ``(rotation - v) % n`` if reflected."""

    rotation: int
    reflected: bool = False

    def vertex_map(self, v: int, n: int) -> int:
        if self.reflected:
            return (self.rotation - v) % n
        return (self.rotation + v) % n


def group_elements(n: int) -> list[Symmetry]:
    return [Symmetry(r, f) for f in (False, True) for r in range(n)]


@lru_cache(maxsize=None)
def _permutation(n: int, g: Symmetry) -> tuple[int, ...]:
    return tuple(g.vertex_map(v, n) for v in range(n))


def _check_mask(mask: int, n: int) -> None:
    if mask < 0 or mask >> n:
        raise ValueError(f"mask {mask:#x} is not an {n}-bit state")


def apply_symmetry(mask: int, g: Symmetry, n: int) -> int:
    """Image of the occupied set: vertex ``v`` occupied implies ``g(v)`` occupied."""
    _check_mask(mask, n)
    perm = _permutation(n, g)
    out = 0
    for v in range(n):
        if mask >> v & 1:
            out |= 1 << perm[v]
    return out


def _rotate(mask: int, r: int, n: int) -> int:
    full = (1 << n) - 1
    return ((mask << r) | (mask >> (n - r))) & full


def _negate(mask: int, n: int) -> int:
    # v -> -v mod n: bit 0 stays, bit v moves to n - v.
    rev = int(format(mask, f"0{n}b")[::-1], 2)  # v -> n-1-v
    return _rotate(rev, 1, n)


def canonicalize(mask: int, n: int) -> int:
    """Smallest integer value among the 2n dihedral images of ``mask``."""
    _check_mask(mask, n)
    neg = _negate(mask, n)
    best = mask
    for r in range(n):
        best = min(best, _rotate(mask, r, n), _rotate(neg, r, n))
    return best


def canonical_array(n: int) -> np.ndarray:
    """Canonical form of every mask ``0 .. 2**n - 1``, vectorized."""
    full = (1 << n) - 1
    masks = np.arange(1 << n, dtype=np.int64)
    neg = np.zeros_like(masks)
    for v in range(n):
        neg |= ((masks >> v) & 1) << ((n - v) % n)
    best = masks.copy()
    for base in (masks, neg):
        for r in range(n):
            rot = ((base << r) | (base >> (n - r))) & full
            np.minimum(best, rot, out=best)
    return best


def enumerate_canonical_states(n: int, popcount: int) -> list[int]:
    """One representative per orbit of ``popcount``-subsets, ascending."""
    if not 0 <= popcount <= n:
        raise ValueError(f"popcount {popcount} outside [0, {n}]")
    return [m for m in _canonical_by_popcount(n)[popcount]]


@lru_cache(maxsize=32)
def _canonical_by_popcount(n: int) -> tuple[tuple[int, ...], ...]:
    canon = canonical_array(n)
    reps = np.flatnonzero(canon == np.arange(1 << n))
    levels: list[list[int]] = [[] for _ in range(n + 1)]
    for m in reps.tolist():
        levels[m.bit_count()].append(m)
    return tuple(tuple(level) for level in levels)


def orbit(mask: int, n: int) -> set[int]:
    return {apply_symmetry(mask, g, n) for g in group_elements(n)}


def _cycle_count(perm: tuple[int, ...]) -> int:
    seen = [False] * len(perm)
    cycles = 0
    for start in range(len(perm)):
        if not seen[start]:
            cycles += 1
            v = start
            while not seen[v]:
                seen[v] = True
                v = perm[v]
    return cycles


def burnside_orbit_count(n: int) -> int:
    """Number of D_n orbits of subsets of the n vertices (binary bracelets)."""
    fixed = sum(2 ** _cycle_count(_permutation(n, g)) for g in group_elements(n))
    count, rem = divmod(fixed, 2 * n)
    assert rem == 0
    return count
