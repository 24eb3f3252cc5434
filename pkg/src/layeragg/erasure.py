"""Erasure matrices: validation, sampling, the adversarial pattern, enumeration.

An erasure matrix is an (n_e, n_h) uint8 array with eps[i, j] = 1 when
the link from edge i to helper j failed. Strict mode means exactly s
failures per row (the set Omega(s) used for cost analysis); lax mode
means at most s (what the scheme must tolerate).
"""

from __future__ import annotations

from itertools import combinations, product
from math import comb
from typing import Iterator

import numpy as np

from .errors import CapExceededError

ENUMERATION_CAP = 10**6


def first_violation(eps: np.ndarray, s: int, strict: bool = False) -> int | None:
    """Index of the first row whose weight breaks the budget, or None."""
    weights = np.asarray(eps).sum(axis=1)
    bad = (weights != s) if strict else (weights > s)
    idx = np.flatnonzero(bad)
    return int(idx[0]) if idx.size else None


def validate(eps: np.ndarray, s: int, strict: bool = False) -> None:
    row = first_violation(eps, s, strict)
    if row is not None:
        weight = int(np.asarray(eps)[row].sum())
        want = f"exactly {s}" if strict else f"at most {s}"
        raise ValueError(f"row {row} has weight {weight}, expected {want}")


def from_erased_sets(rows, n_h: int) -> np.ndarray:
    """Build a matrix from per-edge lists of erased helper indices (JSON form)."""
    eps = np.zeros((len(rows), n_h), dtype=np.uint8)
    for i, erased in enumerate(rows):
        for j in erased:
            if not 0 <= j < n_h:
                raise ValueError(f"row {i}: helper index {j} out of range [0, {n_h})")
            eps[i, j] = 1
    return eps


def erased_sets(eps: np.ndarray) -> list[list[int]]:
    return [[int(j) for j in np.flatnonzero(row)] for row in np.asarray(eps)]


def sample_uniform(n_e: int, n_h: int, s: int, seed) -> np.ndarray:
    """Each row an independently uniform s-subset of helpers; exact weight s."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    eps = np.zeros((n_e, n_h), dtype=np.uint8)
    for i in range(n_e):
        eps[i, rng.choice(n_h, size=s, replace=False)] = 1
    return eps


def worst_case_pattern(n_e: int, n_h: int, s: int) -> np.ndarray:
    """The adversarial matrix: rows cycle through all s-subsets lexicographically.

    With n_e >= C(n_h, s) every pattern occurs in some row, which makes
    every layer's aggregation map onto all of its s-subsets. Fewer edges
    get the lexicographic prefix.
    """
    subsets = list(combinations(range(n_h), s))
    eps = np.zeros((n_e, n_h), dtype=np.uint8)
    for i in range(n_e):
        eps[i, subsets[i % len(subsets)]] = 1
    return eps


def omega_size(n_e: int, n_h: int, s: int) -> int:
    """|Omega(s)|: number of strict erasure matrices."""
    return comb(n_h, s) ** n_e


def enumerate_all(
    n_e: int, n_h: int, s: int, cap: int = ENUMERATION_CAP
) -> Iterator[np.ndarray]:
    """Yield every strict erasure matrix exactly once, refusing above the cap."""
    total = omega_size(n_e, n_h, s)
    if total > cap:
        raise CapExceededError(
            f"Omega(s) has {total} matrices, above the cap of {cap}", estimate=total
        )
    subsets = list(combinations(range(n_h), s))
    for choice in product(range(len(subsets)), repeat=n_e):
        eps = np.zeros((n_e, n_h), dtype=np.uint8)
        for i, c in enumerate(choice):
            eps[i, subsets[c]] = 1
        yield eps
