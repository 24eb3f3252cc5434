"""Systematic [nu+s, nu] MDS codes: construction, encoding, erasure decoding.

The generator starts from a nu x (nu+s) matrix whose columns are
Vandermonde in the first nu+s powers of the field generator, then the
left block is row-reduced to the identity. Distinct evaluation points
make every maximal minor invertible, and row reduction preserves that,
so the resulting systematic code is MDS.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import ConfigurationError, CorruptionError, InsufficientDataError
from .gf import GF


@dataclass(frozen=True)
class MdsCode:
    field: GF
    nu: int
    s: int
    generator: np.ndarray  # (nu, nu+s), left nu x nu block is the identity

    @property
    def n(self) -> int:
        return self.nu + self.s


def invert_matrix(field: GF, a: np.ndarray) -> np.ndarray:
    """Invert a square matrix over the field by Gauss-Jordan elimination.

    Raises ValueError when the matrix is singular. Matrices here are at
    most (nu+s) x (nu+s), so scalar-loop elimination is fine.
    """
    a = np.asarray(a, dtype=field.dtype)
    k = a.shape[0]
    if a.shape != (k, k):
        raise ValueError(f"matrix is not square: {a.shape}")
    aug = np.zeros((k, 2 * k), dtype=field.dtype)
    aug[:, :k] = a
    aug[np.arange(k), k + np.arange(k)] = 1
    for col in range(k):
        pivot = next((r for r in range(col, k) if aug[r, col] != 0), None)
        if pivot is None:
            raise ValueError(f"singular matrix: no pivot in column {col}")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        inv_p = field.inv(int(aug[col, col]))
        for t in range(2 * k):
            aug[col, t] = field.mul(inv_p, int(aug[col, t]))
        for r in range(k):
            if r != col and aug[r, col] != 0:
                f = int(aug[r, col])
                for t in range(2 * k):
                    aug[r, t] ^= field.mul(f, int(aug[col, t]))
    return aug[:, k:].copy()


def make_generator(field: GF, nu: int, s: int) -> MdsCode:
    """Build the systematic MDS generator for the given message/parity split."""
    if nu < 1 or s < 1:
        raise ConfigurationError(f"need nu >= 1 and s >= 1, got nu={nu}, s={s}")
    n = nu + s
    if n > field.order - 1:
        raise ConfigurationError(
            f"code length nu+s={n} exceeds the {field.order - 1} distinct "
            f"nonzero evaluation points of {field!r}"
        )
    vand = np.zeros((nu, n), dtype=field.dtype)
    for c in range(n):
        for r in range(nu):
            vand[r, c] = field.gen_pow(r * c)
    left_inv = invert_matrix(field, vand[:, :nu])
    gen = field.matmul(left_inv, vand)
    assert np.array_equal(gen[:, :nu], np.eye(nu, dtype=field.dtype))
    gen.setflags(write=False)
    return MdsCode(field=field, nu=nu, s=s, generator=gen)


def singular_minors(code: MdsCode, cap: int = 20000) -> list[tuple[int, ...]]:
    """Column nu-subsets whose square submatrix is singular; empty means MDS.

    Exhaustive when C(nu+s, nu) <= cap, a seeded random sample otherwise.
    """
    if comb(code.n, code.nu) > cap:
        rng = np.random.default_rng(0)
        subsets = [
            tuple(sorted(rng.choice(code.n, size=code.nu, replace=False).tolist()))
            for _ in range(cap)
        ]
    else:
        subsets = list(combinations(range(code.n), code.nu))
    bad = []
    for subset in subsets:
        try:
            invert_matrix(code.field, code.generator[:, list(subset)])
        except ValueError:
            bad.append(subset)
    return bad


def encode(code: MdsCode, message: np.ndarray) -> np.ndarray:
    """Encode nu message symbols (rows of length d) into nu+s coded symbols.

    Systematic: the first nu output rows are the message itself.
    """
    message = np.asarray(message, dtype=code.field.dtype)
    if message.ndim != 2 or message.shape[0] != code.nu:
        raise ValueError(
            f"message must be (nu, d) = ({code.nu}, *), got {message.shape}"
        )
    return code.field.matmul(code.generator.T, message)


def decode_from(code: MdsCode, positions, symbols: np.ndarray) -> np.ndarray:
    """Recover the message from coded symbols at the given coordinates.

    Any nu coordinates determine the message; extra coordinates are
    checked for consistency and a mismatch raises CorruptionError.
    """
    positions = list(positions)
    symbols = np.asarray(symbols, dtype=code.field.dtype)
    if len(positions) < code.nu:
        raise InsufficientDataError(
            f"{len(positions)} coordinates given, {code.nu} needed"
        )
    if len(set(positions)) != len(positions):
        raise ValueError(f"duplicate coordinates in {positions}")
    if any(p < 0 or p >= code.n for p in positions):
        raise ValueError(f"coordinates out of range [0, {code.n}): {positions}")
    if symbols.ndim != 2 or symbols.shape[0] != len(positions):
        raise ValueError(
            f"symbols must be ({len(positions)}, d), got {symbols.shape}"
        )
    use = positions[: code.nu]
    sub = code.generator[:, use]  # (nu, nu)
    message = code.field.matmul(invert_matrix(code.field, sub.T), symbols[: code.nu])
    if len(positions) > code.nu:
        rest = positions[code.nu :]
        expected = code.field.matmul(code.generator[:, rest].T, message)
        if not np.array_equal(expected, symbols[code.nu :]):
            raise CorruptionError(
                f"symbols at coordinates {rest} disagree with the decoded message"
            )
    return message
