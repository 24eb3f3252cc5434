"""GF(2^m) arithmetic on log/antilog tables, for m in {4, 8, 16}.

Elements are integers in [0, 2^m - 1], read as polynomials over GF(2)
modulo a fixed irreducible polynomial. Addition is XOR; multiplication
goes through antilog/log tables built once per field instance, which
keeps every coding operation linear-time per symbol.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import ConfigurationError

# Bit i of the polynomial is the coefficient of x^i (bit m included).
DEFAULT_POLY = {
    4: 0x13,       # x^4 + x + 1
    8: 0x11B,      # x^8 + x^4 + x^3 + x + 1
    16: 0x1100B,   # x^16 + x^12 + x^3 + x + 1
}


class GF:
    """A binary extension field GF(2^m).

    Parameters
    ----------
    m : int
        Extension degree; one of 4, 8, 16.
    poly : int or None
        Irreducible polynomial with bit m set. Defaults per degree.

    The constructor searches for a multiplicative generator while
    filling the antilog table; failure to find one means the supplied
    polynomial is not irreducible, which is reported as a
    ConfigurationError.
    """

    def __init__(self, m: int = 8, poly: int | None = None):
        if m not in DEFAULT_POLY:
            raise ConfigurationError(
                f"unsupported field degree m={m}; expected one of {sorted(DEFAULT_POLY)}"
            )
        if poly is None:
            poly = DEFAULT_POLY[m]
        if poly >> m != 1:
            raise ConfigurationError(
                f"polynomial 0x{poly:X} does not have degree exactly {m}"
            )
        self.m = m
        self.order = 1 << m
        self.poly = poly
        self.dtype = np.dtype(np.uint8 if m <= 8 else np.uint16)
        self.element_bytes = (m + 7) // 8
        self._build_tables()

    # -- table construction -------------------------------------------------

    def _poly_mul(self, a: int, b: int) -> int:
        """Schoolbook multiply-and-reduce; only used to bootstrap the tables."""
        acc = 0
        while b:
            if b & 1:
                acc ^= a
            b >>= 1
            a <<= 1
            if a >> self.m:
                a ^= self.poly
        return acc

    def _build_tables(self) -> None:
        q = self.order
        for cand in range(2, min(q, 258)):
            trail = np.zeros(2 * (q - 1), dtype=self.dtype)
            x = 1
            ok = True
            for i in range(q - 1):
                trail[i] = x
                x = self._poly_mul(x, cand)
                if x == 1 and i != q - 2:
                    ok = False  # candidate's order divides q-1 properly
                    break
            if ok and x == 1:
                self.generator = cand
                trail[q - 1 :] = trail[: q - 1]
                self.exp = trail
                log = np.zeros(q, dtype=np.int64)  # log[0] unused; callers mask zeros
                log[trail[: q - 1]] = np.arange(q - 1)
                self.log = log
                self.exp.setflags(write=False)
                self.log.setflags(write=False)
                return
        raise ConfigurationError(
            f"no multiplicative generator found; 0x{self.poly:X} is not irreducible"
        )

    # -- scalar element arithmetic -------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return int(self.exp[(self.order - 1) - self.log[a]])

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return int(self.exp[(int(self.log[a]) * e) % (self.order - 1)])

    def gen_pow(self, e: int) -> int:
        """generator**e, the e-th point of the standard evaluation sequence."""
        return int(self.exp[e % (self.order - 1)])

    # -- array operations ----------------------------------------------------

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """(n, k) x (k, d) matrix product over the field."""
        a = np.asarray(a, dtype=self.dtype)
        b = np.asarray(b, dtype=self.dtype)
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ValueError(f"incompatible shapes {a.shape} x {b.shape}")
        return _kernels.gf_matmul(a, b, self.log, self.exp)

    def xor_sum(self, rows: np.ndarray) -> np.ndarray:
        """Field sum (XOR) of the rows of a (rows, d) array."""
        return _kernels.xor_reduce(np.asarray(rows, dtype=self.dtype))

    def reduce(self, values) -> np.ndarray:
        """Map arbitrary integers into the field by truncating to m bits."""
        arr = np.asarray(values)
        return (arr & (self.order - 1)).astype(self.dtype)

    def __repr__(self) -> str:
        return f"GF(m={self.m}, poly=0x{self.poly:X})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.m, self.poly) == (other.m, other.poly)

    def __hash__(self) -> int:
        return hash((self.m, self.poly))
