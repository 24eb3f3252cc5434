"""Client-side layered vector code: parameter set, layer placement, columns.

A gradient of p field symbols is split into L*nu subvectors of length d.
Layer l is the MDS encoding of nu of them, and its nu+s coded fragments
are placed on the helper subset H_l, the l-th (nu+s)-subset of helpers
in lexicographic order. Stacking the filled cells of each helper column
gives the b symbols that are actually transmitted to that helper.

Helper and edge indices are 0-based throughout, including in JSON files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .gf import GF
from .mds import MdsCode


@dataclass(frozen=True)
class SchemeParams:
    """System and code parameters with the derived layered-code quantities.

    p      gradient length in field symbols
    n_e    number of edge nodes
    n_h    number of helper nodes
    s      straggling links tolerated per edge, 1 <= s <= n_h - 1
    nu     code parameter, 1 <= nu <= n_h - s
    """

    p: int
    n_e: int
    n_h: int
    s: int
    nu: int

    def __post_init__(self):
        if self.p < 1:
            raise ConfigurationError(f"p must be positive, got {self.p}")
        if self.n_e < 1:
            raise ConfigurationError(f"n_e must be positive, got {self.n_e}")
        if self.n_h < 2:
            raise ConfigurationError(f"need at least 2 helpers, got n_h={self.n_h}")
        if not 1 <= self.s <= self.n_h - 1:
            raise ConfigurationError(
                f"s must lie in [1, n_h-1] = [1, {self.n_h - 1}], got {self.s}"
            )
        if not 1 <= self.nu <= self.n_h - self.s:
            raise ConfigurationError(
                f"nu must lie in [1, n_h-s] = [1, {self.n_h - self.s}], got {self.nu}"
            )

    @property
    def layers(self) -> int:
        """L, the number of layers."""
        return comb(self.n_h, self.nu + self.s)

    @property
    def lam(self) -> int:
        """lambda = L * nu, the number of gradient subvectors."""
        return self.layers * self.nu

    @property
    def d(self) -> int:
        """Subvector length; the gradient is zero-padded when lam does not divide p."""
        return -(-self.p // self.lam)

    @property
    def p_padded(self) -> int:
        return self.d * self.lam

    @property
    def b(self) -> int:
        """Symbols per helper column (the subpacketization level)."""
        return comb(self.n_h - 1, self.nu + self.s - 1)

    @property
    def alpha(self) -> int:
        """Number of s-subsets of a layer's helper set."""
        return comb(self.nu + self.s, self.s)


class LayerMap:
    """The (nu+s)-subsets of [0, n_h) in lexicographic order, with column indexes.

    subset l is stored ascending; column_slots(j) lists the (layer, slot)
    pairs whose cell lands in helper j's column, in increasing layer order.
    """

    def __init__(self, n_h: int, k: int):
        if not 1 <= k <= n_h:
            raise ConfigurationError(f"subset size {k} out of range [1, {n_h}]")
        self.n_h = n_h
        self.k = k
        self.subsets = tuple(combinations(range(n_h), k))
        cols: list[list[tuple[int, int]]] = [[] for _ in range(n_h)]
        for layer, subset in enumerate(self.subsets):
            for slot, h in enumerate(subset):
                cols[h].append((layer, slot))
        self._cols = tuple(tuple(c) for c in cols)
        self._row_of = tuple({layer: row for row, (layer, _) in enumerate(c)} for c in cols)

    def __len__(self) -> int:
        return len(self.subsets)

    def __getitem__(self, layer: int) -> tuple[int, ...]:
        return self.subsets[layer]

    def __iter__(self):
        return iter(self.subsets)

    def column_slots(self, j: int) -> tuple[tuple[int, int], ...]:
        return self._cols[j]

    def column_layers(self, j: int) -> tuple[int, ...]:
        return tuple(layer for layer, _ in self._cols[j])

    def row_in_column(self, j: int, layer: int) -> int:
        """Row of the compacted column of helper j that carries this layer."""
        return self._row_of[j][layer]


def enumerate_layers(n_h: int, k: int) -> LayerMap:
    return LayerMap(n_h, k)


def partition_gradient(g: np.ndarray, params: SchemeParams, field: GF) -> np.ndarray:
    """Split (and zero-pad) a length-p gradient into an (L, nu, d) block array.

    Block (l, j) holds coordinates [(l*nu + j)*d, (l*nu + j + 1)*d) of the
    padded gradient, so concatenating blocks in (l, j) order restores it.
    """
    g = np.asarray(g, dtype=field.dtype)
    if g.shape != (params.p,):
        raise ValueError(f"gradient must have shape ({params.p},), got {g.shape}")
    padded = np.zeros(params.p_padded, dtype=field.dtype)
    padded[: params.p] = g
    return padded.reshape(params.layers, params.nu, params.d)


def reassemble_gradient(blocks: np.ndarray, params: SchemeParams) -> np.ndarray:
    """Inverse of partition_gradient, truncated back to the declared length."""
    return blocks.reshape(params.p_padded)[: params.p].copy()


@dataclass(frozen=True)
class CodewordArray:
    """One edge's encoded gradient: nu+s coded fragments per layer.

    fragments[l, k] is the symbol placed at cell (l, H_l[k]) of the
    L x n_h grid; the compacted b x n_h transmission form is read off
    with column().
    """

    owner: int
    params: SchemeParams
    layer_map: LayerMap
    fragments: np.ndarray  # (L, nu+s, d)

    def column(self, j: int) -> np.ndarray:
        """The b symbols sent to helper j, in increasing layer order."""
        slots = self.layer_map.column_slots(j)
        return np.stack([self.fragments[layer, slot] for layer, slot in slots])

    def column_layers(self, j: int) -> tuple[int, ...]:
        """Layer numbers of the column rows; deducible metadata, not payload."""
        return self.layer_map.column_layers(j)


def encode_client(
    g_i: np.ndarray,
    params: SchemeParams,
    code: MdsCode,
    layers: LayerMap,
    owner: int = 0,
) -> CodewordArray:
    """Encode one edge's gradient into its codeword array (all layers at once)."""
    if (code.nu, code.s) != (params.nu, params.s):
        raise ValueError(
            f"code is [{code.n},{code.nu}] but params want [{params.nu + params.s},{params.nu}]"
        )
    if (layers.n_h, layers.k) != (params.n_h, params.nu + params.s):
        raise ValueError("layer map does not match the scheme parameters")
    blocks = partition_gradient(g_i, params, code.field)
    # One field matmul for all layers: stack the L message blocks side by side.
    stacked = np.ascontiguousarray(blocks.transpose(1, 0, 2)).reshape(
        params.nu, params.layers * params.d
    )
    coded = code.field.matmul(code.generator.T, stacked)
    fragments = np.ascontiguousarray(
        coded.reshape(params.nu + params.s, params.layers, params.d).transpose(1, 0, 2)
    )
    return CodewordArray(owner=owner, params=params, layer_map=layers, fragments=fragments)


def format_layer_grid(params: SchemeParams, layers: LayerMap) -> str:
    """Render the L x n_h placement grid with g/p fragment labels."""
    header = ["layer"] + [f"H{j}" for j in range(params.n_h)]
    rows = [header]
    for layer, subset in enumerate(layers):
        cells = [""] * params.n_h
        for slot, h in enumerate(subset):
            cells[h] = f"g{slot}" if slot < params.nu else f"p{slot - params.nu}"
        rows.append([str(layer)] + cells)
    widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows
    ]
    return "\n".join(lines)


def random_gradient(rng: np.random.Generator, field: GF, p: int) -> np.ndarray:
    return rng.integers(0, field.order, size=p, dtype=field.dtype)


def load_gradient(path: str | Path, field: GF, p: int | None = None) -> np.ndarray:
    """Read a gradient from a JSON integer array or a raw little-endian file.

    Raw files carry one element per ceil(m/8) bytes; values are reduced
    into the field by truncation to m bits.
    """
    path = Path(path)
    if path.suffix == ".json":
        values = json.loads(path.read_text())
        if not isinstance(values, list):
            raise ConfigurationError(f"{path}: expected a JSON array of integers")
        g = field.reduce(np.asarray(values, dtype=np.int64))
    else:
        raw = path.read_bytes()
        width = field.element_bytes
        if len(raw) % width:
            raise ConfigurationError(
                f"{path}: length {len(raw)} is not a multiple of {width} bytes"
            )
        g = field.reduce(np.frombuffer(raw, dtype=f"<u{width}").astype(np.int64))
    if p is not None and len(g) != p:
        raise ConfigurationError(f"{path}: got {len(g)} symbols, expected p={p}")
    return g
