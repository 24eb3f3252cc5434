"""Helper-side aggregation: per-layer edge classes, group sums, emitted messages.

Within a layer, edges whose erasures hit the layer's helper set in the
same way are interchangeable; each such class is covered by the
lexicographically smallest s-subset of the layer's helpers that contains
its erasure footprint. Classes sharing a cover are merged into one
group, and every helper outside the cover emits that group's symbol sum.
Helpers and the master derive identical plans from the erasure matrix
alone, so the wire format needs no per-entry metadata.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .client import LayerMap, SchemeParams
from .errors import ProtocolError
from .gf import GF


@dataclass(frozen=True)
class LayerAggregationPlan:
    """Who aggregates what for one layer, for a fixed erasure matrix.

    classes     partition of the edges, ordered by smallest member
    class_keys  the shared erasure footprint of each class inside the layer
    phi         per-class cover subset (parallel to classes)
    images      the distinct covers, in lexicographic order
    groups      merged edge set per image (parallel to images)
    """

    layer: int
    helpers: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    class_keys: tuple[tuple[int, ...], ...]
    phi: tuple[tuple[int, ...], ...]
    images: tuple[tuple[int, ...], ...]
    groups: tuple[tuple[int, ...], ...]

    @property
    def beta(self) -> int:
        return len(self.images)


def lexmin_cover(helpers: tuple[int, ...], trapped, s: int) -> tuple[int, ...]:
    """Lexicographically smallest s-subset of helpers containing trapped.

    helpers must be sorted ascending; filling the free slots with the
    smallest remaining helpers is exactly the lexicographic minimum.
    """
    trapped = set(trapped)
    free = s - len(trapped)
    fill = [h for h in helpers if h not in trapped][:free]
    return tuple(sorted(trapped | set(fill)))


def plan_layer(
    layer: int, helpers: tuple[int, ...], eps: np.ndarray, s: int
) -> LayerAggregationPlan:
    """Build the aggregation plan for one layer from the erasure matrix."""
    helper_set = set(helpers)
    by_key: dict[tuple[int, ...], list[int]] = {}
    for i in range(eps.shape[0]):
        key = tuple(j for j in helpers if eps[i, j])
        by_key.setdefault(key, []).append(i)
    # insertion order == order of each class's smallest member
    classes = tuple(tuple(edges) for edges in by_key.values())
    class_keys = tuple(by_key.keys())
    phi = tuple(lexmin_cover(helpers, key, s) for key in class_keys)
    images = tuple(sorted(set(phi)))
    grouped: dict[tuple[int, ...], list[int]] = {im: [] for im in images}
    for cover, edges in zip(phi, classes):
        grouped[cover].extend(edges)
    groups = tuple(tuple(sorted(grouped[im])) for im in images)
    assert all(set(key) <= helper_set for key in class_keys)
    return LayerAggregationPlan(
        layer=layer,
        helpers=tuple(helpers),
        classes=classes,
        class_keys=class_keys,
        phi=phi,
        images=images,
        groups=groups,
    )


def layer_plans(
    eps: np.ndarray, params: SchemeParams, layers: LayerMap
) -> list[LayerAggregationPlan]:
    return [
        plan_layer(layer, subset, eps, params.s) for layer, subset in enumerate(layers)
    ]


def emission_schedule(
    j: int, plans, layers: LayerMap
) -> list[tuple[int, int]]:
    """Ordered (layer, image index) pairs helper j emits: layers ascending,
    image index ascending, only where j sits outside the cover."""
    schedule = []
    for layer, _ in layers.column_slots(j):
        plan = plans[layer]
        for a, cover in enumerate(plan.images):
            if j not in cover:
                schedule.append((layer, a))
    return schedule


@dataclass(frozen=True)
class AggregatedMessage:
    """What one helper sends the master: m_j group sums of d symbols each."""

    helper: int
    entries: np.ndarray  # (m_j, d)

    def __len__(self) -> int:
        return self.entries.shape[0]


def aggregate_helper(
    j: int,
    received: Mapping[int, np.ndarray],
    eps: np.ndarray,
    params: SchemeParams,
    layers: LayerMap,
    field: GF,
) -> AggregatedMessage:
    """Run the aggregation strategy at helper j.

    received maps edge index -> that edge's (b, d) column, present only
    for surviving links. Every group sum only touches edges whose link
    to j survived; a gap means the erasure bookkeeping is broken.
    """
    plans = {
        layer: plan_layer(layer, layers[layer], eps, params.s)
        for layer, _ in layers.column_slots(j)
    }
    entries = []
    for row, (layer, _) in enumerate(layers.column_slots(j)):
        plan = plans[layer]
        for cover, group in zip(plan.images, plan.groups):
            if j in cover:
                continue
            rows = []
            for i in group:
                if eps[i, j] or i not in received:
                    raise ProtocolError(
                        f"helper {j} needs the layer-{layer} symbol of edge {i} "
                        f"but that link is erased"
                    )
                rows.append(received[i][row])
            entries.append(field.xor_sum(np.stack(rows)))
    if entries:
        stacked = np.stack(entries)
    else:
        stacked = np.zeros((0, params.d), dtype=field.dtype)
    return AggregatedMessage(helper=j, entries=stacked)


def message_count(
    j: int, eps: np.ndarray, params: SchemeParams, layers: LayerMap
) -> int:
    """m_j(eps): entries helper j emits, counted without touching symbols."""
    count = 0
    for layer, _ in layers.column_slots(j):
        plan = plan_layer(layer, layers[layer], eps, params.s)
        count += sum(1 for cover in plan.images if j not in cover)
    return count


def message_to_bytes(message: AggregatedMessage, field: GF) -> bytes:
    """Flat wire form: entries in emission order, each field element as
    ceil(m/8) little-endian bytes. No per-entry metadata."""
    return np.ascontiguousarray(
        message.entries, dtype=f"<u{field.element_bytes}"
    ).tobytes()


def message_from_bytes(
    helper: int, payload: bytes, field: GF, count: int, d: int
) -> AggregatedMessage:
    """Parse a wire payload given the (count, d) shape the master re-derives."""
    expected = count * d * field.element_bytes
    if len(payload) != expected:
        raise ProtocolError(
            f"helper {helper}: payload is {len(payload)} bytes, expected {expected}"
        )
    flat = np.frombuffer(payload, dtype=f"<u{field.element_bytes}")
    return AggregatedMessage(
        helper=helper, entries=flat.astype(field.dtype).reshape(count, d)
    )
