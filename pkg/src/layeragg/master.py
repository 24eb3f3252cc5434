"""Master-side reconstruction of the gradient sum and exact cost accounting.

The master re-derives every helper's emission order from the erasure
matrix, so the aggregated messages need no tags: entry positions are
looked up per (layer, group), the nu entries of a group are MDS-decoded
at the coordinates of the emitting helpers, group messages are summed
into per-layer totals, and the partition layout is inverted.

Costs are exact rationals. The primary c_eh / c_hm_realized fields are
normalized by the padded gradient length, which makes the closed forms
(nu+s)/nu and mean(beta) hold identically; the *_declared variants
divide by the declared p instead and differ only when padding occurred.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .aggregate import AggregatedMessage, emission_schedule, layer_plans
from .client import LayerMap, SchemeParams, enumerate_layers, reassemble_gradient
from .erasure import enumerate_all, omega_size, sample_uniform, worst_case_pattern
from .errors import ProtocolError
from .mds import MdsCode, invert_matrix


def _rational_dict(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator, "float": float(x)}


@dataclass(frozen=True)
class CostReport:
    """Exact communication costs for one erasure realization."""

    p: int
    p_padded: int
    eh_symbols_per_edge: int  # field symbols each edge sends across all helpers
    hm_symbols: int           # field symbols all helpers send the master
    c_eh: Fraction
    c_hm_realized: Fraction
    c_eh_declared: Fraction
    c_hm_realized_declared: Fraction
    c_hm_worst: "WorstCaseCost | None" = None
    c_hm_avg: "AverageCost | None" = None

    def to_dict(self) -> dict:
        out = {
            "p": self.p,
            "p_padded": self.p_padded,
            "eh_symbols_per_edge": self.eh_symbols_per_edge,
            "hm_symbols": self.hm_symbols,
            "c_eh": _rational_dict(self.c_eh),
            "c_hm_realized": _rational_dict(self.c_hm_realized),
            "c_eh_declared": _rational_dict(self.c_eh_declared),
            "c_hm_realized_declared": _rational_dict(self.c_hm_realized_declared),
        }
        if self.c_hm_worst is not None:
            out["c_hm_worst"] = self.c_hm_worst.to_dict()
        if self.c_hm_avg is not None:
            out["c_hm_avg"] = self.c_hm_avg.to_dict()
        return out


@dataclass(frozen=True)
class WorstCaseCost:
    """Worst-case helper-to-master cost; tight means some matrix achieves value."""

    value: Fraction
    tight: bool
    lower_bound: Fraction
    mode: str

    def to_dict(self) -> dict:
        return {
            "value": _rational_dict(self.value),
            "tight": self.tight,
            "lower_bound": _rational_dict(self.lower_bound),
            "mode": self.mode,
        }


@dataclass(frozen=True)
class AverageCost:
    """Mean helper-to-master cost over Omega(s), exact or estimated."""

    value: Fraction | float
    stderr: float | None
    mode: str
    trials: int | None

    def to_dict(self) -> dict:
        value = (
            _rational_dict(self.value)
            if isinstance(self.value, Fraction)
            else float(self.value)
        )
        return {
            "value": value,
            "stderr": self.stderr,
            "mode": self.mode,
            "trials": self.trials,
        }


def decode_global(
    messages,
    eps: np.ndarray,
    params: SchemeParams,
    layers: LayerMap,
    code: MdsCode,
) -> np.ndarray:
    """Recover the sum of all edge gradients from the helper messages.

    messages is a sequence of AggregatedMessage indexed by helper.
    """
    if len(messages) != params.n_h:
        raise ProtocolError(f"need {params.n_h} helper messages, got {len(messages)}")
    plans = layer_plans(eps, params, layers)
    lookup: list[dict[tuple[int, int], int]] = []
    for j in range(params.n_h):
        schedule = emission_schedule(j, plans, layers)
        msg: AggregatedMessage = messages[j]
        if len(msg) != len(schedule):
            raise ProtocolError(
                f"helper {j} sent {len(msg)} entries, schedule has {len(schedule)}"
            )
        lookup.append({pair: idx for idx, pair in enumerate(schedule)})

    field = code.field
    # Cover patterns repeat across layers and groups; cache one solve per pattern.
    solver_cache: dict[tuple[int, ...], np.ndarray] = {}
    layer_sums = np.zeros((params.layers, params.nu, params.d), dtype=field.dtype)
    for plan in plans:
        for a, cover in enumerate(plan.images):
            emitters = [h for h in plan.helpers if h not in cover]
            positions = tuple(k for k, h in enumerate(plan.helpers) if h not in cover)
            rows = []
            for h in emitters:
                idx = lookup[h].get((plan.layer, a))
                if idx is None:
                    raise ProtocolError(
                        f"missing entry for layer {plan.layer}, group {a}, helper {h}"
                    )
                rows.append(messages[h].entries[idx])
            solver = solver_cache.get(positions)
            if solver is None:
                solver = invert_matrix(field, code.generator[:, list(positions)].T)
                solver_cache[positions] = solver
            group_message = field.matmul(solver, np.stack(rows))
            layer_sums[plan.layer] ^= group_message
    return reassemble_gradient(layer_sums, params)


def cost_realized(
    eps: np.ndarray,
    params: SchemeParams,
    layers: LayerMap | None = None,
    worst: str | None = None,
    average: str | None = None,
    trials: int = 1000,
    seed=0,
) -> CostReport:
    """Exact costs for one erasure matrix, counted from the emission plans.

    The helper-to-master count is derived per helper (sum of m_j) and
    cross-checked against the per-layer identity sum(m_j) = nu * sum(beta).
    Pass worst / average mode names to also fill the optional report fields.
    """
    if layers is None:
        layers = enumerate_layers(params.n_h, params.nu + params.s)
    plans = layer_plans(eps, params, layers)
    m_total = sum(
        len(emission_schedule(j, plans, layers)) for j in range(params.n_h)
    )
    beta_total = sum(plan.beta for plan in plans)
    assert m_total == params.nu * beta_total
    eh_symbols = params.n_h * params.b * params.d
    hm_symbols = m_total * params.d
    return CostReport(
        p=params.p,
        p_padded=params.p_padded,
        eh_symbols_per_edge=eh_symbols,
        hm_symbols=hm_symbols,
        c_eh=Fraction(eh_symbols, params.p_padded),
        c_hm_realized=Fraction(hm_symbols, params.p_padded),
        c_eh_declared=Fraction(eh_symbols, params.p),
        c_hm_realized_declared=Fraction(hm_symbols, params.p),
        c_hm_worst=None if worst is None else cost_worst_case(params, mode=worst),
        c_hm_avg=None
        if average is None
        else cost_average(params, mode=average, trials=trials, seed=seed),
    )


def cost_worst_case(
    params: SchemeParams, mode: str = "theorem", cap: int | None = None
) -> WorstCaseCost:
    """max over Omega(s) of the realized helper-to-master cost.

    theorem mode is closed-form: C(nu+s, s) when n_e >= C(n_h, s) (tight,
    adversarial pattern attains it); otherwise the bound min(n_e, alpha),
    reported with the adversarial pattern's cost as an achieved lower
    bound and tight only when both agree. brute_force enumerates Omega(s).
    """
    if mode == "theorem":
        bound = Fraction(min(params.n_e, params.alpha))
        star = cost_realized(
            worst_case_pattern(params.n_e, params.n_h, params.s), params
        ).c_hm_realized
        if params.n_e >= comb(params.n_h, params.s):
            assert star == Fraction(params.alpha)
            return WorstCaseCost(
                value=Fraction(params.alpha), tight=True, lower_bound=star, mode=mode
            )
        return WorstCaseCost(
            value=bound, tight=star == bound, lower_bound=star, mode=mode
        )
    if mode == "brute_force":
        kwargs = {} if cap is None else {"cap": cap}
        layers = enumerate_layers(params.n_h, params.nu + params.s)
        best = max(
            cost_realized(eps, params, layers).c_hm_realized
            for eps in enumerate_all(params.n_e, params.n_h, params.s, **kwargs)
        )
        return WorstCaseCost(value=best, tight=True, lower_bound=best, mode=mode)
    raise ValueError(f"unknown mode {mode!r}; use theorem or brute_force")


def cost_average(
    params: SchemeParams,
    mode: str = "exhaustive",
    trials: int = 1000,
    seed=0,
    cap: int | None = None,
) -> AverageCost:
    """Mean realized cost over Omega(s): exact enumeration or Monte Carlo."""
    layers = enumerate_layers(params.n_h, params.nu + params.s)
    if mode == "exhaustive":
        kwargs = {} if cap is None else {"cap": cap}
        total = Fraction(0)
        for eps in enumerate_all(params.n_e, params.n_h, params.s, **kwargs):
            total += cost_realized(eps, params, layers).c_hm_realized
        count = omega_size(params.n_e, params.n_h, params.s)
        return AverageCost(value=total / count, stderr=None, mode=mode, trials=None)
    if mode == "monte_carlo":
        if trials < 1:
            raise ValueError(f"trials must be positive, got {trials}")
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        samples = np.empty(trials)
        for t in range(trials):
            eps = sample_uniform(params.n_e, params.n_h, params.s, rng)
            samples[t] = float(cost_realized(eps, params, layers).c_hm_realized)
        stderr = float(samples.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        return AverageCost(
            value=float(samples.mean()), stderr=stderr, mode=mode, trials=trials
        )
    raise ValueError(f"unknown mode {mode!r}; use exhaustive or monte_carlo")
