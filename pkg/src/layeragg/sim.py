"""Scenario orchestration: full encode/erase/aggregate/decode rounds, the
nu sweep producing the cost tradeoff table, and the scheme verifier.

Links are modeled purely by the erasure matrix; there is no transport.
All randomness flows from the scenario seed through named sub-streams,
so any failing round is replayable from the scenario file alone.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path

import numpy as np

from . import aggregate, erasure, master, mds
from .client import (
    CodewordArray,
    LayerMap,
    SchemeParams,
    encode_client,
    enumerate_layers,
    load_gradient,
    random_gradient,
)
from .errors import ConfigurationError
from .gf import GF

_GRADIENT_STREAM = 0
_ERASURE_STREAM = 1


class StageFailure(RuntimeError):
    """A pipeline stage failed; .stage names it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


@dataclass
class Scenario:
    """A self-contained experiment description (JSON round-trippable).

    erasures: {"kind": "matrix", "rows": [[...], ...]} | {"kind": "uniform"[, "seed": n]}
              | {"kind": "worst_case"} | {"kind": "exhaustive"}
    gradients: {"kind": "random"[, "seed": n]} | {"kind": "file", "path": p}
               | {"kind": "zero"}
    """

    p: int
    n_e: int
    n_h: int
    s: int
    nu: int
    field_bits: int = 8
    field_poly: int | None = None
    erasures: dict = dc_field(default_factory=lambda: {"kind": "uniform"})
    gradients: dict = dc_field(default_factory=lambda: {"kind": "random"})
    seed: int = 0

    def params(self) -> SchemeParams:
        return SchemeParams(p=self.p, n_e=self.n_e, n_h=self.n_h, s=self.s, nu=self.nu)

    def field(self) -> GF:
        return GF(m=self.field_bits, poly=self.field_poly)

    def to_dict(self) -> dict:
        out = {
            "p": self.p,
            "n_e": self.n_e,
            "n_h": self.n_h,
            "s": self.s,
            "nu": self.nu,
            "field_bits": self.field_bits,
            "erasures": self.erasures,
            "gradients": self.gradients,
            "seed": self.seed,
        }
        if self.field_poly is not None:
            out["field_poly"] = self.field_poly
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ConfigurationError("scenario must be a JSON object")
        for name in ("p", "n_e", "n_h", "s", "nu"):
            if name not in data:
                raise ConfigurationError(f"scenario field '{name}' is missing")
            if not isinstance(data[name], int):
                raise ConfigurationError(f"scenario field '{name}' must be an integer")
        known = {
            "p", "n_e", "n_h", "s", "nu",
            "field_bits", "field_poly", "erasures", "gradients", "seed",
        }
        for name in data:
            if name not in known:
                raise ConfigurationError(f"scenario field '{name}' is not recognized")
        scenario = cls(**data)
        _validate_spec(scenario.erasures, "erasures", {"matrix", "uniform", "worst_case", "exhaustive"})
        _validate_spec(scenario.gradients, "gradients", {"random", "file", "zero"})
        if scenario.erasures["kind"] == "matrix" and "rows" not in scenario.erasures:
            raise ConfigurationError("scenario field 'erasures.rows' is missing")
        if scenario.gradients["kind"] == "file" and "path" not in scenario.gradients:
            raise ConfigurationError("scenario field 'gradients.path' is missing")
        scenario.params()  # range checks
        return scenario


def _validate_spec(spec, name: str, kinds: set) -> None:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigurationError(f"scenario field '{name}' needs a 'kind'")
    if spec["kind"] not in kinds:
        raise ConfigurationError(
            f"scenario field '{name}.kind' must be one of {sorted(kinds)}, "
            f"got {spec['kind']!r}"
        )


def load_scenario(path: str | Path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: not valid JSON ({exc})") from exc
    return Scenario.from_dict(data)


def _stream_rng(seed: int, stream: int, round_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, stream, round_index]))


def _round_gradients(scenario: Scenario, field: GF, round_index: int) -> np.ndarray:
    spec = scenario.gradients
    if spec["kind"] == "zero":
        return np.zeros((scenario.n_e, scenario.p), dtype=field.dtype)
    if spec["kind"] == "file":
        g = load_gradient(spec["path"], field, p=scenario.p)
        return np.tile(g, (scenario.n_e, 1))
    rng = _stream_rng(spec.get("seed", scenario.seed), _GRADIENT_STREAM, round_index)
    return np.stack(
        [random_gradient(rng, field, scenario.p) for _ in range(scenario.n_e)]
    )


def _round_erasure(scenario: Scenario, round_index: int) -> np.ndarray:
    spec = scenario.erasures
    if spec["kind"] == "matrix":
        return erasure.from_erased_sets(spec["rows"], scenario.n_h)
    if spec["kind"] == "worst_case":
        return erasure.worst_case_pattern(scenario.n_e, scenario.n_h, scenario.s)
    rng = _stream_rng(spec.get("seed", scenario.seed), _ERASURE_STREAM, round_index)
    return erasure.sample_uniform(scenario.n_e, scenario.n_h, scenario.s, rng)


@dataclass
class RoundResult:
    round_index: int
    passed: bool
    decoded: np.ndarray
    reference: np.ndarray
    report: master.CostReport
    eps: np.ndarray
    eh_symbols_per_edge: int  # counted off the actual column arrays
    hm_symbols: int           # counted off the actual helper messages


def run_round(
    scenario: Scenario, round_index: int = 0, eps: np.ndarray | None = None
) -> RoundResult:
    """One full pipeline pass; counts real symbols and checks them against
    the closed forms before comparing the decode with the direct sum."""

    def stage(name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            raise StageFailure(name, exc) from exc

    params = scenario.params()
    fld = scenario.field()
    layers = enumerate_layers(params.n_h, params.nu + params.s)
    code = stage("setup", mds.make_generator, fld, params.nu, params.s)

    if eps is None:
        eps = stage("setup", _round_erasure, scenario, round_index)
    stage("validate", erasure.validate, eps, params.s, strict=False)
    if eps.shape != (params.n_e, params.n_h):
        raise StageFailure(
            "validate", ValueError(f"erasure matrix shape {eps.shape} mismatch")
        )

    gradients = stage("gradients", _round_gradients, scenario, fld, round_index)

    def encode_all():
        return [
            encode_client(gradients[i], params, code, layers, owner=i)
            for i in range(params.n_e)
        ]

    arrays: list[CodewordArray] = stage("encode", encode_all)

    def deliver():
        inbox = []
        sent = 0
        for j in range(params.n_h):
            box = {}
            for i in range(params.n_e):
                col = arrays[i].column(j)
                sent += col.size
                if not eps[i, j]:
                    box[i] = col
            inbox.append(box)
        return inbox, sent

    inbox, sent_total = stage("deliver", deliver)
    eh_per_edge = sent_total // params.n_e

    def aggregate_all():
        return [
            aggregate.aggregate_helper(j, inbox[j], eps, params, layers, fld)
            for j in range(params.n_h)
        ]

    messages = stage("aggregate", aggregate_all)
    hm_symbols = sum(m.entries.size for m in messages)

    decoded = stage("decode", master.decode_global, messages, eps, params, layers, code)
    reference = np.bitwise_xor.reduce(gradients, axis=0)

    report = stage("account", master.cost_realized, eps, params, layers)
    if eh_per_edge != report.eh_symbols_per_edge or hm_symbols != report.hm_symbols:
        raise StageFailure(
            "account",
            AssertionError(
                f"measured symbol counts ({eh_per_edge}, {hm_symbols}) disagree with "
                f"plan-derived counts ({report.eh_symbols_per_edge}, {report.hm_symbols})"
            ),
        )

    return RoundResult(
        round_index=round_index,
        passed=bool(np.array_equal(decoded, reference)),
        decoded=decoded,
        reference=reference,
        report=report,
        eps=eps,
        eh_symbols_per_edge=eh_per_edge,
        hm_symbols=hm_symbols,
    )


def run_scenario(scenario: Scenario, rounds: int = 1) -> list[RoundResult]:
    """Run the requested number of rounds (or every matrix when exhaustive).

    A rounds count inside the erasure spec overrides the argument.
    """
    if scenario.erasures["kind"] == "exhaustive":
        results = []
        for idx, eps in enumerate(
            erasure.enumerate_all(scenario.n_e, scenario.n_h, scenario.s)
        ):
            results.append(run_round(scenario, round_index=idx, eps=eps))
        return results
    rounds = scenario.erasures.get("rounds", rounds)
    return [run_round(scenario, round_index=r) for r in range(rounds)]


# -- tradeoff sweep ----------------------------------------------------------


@dataclass
class TradeoffRow:
    nu: int
    c_eh: Fraction
    c_hm: Fraction
    tight: bool
    measured: Fraction | None = None


@dataclass
class TradeoffTable:
    n_e: int
    n_h: int
    s: int
    rows: list[TradeoffRow]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            ["nu", "c_eh_num", "c_eh_den", "c_hm_num", "c_hm_den", "tight", "measured"]
        )
        for row in self.rows:
            writer.writerow(
                [
                    row.nu,
                    row.c_eh.numerator,
                    row.c_eh.denominator,
                    row.c_hm.numerator,
                    row.c_hm.denominator,
                    str(row.tight).lower(),
                    "" if row.measured is None else float(row.measured),
                ]
            )
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "n_e": self.n_e,
            "n_h": self.n_h,
            "s": self.s,
            "rows": [
                {
                    "nu": row.nu,
                    "c_eh": {"num": row.c_eh.numerator, "den": row.c_eh.denominator},
                    "c_hm": {"num": row.c_hm.numerator, "den": row.c_hm.denominator},
                    "tight": row.tight,
                    "measured": None if row.measured is None else float(row.measured),
                }
                for row in self.rows
            ],
        }


def sweep_nu(
    n_e: int,
    n_h: int,
    s: int,
    nu_range=None,
    measure: bool = False,
    field_bits: int = 8,
    seed: int = 0,
) -> TradeoffTable:
    """Theoretical cost tradeoff per nu; optionally simulate under the
    adversarial pattern and record the measured helper-to-master cost."""
    if nu_range is None:
        nu_range = range(1, n_h - s + 1)
    rows = []
    for nu in nu_range:
        if not 1 <= nu <= n_h - s:
            raise ConfigurationError(
                f"nu={nu} outside [1, n_h-s] = [1, {n_h - s}]"
            )
        params = SchemeParams(p=comb(n_h, nu + s) * nu, n_e=n_e, n_h=n_h, s=s, nu=nu)
        worst = master.cost_worst_case(params, mode="theorem")
        measured = None
        if measure:
            scenario = Scenario(
                p=params.p,
                n_e=n_e,
                n_h=n_h,
                s=s,
                nu=nu,
                field_bits=field_bits,
                erasures={"kind": "worst_case"},
                gradients={"kind": "random"},
                seed=seed,
            )
            result = run_round(scenario)
            if not result.passed:
                raise StageFailure("sweep", AssertionError(f"decode failed at nu={nu}"))
            measured = result.report.c_hm_realized
        rows.append(
            TradeoffRow(
                nu=nu,
                c_eh=Fraction(nu + s, nu),
                c_hm=worst.value,
                tight=worst.tight,
                measured=measured,
            )
        )
    return TradeoffTable(n_e=n_e, n_h=n_h, s=s, rows=rows)


# -- verification suite -------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _check_layer_decodability(
    code: mds.MdsCode, params: SchemeParams, layers: LayerMap, rng, subset_cap: int = 256
) -> CheckResult:
    d = 4
    message = rng.integers(0, code.field.order, size=(params.nu, d), dtype=code.field.dtype)
    codeword = mds.encode(code, message)
    n = params.nu + params.s
    subsets = list(combinations(range(n), params.nu))
    if len(subsets) > subset_cap:
        picked = rng.choice(len(subsets), size=subset_cap, replace=False)
        subsets = [subsets[int(k)] for k in picked]
    for subset in subsets:
        got = mds.decode_from(code, list(subset), codeword[list(subset)])
        if not np.array_equal(got, message):
            return CheckResult(
                "layer_decodability",
                False,
                f"slots {subset} fail to recover the message",
            )
    return CheckResult("layer_decodability", True)


def verify_scheme(
    n_e: int,
    n_h: int,
    s: int,
    nu: int | None = None,
    trials: int = 50,
    seed: int = 0,
    field_bits: int = 8,
) -> VerificationReport:
    """Run the structural property suite and return per-check results.

    Covers: MDS minors, any-nu per-layer decodability, the availability
    invariant (no emitted sum touches an erased edge), the double-count
    identity between per-helper and per-layer emission counts, and
    end-to-end decoding against the direct gradient sum.
    """
    nus = range(1, n_h - s + 1) if nu is None else [nu]
    fld = GF(m=field_bits)
    checks: list[CheckResult] = []
    for v in nus:
        tag = f"[nu={v}] "
        params = SchemeParams(p=comb(n_h, v + s) * v * 2, n_e=n_e, n_h=n_h, s=s, nu=v)
        layers = enumerate_layers(n_h, v + s)
        code = mds.make_generator(fld, v, s)
        rng = np.random.default_rng(np.random.SeedSequence([seed, v]))

        bad = mds.singular_minors(code)
        checks.append(
            CheckResult(
                tag + "mds_minors",
                not bad,
                None if not bad else f"singular column sets: {bad[:5]}",
            )
        )
        checks.append(_rename(_check_layer_decodability(code, params, layers, rng), tag))

        avail = CheckResult(tag + "availability", True)
        double = CheckResult(tag + "double_count", True)
        for t in range(trials):
            eps = erasure.sample_uniform(n_e, n_h, s, rng)
            plans = aggregate.layer_plans(eps, params, layers)
            for plan in plans:
                for cover, group in zip(plan.images, plan.groups):
                    for j in plan.helpers:
                        if j in cover:
                            continue
                        if any(eps[i, j] for i in group):
                            avail = CheckResult(
                                tag + "availability",
                                False,
                                f"trial {t}: layer {plan.layer} group {cover} "
                                f"uses an erased link to helper {j}",
                            )
            m_total = sum(
                aggregate.message_count(j, eps, params, layers) for j in range(n_h)
            )
            beta_total = sum(plan.beta for plan in plans)
            if m_total != v * beta_total:
                double = CheckResult(
                    tag + "double_count",
                    False,
                    f"trial {t}: sum m_j = {m_total} != nu * sum beta = {v * beta_total}",
                )
        checks.append(avail)
        checks.append(double)

        scenario = Scenario(
            p=params.p, n_e=n_e, n_h=n_h, s=s, nu=v, field_bits=field_bits, seed=seed
        )
        e2e = CheckResult(tag + "end_to_end", True)
        for t in range(trials):
            result = run_round(scenario, round_index=t)
            if not result.passed:
                e2e = CheckResult(
                    tag + "end_to_end",
                    False,
                    f"round {t}: decoded sum disagrees with the direct sum "
                    f"(erasures {erasure.erased_sets(result.eps)})",
                )
                break
        checks.append(e2e)
    return VerificationReport(checks=checks)


def _rename(check: CheckResult, tag: str) -> CheckResult:
    return CheckResult(tag + check.name, check.passed, check.detail)
