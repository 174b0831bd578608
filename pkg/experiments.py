#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Experiment Registry
Named, seeded experiments over the library modules. Each experiment turns its
validated parameters into a result table plus summary fields; run() writes the CSV,
the JSON summary and, on request, an SVG plot of the table.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import json5
import numpy as np
import pandas as pd

from actions import (
    OMEGA,
    DilationAction,
    FourierRotationAction,
    action_from_config,
    character_observable,
    conditional_expectation,
    cycle,
    fourier_basis,
    indicator,
    interval_indicator,
)
from averages import (
    archimedean_progression_means,
    concentration_statistic,
    correlation,
    digit_density,
    dilation_product_average,
    folner_steps,
    form_polynomial,
    multilinear_average,
    omega_product_average,
    pretentious_projection,
    rational_pair_average,
    recurrence_profile,
)
from equations import (
    QuadEquation,
    minimal_shift,
    monochromatic_search,
    shifted_family,
    solution_family,
    to_recurrence_forms,
    verify_triple,
)
from errors import MultactError, SchemaError
from experiment_config import ExperimentConfig, fraction_param, int_list, rng_for
from folner import (
    SdeltaSpec,
    dilation_invariance_ratio,
    phi_K,
    q_K,
    s_K_closed_form,
    s_K_density,
)
from linforms import FULL_GRID, Grid2D, lattice_indicator_check, main_a_base_point, main_b_report, parse_form, parse_rp
from multfn import (
    Archimedean,
    PretentiousTarget,
    classify,
    concentration_gap,
    factorial_mean,
    function_from_config,
    progression_mean,
    values_at,
)
from numtheory import liouville_table
from uniformity import (
    gowers_norm,
    gowers_norm_expanded,
    gowers_u2_fft,
    inverse_diagnostic,
    katai_correlation,
    katai_sequence_correlation,
    mixed_seminorm,
)
from workers import default_workers, set_default_workers

logger = logging.getLogger(__name__)

__version__ = "0.1.0"

FLOAT_FORMAT = "%.12g"

LIOUVILLE_ROTATION = {"kind": "rotation", "function": {"kind": "liouville"}}
CHARACTER_ROTATION = {"kind": "rotation", "function": {"kind": "modified-dirichlet", "q": 3, "index": 1}}
SZEMEREDI_FORMS = ["m", "n", "m + n", "m + 2n"]


@dataclass
class ExperimentResult:
    table: pd.DataFrame
    summary: Dict[str, Any] = field(default_factory=dict)
    extra: Dict[str, pd.DataFrame] = field(default_factory=dict)


@dataclass(frozen=True)
class RunContext:
    seed: int
    workers: int

    def rng(self, stream: int = 0) -> np.random.Generator:
        return rng_for(self.seed, stream)


@dataclass(frozen=True)
class Experiment:
    name: str
    func: Callable[[Dict[str, Any], RunContext], ExperimentResult]
    defaults: Dict[str, Any]

    @property
    def summary(self) -> str:
        doc = (self.func.__doc__ or "").strip()
        return doc.splitlines()[0] if doc else ""


REGISTRY: Dict[str, Experiment] = {}


def experiment(name: str, **defaults):
    """Registers an experiment with its parameter defaults."""
    def register(func):
        REGISTRY[name] = Experiment(name, func, defaults)
        return func
    return register


def describe() -> List[Experiment]:
    return [REGISTRY[name] for name in sorted(REGISTRY)]


# =============================================================================
# PARAMETER PARSING
# =============================================================================

def _complex_value(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    return complex(value)


def _action(node):
    return action_from_config(node)


def _observable(action, node):
    """'character', {character: j}, {values: [...]}, {indicator: [points]} or {interval: [lo, hi]}."""
    if isinstance(action, FourierRotationAction):
        if node == "character":
            return fourier_basis(1)
        if isinstance(node, dict) and set(node) == {"character"}:
            return fourier_basis(int(node["character"]))
        raise SchemaError(f"a Fourier rotation takes 'character' or {{character: k}}, got {node!r}")

    space = action.space
    if node == "character":
        return character_observable(space.size)
    if not isinstance(node, dict) or len(node) != 1:
        raise SchemaError(f"unknown observable spec {node!r}")
    ((kind, value),) = node.items()
    try:
        if kind == "character":
            return character_observable(space.size, int(value))
        if kind == "values":
            values = np.array([_complex_value(v) for v in value])
            if values.shape != (space.size,):
                raise SchemaError(f"observable needs {space.size} values, got {values.size}")
            return values.real if np.all(values.imag == 0) else values
        if kind == "indicator":
            mask = np.zeros(space.size, dtype=bool)
            mask[np.asarray(value, dtype=np.int64)] = True
            return indicator(space, mask)
        if kind == "interval":
            lower, upper = value
            return interval_indicator(space, fraction_param("interval", lower), fraction_param("interval", upper))
    except (IndexError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid observable spec {node!r}: {e}") from e
    raise SchemaError(f"unknown observable kind '{kind}'")


def _forms(texts: Sequence[str]):
    if not isinstance(texts, list) or not texts:
        raise SchemaError(f"forms must be a nonempty list, got {texts!r}")
    return [parse_form(text) for text in texts]


def _grid(node) -> Grid2D:
    if node is None:
        return FULL_GRID
    try:
        return Grid2D(**node)
    except TypeError as e:
        raise SchemaError(f"grid takes a1, b1, a2, b2: {node!r}") from e


def _steps(params, ctx: RunContext) -> List[int]:
    if params.get("Qs"):
        return int_list("Qs", params["Qs"])
    return folner_steps(params["K"], params.get("Q_samples", 64), ctx.seed)


def _value_rows(values, prefix: str = "value") -> List[Dict[str, Any]]:
    values = np.asarray(values)
    return [{"x": x, f"{prefix}_re": float(np.real(v)), f"{prefix}_im": float(np.imag(v))} for x, v in enumerate(values.tolist())]


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


# =============================================================================
# FØLNER SETS AND CONCENTRATION
# =============================================================================

@experiment("folner-density", K_ladder=[2, 3], invariance_x=[2, 3])
def folner_density(params, ctx):
    """Φ_K extremes, Q_K and the exact density of S_K against ∏(1 − p^{-K})."""
    rows = []
    for K in int_list("K_ladder", params["K_ladder"]):
        values = [element.value for element in phi_K(K)]
        Q = q_K(K)
        density = s_K_density(K)
        closed = s_K_closed_form(K)
        row = {
            "K": K,
            "phi_size": len(values),
            "phi_min": min(values),
            "phi_max": max(values),
            "Q_K": Q,
            "S_K_size": int(density * Q),
            "density": str(density),
            "closed_form": str(closed),
            "exact_match": density == closed,
        }
        for x in int_list("invariance_x", params["invariance_x"]):
            row[f"invariance_{x}"] = float(dilation_invariance_ratio(values, x))
        rows.append(row)
        logger.info(f"📊 K={K}: |S_K|={row['S_K_size']:,} of Q_K={Q:,}, density {density}")
    table = pd.DataFrame(rows)
    return ExperimentResult(table, {"all_exact": bool(table["exact_match"].all())})


@experiment(
    "concentration-fg",
    action=CHARACTER_ROTATION,
    observable="character",
    K=3,
    b=1,
    N_ladder=[1000, 10000, 100000],
    reference="shift",
    Qs=None,
    Q_samples=64,
)
def concentration_fg(params, ctx):
    """E_n ‖T_{Qn+b}F − T_bF‖ for a finitely generated action along Q ∈ Φ_K."""
    action = _action(params["action"])
    F = _observable(action, params["observable"])
    rows = [
        {"Q": Q, "N": N, "statistic": concentration_statistic(action, F, Q, params["b"], N, params["reference"])}
        for Q in _steps(params, ctx)
        for N in int_list("N_ladder", params["N_ladder"])
    ]
    table = pd.DataFrame(rows)
    return ExperimentResult(table, {"max_statistic": float(table["statistic"].max())})


@experiment(
    "concentration-general-restricted",
    function={"kind": "archimedean", "t": 1.0},
    target={"q": 1, "index": 0, "t": 1.0},
    K=3,
    b=1,
    delta=0.05,
    N_ladder=[10000, 100000],
    Qs=None,
    Q_samples=64,
    square=False,
    factorial_k=6,
)
def concentration_general_restricted(params, ctx):
    """Concentration of f(Qn+b) around its pretentious model, unrestricted and on S_δ."""
    f = function_from_config(params["function"])
    try:
        target = PretentiousTarget(**params["target"])
    except TypeError as e:
        raise SchemaError(f"target takes q, index and t: {params['target']!r}") from e
    restriction = SdeltaSpec(float(params["delta"]))
    rows = []
    for Q in _steps(params, ctx):
        for N in int_list("N_ladder", params["N_ladder"]):
            rows.append({
                "Q": Q,
                "N": N,
                "unrestricted": concentration_gap(f, target, Q, params["b"], params["K"], N, square=params["square"]),
                "restricted": concentration_gap(f, target, Q, params["b"], params["K"], N, restriction, square=params["square"]),
            })
    table = pd.DataFrame(rows)
    N_top = max(params["N_ladder"])
    summary = {
        "max_unrestricted": float(table["unrestricted"].max()),
        "max_restricted": float(table["restricted"].max()),
        "factorial_mean_abs": abs(factorial_mean(f, params["factorial_k"], N_top).value),
        "factorial_mean_restricted_abs": abs(factorial_mean(f, params["factorial_k"], N_top, restriction).value),
    }
    return ExperimentResult(table, summary)


@experiment(
    "aperiodicity-liouville",
    function={"kind": "liouville"},
    a_max=5,
    b_max=5,
    N_ladder=[10000, 100000, 1000000],
    classify_P=0,
    moduli=[1, 2, 3, 4, 5],
    t_grid=[0.0],
)
def aperiodicity_liouville(params, ctx):
    """max_{a,b} |E_{n≤N} f(an+b)| along an N ladder (aperiodic functions decay)."""
    f = function_from_config(params["function"])
    ladder = int_list("N_ladder", params["N_ladder"])
    rows = []
    for N in ladder:
        for a in range(1, params["a_max"] + 1):
            for b in range(0, params["b_max"] + 1):
                mean = progression_mean(f, a, b, N).value
                rows.append({"N": N, "a": a, "b": b, "mean_re": mean.real, "mean_im": mean.imag, "abs": abs(mean)})
        logger.info(f"🔄 N={N:,} done")
    table = pd.DataFrame(rows)
    maxima = table.groupby("N", sort=False)["abs"].max()
    summary = {
        "max_abs": {str(N): float(v) for N, v in maxima.items()},
        "decreasing": bool(all(x > y for x, y in zip(maxima.tolist(), maxima.tolist()[1:]))),
    }
    if params["classify_P"] >= 100:
        result = classify(f, params["classify_P"], params["moduli"], params["t_grid"])
        summary["nearest_target"] = None if result is None else {"target": str(result.target), "distance_sq": result.distance_sq}
    return ExperimentResult(table, summary)


# =============================================================================
# UNIFORMITY
# =============================================================================

def _random_sequence(rng: np.random.Generator, N: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(N)) * rng.random(N)


@experiment("gowers-oracle", sequences=100, N_min=16, N_max=1024, expanded_N=[8, 16, 32], pairs=40, tolerance=1e-9)
def gowers_oracle(params, ctx):
    """FFT vs inductive U², inductive vs expanded U³, triangle inequality and s-monotonicity."""
    rng = ctx.rng(0)
    tol = params["tolerance"]
    rows = []
    for _ in range(params["sequences"]):
        a = _random_sequence(rng, int(rng.integers(params["N_min"], params["N_max"] + 1)))
        fast, slow = gowers_u2_fft(a), gowers_norm(a, 2)
        rows.append({"check": "u2-fft", "N": a.size, "first": fast, "second": slow, "ok": abs(fast - slow) <= tol})
    for N in int_list("expanded_N", params["expanded_N"]):
        a = _random_sequence(rng, N)
        inductive, expanded = gowers_norm(a, 3), gowers_norm_expanded(a, 3)
        rows.append({"check": "u3-expanded", "N": N, "first": inductive, "second": expanded, "ok": abs(inductive - expanded) <= tol})
    for _ in range(params["pairs"]):
        N = int(rng.integers(4, 33))
        a, b = _random_sequence(rng, N), _random_sequence(rng, N)
        for s in (2, 3):
            left, right = gowers_norm(a + b, s), gowers_norm(a, s) + gowers_norm(b, s)
            rows.append({"check": f"triangle-u{s}", "N": N, "first": left, "second": right, "ok": left <= right + tol})
        for s in (1, 2):
            low, high = gowers_norm(a, s), gowers_norm(a, s + 1)
            rows.append({"check": f"monotone-u{s}", "N": N, "first": low, "second": high, "ok": low <= high + tol})
    table = pd.DataFrame(rows)
    failures = table.loc[~table["ok"], "check"].value_counts().to_dict()
    logger.info(f"📊 {len(table)} checks, {sum(failures.values())} failure(s)")
    return ExperimentResult(table, {"checks": len(table), "failures": failures})


@experiment("mixed-seminorm-ladder", action=LIOUVILLE_ROTATION, observable="character", s_values=[1, 2, 3], N_ladder=[500, 1000, 2000])
def mixed_seminorm_ladder(params, ctx):
    """Mixed seminorms of F along the action for each s and N."""
    action = _action(params["action"])
    F = _observable(action, params["observable"])
    s_values = int_list("s_values", params["s_values"])
    rows = [
        {"N": N, "s": s, "value": mixed_seminorm(action, F, s, N, ctx.workers)}
        for N in int_list("N_ladder", params["N_ladder"])
        for s in s_values
    ]
    table = pd.DataFrame(rows)
    monotone = all(
        np.all(np.diff(group.sort_values("s")["value"].to_numpy()) >= -1e-12)
        for _, group in table.groupby("N")
    )
    return ExperimentResult(table, {"monotone_in_s": bool(monotone)})


@experiment("inverse-diagnostic", action=CHARACTER_ROTATION, observable="character", q_max=6, r_max=5, N_ladder=[999, 9999], s_max=2)
def inverse_diagnostic_table(params, ctx):
    """Largest progression average next to the mixed seminorms, per N."""
    action = _action(params["action"])
    F = _observable(action, params["observable"])
    grid = [(q, r) for q in range(1, params["q_max"] + 1) for r in range(0, params["r_max"] + 1)]
    table = inverse_diagnostic(action, F, grid, int_list("N_ladder", params["N_ladder"]), params["s_max"], ctx.workers)
    return ExperimentResult(table, {"progression_pairs": len(grid)})


@experiment(
    "katai-diagnostic",
    function={"kind": "liouville"},
    form="m + n",
    N=300,
    quadruples=[[2, 3, 5, 7], [2, 1, 3, 1], [1, 2, 3, 5]],
    prime_pairs=[[2, 3], [3, 5], [5, 7]],
    sequence_N=100000,
    sequence_shift=1,
)
def katai_diagnostic(params, ctx):
    """Kátai correlations of A(m,n) = f(L(m,n)) and of w(n) = f(n + shift)."""
    f = function_from_config(params["function"])
    form = parse_form(params["form"])
    N = params["N"]
    m, n = np.meshgrid(np.arange(1, N + 1), np.arange(1, N + 1), indexing="ij")
    args = form(m, n)
    if (args < 1).any():
        raise SchemaError(f"form {form} must be positive on [N]²")
    A = values_at(f, args)
    rows = []
    for quad in params["quadruples"]:
        p, q, p2, q2 = quad
        value = katai_correlation(A, p, q, p2, q2)
        rows.append({"kind": "2d", "p": p, "q": q, "p2": p2, "q2": q2, "re": value.real, "im": value.imag, "abs": abs(value)})
    shift = params["sequence_shift"]
    for p, p2 in params["prime_pairs"]:
        value = katai_sequence_correlation(lambda k: values_at(f, k + shift), p, p2, params["sequence_N"])
        rows.append({"kind": "1d", "p": p, "q": 1, "p2": p2, "q2": 1, "re": value.real, "im": value.imag, "abs": abs(value)})
    table = pd.DataFrame(rows)
    return ExperimentResult(table, {"max_abs": float(table["abs"].max())})


# =============================================================================
# DECOMPOSITION AND MULTIPLE AVERAGES
# =============================================================================

@experiment("decompose", action=CHARACTER_ROTATION, observable="character", K=3, Q_samples=64, N=100000, Qs=None, check_N=None)
def decompose(params, ctx):
    """F = F_p + F_a through the Φ_K-averaged progression estimator."""
    action = _action(params["action"])
    F = _observable(action, params["observable"])
    report = pretentious_projection(
        action, F, params["K"], params["Q_samples"], params["N"], ctx.seed,
        Qs=int_list("Qs", params["Qs"]) if params["Qs"] else None,
        check_N=params["check_N"],
    )
    table = pd.DataFrame([
        {
            "x": x,
            "F_re": float(np.real(F[x])),
            "F_im": float(np.imag(F[x])),
            "F_p_re": float(np.real(report.F_p[x])),
            "F_p_im": float(np.imag(report.F_p[x])),
            "F_a_re": float(np.real(report.F_a[x])),
            "F_a_im": float(np.imag(report.F_a[x])),
        }
        for x in range(action.space.size)
    ])
    space = action.space
    summary = {
        "norm_F": space.norm(F),
        "norm_F_p": space.norm(report.F_p),
        "norm_F_a": space.norm(report.F_a),
        "mean_gap": abs(space.integrate(report.F_p) + space.integrate(report.F_a) - space.integrate(F)),
        "max_aperiodic_average": report.max_aperiodic,
        "steps": report.Qs,
    }
    return ExperimentResult(table, summary)


@experiment("mainA-linear", action=LIOUVILLE_ROTATION, observable="character", forms=SZEMEREDI_FORMS, N=3000, grid=None)
def main_a_linear(params, ctx):
    """E_{m,n} ∏_j T_{L_j(m,n)}F against the product of the integrals."""
    action = _action(params["action"])
    F = _observable(action, params["observable"])
    forms = _forms(params["forms"])
    report = multilinear_average([action] * len(forms), [F] * len(forms), forms, params["N"], _grid(params["grid"]), ctx.workers)
    integral_F = complex(action.space.integrate(F))
    summary = {
        "integral": report.integral,
        "integral_abs": abs(report.integral),
        "norm": report.norm,
        "product_of_integrals": integral_F ** len(forms),
        "contributing_count": report.contributing_count,
        "excluded_count": report.excluded_count,
        "base_point": main_a_base_point(forms),
    }
    return ExperimentResult(pd.DataFrame(_value_rows(report.value)), summary)


@experiment(
    "mainB-rational",
    action=LIOUVILLE_ROTATION,
    action2=None,
    observable="character",
    R1="m * n^-1",
    R2="(m - n) * (m + n) * m^-1 * n^-1",
    N_ladder=[1000, 2000],
    domain="m>n",
    grid=None,
)
def main_b_rational(params, ctx):
    """E_{m,n} T_{R1(m,n)}F · T_{R2(m,n)}F per N with the Cauchy gaps between rungs."""
    action1 = _action(params["action"])
    action2 = _action(params["action2"]) if params["action2"] else action1
    F1 = _observable(action1, params["observable"])
    F2 = _observable(action2, params["observable"])
    R1 = parse_rp(params["R1"], allow_signed=True)
    R2 = parse_rp(params["R2"], allow_signed=True)
    rows, values, counts = [], [], {}
    for N in int_list("N_ladder", params["N_ladder"]):
        report = rational_pair_average(action1, action2, F1, F2, R1, R2, N, _grid(params["grid"]), params["domain"], ctx.workers)
        values.append(np.asarray(report.value))
        counts[str(N)] = {"contributing_count": report.contributing_count, "excluded_count": report.excluded_count}
        rows += [{"N": N, **row} for row in _value_rows(report.value)]
    gaps = [float(np.sqrt(np.mean(np.abs(b - a) ** 2))) for a, b in zip(values, values[1:])]
    hypotheses = main_b_report(R1, R2)
    summary = {
        "cauchy_gaps": gaps,
        "counts": counts,
        "hypotheses": {
            "r2_shape_ok": hypotheses.r2_shape_ok,
            "r1_not_power": hypotheses.r1_not_power,
            "base_point": hypotheses.base_point,
            "satisfied": hypotheses.satisfied,
        },
    }
    return ExperimentResult(pd.DataFrame(rows), summary)


@experiment(
    "recurrence-profile",
    action=LIOUVILLE_ROTATION,
    set={"indicator": [0]},
    forms=SZEMEREDI_FORMS,
    N=2000,
    epsilon=0.05,
    include_base=False,
    q_trick=True,
    K=3,
    Qs=None,
    Q_samples=64,
    q_base=[1, 0],
    grid=None,
)
def recurrence_profile_experiment(params, ctx):
    """μ(A ∩ ∩_j T_{L_j(m,n)}^{-1}A) over [N]², optionally averaged over the Q-trick grids."""
    action = _action(params["action"])
    A = _observable(action, params["set"])
    Rs = [form_polynomial(form) for form in _forms(params["forms"])]
    q_trick = _steps(params, ctx) if params["q_trick"] else None
    profile = recurrence_profile(
        action, A, Rs, params["N"], float(params["epsilon"]),
        grid=_grid(params["grid"]),
        include_base=params["include_base"],
        q_trick=q_trick,
        q_base=tuple(int_list("q_base", params["q_base"], minimum=0)),
        workers=ctx.workers,
    )
    table = pd.DataFrame({"N": np.arange(1, profile.N + 1), "running_mean": profile.running})
    extra = {"per_q": pd.DataFrame(profile.per_q, columns=["Q", "good_density"])} if profile.per_q else {}
    summary = {
        "mu_A": profile.mu_A,
        "benchmark": profile.benchmark,
        "good_density": profile.good_density,
        "max_measure": profile.max_measure,
        "mean_measure": profile.mean_measure,
        "contributing_count": profile.contributing_count,
        "excluded_count": profile.excluded_count,
    }
    return ExperimentResult(table, summary, extra)


# =============================================================================
# COUNTEREXAMPLES
# =============================================================================

@experiment(
    "counterexample-dilation",
    modulus=10007,
    k=1,
    interval=["1/3", "2/3"],
    forms=["m", "n", "m + n"],
    N=100,
    include_base=False,
    epsilon=0.0,
    product_N=200,
)
def counterexample_dilation(params, ctx):
    """Dilations x ↦ nx mod M: vanishing triple intersections and a product average stuck at 1."""
    action = DilationAction(params["modulus"], params["k"])
    lower, upper = params["interval"]
    A = interval_indicator(action.space, fraction_param("interval", lower), fraction_param("interval", upper))
    Rs = [form_polynomial(form) for form in _forms(params["forms"])]
    profile = recurrence_profile(action, A, Rs, params["N"], float(params["epsilon"]), include_base=params["include_base"], workers=ctx.workers)
    m, n = np.meshgrid(np.arange(1, profile.N + 1), np.arange(1, profile.N + 1), indexing="ij")
    table = pd.DataFrame({"m": m.ravel(), "n": n.ravel(), "measure": profile.measures.ravel()})
    product = dilation_product_average(params["modulus"], params["product_N"])
    summary = {
        "mu_A": profile.mu_A,
        "max_measure": profile.max_measure,
        "contributing_count": profile.contributing_count,
        "excluded_count": profile.excluded_count,
        "product_average_max_deviation": float(np.max(np.abs(product.value - 1))),
        "product_contributing_count": product.contributing_count,
    }
    logger.info(f"📊 max intersection measure {profile.max_measure:.6f} for μ(A)={profile.mu_A:.4f}")
    return ExperimentResult(table, summary)


@experiment("counterexample-archimedean", t=1.0, Q=720, b=1, delta=0.05, N_ladder=[10000, 100000], mean_a=1, mean_b=0, means_ladder=[1000, 10000, 100000, 1000000])
def counterexample_archimedean(params, ctx):
    """n^{it} rotation: no concentration along Qn+b without the S_δ restriction, and oscillating means."""
    action = FourierRotationAction(Archimedean(float(params["t"])))
    F = fourier_basis(1)
    restriction = SdeltaSpec(float(params["delta"]))
    rows = [
        {
            "N": N,
            "unrestricted": concentration_statistic(action, F, params["Q"], params["b"], N),
            "restricted": concentration_statistic(action, F, params["Q"], params["b"], N, restriction=restriction),
        }
        for N in int_list("N_ladder", params["N_ladder"])
    ]
    table = pd.DataFrame(rows)
    means = archimedean_progression_means(float(params["t"]), params["mean_a"], params["mean_b"], int_list("means_ladder", params["means_ladder"]))
    summary = {
        "min_unrestricted": float(table["unrestricted"].min()),
        "max_restricted": float(table["restricted"].max()),
        "max_mean_gap": float(means["gap"].max()),
    }
    return ExperimentResult(table, summary, {"means": means})


# =============================================================================
# Ω-POWERS, DIGITS AND EQUATIONS
# =============================================================================

@experiment("omega-uniformity", sizes=[3, 4], frequencies=[1, 1], forms=["m + n", "m + 2n"], N=2000)
def omega_uniformity(params, ctx):
    """E_{m,n} ∏_j F_j(S_j^{Ω(L_j(m,n))}) for cyclic shifts and mean-zero characters."""
    sizes = int_list("sizes", params["sizes"], minimum=2)
    freqs = int_list("frequencies", params["frequencies"], minimum=0)
    forms = _forms(params["forms"])
    if not len(sizes) == len(freqs) == len(forms):
        raise SchemaError("sizes, frequencies and forms need the same length")
    Fs = [character_observable(size, j) for size, j in zip(sizes, freqs)]
    report = omega_product_average([cycle(size) for size in sizes], [OMEGA] * len(sizes), Fs, forms, params["N"], ctx.workers)
    summary = {
        "integral": report.integral,
        "integral_abs": abs(report.integral),
        "norm": report.norm,
        "product_of_integrals": complex(np.prod([F.mean() for F in Fs])),
        "contributing_count": report.contributing_count,
        "excluded_count": report.excluded_count,
    }
    return ExperimentResult(pd.DataFrame(_value_rows(report.value)), summary)


@experiment("digits", bases=[2, 3], targets=[1, 2], forms=["m + n", "m + 2n"], N_ladder=[500, 1000, 2000], samples=2000)
def digits(params, ctx):
    """Frequency of prescribed digits at positions Ω(L_j(m,n)) against ∏ 1/b_j."""
    bases = int_list("bases", params["bases"], minimum=2)
    targets = int_list("targets", params["targets"], minimum=0)
    forms = _forms(params["forms"])
    expected = 1 / math.prod(bases)
    rows = []
    for N in int_list("N_ladder", params["N_ladder"]):
        frequency = digit_density(bases, targets, forms, N, samples=params["samples"], seed=ctx.seed)
        rows.append({"N": N, "frequency": frequency, "expected": expected, "relative_error": abs(frequency - expected) / expected})
    table = pd.DataFrame(rows)
    return ExperimentResult(table, {"max_relative_error": float(table["relative_error"].max())})


def _coloring(kind: str, colors: int, N: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "liouville":
        return ((1 - liouville_table(N).astype(np.int64)) // 2)
    if kind == "residue":
        return np.arange(N + 1) % colors
    if kind == "random":
        return rng.integers(0, colors, size=N + 1)
    raise SchemaError(f"unknown coloring '{kind}' (liouville, residue or random)")


def _random_admissible(rng: np.random.Generator) -> QuadEquation:
    a, e = (int(v) for v in rng.integers(1, 7, size=2))
    b, f = (int(v) for v in rng.integers(-6, 7, size=2))
    return QuadEquation(a=a, b=b, d=a + b, e=e, f=f)


@experiment(
    "quad-equation",
    equation={"a": 1, "b": -1, "d": 0, "e": 1, "f": 0},
    l=None,
    N=2000,
    coloring="liouville",
    colors=2,
    k_max=None,
    distinct=False,
    max_rows=200,
    random_equations=20,
)
def quad_equation(params, ctx):
    """ax² + by² = dxy + exz + fyz: parametrization, recurrence forms and a monochromatic search."""
    try:
        eq = QuadEquation(**params["equation"])
    except TypeError as e:
        raise SchemaError(f"equation takes a, b, d, e, f: {params['equation']!r}") from e
    family = solution_family(eq)
    l = params["l"] or minimal_shift(eq)
    shifted = shifted_family(eq, l)
    forms = to_recurrence_forms(eq, l)

    N = params["N"]
    colors = _coloring(params["coloring"], params["colors"], N, ctx.rng(1))
    triples = monochromatic_search(colors, eq, N, params["k_max"], family=shifted, distinct=params["distinct"], workers=ctx.workers)
    table = pd.DataFrame(
        [
            {"k": t.k, "m": t.m, "n": t.n, "x": t.x, "y": t.y, "z": t.z, "color": t.color, "verified": verify_triple(eq, t.x, t.y, t.z)}
            for t in triples[: params["max_rows"]]
        ],
        columns=["k", "m", "n", "x", "y", "z", "color", "verified"],
    )

    rng = ctx.rng(2)
    checked = [_random_admissible(rng) for _ in range(params["random_equations"])]
    symbolic = sum(solution_family(other).verify(other) for other in checked)
    summary = {
        "equation": str(eq),
        "family": str(family),
        "shift": l,
        "shifted_family": str(shifted),
        "recurrence_forms": forms.as_dict(),
        "hypotheses_hold": forms.hypotheses_hold,
        "triples_found": len(triples),
        "random_equations_verified": f"{symbolic}/{len(checked)}",
    }
    return ExperimentResult(table, summary)


# =============================================================================
# STRUCTURAL IDENTITIES
# =============================================================================

@experiment(
    "chu-inequality",
    cases=100,
    size_max=40,
    cells_max=4,
    action={"kind": "dilation", "modulus": 101},
    gram_size=8,
    homomorphism_pairs=1000,
)
def chu_inequality(params, ctx):
    """∫F·E(F|𝒜)·E(F|ℬ) ≥ (∫F)³, correlation Gram matrices and the action homomorphism."""
    rng = ctx.rng(0)
    rows = []
    for case in range(params["cases"]):
        size = int(rng.integers(2, params["size_max"] + 1))
        F = rng.random(size)
        first = conditional_expectation(F, rng.integers(0, params["cells_max"], size=size))
        second = conditional_expectation(F, rng.integers(0, params["cells_max"], size=size))
        lhs = float(np.mean(F * first * second))
        rhs = float(F.mean() ** 3)
        rows.append({"case": case, "size": size, "triple_integral": lhs, "integral_cubed": rhs, "slack": lhs - rhs})
    table = pd.DataFrame(rows)

    action = _action(params["action"])
    size = action.space.size
    F = rng.normal(size=size) + 1j * rng.normal(size=size)
    rationals = [tuple(int(v) for v in rng.integers(1, 50, size=2)) for _ in range(params["gram_size"])]
    gram = np.array([[correlation(action, F, r, s) for s in rationals] for r in rationals])
    gram_min = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2).min())

    failures, isometry_gap = 0, 0.0
    norm_F = action.space.norm(F)
    for _ in range(params["homomorphism_pairs"]):
        (m1, n1), (m2, n2) = (tuple(int(v) for v in rng.integers(1, 101, size=2)) for _ in range(2))
        try:
            combined = action.apply((m1 * m2, n1 * n2), F)
            nested = action.apply((m1, n1), action.apply((m2, n2), F))
        except MultactError:
            continue
        failures += int(not np.array_equal(combined, nested))
        isometry_gap = max(isometry_gap, abs(action.space.norm(nested) - norm_F))
    summary = {
        "min_slack": float(table["slack"].min()),
        "gram_min_eigenvalue": gram_min,
        "homomorphism_failures": failures,
        "isometry_max_gap": isometry_gap,
    }
    logger.info(f"📊 Chu slack ≥ {summary['min_slack']:.3e}, Gram λ_min {gram_min:.3e}")
    return ExperimentResult(table, summary)


@experiment("lattice-identity", instances=1000, entry_max=4, point_max=30)
def lattice_identity(params, ctx):
    """1_{AZ²}(m,n) against E_{q∈Z_A} e(m q₁ + n q₂) on random nonsingular A."""
    rng = ctx.rng(0)
    bound, reach = params["entry_max"], params["point_max"]
    rows = []
    while len(rows) < params["instances"]:
        a, b, c, d = (int(v) for v in rng.integers(-bound, bound + 1, size=4))
        if a * d - b * c == 0:
            continue
        m, n = (int(v) for v in rng.integers(-reach, reach + 1, size=2))
        check = lattice_indicator_check(((a, b), (c, d)), m, n)
        rows.append({
            "a": a, "b": b, "c": c, "d": d, "m": m, "n": n,
            "det": a * d - b * c,
            "indicator": check.indicator,
            "sum_re": check.exponential_sum.real,
            "sum_im": check.exponential_sum.imag,
            "agrees": check.agrees,
        })
    table = pd.DataFrame(rows)
    return ExperimentResult(table, {"agreements": int(table["agrees"].sum()), "instances": len(table)})


# =============================================================================
# RUNNER
# =============================================================================

@dataclass
class RunArtifacts:
    result: ExperimentResult
    csv_path: Path
    json_path: Path
    svg_path: Optional[Path]
    seconds: float


def write_table(table: pd.DataFrame, path: Path) -> None:
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8")
    logger.info(f"📂 {path} ({len(table):,} rows)")


def plot_table(table: pd.DataFrame, path: Path, title: str) -> Optional[Path]:
    """First numeric column against the others, as a self-contained SVG."""
    numeric = table.select_dtypes(include="number")
    if numeric.shape[1] < 2 or numeric.empty:
        logger.warning(f"⚠️ Nothing to plot for {title}: fewer than two numeric columns")
        return None
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "multact-lab"
    x = numeric.columns[0]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for column in numeric.columns[1:]:
        ax.plot(numeric[x], numeric[column], marker="o", markersize=3, linewidth=1, label=column)
    ax.set_xlabel(x)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"📂 {path}")
    return path


def run(config: ExperimentConfig) -> RunArtifacts:
    """Runs one validated experiment and writes its artifacts under config.out."""
    entry = REGISTRY[config.experiment]
    set_default_workers(config.threads)
    ctx = RunContext(seed=config.seed, workers=default_workers())
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    logger.info(f"🔄 Running '{entry.name}' (seed={config.seed}, workers={ctx.workers})")
    start = time.perf_counter()
    result = entry.func(dict(config.params), ctx)
    seconds = time.perf_counter() - start

    csv_path = out / f"{entry.name}.csv"
    write_table(result.table, csv_path)
    outputs = [csv_path.name]
    for key, frame in result.extra.items():
        path = out / f"{entry.name}_{key}.csv"
        write_table(frame, path)
        outputs.append(path.name)

    svg_path = plot_table(result.table, out / f"{entry.name}.svg", entry.name) if config.plot else None
    if svg_path is not None:
        outputs.append(svg_path.name)

    summary = {
        "experiment": entry.name,
        "version": __version__,
        "config_sha256": config.sha256(),
        "seed": config.seed,
        "wall_clock_seconds": round(seconds, 3),
        "rows": len(result.table),
        "outputs": outputs,
        "results": _jsonable(result.summary),
        "config": config.resolved(),
    }
    json_path = out / f"{entry.name}.json"
    json_path.write_text(json5.dumps(summary, indent=2, quote_keys=True, trailing_commas=False, ensure_ascii=False) + "\n", encoding="utf-8")
    logger.info(f"📂 {json_path}")
    logger.info(f"🎉 '{entry.name}' finished in {seconds:.2f}s")
    return RunArtifacts(result, csv_path, json_path, svg_path, seconds)
