#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Ergodic Averages
Single-progression, multilinear and rational-pair averages of multiplicative actions,
recurrence profiles, the pretentious projection, concentration statistics,
correlations, Ω-power products and the digit experiment.

Grid averages never touch the space per point: every (m, n) is reduced to a joint
group key, keys are counted, and each distinct transformation is applied once.
"""

import functools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from actions import (
    OMEGA,
    CompletelyAdditiveSequence,
    DilationAction,
    FgAction,
    FiniteSpace,
    FourierObservable,
    FourierRotationAction,
    fourier_basis,
)
from errors import (
    AllPointsExcludedError,
    CostGuardError,
    EmptySetError,
    HypothesisViolationError,
    OutOfRangeError,
    SchemaError,
    SpaceMismatchError,
    UnsupportedActionError,
)
from folner import SdeltaSpec, phi_K, phi_K_size, s_delta_mask, sample_phi_K
from linforms import FULL_GRID, Grid2D, LinearForm, RationalPolynomialFL, independent
from multfn import Archimedean, archimedean_mean_reference
from workers import chunk_ranges, ordered_map

logger = logging.getLogger(__name__)

JOINT_KEY_LIMIT = 2 ** 62
ROW_BLOCK = 256

Observable = Union[np.ndarray, FourierObservable]


@dataclass
class AverageReport:
    value: Union[np.ndarray, FourierObservable, complex]
    N: int
    contributing_count: int
    excluded_count: int

    @property
    def norm(self) -> float:
        if isinstance(self.value, FourierObservable):
            return self.value.norm()
        if np.ndim(self.value) == 0:
            return abs(self.value)
        return float(np.sqrt(np.mean(np.abs(self.value) ** 2)))

    @property
    def integral(self) -> complex:
        if isinstance(self.value, FourierObservable):
            return self.value.integrate()
        if np.ndim(self.value) == 0:
            return complex(self.value)
        return complex(np.mean(self.value))


# =============================================================================
# HELPERS
# =============================================================================

def _check_observable(action, F) -> Observable:
    if isinstance(action, FourierRotationAction):
        if not isinstance(F, FourierObservable):
            raise SpaceMismatchError("Fourier rotations act on FourierObservable values")
        return F
    F = np.asarray(F)
    if F.shape != (action.space.size,):
        raise SpaceMismatchError(f"observable of shape {F.shape} on a space of size {action.space.size}")
    return F


def _finite_only(action, what: str) -> None:
    if not isinstance(action, (FgAction, DilationAction)):
        raise UnsupportedActionError(f"{what} needs a permutation or dilation action, got {action!r}")


def _image_sum(action, F: np.ndarray, keys: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Σ counts_i · F∘T_{keys_i}."""
    total = np.zeros(F.shape, dtype=np.result_type(F.dtype, np.float64))
    for key, count in zip(keys.tolist(), counts.tolist()):
        total += count * F[action.permutation(key)]
    return total


def _progression_keys(action, a: int, b: int, N: int, mask: Optional[np.ndarray] = None):
    keys, valid = action.keys_along(a, b, N)
    if mask is not None:
        valid = valid & mask
    uniq, counts = np.unique(keys[valid], return_counts=True)
    return uniq, counts, int(N - valid.sum())


def _progression_mean(action, F: Observable, a: int, b: int, N: int, mask: Optional[np.ndarray] = None) -> Tuple[Observable, int]:
    if isinstance(action, FourierRotationAction):
        z = action.progression_multipliers(a, b, N)
        if mask is not None:
            z = z[mask]
        if z.size == 0:
            raise AllPointsExcludedError(f"no n ≤ {N} left along {a}n{b:+d}")
        return FourierObservable.of({k: c * np.mean(z ** k) for k, c in F.coeffs}), int(z.size)
    keys, counts, _ = _progression_keys(action, a, b, N, mask)
    contributing = int(counts.sum())
    if not contributing:
        raise AllPointsExcludedError(f"no n ≤ {N} left along {a}n{b:+d}")
    return _image_sum(action, F, keys, counts) / contributing, contributing


def _deviation_norms(action, F: Observable, a: int, b: int, N: int, reference: Observable) -> np.ndarray:
    """‖T_{an+b}F − reference‖ for n = 1..N (NaN where T is not invertible)."""
    if isinstance(action, FourierRotationAction):
        z = action.progression_multipliers(a, b, N)
        coeffs, ref = F.mapping, reference.mapping
        total = np.zeros(N, dtype=np.float64)
        for k in set(coeffs) | set(ref):
            total += np.abs(coeffs.get(k, 0j) * z ** k - ref.get(k, 0j)) ** 2
        return np.sqrt(total)
    keys, valid = action.keys_along(a, b, N)
    uniq, inverse = np.unique(keys[valid], return_inverse=True)
    per_key = np.array([action.space.norm(F[action.permutation(k)] - reference) for k in uniq.tolist()], dtype=np.float64)
    norms = np.full(N, np.nan)
    norms[valid] = per_key[inverse.reshape(-1)]
    return norms


def _m_greater(m, n):
    return m > n


def _m_less(m, n):
    return m < n


def _m_distinct(m, n):
    return m != n


DOMAIN_FILTERS: Dict[str, Callable] = {"m>n": _m_greater, "m<n": _m_less, "m!=n": _m_distinct}


def domain_filter(spec) -> Optional[Callable]:
    if spec is None or callable(spec):
        return spec
    try:
        return DOMAIN_FILTERS[spec]
    except KeyError:
        raise SchemaError(f"unknown domain filter '{spec}' (known: {', '.join(DOMAIN_FILTERS)})") from None


def form_polynomial(form: LinearForm) -> RationalPolynomialFL:
    return RationalPolynomialFL(Fraction(1), ((form, 1),), True)


def rational_keys(action, R: RationalPolynomialFL, m: np.ndarray, n: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(keys of T_{R(m,n)}, valid); invalid where R is undefined, zero or negative, or T is not invertible."""
    shape = np.shape(m)
    valid = np.ones(shape, dtype=bool)
    negative = np.full(shape, R.c < 0)
    parts, exponents = [], []
    c = abs(R.c)
    if c != 1:
        parts.append(np.full(shape, action.key_of(c), dtype=np.int64))
        exponents.append(1)
    for form, k in R.factors:
        values = form(m, n)
        valid &= values != 0
        if k % 2:
            negative ^= values < 0
        keys, ok = action.keys(np.where(values == 0, 1, np.abs(values)))
        valid &= ok
        parts.append(keys)
        exponents.append(k)
    valid &= ~negative
    if not parts:
        return np.full(shape, action.identity_key, dtype=np.int64), valid
    return action.combine(parts, exponents), valid


# =============================================================================
# JOINT KEYS OVER [N]²
# =============================================================================

def _strides(actions) -> List[int]:
    strides, total = [], 1
    for action in actions:
        strides.append(total)
        total *= action.key_space
    if total > JOINT_KEY_LIMIT:
        raise CostGuardError(f"joint key space of {total:.3g} transformations is too large")
    return strides


def _decode(code: int, actions, strides) -> List[int]:
    return [(code // s) % action.key_space for action, s in zip(actions, strides)]


def _chunk_codes(task) -> Tuple[np.ndarray, np.ndarray]:
    rows, N, grid, mode, plans, strides, keep = task
    m = np.repeat(np.arange(rows.start + 1, rows.stop + 1, dtype=np.int64), N)
    n = np.tile(np.arange(1, N + 1, dtype=np.int64), len(rows))
    if mode == "point":
        u, v = grid.point(m, n)
        valid = np.ones(m.shape, dtype=bool)
    else:
        u, v = m, n
        valid = np.asarray(grid.contains(m, n), dtype=bool)
    if keep is not None:
        valid &= np.asarray(keep(u, v), dtype=bool)
    code = np.zeros(m.shape, dtype=np.int64)
    for (action, R), stride in zip(plans, strides):
        keys, ok = rational_keys(action, R, u, v)
        valid &= ok
        code += np.where(ok, keys, 0) * stride
    return code, valid


def _chunk_counts(task) -> Tuple[np.ndarray, np.ndarray, int]:
    code, valid = _chunk_codes(task)
    uniq, counts = np.unique(code[valid], return_counts=True)
    return uniq, counts, int(valid.size - valid.sum())


def _tasks(plans, N: int, grid: Grid2D, mode: str, keep):
    strides = _strides([action for action, _ in plans])
    blocks = chunk_ranges(N, -(-N // ROW_BLOCK))
    return [(rows, N, grid, mode, plans, strides, keep) for rows in blocks], strides


def _joint_counts(plans, N: int, grid: Grid2D, mode: str, keep=None, workers: Optional[int] = None):
    tasks, strides = _tasks(plans, N, grid, mode, keep)
    results = ordered_map(_chunk_counts, tasks, workers=workers)
    codes = np.concatenate([r[0] for r in results]) if results else np.zeros(0, dtype=np.int64)
    counts = np.concatenate([r[1] for r in results]) if results else np.zeros(0, dtype=np.int64)
    excluded = sum(r[2] for r in results)
    uniq, inverse = np.unique(codes, return_inverse=True)
    merged = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(merged, inverse.reshape(-1), counts)
    logger.debug(f"🔄 {uniq.size:,} distinct joint transformations over [{N:,}]²")
    return uniq, merged, excluded, strides


def _joint_codes(plans, N: int, grid: Grid2D, mode: str, keep=None, workers: Optional[int] = None):
    tasks, strides = _tasks(plans, N, grid, mode, keep)
    results = ordered_map(_chunk_codes, tasks, workers=workers)
    codes = np.concatenate([r[0] for r in results]).reshape(N, N)
    valid = np.concatenate([r[1] for r in results]).reshape(N, N)
    return codes, valid, strides


# =============================================================================
# AVERAGES
# =============================================================================

def single_average(action, F: Observable, a: int, b: int, N: int) -> AverageReport:
    """E_{n∈[N]} T_{an+b}F."""
    if a < 1 or b < 0:
        raise OutOfRangeError(f"progression {a}n+{b} needs a ≥ 1 and b ≥ 0")
    if N < 1:
        raise OutOfRangeError(f"N must be ≥ 1, got {N}")
    F = _check_observable(action, F)
    value, contributing = _progression_mean(action, F, a, b, N)
    return AverageReport(value, N, contributing, N - contributing)


def multilinear_average(
    actions: Sequence,
    Fs: Sequence[np.ndarray],
    forms: Sequence[LinearForm],
    N: int,
    grid: Grid2D = FULL_GRID,
    workers: Optional[int] = None,
) -> AverageReport:
    """E_{m,n∈[N]} 1_Λ(m,n) ∏_j T_{j,L_j(m,n)}F_j on a shared space."""
    if not (len(actions) == len(Fs) == len(forms)) or not forms:
        raise OutOfRangeError("need one action and one observable per linear form")
    if N < 1:
        raise OutOfRangeError(f"N must be ≥ 1, got {N}")
    for action in actions:
        _finite_only(action, "multilinear averages")
    if len({action.space.size for action in actions}) > 1:
        raise SpaceMismatchError("all actions of a multilinear average must share one space")
    Fs = [_check_observable(action, F) for action, F in zip(actions, Fs)]
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            if not independent(forms[i], forms[j]):
                logger.warning(f"⚠️ forms {forms[i]} and {forms[j]} are linearly dependent")

    plans = [(action, form_polynomial(form)) for action, form in zip(actions, forms)]
    codes, counts, excluded, strides = _joint_counts(plans, N, grid, "filter", workers=workers)
    dtype = np.result_type(*(F.dtype for F in Fs), np.float64)
    value = np.zeros(actions[0].space.size, dtype=dtype)
    for code, count in zip(codes.tolist(), counts.tolist()):
        term = np.ones(value.shape, dtype=dtype)
        for action, F, key in zip(actions, Fs, _decode(code, actions, strides)):
            term = term * F[action.permutation(key)]
        value += count * term
    contributing = int(counts.sum())
    logger.info(f"📊 multilinear average over [{N:,}]²: {contributing:,} points, {len(codes):,} distinct transformations")
    return AverageReport(value / (N * N), N, contributing, excluded)


def rational_pair_average(
    action1,
    action2,
    F1: np.ndarray,
    F2: np.ndarray,
    R1: RationalPolynomialFL,
    R2: RationalPolynomialFL,
    N: int,
    grid: Grid2D = FULL_GRID,
    domain=None,
    workers: Optional[int] = None,
) -> AverageReport:
    """E over contributing (m,n) of T_{1,R1}F1 · T_{2,R2}F2, evaluated at grid.point(m, n)."""
    for action in (action1, action2):
        _finite_only(action, "rational-pair averages")
    if action1.space.size != action2.space.size:
        raise SpaceMismatchError("both actions must act on one space")
    F1, F2 = _check_observable(action1, F1), _check_observable(action2, F2)
    if N < 1:
        raise OutOfRangeError(f"N must be ≥ 1, got {N}")

    actions = [action1, action2]
    plans = [(action1, R1), (action2, R2)]
    codes, counts, excluded, strides = _joint_counts(plans, N, grid, "point", domain_filter(domain), workers)
    contributing = int(counts.sum())
    if not contributing:
        raise AllPointsExcludedError(f"every point of [{N:,}]² was excluded for {R1} and {R2}")
    value = np.zeros(F1.shape, dtype=np.result_type(F1.dtype, F2.dtype, np.float64))
    for code, count in zip(codes.tolist(), counts.tolist()):
        k1, k2 = _decode(code, actions, strides)
        value += count * F1[action1.permutation(k1)] * F2[action2.permutation(k2)]
    logger.info(f"📊 rational pair average over [{N:,}]²: {contributing:,} contributing, {excluded:,} excluded")
    return AverageReport(value / contributing, N, contributing, excluded)


# =============================================================================
# RECURRENCE
# =============================================================================

@dataclass
class RecurrenceProfile:
    """Per-(m,n) intersection measures; NaN marks excluded points."""
    measures: np.ndarray
    mu_A: float
    iterates: int
    include_base: bool
    epsilon: float
    benchmark: float
    good_density: float
    contributing_count: int
    excluded_count: int
    running: np.ndarray
    per_q: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def N(self) -> int:
        return self.measures.shape[0]

    @property
    def max_measure(self) -> float:
        return float(np.nanmax(self.measures)) if self.contributing_count else 0.0

    @property
    def mean_measure(self) -> float:
        return float(np.nanmean(self.measures)) if self.contributing_count else 0.0


def _indicator(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if not np.all((A == 0) | (A == 1)):
        raise OutOfRangeError("recurrence needs an indicator observable")
    return A


def _profile_measures(actions, A: np.ndarray, Rs, grid: Grid2D, N: int, include_base: bool, workers) -> np.ndarray:
    codes, valid, strides = _joint_codes(list(zip(actions, Rs)), N, grid, "point", workers=workers)
    uniq, inverse = np.unique(codes[valid], return_inverse=True)
    values = np.empty(uniq.size, dtype=np.float64)
    for i, code in enumerate(uniq.tolist()):
        meet = A.copy() if include_base else np.ones_like(A)
        for action, key in zip(actions, _decode(code, actions, strides)):
            meet *= A[action.permutation(key)]
        values[i] = meet.mean()
    measures = np.full((N, N), np.nan)
    measures[valid] = values[inverse.reshape(-1)]
    return measures


def _density(measures: np.ndarray, benchmark: float) -> float:
    with np.errstate(invalid="ignore"):
        return float(np.count_nonzero(measures >= benchmark)) / measures.size


def _running(measures: np.ndarray) -> np.ndarray:
    """Mean over [N']² of the contributing measures, for N' = 1..N."""
    valid = ~np.isnan(measures)
    sums = np.cumsum(np.cumsum(np.where(valid, measures, 0.0), axis=0), axis=1).diagonal()
    counts = np.cumsum(np.cumsum(valid.astype(np.int64), axis=0), axis=1).diagonal()
    return np.divide(sums, counts, out=np.full(sums.shape, np.nan), where=counts > 0)


def recurrence_profile(
    actions,
    A,
    Rs: Sequence[RationalPolynomialFL],
    N: int,
    epsilon: float,
    grid: Grid2D = FULL_GRID,
    include_base: bool = True,
    q_trick: Optional[Sequence[int]] = None,
    q_base: Tuple[int, int] = (1, 0),
    workers: Optional[int] = None,
) -> RecurrenceProfile:
    """μ(A ∩ ∩_j T_{j,R_j(m,n)}^{-1}A) for (m,n) ∈ [N]², parametrized by grid.point(m, n).

    The benchmark is μ(A)^s − ε with s the number of intersected sets: ℓ + 1 with the
    base set A, ℓ without it.

    With q_trick the grid becomes (Qm + m0, Qn + n0) for every listed Q and the
    measures are averaged over Q; per_q keeps each Q's good-set density.
    """
    if not isinstance(actions, (list, tuple)):
        actions = [actions] * len(Rs)
    if len(actions) != len(Rs) or not Rs:
        raise OutOfRangeError("need one action per iterate")
    for action in actions:
        _finite_only(action, "recurrence profiles")
    A = _indicator(_check_observable(actions[0], A))
    for action in actions:
        _check_observable(action, A)
    mu = float(A.mean())
    if mu == 0:
        raise EmptySetError("μ(A) = 0")
    if N < 1:
        raise OutOfRangeError(f"N must be ≥ 1, got {N}")

    benchmark = mu ** (len(Rs) + int(include_base)) - epsilon
    if q_trick is None:
        grids = [(None, grid)]
    else:
        grids = [(int(Q), Grid2D(int(Q), q_base[0], int(Q), q_base[1])) for Q in q_trick]

    per_q = []
    total = np.zeros((N, N))
    hits = np.zeros((N, N), dtype=np.int64)
    for Q, g in grids:
        measures = _profile_measures(actions, A, Rs, g, N, include_base, workers)
        if Q is not None:
            per_q.append((Q, _density(measures, benchmark)))
            logger.debug(f"🔄 Q={Q}: good-set density {per_q[-1][1]:.4f}")
        valid = ~np.isnan(measures)
        total[valid] += measures[valid]
        hits += valid
    measures = np.divide(total, hits, out=np.full((N, N), np.nan), where=hits > 0)

    contributing = int(np.count_nonzero(hits))
    profile = RecurrenceProfile(
        measures=measures,
        mu_A=mu,
        iterates=len(Rs),
        include_base=include_base,
        epsilon=epsilon,
        benchmark=benchmark,
        good_density=_density(measures, benchmark),
        contributing_count=contributing,
        excluded_count=N * N - contributing,
        running=_running(measures),
        per_q=per_q,
    )
    logger.info(f"📊 recurrence profile: μ(A)={mu:.4f}, benchmark {benchmark:.4f}, good density {profile.good_density:.4f}")
    return profile


# =============================================================================
# DECOMPOSITION AND CONCENTRATION
# =============================================================================

@dataclass
class ProjectionReport:
    F_p: np.ndarray
    F_a: np.ndarray
    Qs: List[int]
    N: int
    diagnostics: List[Tuple[int, int, float]]

    @property
    def max_aperiodic(self) -> float:
        return max((norm for _, _, norm in self.diagnostics), default=0.0)


def folner_steps(K: int, samples: int, seed: int = 0) -> List[int]:
    """Φ_K in full when it has at most `samples` elements, else seeded samples."""
    if phi_K_size(K) <= samples:
        return [element.value for element in phi_K(K)]
    logger.warning(f"⚠️ Φ_{K} sampled ({samples} of {phi_K_size(K):,} elements)")
    return [element.value for element in sample_phi_K(K, samples, seed)]


def pretentious_projection(
    action,
    F: np.ndarray,
    K: int,
    Q_samples: int,
    N: int,
    seed: int = 0,
    Qs: Optional[Sequence[int]] = None,
    check_a: Sequence[int] = (1, 2, 3),
    check_b: Sequence[int] = (0, 1, 2),
    check_N: Optional[int] = None,
) -> ProjectionReport:
    """F_p ≈ mean over Q ∈ Φ_K of E_{n∈[N]} T_{Qn+1}F; F_a = F − F_p."""
    if not isinstance(action, FgAction):
        raise UnsupportedActionError(f"the projection estimator needs a finitely generated action, got {action!r}")
    F = _check_observable(action, F)
    Qs = list(Qs) if Qs is not None else folner_steps(K, Q_samples, seed)
    logger.info(f"🔄 projecting onto the pretentious part with {len(Qs)} step(s), N={N:,}")
    F_p = np.mean(np.stack([single_average(action, F, Q, 1, N).value for Q in Qs]), axis=0)
    F_a = F - F_p
    diagnostics = [
        (a, b, single_average(action, F_a, a, b, check_N or N).norm)
        for a in check_a
        for b in check_b
    ]
    report = ProjectionReport(F_p, F_a, Qs, N, diagnostics)
    logger.info(f"📊 ‖F_p‖={action.space.norm(F_p):.4f}, ‖F_a‖={action.space.norm(F_a):.4f}, aperiodicity {report.max_aperiodic:.4f}")
    return report


def concentration_statistic(
    action,
    F: Observable,
    Q,
    b: int,
    N: int,
    reference: Union[str, Observable] = "shift",
    restriction: Optional[SdeltaSpec] = None,
) -> float:
    """E_{n∈[N]} ‖T_{Qn+b}F − reference‖, optionally over n ∈ S_δ only.

    reference is "shift" (T_bF, b ≥ 1), "running" (E_{n∈[N]} T_{Qn+b}F over the same n)
    or an explicit observable.
    """
    Q = int(getattr(Q, "value", Q))
    if b == 0 or Q < 1 or Q + b < 1:
        raise OutOfRangeError(f"progression {Q}n{b:+d} needs Q ≥ 1, b ≠ 0 and Q + b ≥ 1")
    if N < 1:
        raise OutOfRangeError(f"N must be ≥ 1, got {N}")
    F = _check_observable(action, F)
    mask = s_delta_mask(np.arange(1, N + 1, dtype=np.int64), restriction.delta) if restriction else None

    if isinstance(reference, str):
        if reference == "shift":
            if b < 1:
                raise HypothesisViolationError("the T_bF reference needs b ≥ 1; use the running-average reference")
            ref = action.apply(b, F)
        elif reference == "running":
            ref, _ = _progression_mean(action, F, Q, b, N, mask)
        else:
            raise SchemaError(f"unknown reference '{reference}' (shift, running or an observable)")
    else:
        ref = _check_observable(action, reference)

    norms = _deviation_norms(action, F, Q, b, N, ref)
    if mask is not None:
        norms = norms[mask]
    norms = norms[~np.isnan(norms)]
    if norms.size == 0:
        raise AllPointsExcludedError(f"no n ≤ {N} left along {Q}n{b:+d}")
    return float(np.mean(norms))


@dataclass(frozen=True)
class LiftReport:
    epsilon: float
    lifted: float
    bound: float

    @property
    def slack(self) -> float:
        return self.lifted - self.bound


def linear_lift_check(action, F: Observable, Q: int, b: int, l1: int, l2: int, N: int) -> LiftReport:
    """ε = E_{n≤N}‖v(n) − v_N‖ against E_{m,n≤N}‖v(l1 m + l2 n) − v_N‖ for v(n) = T_{Qn+b}F."""
    if l1 < 1 or l2 < 1:
        raise OutOfRangeError(f"l1, l2 must be positive, got {l1}, {l2}")
    F = _check_observable(action, F)
    v_N, _ = _progression_mean(action, F, Q, b, N)
    top = (l1 + l2) * N
    norms = _deviation_norms(action, F, Q, b, top, v_N)
    head = norms[:N]
    epsilon = float(np.nanmean(head))

    # multiplicity of k = l1 m + l2 n over [N]²
    first = np.zeros(l1 * N + 1)
    first[l1 * np.arange(1, N + 1)] = 1
    second = np.zeros(l2 * N + 1)
    second[l2 * np.arange(1, N + 1)] = 1
    size = first.size + second.size - 1
    mult = np.rint(np.fft.irfft(np.fft.rfft(first, size) * np.fft.rfft(second, size), size))[1 : top + 1]
    ok = ~np.isnan(norms)
    lifted = float(np.sum(mult[ok] * norms[ok]) / np.sum(mult[ok]))
    return LiftReport(epsilon, lifted, 4 * (l1 + l2) * epsilon)


def correlation(action, F: Observable, r, s) -> complex:
    """∫ T_rF · conj(T_sF) dμ."""
    F = _check_observable(action, F)
    if isinstance(action, FourierRotationAction):
        return complex(action.apply(r, F).inner(action.apply(s, F)))
    return action.space.inner(action.apply(r, F), action.apply(s, F))


# =============================================================================
# Ω-POWERS AND DIGITS
# =============================================================================

def omega_product_average(
    base_perms: Sequence[np.ndarray],
    addseqs: Sequence[CompletelyAdditiveSequence],
    Fs: Sequence[np.ndarray],
    forms: Sequence[LinearForm],
    N: int,
    workers: Optional[int] = None,
) -> AverageReport:
    """E_{m,n∈[N]} ∏_j F_j∘S_j^{a_j(L_j(m,n))} on the product of the base spaces."""
    if not (len(base_perms) == len(addseqs) == len(Fs) == len(forms)) or not forms:
        raise OutOfRangeError("need one permutation, sequence, observable and form per factor")
    if N < 1:
        raise OutOfRangeError(f"N must be ≥ 1, got {N}")
    actions = [FgAction(FiniteSpace(len(perm)), [(np.asarray(perm), seq)], label="power") for perm, seq in zip(base_perms, addseqs)]
    Fs = [_check_observable(action, F) for action, F in zip(actions, Fs)]
    plans = [(action, form_polynomial(form)) for action, form in zip(actions, forms)]
    codes, counts, excluded, strides = _joint_counts(plans, N, FULL_GRID, "filter", workers=workers)

    dtype = np.result_type(*(F.dtype for F in Fs), np.float64)
    value = np.zeros(int(np.prod([action.space.size for action in actions])), dtype=dtype)
    for code, count in zip(codes.tolist(), counts.tolist()):
        images = [F[action.permutation(key)] for action, F, key in zip(actions, Fs, _decode(code, actions, strides))]
        value += count * functools.reduce(np.multiply.outer, images).ravel()
    return AverageReport(value / (N * N), N, int(counts.sum()), excluded)


def _exponent_rows(addseqs, forms, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct (a_1(L_1), …, a_l(L_l)) over [N]² with their counts."""
    merged: Dict[Tuple[int, ...], int] = {}
    for rows in chunk_ranges(N, -(-N // ROW_BLOCK)):
        m = np.repeat(np.arange(rows.start + 1, rows.stop + 1, dtype=np.int64), N)
        n = np.tile(np.arange(1, N + 1, dtype=np.int64), len(rows))
        stacked = np.stack([seq.on_values(form(m, n)) for seq, form in zip(addseqs, forms)], axis=1)
        uniq, counts = np.unique(stacked, axis=0, return_counts=True)
        for row, count in zip(map(tuple, uniq.tolist()), counts.tolist()):
            merged[row] = merged.get(row, 0) + count
    keys = sorted(merged)
    return np.array(keys, dtype=np.int64).reshape(len(keys), len(forms)), np.array([merged[k] for k in keys], dtype=np.int64)


def digit_density(
    bases: Sequence[int],
    targets: Sequence[int],
    forms: Sequence[LinearForm],
    N: int,
    addseqs: Optional[Sequence[CompletelyAdditiveSequence]] = None,
    samples: int = 1,
    seed: int = 0,
    streams: Optional[Sequence[Sequence[int]]] = None,
) -> float:
    """Frequency over [N]² of dig_{b_j}(x; a_j(L_j(m,n))) = c_j for every j.

    Digit streams are seeded uniform sequences (one set per sample, averaged), or the
    explicitly supplied streams.
    """
    if not (len(bases) == len(targets) == len(forms)):
        raise OutOfRangeError("need one base and one target digit per form")
    if not forms:
        return 1.0
    for base, target in zip(bases, targets):
        if not 0 <= target < base:
            raise OutOfRangeError(f"digit {target} is not a base-{base} digit")
    addseqs = list(addseqs) if addseqs is not None else [OMEGA] * len(forms)
    rows, counts = _exponent_rows(addseqs, forms, N)
    if (rows < 0).any():
        raise OutOfRangeError("digit positions must be nonnegative")
    lengths = rows.max(axis=0) + 1
    total = N * N

    def frequency(digit_streams) -> float:
        hit = np.ones(len(rows), dtype=bool)
        for j, stream in enumerate(digit_streams):
            hit &= np.asarray(stream)[rows[:, j]] == targets[j]
        return float(counts[hit].sum()) / total

    if streams is not None:
        if len(streams) != len(forms) or any(len(s) < length for s, length in zip(streams, lengths)):
            raise OutOfRangeError(f"digit streams must cover positions up to {lengths.tolist()}")
        return frequency(streams)
    rng = np.random.default_rng(seed)
    values = [frequency([rng.integers(0, base, size=length) for base, length in zip(bases, lengths)]) for _ in range(samples)]
    result = float(np.mean(values))
    logger.info(f"📊 digit frequency {result:.5f} over {samples} stream sample(s), expected {1 / np.prod(bases):.5f}")
    return result


# =============================================================================
# COUNTEREXAMPLES
# =============================================================================

def dilation_product_average(M: int, N: int, frequencies: Tuple[int, int, int] = (1, 1, -1)) -> AverageReport:
    """E_{m,n} T_m e_{j1} · T_n e_{j2} · T_{m+n} e_{j3} on the dilation by n mod M.

    T_n e_j = e_{jn}, so each term is the character e_{j1 m + j2 n + j3(m+n)}.
    """
    action = DilationAction(M)
    j1, j2, j3 = frequencies
    hist = np.zeros(M, dtype=np.int64)
    excluded = 0
    for rows in chunk_ranges(N, -(-N // ROW_BLOCK)):
        m = np.repeat(np.arange(rows.start + 1, rows.stop + 1, dtype=np.int64), N)
        n = np.tile(np.arange(1, N + 1, dtype=np.int64), len(rows))
        valid = (m % M != 0) & (n % M != 0) & ((m + n) % M != 0)
        excluded += int(valid.size - valid.sum())
        freq = (j1 * m + j2 * n + j3 * (m + n))[valid] % M
        hist += np.bincount(freq, minlength=M)
    contributing = int(hist.sum())
    if not contributing:
        raise AllPointsExcludedError(f"every (m, n) ∈ [{N}]² meets a multiple of {M}")
    value = np.fft.ifft(hist) * M / contributing
    return AverageReport(value, N, contributing, excluded)


def archimedean_progression_means(t: float, a: int, b: int, N_ladder: Sequence[int]) -> pd.DataFrame:
    """E_{n≤N} (an+b)^{it} per N, next to a^{it}N^{it}/(1+it)."""
    action = FourierRotationAction(Archimedean(t))
    rows = []
    for N in N_ladder:
        mean = single_average(action, fourier_basis(1), a, b, N).value.mapping.get(1, 0j)
        reference = complex(a) ** (1j * t) * archimedean_mean_reference(t, N)
        rows.append({
            "N": N,
            "value_re": mean.real,
            "value_im": mean.imag,
            "abs": abs(mean),
            "reference_re": reference.real,
            "reference_im": reference.imag,
            "gap": abs(mean - reference),
        })
    return pd.DataFrame(rows)
