#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Folner Sets
Highly divisible index sets Φ_K, Q_K, S_K, S_{K;L}, the sets S_δ and S_{δ,R},
multiplicative Følner sequences and their exact or empirical densities.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import (
    EnumerationTooLargeError,
    HypothesisViolationError,
    OutOfRangeError,
    TrivialFormError,
    UndefinedEvaluationError,
)
from linforms import LinearForm, RationalPolynomialFL, Singular, degree, eval_rp
from numtheory import primes_up_to

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 10 ** 6
EXHAUSTIVE_PAIR_LIMIT = 10 ** 8


def prime_support(K: int) -> Tuple[int, ...]:
    """Primes attached to index K: p ≤ max(K, 3)."""
    if K < 2:
        raise OutOfRangeError(f"index K must be ≥ 2, got {K}")
    return tuple(primes_up_to(max(K, 3)).tolist())


@dataclass(frozen=True)
class FolnerElement:
    value: int
    exponents: Tuple[Tuple[int, int], ...]

    @classmethod
    def from_exponents(cls, primes: Sequence[int], exps: Sequence[int]) -> "FolnerElement":
        value = math.prod(p ** a for p, a in zip(primes, exps))
        return cls(value=value, exponents=tuple(zip(primes, (int(a) for a in exps))))

    def in_phi(self, K: int) -> bool:
        return all(K < a <= 2 * K for _, a in self.exponents)


@dataclass(frozen=True)
class SdeltaSpec:
    delta: float
    R: Optional[RationalPolynomialFL] = None

    def __post_init__(self):
        if not self.delta > 0:
            raise OutOfRangeError(f"delta must be positive, got {self.delta}")


# =============================================================================
# Φ_K AND Q_K
# =============================================================================

def phi_K_size(K: int) -> int:
    return K ** len(prime_support(K))


def phi_K(K: int) -> List[FolnerElement]:
    """Full enumeration of Φ_K = {∏ p^{a_p} : K < a_p ≤ 2K}."""
    primes = prime_support(K)
    size = phi_K_size(K)
    if size > ENUMERATION_LIMIT:
        raise EnumerationTooLargeError(
            f"Φ_{K} has {size:,} elements; use sample_phi_K instead"
        )
    choices = range(K + 1, 2 * K + 1)
    return [FolnerElement.from_exponents(primes, exps) for exps in itertools.product(choices, repeat=len(primes))]


def sample_phi_K(K: int, count: int, seed: int = 0) -> List[FolnerElement]:
    """Uniform samples over exponent vectors, reproducible for a fixed seed."""
    primes = prime_support(K)
    rng = np.random.default_rng(seed)
    exps = rng.integers(K + 1, 2 * K + 1, size=(count, len(primes)))
    return [FolnerElement.from_exponents(primes, row.tolist()) for row in exps]


def q_K(K: int) -> int:
    return math.prod(p ** (2 * K) for p in prime_support(K))


# =============================================================================
# S_K AND S_{K;L_1..L_l}
# =============================================================================

def in_S_K(a: int, K: int) -> bool:
    if not 1 <= a <= q_K(K):
        raise OutOfRangeError(f"a={a} is outside [1, Q_{K}]")
    return all(a % p ** K for p in prime_support(K))


def in_S_K_forms(a: int, b: int, K: int, forms: Sequence[LinearForm]) -> bool:
    if not forms:
        raise TrivialFormError("no linear forms given")
    moduli = [p ** K for p in prime_support(K)]
    for form in forms:
        v = form(a, b)
        if v == 0 or any(v % pk == 0 for pk in moduli):
            return False
    return True


def s_K_density(K: int) -> Fraction:
    """|S_K|/Q_K by exhaustive count."""
    Q = q_K(K)
    if Q > ENUMERATION_LIMIT * 100:
        raise EnumerationTooLargeError(f"Q_{K} = {Q:,} is too large to scan")
    a = np.arange(1, Q + 1, dtype=np.int64)
    keep = np.ones(Q, dtype=bool)
    for p in prime_support(K):
        keep &= a % p ** K != 0
    return Fraction(int(keep.sum()), Q)


def s_K_closed_form(K: int) -> Fraction:
    result = Fraction(1)
    for p in prime_support(K):
        result *= 1 - Fraction(1, p ** K)
    return result


def _forms_admissible(forms: Sequence[LinearForm], moduli: Sequence[int], m: np.ndarray, n: np.ndarray) -> np.ndarray:
    keep = np.ones(np.broadcast(m, n).shape, dtype=bool)
    for form in forms:
        v = form(m, n)
        keep &= v != 0
        for pk in moduli:
            keep &= v % pk != 0
    return keep


def s_K_forms_density(
    K: int,
    forms: Sequence[LinearForm],
    samples: Optional[int] = None,
    seed: int = 0,
):
    """Exact Fraction over [Q_K]², or an empirical frequency over seeded samples."""
    if not forms:
        raise TrivialFormError("no linear forms given")
    Q = q_K(K)
    moduli = [p ** K for p in prime_support(K)]
    if samples is None:
        if Q * Q > EXHAUSTIVE_PAIR_LIMIT:
            raise EnumerationTooLargeError(f"Q_{K}² = {Q * Q:,} pairs; pass samples=")
        good = 0
        n = np.arange(1, Q + 1, dtype=np.int64)[None, :]
        for rows in np.array_split(np.arange(1, Q + 1, dtype=np.int64), max(1, Q // 256)):
            good += int(_forms_admissible(forms, moduli, rows[:, None], n).sum())
        return Fraction(good, Q * Q)

    # admissibility only depends on (a, b) modulo ∏ p^K
    period = math.prod(moduli)
    rng = np.random.default_rng(seed)
    m = rng.integers(1, period + 1, size=samples)
    n = rng.integers(1, period + 1, size=samples)
    return float(_forms_admissible(forms, moduli, m, n).mean())


# =============================================================================
# S_δ AND S_{δ,R}
# =============================================================================

def s_delta_mask(n: np.ndarray, delta: float) -> np.ndarray:
    """|n^i − 1| ≤ δ, as 2|sin(ln n / 2)| ≤ δ."""
    logs = np.log(np.asarray(n, dtype=np.float64))
    return 2 * np.abs(np.sin(logs / 2)) <= delta


def s_delta_contains(n: int, spec: SdeltaSpec) -> bool:
    if n < 1:
        raise OutOfRangeError(f"n must be ≥ 1, got {n}")
    return 2 * abs(math.sin(math.log(n) / 2)) <= spec.delta


def _log_fraction(value: Fraction) -> float:
    return math.log(value.numerator) - math.log(value.denominator)


def s_delta_R_contains(m: int, n: int, spec: SdeltaSpec) -> bool:
    R = spec.R
    if R is None:
        raise HypothesisViolationError("S_{δ,R} needs a rational polynomial")
    if degree(R) != 0:
        raise HypothesisViolationError(f"S_{{δ,R}} needs degree 0, got {degree(R)}")
    value = eval_rp(R, m, n)
    if value is Singular.UNDEFINED:
        raise UndefinedEvaluationError(f"R is undefined at ({m}, {n})")
    if value is Singular.ZERO or value <= 0:
        raise OutOfRangeError(f"R({m}, {n}) is not positive")
    return 2 * abs(math.sin(_log_fraction(value) / 2)) <= spec.delta


def log_rp_values(R: RationalPolynomialFL, m: np.ndarray, n: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(ln R(m, n), valid mask); invalid where R is undefined, zero or negative."""
    m, n = np.broadcast_arrays(np.asarray(m, dtype=np.int64), np.asarray(n, dtype=np.int64))
    logs = np.full(m.shape, _log_fraction(abs(R.c)), dtype=np.float64)
    negative = np.full(m.shape, R.c < 0)
    valid = np.ones(m.shape, dtype=bool)
    for form, k in R.factors:
        v = form(m, n)
        valid &= v != 0
        if k % 2:
            negative ^= v < 0
        logs += k * np.log(np.where(v != 0, np.abs(v), 1).astype(np.float64))
    valid &= ~negative
    return logs, valid


def s_delta_R_mask(R: RationalPolynomialFL, m: np.ndarray, n: np.ndarray, delta: float) -> np.ndarray:
    logs, valid = log_rp_values(R, m, n)
    return valid & (2 * np.abs(np.sin(logs / 2)) <= delta)


def s_delta_density(delta: float, N: int) -> Tuple[int, float]:
    n = np.arange(1, N + 1, dtype=np.int64)
    count = int(s_delta_mask(n, delta).sum())
    return count, count / N


def s_delta_R_density(delta: float, R: RationalPolynomialFL, N: int) -> Tuple[int, float]:
    good = 0
    n = np.arange(1, N + 1, dtype=np.int64)[None, :]
    for rows in np.array_split(np.arange(1, N + 1, dtype=np.int64), max(1, N // 500)):
        good += int(s_delta_R_mask(R, rows[:, None], n, delta).sum())
    return good, good / (N * N)


# =============================================================================
# MULTIPLICATIVE FØLNER SEQUENCES
# =============================================================================

def folner_sequence(kind: str, index: int, lower: int = 1, upper: Optional[int] = None) -> List[int]:
    """Sorted members of the index-th set of a multiplicative Følner sequence.

    kind "interval": {∏_{p} p^{a_p} : lower ≤ a_p ≤ upper} (upper defaults to index+lower);
    kind "phi": the values of Φ_index.
    """
    if kind == "phi":
        return sorted(e.value for e in phi_K(index))
    if kind != "interval":
        raise OutOfRangeError(f"unknown Følner sequence kind '{kind}'")
    primes = prime_support(index)
    upper = index + lower if upper is None else upper
    if upper < lower:
        raise OutOfRangeError(f"empty exponent window [{lower}, {upper}]")
    size = (upper - lower + 1) ** len(primes)
    if size > ENUMERATION_LIMIT:
        raise EnumerationTooLargeError(f"Følner set has {size:,} elements")
    window = range(lower, upper + 1)
    return sorted(
        math.prod(p ** a for p, a in zip(primes, exps))
        for exps in itertools.product(window, repeat=len(primes))
    )


def dilation_invariance_ratio(elements: Iterable[int], x: int) -> Fraction:
    """|Φ ∩ xΦ| / |Φ|."""
    members = set(int(e) for e in elements)
    if not members:
        raise OutOfRangeError("empty Følner set")
    shared = sum(1 for e in members if e % x == 0 and e // x in members)
    return Fraction(shared, len(members))


def multiplicative_density(
    predicate: Callable[[int], bool],
    K_ladder: Sequence[int],
    a_of_K: Callable[[int], int] = lambda K: 1,
    b_of_K: Callable[[int], int] = lambda K: K + 1,
) -> List[Tuple[int, Fraction]]:
    """|E ∩ Φ_K| / |Φ_K| along the interval-product chain, one row per index."""
    rows = []
    for K in K_ladder:
        members = folner_sequence("interval", K, a_of_K(K), b_of_K(K))
        hits = sum(1 for v in members if predicate(v))
        rows.append((K, Fraction(hits, len(members))))
        logger.debug(f"🔄 K={K}: {hits}/{len(members)}")
    return rows


def invariance_ladder(xs: Sequence[int], K_ladder: Sequence[int]) -> Dict[int, List[Fraction]]:
    """Dilation-invariance ratios per x along the chain with window [1, K+1]."""
    sets = {K: folner_sequence("interval", K) for K in K_ladder}
    return {x: [dilation_invariance_ratio(sets[K], x) for K in K_ladder] for x in xs}
