#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Multiplicative Functions
Completely multiplicative functions with values in the closed unit disk: evaluation
on integers, rationals and progressions, the pretentious distance, F_N(f, K) and the
progression-mean diagnostics used for aperiodicity and concentration.
"""

import cmath
import itertools
import logging
import math
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from errors import EmptyRestrictionError, NonUnimodularError, OutOfRangeError, SchemaError
from folner import SdeltaSpec, in_S_K, q_K, s_delta_mask
from numtheory import (
    DirichletCharacterTable,
    Factorization,
    completely_multiplicative_table,
    dirichlet_characters,
    factorize,
    liouville_table,
    primes_up_to,
    progression_factorize,
)

logger = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-12
# complex tables cost 16 bytes per entry, int8 Liouville tables 3 (with Ω)
COMPLEX_TABLE_GUARD = 5_000_000
INT_TABLE_GUARD = 20_000_000


class MultiplicativeFunctionSpec:
    """A completely multiplicative f, described through its values at primes."""

    kind = "abstract"

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def prime_value(self, p: int) -> complex:
        return complex(self.prime_values(_as_prime_array([p]))[0])

    @property
    def unimodular(self) -> bool:
        return True

    def value_set(self) -> Optional[FrozenSet[complex]]:
        """The finite set {f(p)}, or None when f is not finitely generated."""
        return None

    @property
    def finitely_generated(self) -> bool:
        return self.value_set() is not None

    def direct(self, n: np.ndarray) -> Optional[np.ndarray]:
        """f(n) without factoring, when f allows it."""
        return None

    def __call__(self, n: int) -> complex:
        return evaluate(self, n)


def _as_prime_array(primes) -> np.ndarray:
    primes = list(int(p) for p in primes)
    if primes and max(primes) >= 2 ** 62:
        return np.array(primes, dtype=object)
    return np.array(primes, dtype=np.int64)


def _residues(n: np.ndarray, q: int) -> np.ndarray:
    return np.asarray(np.asarray(n) % q).astype(np.int64)


def _logs(n: np.ndarray) -> np.ndarray:
    return np.log(np.asarray(n).astype(np.float64))


def _snap(values) -> FrozenSet[complex]:
    return frozenset(complex(round(v.real, 12) + 0.0, round(v.imag, 12) + 0.0) for v in values)


@dataclass(frozen=True)
class Liouville(MultiplicativeFunctionSpec):
    kind = "liouville"

    def prime_values(self, primes):
        return -np.ones(len(primes), dtype=np.complex128)

    def value_set(self):
        return frozenset({-1 + 0j})


@dataclass(frozen=True)
class DirichletCharacter(MultiplicativeFunctionSpec):
    q: int
    index: int = 0
    kind = "dirichlet"

    def __post_init__(self):
        chars = dirichlet_characters(self.q)
        if not 0 <= self.index < len(chars):
            raise OutOfRangeError(f"character index {self.index} out of range mod {self.q}")

    @property
    def table(self) -> DirichletCharacterTable:
        return dirichlet_characters(self.q)[self.index]

    def prime_values(self, primes):
        return self.table.values[_residues(primes, self.q)]

    @property
    def unimodular(self):
        return self.q == 1

    def value_set(self):
        return _snap(self.table.values)

    def direct(self, n):
        return self.table.values[_residues(n, self.q)]


@dataclass(frozen=True)
class ModifiedDirichletCharacter(MultiplicativeFunctionSpec):
    """χ̃: equal to χ at primes not dividing q and 1 at the primes dividing q."""
    q: int
    index: int = 0
    kind = "modified-dirichlet"

    def __post_init__(self):
        DirichletCharacter(self.q, self.index)

    @property
    def table(self) -> DirichletCharacterTable:
        return dirichlet_characters(self.q)[self.index]

    @property
    def divisors(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in factorize(self.q).factors)

    def prime_values(self, primes):
        values = self.table.values[_residues(primes, self.q)].copy()
        for p in self.divisors:
            values[np.asarray(primes) == p] = 1
        return values

    def value_set(self):
        units = self.table.values[self.table.exponents >= 0]
        return _snap(list(units) + [1])

    def direct(self, n):
        n = np.array(n, copy=True)
        for p in self.divisors:
            hit = np.asarray(n % p == 0, dtype=bool)
            while hit.any():
                n[hit] = n[hit] // p
                hit = np.asarray(n % p == 0, dtype=bool)
        return self.table.values[_residues(n, self.q)]


@dataclass(frozen=True)
class Archimedean(MultiplicativeFunctionSpec):
    """n ↦ n^{it}."""
    t: float
    kind = "archimedean"

    def prime_values(self, primes):
        return np.exp(1j * self.t * _logs(primes))

    def value_set(self):
        return frozenset({1 + 0j}) if self.t == 0 else None

    def direct(self, n):
        return np.exp(1j * self.t * _logs(n))


@dataclass(frozen=True)
class PrimeTable(MultiplicativeFunctionSpec):
    """Explicit prime values; unlisted primes take the default."""
    values: Tuple[Tuple[int, complex], ...] = ()
    default: complex = 1
    kind = "prime-table"

    def __post_init__(self):
        for p, v in self.values + ((0, self.default),):
            if abs(v) > 1 + UNIT_TOLERANCE:
                raise OutOfRangeError(f"value {v} at p={p} lies outside the unit disk")

    @property
    def mapping(self) -> Dict[int, complex]:
        return {int(p): complex(v) for p, v in self.values}

    def prime_values(self, primes):
        mapping = self.mapping
        return np.array([mapping.get(int(p), self.default) for p in primes], dtype=np.complex128)

    @property
    def unimodular(self):
        return all(abs(abs(v) - 1) <= UNIT_TOLERANCE for _, v in self.values + ((0, self.default),))

    def value_set(self):
        return _snap([complex(v) for _, v in self.values] + [complex(self.default)])


def prime_table(mapping: Dict[int, complex], default: complex = 1) -> PrimeTable:
    return PrimeTable(tuple(sorted((int(p), complex(v)) for p, v in mapping.items())), complex(default))


@dataclass(frozen=True)
class OscillatoryLogLog(MultiplicativeFunctionSpec):
    """f(p) = e(1/log log p) for p ≥ 3, f(2) = 1."""
    kind = "oscillatory-loglog"

    def prime_values(self, primes):
        primes = np.asarray(primes)
        values = np.ones(len(primes), dtype=np.complex128)
        odd = np.asarray(primes >= 3, dtype=bool)
        values[odd] = np.exp(2j * np.pi / np.log(_logs(primes[odd])))
        return values


@dataclass(frozen=True)
class Power(MultiplicativeFunctionSpec):
    base: MultiplicativeFunctionSpec
    k: int
    kind = "power"

    def __post_init__(self):
        if self.k < 0 and not self.base.unimodular:
            raise NonUnimodularError(f"negative power of a non-unimodular {self.base.kind}")

    def prime_values(self, primes):
        return _power(self.base.prime_values(primes), self.k)

    @property
    def unimodular(self):
        return self.k == 0 or self.base.unimodular

    def value_set(self):
        values = self.base.value_set()
        return None if values is None else _snap(_power(np.array(sorted(values, key=cmath.phase)), self.k))

    def direct(self, n):
        values = self.base.direct(n)
        return None if values is None else _power(values, self.k)


def _power(values: np.ndarray, k: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.complex128)
    if k == 0:
        return np.ones_like(values)
    if k > 0:
        return values ** k
    return np.conj(values) ** (-k)


@dataclass(frozen=True)
class Product(MultiplicativeFunctionSpec):
    factors: Tuple[MultiplicativeFunctionSpec, ...]
    kind = "product"

    def prime_values(self, primes):
        result = np.ones(len(primes), dtype=np.complex128)
        for f in self.factors:
            result = result * f.prime_values(primes)
        return result

    @property
    def unimodular(self):
        return all(f.unimodular for f in self.factors)

    def value_set(self):
        sets = [f.value_set() for f in self.factors]
        if any(s is None for s in sets):
            return None
        return _snap(math.prod(combo) for combo in itertools.product(*sets))

    def direct(self, n):
        result = None
        for f in self.factors:
            values = f.direct(n)
            if values is None:
                return None
            result = values if result is None else result * values
        return np.ones(np.shape(n), dtype=np.complex128) if result is None else result


ONE = DirichletCharacter(1, 0)


@dataclass(frozen=True)
class PretentiousTarget:
    """The pair (χ, t) standing for n ↦ χ(n)·n^{it}."""
    q: int
    index: int = 0
    t: float = 0.0

    @property
    def chi(self) -> DirichletCharacterTable:
        return dirichlet_characters(self.q)[self.index]

    def as_spec(self) -> MultiplicativeFunctionSpec:
        return Product((DirichletCharacter(self.q, self.index), Archimedean(self.t)))

    def __str__(self) -> str:
        return f"χ_{self.index} mod {self.q}, t={self.t:g}"


@dataclass(frozen=True)
class MeanEstimate:
    value: complex
    count: int


# =============================================================================
# EVALUATION
# =============================================================================

def evaluate(f: MultiplicativeFunctionSpec, n: int) -> complex:
    """∏ f(p)^m over the factorization of n."""
    if n < 1:
        raise OutOfRangeError(f"f is evaluated at positive integers, got {n}")
    return evaluate_factorization(f, factorize(n))


def evaluate_factorization(f: MultiplicativeFunctionSpec, fact: Factorization, cache: Optional[Dict[int, complex]] = None) -> complex:
    value = 1 + 0j
    for p, m in fact.factors:
        if cache is not None and p in cache:
            v = cache[p]
        else:
            v = f.prime_value(p)
            if cache is not None:
                cache[p] = v
        value *= v ** m
    return value


def evaluate_rational(f: MultiplicativeFunctionSpec, m: int, n: int) -> complex:
    """f(m/n) = f(m)·conj(f(n)); f must be unimodular at every p | n."""
    denominator = factorize(n)
    for p, _ in denominator.factors:
        if abs(abs(f.prime_value(p)) - 1) > UNIT_TOLERANCE:
            raise NonUnimodularError(f"|f({p})| < 1 with {p} dividing the denominator {n}")
    if m == n:
        return 1 + 0j
    return evaluate(f, m) * evaluate_factorization(f, denominator).conjugate()


def prime_values(f: MultiplicativeFunctionSpec, primes) -> np.ndarray:
    return np.asarray(f.prime_values(_as_prime_array(primes)), dtype=np.complex128)


_table_cache: "OrderedDict[MultiplicativeFunctionSpec, np.ndarray]" = OrderedDict()


def eval_table(f: MultiplicativeFunctionSpec, limit: int) -> np.ndarray:
    """f(n) for n = 0..limit (index 0 holds 0); a few recent tables are cached."""
    if limit > COMPLEX_TABLE_GUARD and not isinstance(f, Liouville):
        raise OutOfRangeError(f"table limit {limit:,} exceeds {COMPLEX_TABLE_GUARD:,}")
    cached = _table_cache.get(f)
    if cached is not None and cached.size > limit:
        _table_cache.move_to_end(f)
        return cached[: limit + 1]
    if isinstance(f, Liouville):
        table = liouville_table(limit).astype(np.complex128)
    else:
        direct = f.direct(np.arange(1, limit + 1, dtype=np.int64))
        if direct is not None:
            table = np.concatenate(([0j], np.asarray(direct, dtype=np.complex128)))
        else:
            table = completely_multiplicative_table(limit, f.prime_values)
    table.setflags(write=False)
    _table_cache[f] = table
    while len(_table_cache) > 4:
        _table_cache.popitem(last=False)
    return table


def values_at(f: MultiplicativeFunctionSpec, n) -> np.ndarray:
    """f on an array of positive integers (any size up to 2^96)."""
    n = np.asarray(n)
    if n.size == 0:
        return np.zeros(0, dtype=np.complex128)
    direct = f.direct(n)
    if direct is not None:
        return np.asarray(direct, dtype=np.complex128)
    top = int(n.max())
    if isinstance(f, Liouville) and top <= INT_TABLE_GUARD:
        return liouville_table(top)[n.astype(np.int64)].astype(np.complex128)
    if top <= COMPLEX_TABLE_GUARD:
        return eval_table(f, top)[n.astype(np.int64)]
    unique, inverse = np.unique(n, return_inverse=True)
    cache: Dict[int, complex] = {}
    values = np.array([evaluate_factorization(f, factorize(int(v)), cache) for v in unique.tolist()], dtype=np.complex128)
    return values[inverse.reshape(n.shape)]


def progression_values(f: MultiplicativeFunctionSpec, a: int, b: int, N: int) -> np.ndarray:
    """f(an+b) for n = 1..N."""
    a, b, N = int(a), int(b), int(N)
    if a < 1 or a + b < 1:
        raise OutOfRangeError(f"progression {a}n{b:+d} is not positive")
    largest = a * N + b
    if largest < 2 ** 62:
        n = a * np.arange(1, N + 1, dtype=np.int64) + b
    else:
        n = np.array([a * k + b for k in range(1, N + 1)], dtype=object)
    direct = f.direct(n)
    if direct is not None:
        return np.asarray(direct, dtype=np.complex128)
    limit = INT_TABLE_GUARD if isinstance(f, Liouville) else COMPLEX_TABLE_GUARD
    if largest <= limit:
        return values_at(f, n)
    cache: Dict[int, complex] = {}
    facts = progression_factorize(a, b, N)
    return np.array([evaluate_factorization(f, fact, cache) for fact in facts], dtype=np.complex128)


# =============================================================================
# PRETENTIOUS DISTANCE AND F_N(f, K)
# =============================================================================

def _as_spec(g) -> MultiplicativeFunctionSpec:
    return g.as_spec() if isinstance(g, PretentiousTarget) else g


def _complex_fsum(terms: np.ndarray) -> complex:
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))


def pretentious_distance_sq(f: MultiplicativeFunctionSpec, g, P: int) -> float:
    """Σ_{p ≤ P} (1 − Re f(p)·conj(g(p)))/p."""
    if P < 2:
        raise OutOfRangeError(f"P must be ≥ 2, got {P}")
    primes = primes_up_to(P)
    terms = (1 - (f.prime_values(primes) * np.conj(_as_spec(g).prime_values(primes))).real) / primes
    return math.fsum(terms.tolist())


def f_partial_sum(f: MultiplicativeFunctionSpec, target: PretentiousTarget, K: int, N: int) -> complex:
    """F_N(f, K) = Σ_{K < p ≤ N} (f(p)·conj(χ(p))·p^{−it} − 1)/p."""
    if not K < N:
        raise OutOfRangeError(f"F_N(f, K) needs K < N, got K={K}, N={N}")
    primes = primes_up_to(N)
    primes = primes[primes > K]
    twist = np.conj(target.chi.at(primes)) * np.exp(-1j * target.t * np.log(primes.astype(np.float64)))
    return _complex_fsum((f.prime_values(primes) * twist - 1) / primes)


@dataclass(frozen=True)
class ClassifyResult:
    target: PretentiousTarget
    distance_sq: float
    candidates: int


def classify(
    f: MultiplicativeFunctionSpec,
    P: int,
    moduli: Sequence[int],
    t_grid: Sequence[float],
    threshold: Optional[float] = None,
) -> Optional[ClassifyResult]:
    """Closest χ·n^{it} among the candidates; a heuristic report, not a verdict."""
    if P < 100:
        raise OutOfRangeError(f"classify needs P ≥ 100, got {P}")
    primes = primes_up_to(P)
    fp = f.prime_values(primes)
    logs = np.log(primes.astype(np.float64))
    best: Optional[Tuple[float, PretentiousTarget]] = None
    count = 0
    for q in moduli:
        for chi in dirichlet_characters(q):
            product = fp * np.conj(chi.at(primes))
            for t in t_grid:
                d = math.fsum(((1 - (product * np.exp(-1j * t * logs)).real) / primes).tolist())
                count += 1
                if best is None or d < best[0]:
                    best = (d, PretentiousTarget(q, chi.index, float(t)))
    if best is None:
        return None
    logger.debug(f"📊 classify: best {best[1]} with D²={best[0]:.6f} over {count} candidates")
    if threshold is not None and best[0] > threshold:
        return None
    return ClassifyResult(target=best[1], distance_sq=best[0], candidates=count)


# =============================================================================
# PROGRESSION MEANS AND CONCENTRATION
# =============================================================================

def progression_mean(f: MultiplicativeFunctionSpec, a: int, b: int, N: int) -> MeanEstimate:
    """E_{n ∈ [N]} f(an+b)."""
    if N < 1:
        raise OutOfRangeError(f"N must be ≥ 1, got {N}")
    values = progression_values(f, a, b, N)
    return MeanEstimate(value=complex(values.mean()), count=N)


def restricted_mean(f: MultiplicativeFunctionSpec, a: int, b: int, N: int, restriction: SdeltaSpec) -> MeanEstimate:
    """Mean of f(an+b) over n ∈ S_δ ∩ [N]."""
    mask = s_delta_mask(np.arange(1, N + 1), restriction.delta)
    if not mask.any():
        raise EmptyRestrictionError(f"S_δ ∩ [{N}] is empty for δ={restriction.delta}")
    values = progression_values(f, a, b, N)[mask]
    return MeanEstimate(value=complex(values.mean()), count=int(mask.sum()))


def archimedean_mean_reference(t: float, N: int) -> complex:
    """N^{it}/(1+it), the leading term of E_{n ≤ N} n^{it}."""
    return cmath.exp(1j * t * math.log(N)) / (1 + 1j * t)


def epsilon_sign(b: int, chi: DirichletCharacterTable) -> int:
    """−1 iff b < 0 and χ is odd."""
    if b < 0 and abs(chi(chi.modulus - 1) + 1) < UNIT_TOLERANCE:
        return -1
    return 1


def concentration_gap(
    f: MultiplicativeFunctionSpec,
    target: PretentiousTarget,
    Q: int,
    b: int,
    K: int,
    N: int,
    restriction: Optional[SdeltaSpec] = None,
    square: bool = False,
    shift_k: int = 0,
) -> float:
    """E_n |f(Qn+b) − ε·f(|b|)·(Q|b|^{-1}n)^{it}·exp(F_N(f,K))|.

    square=True uses f(Q²n+kQ+b) against (Q²|b|^{-1}n)^{it}. Under a restriction the
    average runs over S_δ ∩ [N] and the phase loses its n-dependence.
    """
    if b == 0:
        raise OutOfRangeError("the shift b must be nonzero")
    if square:
        step, shift = Q * Q, shift_k * Q + b
    else:
        step, shift = Q, b
    values = progression_values(f, step, shift, N)
    n = np.arange(1, N + 1, dtype=np.float64)
    scale = epsilon_sign(b, target.chi) * evaluate(f, abs(b)) * cmath.exp(f_partial_sum(f, target, K, N))
    log_base = math.log(step) - math.log(abs(b))
    if restriction is not None:
        mask = s_delta_mask(np.arange(1, N + 1), restriction.delta)
        if not mask.any():
            raise EmptyRestrictionError(f"S_δ ∩ [{N}] is empty for δ={restriction.delta}")
        reference = scale * cmath.exp(1j * target.t * log_base)
        return float(np.abs(values[mask] - reference).mean())
    reference = scale * np.exp(1j * target.t * (log_base + np.log(n)))
    return float(np.abs(values - reference).mean())


def factorial_mean(f: MultiplicativeFunctionSpec, k: int, N: int, restriction: Optional[SdeltaSpec] = None) -> MeanEstimate:
    """Mean of f(k!·n + 1), optionally over S_δ ∩ [N]."""
    step = math.factorial(k)
    if restriction is None:
        return progression_mean(f, step, 1, N)
    return restricted_mean(f, step, 1, N, restriction)


@dataclass(frozen=True)
class SpreadReport:
    K: int
    shifts: Tuple[int, ...]
    spreads: Tuple[float, ...]

    @property
    def max_spread(self) -> float:
        return max(self.spreads)


def s_k_spread(f: MultiplicativeFunctionSpec, K: int, N: int, samples: int, seed: int = 0) -> SpreadReport:
    """E_n |f(Q_K n + b) − mean| for sampled b ∈ S_K."""
    Q = q_K(K)
    rng = np.random.default_rng(seed)
    shifts: List[int] = []
    while len(shifts) < samples:
        b = int(rng.integers(1, min(Q, 2 ** 62) + 1))
        if in_S_K(b, K):
            shifts.append(b)
    spreads = []
    for b in shifts:
        values = progression_values(f, Q, b, N)
        spreads.append(float(np.abs(values - values.mean()).mean()))
    return SpreadReport(K=K, shifts=tuple(shifts), spreads=tuple(spreads))


# =============================================================================
# CONFIG FORMAT
# =============================================================================

def function_from_config(node: dict) -> MultiplicativeFunctionSpec:
    """{kind, ...parameters} → spec."""
    if not isinstance(node, dict) or "kind" not in node:
        raise SchemaError(f"function spec needs a 'kind': {node!r}")
    kind = node["kind"]
    params = {k: v for k, v in node.items() if k != "kind"}
    try:
        if kind == "liouville":
            return Liouville(**params)
        if kind == "one":
            return ONE
        if kind == "dirichlet":
            return DirichletCharacter(int(params.pop("q")), int(params.pop("index", 0)), **params)
        if kind == "modified-dirichlet":
            return ModifiedDirichletCharacter(int(params.pop("q")), int(params.pop("index", 0)), **params)
        if kind == "archimedean":
            return Archimedean(float(params.pop("t")), **params)
        if kind == "prime-table":
            values = {int(p): _complex(v) for p, v in params.pop("values", {}).items()}
            return prime_table(values, _complex(params.pop("default", 1)), **params)
        if kind == "oscillatory-loglog":
            return OscillatoryLogLog(**params)
        if kind == "power":
            return Power(function_from_config(params.pop("base")), int(params.pop("k")), **params)
        if kind == "product":
            return Product(tuple(function_from_config(n) for n in params.pop("factors")), **params)
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid '{kind}' function spec {node!r}: {e}") from e
    raise SchemaError(f"unknown function kind '{kind}'")


def _complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def function_to_config(f: MultiplicativeFunctionSpec) -> dict:
    if isinstance(f, (DirichletCharacter, ModifiedDirichletCharacter)):
        return {"kind": f.kind, "q": f.q, "index": f.index}
    if isinstance(f, Archimedean):
        return {"kind": f.kind, "t": f.t}
    if isinstance(f, PrimeTable):
        return {
            "kind": f.kind,
            "values": {str(p): [v.real, v.imag] for p, v in f.values},
            "default": [complex(f.default).real, complex(f.default).imag],
        }
    if isinstance(f, Power):
        return {"kind": f.kind, "base": function_to_config(f.base), "k": f.k}
    if isinstance(f, Product):
        return {"kind": f.kind, "factors": [function_to_config(g) for g in f.factors]}
    return {"kind": f.kind}


def rational_from_fraction(r) -> Tuple[int, int]:
    r = Fraction(r)
    if r <= 0:
        raise OutOfRangeError(f"rational arguments must be positive, got {r}")
    return r.numerator, r.denominator
