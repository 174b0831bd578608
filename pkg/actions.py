#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Multiplicative Actions
Finite models of multiplicative measure-preserving actions n ↦ T_n extended to
positive rationals: finitely generated permutation actions, dilations on Z_M and
exact Fourier rotations, together with observables and conditional expectations.

Every integer n acts through a group-element key; keys compose exactly, so
T_{m/n} is computed as key(m)·key(n)^{-1} without touching the space.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import (
    InvalidPartitionError,
    NonCommutingGeneratorsError,
    NonInvertibleArgumentError,
    NonUnimodularError,
    OutOfRangeError,
    SchemaError,
    UnsupportedActionError,
)
from multfn import (
    INT_TABLE_GUARD,
    MultiplicativeFunctionSpec,
    evaluate_rational,
    function_from_config,
    progression_values,
    values_at,
)
from numtheory import (
    Factorization,
    completely_additive_table,
    factorize,
    is_probable_prime,
    omega_table,
    primes_up_to,
    progression_factorize,
)

logger = logging.getLogger(__name__)

# primes scanned when collecting the distinct transformations T_p
PRIME_SCAN = 10_000


@dataclass(frozen=True)
class FiniteSpace:
    """[M] with the uniform probability measure."""
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise OutOfRangeError(f"space size must be ≥ 1, got {self.size}")

    def points(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def integrate(self, F: np.ndarray):
        self._check(F)
        return np.asarray(F).mean()

    def inner(self, F: np.ndarray, G: np.ndarray) -> complex:
        self._check(F)
        self._check(G)
        return complex(np.vdot(G, F)) / self.size

    def norm(self, F: np.ndarray) -> float:
        self._check(F)
        return float(np.sqrt(np.mean(np.abs(F) ** 2)))

    def _check(self, F) -> None:
        if np.shape(F) != (self.size,):
            raise OutOfRangeError(f"observable of shape {np.shape(F)} on a space of size {self.size}")


# =============================================================================
# COMPLETELY ADDITIVE SEQUENCES
# =============================================================================

@dataclass(frozen=True)
class CompletelyAdditiveSequence:
    """a(mn) = a(m) + a(n), fixed by its prime values.

    With log_of=(f, d) the sequence is the discrete logarithm of a finitely generated
    f with values in the d-th roots of unity, and values are returned mod d.
    """
    values: Tuple[Tuple[int, int], ...] = ()
    default: int = 0
    log_of: Optional[Tuple[MultiplicativeFunctionSpec, int]] = None
    _tables: Dict[str, np.ndarray] = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def mapping(self) -> Dict[int, int]:
        return {int(p): int(v) for p, v in self.values}

    @property
    def is_omega(self) -> bool:
        return self.log_of is None and not self.values and self.default == 1

    def _dlog(self, z: np.ndarray) -> np.ndarray:
        d = self.log_of[1]
        return np.rint(np.angle(z) * d / (2 * np.pi)).astype(np.int64) % d

    def prime_weights(self, primes: np.ndarray) -> np.ndarray:
        if self.log_of is not None:
            return self._dlog(self.log_of[0].prime_values(primes))
        weights = np.full(len(primes), self.default, dtype=np.int64)
        mapping = self.mapping
        if mapping:
            for i, p in enumerate(np.asarray(primes).tolist()):
                if p in mapping:
                    weights[i] = mapping[p]
        return weights

    def prime_value_set(self) -> Tuple[int, ...]:
        if self.log_of is not None:
            values = self.log_of[0].value_set()
            return tuple(sorted(set(self._dlog(np.array(list(values), dtype=np.complex128)).tolist())))
        return tuple(sorted(set(self.mapping.values()) | {self.default}))

    def at(self, n: int) -> int:
        return int(self.on_factorizations([factorize(n)])[0])

    def on_factorizations(self, facts: Sequence[Factorization]) -> np.ndarray:
        cache: Dict[int, int] = {}
        out = np.zeros(len(facts), dtype=np.int64)
        for i, fact in enumerate(facts):
            total = 0
            for p, m in fact.factors:
                w = cache.get(p)
                if w is None:
                    w = cache[p] = int(self.prime_weights(np.array([p], dtype=object if p >= 2 ** 62 else np.int64))[0])
                total += m * w
            out[i] = total
        if self.log_of is not None:
            out %= self.log_of[1]
        return out

    def _table(self, limit: int) -> np.ndarray:
        cached = self._tables.get("table")
        if cached is None or cached.size <= limit:
            cached = completely_additive_table(limit, self.prime_weights, dtype=np.int32)
            self._tables["table"] = cached
        return cached

    def on_values(self, values) -> np.ndarray:
        """a(n) for an array of positive integers."""
        values = np.asarray(values)
        if values.size == 0:
            return np.zeros(0, dtype=np.int64)
        if self.log_of is not None:
            return self._dlog(values_at(self.log_of[0], values))
        top = int(values.max())
        if top <= INT_TABLE_GUARD:
            idx = values.astype(np.int64)
            if self.is_omega:
                return omega_table(top)[idx].astype(np.int64)
            return self._table(top)[idx].astype(np.int64)
        unique, inverse = np.unique(values, return_inverse=True)
        result = self.on_factorizations([factorize(int(v)) for v in unique.tolist()])
        return result[inverse.reshape(values.shape)]

    def along(self, a: int, b: int, N: int) -> np.ndarray:
        """The sequence along an+b for n = 1..N."""
        if self.log_of is not None:
            return self._dlog(progression_values(self.log_of[0], a, b, N))
        largest = a * N + b
        if largest <= INT_TABLE_GUARD:
            return self.on_values(a * np.arange(1, N + 1, dtype=np.int64) + b)
        return self.on_factorizations(progression_factorize(a, b, N))


OMEGA = CompletelyAdditiveSequence(default=1)


def additive_sequence(mapping: Optional[Dict[int, int]] = None, default: int = 0) -> CompletelyAdditiveSequence:
    return CompletelyAdditiveSequence(tuple(sorted((int(p), int(v)) for p, v in (mapping or {}).items())), int(default))


# =============================================================================
# PERMUTATIONS
# =============================================================================

def _check_permutation(perm: np.ndarray, size: int) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (size,) or not np.array_equal(np.sort(perm), np.arange(size)):
        raise OutOfRangeError(f"not a permutation of [{size}]")
    return perm


def permutation_order(perm: np.ndarray) -> int:
    seen = np.zeros(perm.size, dtype=bool)
    order = 1
    for start in range(perm.size):
        if seen[start]:
            continue
        length, x = 0, start
        while not seen[x]:
            seen[x] = True
            x = int(perm[x])
            length += 1
        order = math.lcm(order, length)
    return order


def permutation_power(perm: np.ndarray, e: int) -> np.ndarray:
    result = np.arange(perm.size, dtype=np.int64)
    base = perm
    while e:
        if e & 1:
            result = base[result]
        base = base[base]
        e >>= 1
    return result


def cycle(size: int, step: int = 1) -> np.ndarray:
    """x ↦ x + step mod size."""
    return (np.arange(size, dtype=np.int64) + step) % size


def product_of_cycles(lengths: Sequence[int]) -> np.ndarray:
    """Disjoint cycles of the given lengths laid out consecutively."""
    perm, start = [], 0
    for length in lengths:
        perm.extend(start + (i + 1) % length for i in range(length))
        start += length
    return np.array(perm, dtype=np.int64)


# =============================================================================
# ACTIONS
# =============================================================================

Rational = Union[int, Fraction, Tuple[int, int]]


def _as_pair(r: Rational) -> Tuple[int, int]:
    if isinstance(r, tuple):
        m, n = r
    else:
        r = Fraction(r)
        m, n = r.numerator, r.denominator
    if m < 1 or n < 1:
        raise OutOfRangeError(f"actions are evaluated at positive rationals, got {m}/{n}")
    return int(m), int(n)


class MultiplicativeAction:
    """T_n acting on a FiniteSpace through composable keys."""

    space: FiniteSpace
    identity_key = 0

    def keys(self, values) -> Tuple[np.ndarray, np.ndarray]:
        """(keys, valid) for an array of positive integers."""
        raise NotImplementedError

    def keys_along(self, a: int, b: int, N: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.keys(a * np.arange(1, N + 1, dtype=np.int64) + b)

    def combine(self, keys: Sequence[np.ndarray], exponents: Sequence[int]) -> np.ndarray:
        """∏ keys_j^{e_j}."""
        raise NotImplementedError

    def permutation(self, key: int) -> np.ndarray:
        raise NotImplementedError

    def key_of(self, r: Rational) -> int:
        m, n = _as_pair(r)
        keys, valid = self.keys(np.array([m, n], dtype=object if max(m, n) >= 2 ** 62 else np.int64))
        if not valid.all():
            raise NonInvertibleArgumentError(f"T_{m}/{n} is not invertible on this space")
        return int(self.combine([keys[:1], keys[1:]], [1, -1])[0])

    def apply(self, r: Rational, F: np.ndarray) -> np.ndarray:
        """F∘T_r."""
        self.space._check(F)
        return np.asarray(F)[self.permutation(self.key_of(r))]


class FgAction(MultiplicativeAction):
    """T_n = S_1^{a_1(n)} ··· S_l^{a_l(n)} for commuting permutations S_j."""

    def __init__(self, space: FiniteSpace, generators: Sequence[Tuple[np.ndarray, CompletelyAdditiveSequence]], label: str = "fg"):
        self.space = space
        self.label = label
        self.perms = [_check_permutation(perm, space.size) for perm, _ in generators]
        self.sequences = [seq for _, seq in generators]
        for i in range(len(self.perms)):
            for j in range(i + 1, len(self.perms)):
                if not np.array_equal(self.perms[i][self.perms[j]], self.perms[j][self.perms[i]]):
                    raise NonCommutingGeneratorsError(i, j)
        self.orders = [permutation_order(perm) for perm in self.perms]
        strides, total = [], 1
        for d in self.orders:
            strides.append(total)
            total *= d
        self.strides = strides
        self.group_size = total
        self.key_space = total
        self._powers: Dict[Tuple[int, int], np.ndarray] = {}
        self._perm_cache: Dict[int, np.ndarray] = {}

    def __repr__(self) -> str:
        return f"FgAction({self.label}, M={self.space.size}, orders={self.orders})"

    def encode(self, exps: Sequence[np.ndarray]) -> np.ndarray:
        code = np.zeros(np.shape(exps[0]) if exps else (), dtype=np.int64)
        for e, d, s in zip(exps, self.orders, self.strides):
            code = code + (np.asarray(e, dtype=np.int64) % d) * s
        return code

    def decode(self, code) -> List[np.ndarray]:
        code = np.asarray(code, dtype=np.int64)
        return [(code // s) % d for d, s in zip(self.orders, self.strides)]

    def keys(self, values):
        values = np.asarray(values)
        exps = [seq.on_values(values) for seq in self.sequences]
        if not exps:
            return np.zeros(values.shape, dtype=np.int64), np.ones(values.shape, dtype=bool)
        return self.encode(exps), np.ones(values.shape, dtype=bool)

    def keys_along(self, a, b, N):
        exps = [seq.along(a, b, N) for seq in self.sequences]
        if not exps:
            return np.zeros(N, dtype=np.int64), np.ones(N, dtype=bool)
        return self.encode(exps), np.ones(N, dtype=bool)

    def combine(self, keys, exponents):
        shape = np.shape(keys[0])
        total = [np.zeros(shape, dtype=np.int64) for _ in self.orders]
        for key, e in zip(keys, exponents):
            for j, part in enumerate(self.decode(key)):
                total[j] = total[j] + e * part
        return self.encode(total) if self.orders else np.zeros(shape, dtype=np.int64)

    def _power(self, j: int, e: int) -> np.ndarray:
        cached = self._powers.get((j, e))
        if cached is None:
            cached = self._powers[(j, e)] = permutation_power(self.perms[j], e)
        return cached

    def permutation(self, key):
        key = int(key)
        cached = self._perm_cache.get(key)
        if cached is not None:
            return cached
        perm = self.space.points()
        for j, e in enumerate(self.decode(key)):
            if int(e):
                perm = self._power(j, int(e))[perm]
        if len(self._perm_cache) < 4096:
            self._perm_cache[key] = perm
        return perm

    def prime_transformations(self) -> List[int]:
        """Distinct keys of T_p over listed primes and all primes up to PRIME_SCAN."""
        listed = sorted({p for seq in self.sequences for p, _ in seq.values})
        primes = np.union1d(primes_up_to(PRIME_SCAN), np.array(listed, dtype=np.int64))
        keys, _ = self.keys(primes)
        return sorted(set(keys.tolist()))


class DilationAction(MultiplicativeAction):
    """T_n x = φ(n)·x mod M with φ(n) = n^k, or φ given by prime images."""

    identity_key = 1

    def __init__(self, modulus: int, k: int = 1, prime_images: Optional[Dict[int, int]] = None):
        if modulus < 3 or modulus >= 2 ** 31 or not is_probable_prime(modulus):
            raise OutOfRangeError(f"dilation modulus must be a prime below 2^31, got {modulus}")
        if k < 1:
            raise OutOfRangeError(f"dilation power must be ≥ 1, got {k}")
        self.modulus = modulus
        self.k = k
        self.prime_images = {int(p): int(v) % modulus for p, v in (prime_images or {}).items()}
        self.space = FiniteSpace(modulus)
        self.key_space = modulus

    def __repr__(self) -> str:
        return f"DilationAction(M={self.modulus}, k={self.k})"

    def _powmod(self, base: np.ndarray, exp) -> np.ndarray:
        M = self.modulus
        base = np.asarray(base, dtype=np.int64) % M
        exp = np.broadcast_to(np.asarray(exp, dtype=np.int64), base.shape).copy()
        result = np.ones(base.shape, dtype=np.int64)
        while exp.any():
            odd = (exp & 1).astype(bool)
            result = np.where(odd, result * base % M, result)
            base = base * base % M
            exp >>= 1
        return result

    def keys(self, values):
        values = np.asarray(values)
        M = self.modulus
        rest = values.copy()
        images = np.ones(values.shape, dtype=np.int64)
        for p, image in self.prime_images.items():
            e = np.zeros(values.shape, dtype=np.int64)
            hit = np.asarray(rest % p == 0, dtype=bool)
            while hit.any():
                rest[hit] = rest[hit] // p
                e += hit
                hit = np.asarray(rest % p == 0, dtype=bool)
            images = images * self._powmod(np.full(values.shape, image), e) % M
        residues = np.asarray(rest % M).astype(np.int64)
        keys = self._powmod(residues, self.k) * images % M
        return keys, keys != 0

    def combine(self, keys, exponents):
        M = self.modulus
        result = np.ones(np.shape(keys[0]), dtype=np.int64)
        for key, e in zip(keys, exponents):
            key = np.asarray(key, dtype=np.int64)
            power = self._powmod(key, e % (M - 1)) if e else np.ones_like(key)
            result = result * np.where(key == 0, 0, power) % M
        return result

    def permutation(self, key):
        key = int(key) % self.modulus
        if key == 0:
            raise NonInvertibleArgumentError("dilation by a multiple of the modulus")
        return self.space.points() * key % self.modulus


# =============================================================================
# FOURIER ROTATIONS
# =============================================================================

@dataclass(frozen=True)
class FourierObservable:
    """Σ c_k e_k with ⟨e_j, e_k⟩ = [j = k]."""
    coeffs: Tuple[Tuple[int, complex], ...]

    @classmethod
    def of(cls, mapping: Dict[int, complex]) -> "FourierObservable":
        return cls(tuple(sorted((int(k), complex(c)) for k, c in mapping.items() if c != 0)))

    @property
    def mapping(self) -> Dict[int, complex]:
        return dict(self.coeffs)

    def integrate(self) -> complex:
        return self.mapping.get(0, 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for _, c in self.coeffs))

    def inner(self, other: "FourierObservable") -> complex:
        theirs = other.mapping
        return sum(c * theirs.get(k, 0j).conjugate() for k, c in self.coeffs)

    def __sub__(self, other: "FourierObservable") -> "FourierObservable":
        mapping = self.mapping
        for k, c in other.coeffs:
            mapping[k] = mapping.get(k, 0j) - c
        return FourierObservable.of(mapping)


def fourier_basis(k: int = 1) -> FourierObservable:
    return FourierObservable.of({k: 1})


class FourierRotationAction:
    """T_n e_k = f(n)^k e_k for a unimodular completely multiplicative f."""

    def __init__(self, f: MultiplicativeFunctionSpec):
        if not f.unimodular:
            raise NonUnimodularError(f"Fourier rotations need a unimodular function, got {f.kind}")
        self.f = f

    def __repr__(self) -> str:
        return f"FourierRotationAction({self.f})"

    def apply(self, r: Rational, F: FourierObservable) -> FourierObservable:
        m, n = _as_pair(r)
        z = evaluate_rational(self.f, m, n)
        return FourierObservable.of({k: c * z ** k for k, c in F.coeffs})

    def progression_multipliers(self, a: int, b: int, N: int) -> np.ndarray:
        return progression_values(self.f, a, b, N)


Action = Union[FgAction, DilationAction, FourierRotationAction]


# =============================================================================
# CONSTRUCTORS AND OBSERVABLES
# =============================================================================

def build_fg_action(space: FiniteSpace, generators, label: str = "fg") -> FgAction:
    return FgAction(space, generators, label)


def trivial_action(size: int) -> FgAction:
    space = FiniteSpace(size)
    return FgAction(space, [(space.points(), OMEGA)], label="trivial")


def rotation_order(f: MultiplicativeFunctionSpec, max_order: int = 10_000) -> int:
    """Least d with every f(p) a d-th root of unity."""
    values = f.value_set() if f.unimodular else None
    if values is None:
        raise UnsupportedActionError(f"{f.kind} is not a finitely generated unimodular function")
    d = 1
    for z in values:
        turn = Fraction(math.atan2(z.imag, z.real) / (2 * math.pi)).limit_denominator(max_order)
        if abs(complex(math.cos(2 * math.pi * turn), math.sin(2 * math.pi * turn)) - z) > 1e-9:
            raise UnsupportedActionError(f"f(p) = {z} is not a root of unity of order ≤ {max_order}")
        d = math.lcm(d, turn.denominator)
    return d


def rotation_by(f: MultiplicativeFunctionSpec) -> FgAction:
    """The rotation x ↦ x + log f(n) on Z_d; character_observable(d) then satisfies T_nF = f(n)F."""
    d = rotation_order(f)
    space = FiniteSpace(d)
    sequence = CompletelyAdditiveSequence(log_of=(f, d))
    return FgAction(space, [(cycle(d), sequence)], label=f"rotation by {f}")


def omega_power_action(space: FiniteSpace, perm: np.ndarray) -> FgAction:
    """T_n = S^{Ω(n)}."""
    return FgAction(space, [(perm, OMEGA)], label="omega power")


def character_observable(size: int, j: int = 1) -> np.ndarray:
    """x ↦ e(jx/size); real-valued when size ≤ 2."""
    values = np.exp(2j * np.pi * j * np.arange(size) / size)
    if size <= 2:
        return np.rint(values.real)
    return values


def indicator(space: FiniteSpace, mask) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (space.size,):
        raise OutOfRangeError(f"mask of shape {mask.shape} on a space of size {space.size}")
    return mask.astype(np.float64)


def interval_indicator(space: FiniteSpace, lower: Fraction, upper: Fraction) -> np.ndarray:
    """1 on {x : lower·M ≤ x < upper·M}."""
    x = space.points()
    M = space.size
    return indicator(space, (x * lower.denominator >= lower.numerator * M) & (x * upper.denominator < upper.numerator * M))


def preimage_set(action: MultiplicativeAction, r: Rational, A: np.ndarray) -> np.ndarray:
    """1_{T_r^{-1}A}."""
    return action.apply(r, A)


# =============================================================================
# EXPECTATIONS
# =============================================================================

def _orbit_labels(size: int, perms: Iterable[np.ndarray]) -> np.ndarray:
    labels = np.arange(size, dtype=np.int64)
    perms = list(perms)
    while True:
        before = labels.copy()
        for perm in perms:
            np.minimum.at(labels, perm, labels.copy())
            labels = np.minimum(labels, labels[perm])
        labels = labels[labels]
        if np.array_equal(labels, before):
            return labels


def cell_average(F: np.ndarray, labels: np.ndarray) -> np.ndarray:
    F = np.asarray(F)
    counts = np.bincount(labels)
    if np.iscomplexobj(F):
        sums = np.bincount(labels, weights=F.real) + 1j * np.bincount(labels, weights=F.imag)
    else:
        sums = np.bincount(labels, weights=F)
    means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    return means[labels]


def invariant_expectation(action, F: np.ndarray) -> np.ndarray:
    """E(F|𝓘): averages over the orbits of the group generated by the T_p."""
    if not isinstance(action, FgAction):
        raise UnsupportedActionError(f"invariant expectation needs a finitely generated action, got {action!r}")
    perms = [action.permutation(key) for key in action.prime_transformations()]
    labels = _orbit_labels(action.space.size, perms)
    return cell_average(F, labels)


def conditional_expectation(F: np.ndarray, partition) -> np.ndarray:
    """Cell-wise averages; partition is a label per point or a list of cells."""
    F = np.asarray(F)
    size = F.shape[0]
    if len(partition) and not np.isscalar(partition[0]):
        labels = np.full(size, -1, dtype=np.int64)
        for cell_id, cell in enumerate(partition):
            cell = np.asarray(cell, dtype=np.int64)
            if cell.size and (cell.min() < 0 or cell.max() >= size or (labels[cell] >= 0).any()):
                raise InvalidPartitionError("cells overlap or leave the space")
            labels[cell] = cell_id
        if (labels < 0).any():
            raise InvalidPartitionError("cells do not cover the space")
    else:
        labels = np.asarray(partition)
        if labels.shape != (size,) or not np.issubdtype(labels.dtype, np.integer) or (labels < 0).any():
            raise InvalidPartitionError("partition labels must be nonnegative integers, one per point")
    return cell_average(F, labels.astype(np.int64))


# =============================================================================
# CONFIG FORMAT
# =============================================================================

def _permutation_from_config(node, size: int) -> np.ndarray:
    if isinstance(node, list):
        return np.asarray(node, dtype=np.int64)
    if isinstance(node, dict) and "cycle" in node:
        return cycle(size, int(node.get("step", 1)))
    if isinstance(node, dict) and "product_of_cycles" in node:
        return product_of_cycles(node["product_of_cycles"])
    raise SchemaError(f"unknown permutation description {node!r}")


def _sequence_from_config(node) -> CompletelyAdditiveSequence:
    if node == "omega":
        return OMEGA
    if isinstance(node, dict) and "function" in node:
        f = function_from_config(node["function"])
        return CompletelyAdditiveSequence(log_of=(f, rotation_order(f)))
    if isinstance(node, dict):
        return additive_sequence({int(p): int(v) for p, v in node.get("values", {}).items()}, int(node.get("default", 0)))
    raise SchemaError(f"unknown additive sequence {node!r}")


def action_from_config(node: dict):
    """{kind: rotation | fg | dilation | fourier-rotation | omega-power | trivial, ...}."""
    if not isinstance(node, dict) or "kind" not in node:
        raise SchemaError(f"action spec needs a 'kind': {node!r}")
    kind = node["kind"]
    try:
        if kind == "rotation":
            return rotation_by(function_from_config(node["function"]))
        if kind == "fourier-rotation":
            return FourierRotationAction(function_from_config(node["function"]))
        if kind == "dilation":
            images = {int(p): int(v) for p, v in node.get("prime_images", {}).items()}
            return DilationAction(int(node["modulus"]), int(node.get("k", 1)), images)
        if kind == "trivial":
            return trivial_action(int(node.get("size", 1)))
        if kind == "omega-power":
            space = FiniteSpace(int(node["size"]))
            return omega_power_action(space, _permutation_from_config(node.get("perm", {"cycle": True}), space.size))
        if kind == "fg":
            space = FiniteSpace(int(node["size"]))
            generators = [
                (_permutation_from_config(g["perm"], space.size), _sequence_from_config(g["sequence"]))
                for g in node["generators"]
            ]
            return FgAction(space, generators, label=node.get("label", "fg"))
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid '{kind}' action spec {node!r}: {e}") from e
    raise SchemaError(f"unknown action kind '{kind}'")
