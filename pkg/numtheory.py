#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Number Theory Substrate
Sieves, factorization (also along huge arithmetic progressions), Omega, Liouville
and Dirichlet character tables.
"""

import logging
import math
import random
import struct
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from errors import (
    FactorizationBoundError,
    InvalidProgressionError,
    LimitTooLargeError,
    MultactError,
    OutOfRangeError,
)
from workers import chunk_ranges, default_workers, ordered_map

logger = logging.getLogger(__name__)

MAX_TABLE_ENTRIES = 2 ** 31
FACTOR_BOUND = 2 ** 96
# Miller-Rabin with the first 13 prime bases is deterministic below this value.
MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
RHO_SEED = 20240611
TRIAL_BOUND = 1000
PROGRESSION_BOUND_CAP = 10 ** 6

SIEVE_MAGIC = b"MALSPF1"


# =============================================================================
# FACTOR TABLE
# =============================================================================

@dataclass(frozen=True)
class FactorTable:
    """Smallest-prime-factor table for 0..limit (entries 0 and 1 unused)."""
    limit: int
    spf: np.ndarray = field(repr=False)

    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1, dtype=np.int64)
        return idx[2:][self.spf[2:] == idx[2:]]

    def covers(self, n: int) -> bool:
        return 2 <= n <= self.limit


_default_table: Optional[FactorTable] = None


def set_default_table(table: Optional[FactorTable]) -> None:
    """Registers a table consulted by factorize() when no table is passed."""
    global _default_table
    _default_table = table
    if table is not None:
        logger.info(f"✅ Factor table registered (limit={table.limit:,})")


def get_default_table() -> Optional[FactorTable]:
    return _default_table


def build_factor_table(limit: int) -> FactorTable:
    """Builds the smallest-prime-factor table up to limit."""
    if limit < 2:
        raise OutOfRangeError(f"factor table limit must be ≥ 2, got {limit}")
    if limit + 1 > MAX_TABLE_ENTRIES:
        raise LimitTooLargeError(
            f"factor table limit {limit:,} exceeds the guard of 2^31 entries"
        )

    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest
    logger.debug(f"🔄 spf table built up to {limit:,}")
    return FactorTable(limit=limit, spf=spf)


def save_factor_table(table: FactorTable, path: str) -> None:
    """Writes the sieve cache: magic, little-endian u64 limit, u32 entries."""
    with open(path, "wb") as f:
        f.write(SIEVE_MAGIC)
        f.write(struct.pack("<Q", table.limit))
        f.write(table.spf.astype("<u4").tobytes())
    logger.info(f"📂 Sieve cache written: {path}")


def load_factor_table(path: str) -> FactorTable:
    with open(path, "rb") as f:
        magic = f.read(len(SIEVE_MAGIC))
        if magic != SIEVE_MAGIC:
            raise MultactError(f"{path} is not a sieve cache (bad magic)")
        header = f.read(8)
        if len(header) != 8:
            raise MultactError(f"{path}: truncated header")
        (limit,) = struct.unpack("<Q", header)
        spf = np.fromfile(f, dtype="<u4", count=limit + 1)
    if spf.size != limit + 1:
        raise MultactError(f"{path}: expected {limit + 1} entries, found {spf.size}")
    logger.info(f"📂 Sieve cache loaded: {path} (limit={limit:,})")
    return FactorTable(limit=int(limit), spf=spf.astype(np.uint32))


# =============================================================================
# PRIMES AND TABLES OF ARITHMETIC FUNCTIONS
# =============================================================================

_prime_cache: Dict[str, np.ndarray] = {}


def primes_up_to(limit: int) -> np.ndarray:
    """All primes ≤ limit as an int64 array (cached, the largest sieve is kept)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    table = _default_table
    if table is not None and table.limit >= limit:
        primes = table.primes()
        return primes[primes <= limit]

    cached = _prime_cache.get("primes")
    cached_limit = _prime_cache.get("limit")
    if cached is not None and int(cached_limit[0]) >= limit:
        return cached[: np.searchsorted(cached, limit, side="right")]

    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    primes = np.flatnonzero(is_prime).astype(np.int64)
    _prime_cache["primes"] = primes
    _prime_cache["limit"] = np.array([limit])
    return primes


def completely_additive_table(
    limit: int,
    prime_weights: Callable[[np.ndarray], np.ndarray],
    dtype=np.int64,
) -> np.ndarray:
    """a(n) for n = 0..limit where a(p^k) = k·a(p); index 0 is left at 0."""
    table = np.zeros(limit + 1, dtype=dtype)
    primes = primes_up_to(limit)
    if primes.size == 0:
        return table
    weights = np.asarray(prime_weights(primes)).astype(dtype)
    for p, w in zip(primes.tolist(), weights.tolist()):
        if w == 0:
            continue
        pk = p
        while pk <= limit:
            table[pk::pk] += w
            pk *= p
    return table


def completely_multiplicative_table(limit: int, prime_values: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """f(n) for n = 0..limit as a complex array; f(1) = 1 and index 0 is 0."""
    table = np.ones(limit + 1, dtype=np.complex128)
    table[0] = 0
    primes = primes_up_to(limit)
    if primes.size == 0:
        return table
    values = np.asarray(prime_values(primes), dtype=np.complex128)
    for p, v in zip(primes.tolist(), values.tolist()):
        if v == 1:
            continue
        pk = p
        while pk <= limit:
            table[pk::pk] *= v
            pk *= p
    return table


_omega_cache: Dict[str, np.ndarray] = {}


def omega_table(limit: int) -> np.ndarray:
    """Ω(n) for n = 0..limit (read-only int16 array; the largest table is kept)."""
    limit = int(limit)
    cached = _omega_cache.get("table")
    if cached is None or cached.size <= limit:
        cached = completely_additive_table(limit, np.ones_like, dtype=np.int16)
        cached.setflags(write=False)
        _omega_cache["table"] = cached
    return cached[: limit + 1]


def liouville_table(limit: int) -> np.ndarray:
    """λ(n) = (−1)^Ω(n) for n = 0..limit as int8 (index 0 set to 0)."""
    omegas = omega_table(limit)
    table = (1 - 2 * (omegas & 1)).astype(np.int8)
    table[0] = 0
    return table


# =============================================================================
# PRIMALITY AND FACTORIZATION
# =============================================================================

@dataclass(frozen=True)
class Factorization:
    value: int
    factors: Tuple[Tuple[int, int], ...]

    @property
    def omega(self) -> int:
        return sum(m for _, m in self.factors)

    def product(self) -> int:
        result = 1
        for p, m in self.factors:
            result *= p ** m
        return result

    def as_dict(self) -> Dict[int, int]:
        return dict(self.factors)


def _miller_rabin(n: int, bases: Sequence[int]) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_probable_prime(n: int) -> bool:
    """Deterministic below 3.3·10^24; BPSW above that range."""
    if n < 2:
        return False
    for p in MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < MR_DETERMINISTIC_BOUND:
        return _miller_rabin(n, MR_BASES)
    return bool(sympy.isprime(n))


def _pollard_brent(n: int, rng: random.Random) -> int:
    """Returns a nontrivial factor of the composite n."""
    if n % 2 == 0:
        return 2
    root = math.isqrt(n)
    if root * root == n:
        return root
    g = n
    while g == n:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), rng.randrange(1, n)
        g, r, q = 1, 1, 1
        while g == 1:
            x, k = y, 0
            for _ in range(r):
                y = (y * y + c) % n
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g, k = math.gcd(q, n), k + m
            r *= 2
        if g == n:
            while True:
                ys = (ys * ys + c) % n
                g = math.gcd(x - ys, n)
                if g > 1:
                    break
    return g


def _split_cofactor(n: int, rng: random.Random) -> List[int]:
    """Prime factors (with repetition) of n, whose small factors are already removed."""
    if n == 1:
        return []
    if is_probable_prime(n):
        return [n]
    d = _pollard_brent(n, rng)
    return _split_cofactor(d, rng) + _split_cofactor(n // d, rng)


@lru_cache(maxsize=1)
def _small_primes() -> Tuple[int, ...]:
    return tuple(primes_up_to(TRIAL_BOUND).tolist())


def factorize(n: int, table: Optional[FactorTable] = None) -> Factorization:
    """Exact factorization of 1 ≤ n ≤ 2^96."""
    n = int(n)
    if n < 1:
        raise OutOfRangeError(f"factorize needs n ≥ 1, got {n}")
    if n > FACTOR_BOUND:
        raise FactorizationBoundError(f"{n} exceeds the supported bound 2^96")

    table = table or _default_table
    value = n
    counts: Counter = Counter()
    if table is not None and n <= table.limit:
        spf = table.spf
        while n > 1:
            p = int(spf[n])
            counts[p] += 1
            n //= p
        return Factorization(value=value, factors=tuple(sorted(counts.items())))

    for p in _small_primes():
        if p * p > n:
            break
        while n % p == 0:
            counts[p] += 1
            n //= p
    if n > 1:
        if n < TRIAL_BOUND * TRIAL_BOUND:
            counts[n] += 1
        else:
            for p in _split_cofactor(n, random.Random(RHO_SEED)):
                counts[p] += 1
    return Factorization(value=value, factors=tuple(sorted(counts.items())))


def omega(n: int) -> int:
    """Number of prime factors of n counted with multiplicity."""
    return factorize(n).omega


def liouville(n: int) -> int:
    return -1 if omega(n) % 2 else 1


def _factorize_progression_chunk(task: Tuple[int, int, int, int, int]) -> List[Factorization]:
    Q, b, n_start, count, bound = task
    largest = Q * (n_start + count - 1) + b
    n_values = np.arange(n_start, n_start + count, dtype=np.int64)
    if largest < 2 ** 62:
        cof = Q * n_values + b
    else:
        cof = np.array([Q * n + b for n in n_values.tolist()], dtype=object)
    values = cof.tolist()
    factors: List[List[Tuple[int, int]]] = [[] for _ in range(count)]

    for p in primes_up_to(bound).tolist():
        if Q % p == 0:
            if b % p != 0:
                continue
            start = 0
        else:
            residue = (-b * pow(Q, -1, p)) % p
            start = (residue - n_start) % p
        if start >= count:
            continue
        idx = np.arange(start, count, p)
        sub = cof[idx]
        exps = np.zeros(idx.size, dtype=np.int64)
        mask = (sub % p == 0).astype(bool)
        while mask.any():
            sub[mask] = sub[mask] // p
            exps += mask
            mask &= (sub % p == 0).astype(bool)
        cof[idx] = sub
        hit = np.flatnonzero(exps)
        for i, e in zip(idx[hit].tolist(), exps[hit].tolist()):
            factors[i].append((p, e))

    rng = random.Random(RHO_SEED)
    square = bound * bound
    result = []
    for i, c in enumerate(cof.tolist()):
        c = int(c)
        if c > 1:
            if c <= square:
                factors[i].append((c, 1))
            else:
                extra = Counter(_split_cofactor(c, rng))
                factors[i].extend(sorted(extra.items()))
        result.append(Factorization(value=int(values[i]), factors=tuple(factors[i])))
    return result


def progression_factorize(
    Q: int,
    b: int,
    N: int,
    bound: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[Factorization]:
    """Factorizations of Qn+b for n = 1..N via sieving along the progression."""
    Q, b, N = int(Q), int(b), int(N)
    if Q < 1 or Q + b < 1:
        raise InvalidProgressionError(f"progression {Q}n{b:+d} is not positive at n=1")
    if N < 1:
        return []
    largest = Q * N + b
    if largest > FACTOR_BOUND:
        raise FactorizationBoundError(f"Q·N+b = {largest} exceeds 2^96")
    if bound is None:
        bound = min(math.isqrt(largest), PROGRESSION_BOUND_CAP)
    bound = max(int(bound), 2)

    count = default_workers() if workers is None else max(1, workers)
    ranges = chunk_ranges(N, count * 4 if count > 1 else 1)
    tasks = [(Q, b, r.start + 1, len(r), bound) for r in ranges]
    logger.debug(f"🔄 factorizing {Q}n{b:+d} for n ≤ {N:,} (B={bound:,}, {len(tasks)} chunks)")
    chunks = ordered_map(_factorize_progression_chunk, tasks, workers=count)
    return [fact for chunk in chunks for fact in chunk]


# =============================================================================
# DIRICHLET CHARACTERS
# =============================================================================

@dataclass(frozen=True)
class DirichletCharacterTable:
    """One character mod q; values[n] = χ(n) for n mod q.

    exponents[n] = j means χ(n) = e(j/period), −1 marks non-units.
    """
    modulus: int
    index: int
    period: int
    exponents: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __call__(self, n: int) -> complex:
        return complex(self.values[int(n) % self.modulus])

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    @property
    def order(self) -> int:
        units = self.exponents[self.exponents >= 0]
        g = math.gcd(self.period, *units.tolist()) if units.size else self.period
        return self.period // g

    def at(self, n: np.ndarray) -> np.ndarray:
        return self.values[np.asarray(n) % self.modulus]


def _primitive_root(p: int) -> int:
    """Smallest primitive root modulo the odd prime p."""
    phi = p - 1
    prime_divs = [r for r, _ in factorize(phi).factors] if phi > 1 else []
    for g in range(2, p + 1):
        if all(pow(g, phi // r, p) != 1 for r in prime_divs):
            return g
    return 1


def _cyclic_components(q: int) -> List[Tuple[int, int, np.ndarray]]:
    """(modulus p^e, order, log table mod p^e) per cyclic factor of (Z/q)^*.

    log table holds −1 at non-units.
    """
    components = []
    for p, e in factorize(q).factors:
        pe = p ** e
        if p == 2:
            if e == 1:
                continue
            sign_log = np.full(pe, -1, dtype=np.int64)
            sign_log[1::4] = 0
            sign_log[3::4] = 1
            components.append((pe, 2, sign_log))
            if e >= 3:
                order = 2 ** (e - 2)
                log5 = np.full(pe, -1, dtype=np.int64)
                x = 1
                for k in range(order):
                    log5[x] = k
                    log5[pe - x] = k
                    x = x * 5 % pe
                components.append((pe, order, log5))
            continue
        g = _primitive_root(p)
        if e > 1 and pow(g, p - 1, p * p) == 1:
            g += p
        order = pe - pe // p
        log = np.full(pe, -1, dtype=np.int64)
        x = 1
        for k in range(order):
            log[x] = k
            x = x * g % pe
        components.append((pe, order, log))
    return components


def _roots_of_unity(period: int) -> np.ndarray:
    roots = np.exp(2j * np.pi * np.arange(period) / period)
    for k in range(period):
        if (4 * k) % period == 0:
            roots[k] = (1, 1j, -1, -1j)[(4 * k) // period]
    return roots


@lru_cache(maxsize=64)
def dirichlet_characters(q: int) -> Tuple[DirichletCharacterTable, ...]:
    """All φ(q) characters mod q, principal first, lexicographic in the exponent tuple."""
    if q < 1:
        raise OutOfRangeError(f"modulus must be ≥ 1, got {q}")
    components = _cyclic_components(q)
    orders = [order for _, order, _ in components]
    period = math.lcm(*orders) if orders else 1
    residues = np.arange(q, dtype=np.int64)
    unit = np.array([math.gcd(int(n), q) == 1 for n in residues])
    logs = [log[residues % pe] for pe, _, log in components]
    roots = _roots_of_unity(period)

    tables = []
    for index, ks in enumerate(np.ndindex(*orders)):
        exps = np.zeros(q, dtype=np.int64)
        for k, (_, order, _), log in zip(ks, components, logs):
            exps += k * np.where(log >= 0, log, 0) * (period // order)
        exps %= period
        exps[~unit] = -1
        values = np.where(unit, roots[np.where(exps >= 0, exps, 0)], 0).astype(np.complex128)
        exps.setflags(write=False)
        values.setflags(write=False)
        tables.append(DirichletCharacterTable(q, index, period, exps, values))
    logger.debug(f"🔄 {len(tables)} characters mod {q}")
    return tuple(tables)
