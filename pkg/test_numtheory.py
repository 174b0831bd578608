#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Number Theory Tests
Sieve, factorization, progression sieving and character tables.
"""

import math

import numpy as np
import pytest

from errors import InvalidProgressionError, MultactError, OutOfRangeError
from numtheory import (
    FACTOR_BOUND,
    build_factor_table,
    dirichlet_characters,
    factorize,
    is_probable_prime,
    liouville,
    liouville_table,
    load_factor_table,
    omega,
    omega_table,
    primes_up_to,
    progression_factorize,
    save_factor_table,
)


def test_spf_table_small():
    """spf for 0..10"""
    table = build_factor_table(10)
    assert table.spf[2:].tolist() == [2, 3, 2, 5, 2, 7, 2, 3, 2]
    assert table.primes().tolist() == [2, 3, 5, 7]


def test_spf_limit_guard():
    with pytest.raises(OutOfRangeError):
        build_factor_table(1)


def test_factorize_examples():
    assert factorize(12).factors == ((2, 2), (3, 1))
    assert factorize(1).factors == ()
    assert factorize(10403).factors == ((101, 1), (103, 1))
    assert omega(1024) == 10


def test_factorize_with_table_matches_trial():
    table = build_factor_table(5000)
    for n in range(1, 5001):
        assert factorize(n, table) == factorize(n)


def test_factorize_semiprime_beyond_trial_range():
    p, q = 1_000_003, 998_244_353
    assert factorize(p * q).factors == ((p, 1), (q, 1))
    big = (2 ** 61 - 1) * 3 ** 5
    assert factorize(big).factors == ((3, 5), (2 ** 61 - 1, 1))


def test_factorize_bounds():
    with pytest.raises(OutOfRangeError):
        factorize(0)
    with pytest.raises(MultactError):
        factorize(FACTOR_BOUND + 1)


def test_is_probable_prime():
    assert is_probable_prime(2)
    assert is_probable_prime(2 ** 61 - 1)
    assert not is_probable_prime(561)
    assert not is_probable_prime(1)
    primes = set(primes_up_to(2000).tolist())
    assert all(is_probable_prime(n) == (n in primes) for n in range(2000))


def test_progression_factorize_matches_direct():
    result = progression_factorize(10, 1, 3)
    assert [f.value for f in result] == [11, 21, 31]
    assert result[1].factors == ((3, 1), (7, 1))
    for fact in progression_factorize(1296, 1, 200):
        assert fact == factorize(fact.value)


def test_progression_factorize_large_values():
    Q = 2 ** 10 * 3 ** 10 * 5 ** 10
    facts = progression_factorize(Q, 7, 50)
    for n, fact in enumerate(facts, start=1):
        assert fact.value == Q * n + 7
        assert fact.product() == fact.value
        assert all(is_probable_prime(p) for p, _ in fact.factors)


def test_progression_factorize_invalid():
    with pytest.raises(InvalidProgressionError):
        progression_factorize(1, -1, 10)
    assert progression_factorize(3, 1, 0) == []


def test_omega_is_completely_additive():
    table = omega_table(10_000)
    rng = np.random.default_rng(7)
    for m, n in rng.integers(1, 100, size=(200, 2)).tolist():
        assert table[m * n] == table[m] + table[n]
    assert liouville(12) == -1
    lam = liouville_table(100)
    assert lam[0] == 0 and lam[1] == 1 and lam[12] == -1 and lam[16] == 1


def test_sieve_cache_round_trip(tmp_path):
    table = build_factor_table(1000)
    path = tmp_path / "spf.bin"
    save_factor_table(table, str(path))
    loaded = load_factor_table(str(path))
    assert loaded.limit == 1000
    assert np.array_equal(loaded.spf, table.spf)


def test_sieve_cache_rejects_foreign_file(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"not a sieve")
    with pytest.raises(MultactError):
        load_factor_table(str(path))


def test_characters_mod_3():
    chars = dirichlet_characters(3)
    assert len(chars) == 2
    assert chars[0].is_principal
    assert chars[1](2) == -1
    assert chars[1](3) == 0


def test_characters_mod_8_are_real():
    chars = dirichlet_characters(8)
    assert len(chars) == 4
    for chi in chars:
        assert np.allclose(chi.values.imag, 0)
    # the four real characters mod 8 are distinct
    assert len({tuple(chi.values.real.round().tolist()) for chi in chars}) == 4


@pytest.mark.parametrize("q", [1, 5, 7, 9, 12, 16, 21, 40])
def test_character_orthogonality(q):
    chars = dirichlet_characters(q)
    phi = sum(1 for n in range(q) if math.gcd(n, q) == 1)
    assert len(chars) == phi
    gram = np.array([[np.vdot(b.values, a.values) for b in chars] for a in chars])
    assert np.allclose(gram, phi * np.eye(phi), atol=1e-9)
    for chi in chars:
        for m in range(1, 30):
            for n in range(1, 30):
                assert abs(chi(m * n) - chi(m) * chi(n)) < 1e-12
