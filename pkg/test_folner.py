#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Folner Set Tests
"""

import math
from fractions import Fraction

import pytest

from errors import EnumerationTooLargeError, OutOfRangeError, UndefinedEvaluationError
from folner import (
    SdeltaSpec,
    dilation_invariance_ratio,
    folner_sequence,
    in_S_K,
    in_S_K_forms,
    invariance_ladder,
    multiplicative_density,
    phi_K,
    q_K,
    s_delta_contains,
    s_delta_density,
    s_delta_R_contains,
    s_delta_R_density,
    s_K_closed_form,
    s_K_density,
    s_K_forms_density,
    sample_phi_K,
)
from linforms import ONE, LinearForm, parse_rp

M, N_, MN = LinearForm(1, 0), LinearForm(0, 1), LinearForm(1, 1)


def test_phi_3_enumeration():
    elements = phi_K(3)
    values = [e.value for e in elements]
    assert len(elements) == 9
    assert min(values) == 1296 and max(values) == 46656
    assert all(e.in_phi(3) for e in elements)


def test_phi_2_uses_primes_two_and_three():
    values = sorted(e.value for e in phi_K(2))
    assert values == sorted([2 ** 3 * 3 ** 3, 2 ** 3 * 3 ** 4, 2 ** 4 * 3 ** 3, 2 ** 4 * 3 ** 4])


def test_phi_sampler_is_reproducible():
    first = sample_phi_K(5, 20, seed=11)
    second = sample_phi_K(5, 20, seed=11)
    assert first == second
    base = 2 ** 6 * 3 ** 6 * 5 ** 6
    assert all(e.value % base == 0 and e.in_phi(5) for e in first)


def test_phi_enumeration_guard():
    with pytest.raises(EnumerationTooLargeError):
        phi_K(13)


def test_q_K():
    assert q_K(2) == 1296
    assert q_K(3) == 46656
    assert q_K(5) == math.prod([2 ** 10, 3 ** 10, 5 ** 10])


def test_S_K_membership_and_density():
    assert not in_S_K(4, 2)
    assert in_S_K(6, 2)
    with pytest.raises(OutOfRangeError):
        in_S_K(1297, 2)
    assert s_K_density(2) == Fraction(864, 1296) == Fraction(2, 3)
    assert s_K_density(2) == s_K_closed_form(2)
    assert s_K_density(3) == Fraction(7, 8) * Fraction(26, 27) == s_K_closed_form(3)


def test_S_K_forms():
    assert in_S_K_forms(6, 1, 2, [M])
    assert not in_S_K_forms(0, 1, 2, [M])
    density = s_K_forms_density(2, [M, N_, MN])
    assert density >= 1 - 3 * (Fraction(1, 4) + Fraction(1, 9))
    sampled = s_K_forms_density(2, [M, N_, MN], samples=20_000, seed=3)
    assert abs(sampled - float(density)) < 0.02


def test_S_delta_membership():
    assert s_delta_contains(1, SdeltaSpec(0.01))
    assert all(s_delta_contains(n, SdeltaSpec(2.0)) for n in range(1, 1000))
    count, freq = s_delta_density(0.1, 10 ** 5)
    assert count > 0 and 0 < freq < 1
    for n in range(1, 2000):
        if s_delta_contains(n, SdeltaSpec(0.05)):
            assert s_delta_contains(n, SdeltaSpec(0.1))


def test_S_delta_R():
    R = parse_rp("(m + n) * n^-1")
    assert s_delta_R_contains(1, 1, SdeltaSpec(0.7, R))
    assert not s_delta_R_contains(1, 1, SdeltaSpec(0.6, R))
    assert s_delta_R_contains(5, 9, SdeltaSpec(0.01, ONE))
    with pytest.raises(UndefinedEvaluationError):
        s_delta_R_contains(1, 0, SdeltaSpec(0.5, parse_rp("m * n^-1")))
    count, freq = s_delta_R_density(0.2, R, 2000)
    assert count > 0 and freq > 0


def test_folner_interval_sets():
    assert folner_sequence("interval", 2, 1, 2) == [6, 12, 18, 36]
    assert folner_sequence("interval", 2, 1, 1) == [6]
    assert folner_sequence("phi", 2) == sorted(e.value for e in phi_K(2))


def test_dilation_invariance_improves_along_chain():
    ladder = invariance_ladder([2, 3, 6], range(2, 7))
    for ratios in ladder.values():
        assert all(a <= b for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] < 1
    assert dilation_invariance_ratio([6, 12, 18, 36], 2) == Fraction(1, 2)


def test_multiplicative_density_of_even_numbers():
    rows = multiplicative_density(lambda v: v % 4 == 0, range(2, 5))
    # a_2 ranges over [1, K+1]; only a_2 = 1 fails
    assert [density for _, density in rows] == [Fraction(2, 3), Fraction(3, 4), Fraction(4, 5)]
