#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Linear Form Tests
Exact evaluation, hypothesis checks, substitutions and the lattice identity.
"""

import random
from fractions import Fraction

import pytest

from errors import (
    DegenerateSubstitutionError,
    EmptyAfterExclusionError,
    InvalidShiftError,
    SchemaError,
    SingularMatrixError,
    TrivialFormError,
)
from linforms import (
    LinearForm,
    RationalPolynomialFL,
    Singular,
    degree,
    eval_rp,
    format_rp,
    independent,
    is_simple_zero,
    lattice_indicator_check,
    main_a_base_point,
    main_b_report,
    parse_rp,
    power_form_order,
    root_polynomial,
    rp,
    substitute,
)


def test_independence():
    assert independent(LinearForm(1, 0), LinearForm(0, 1))
    assert not independent(LinearForm(1, 1), LinearForm(2, 2))
    assert independent(LinearForm(1, 1), LinearForm(1, 2))


def test_trivial_form_rejected():
    with pytest.raises(TrivialFormError):
        LinearForm(0, 0)
    with pytest.raises(TrivialFormError):
        rp(1, ((1, -1), 1))


def test_canonical_form_absorbs_content():
    R = rp(Fraction(2, 3), ((2, 4), 1), ((0, 3), -1))
    assert R.c == Fraction(2, 3) * 2 / 3
    assert R.factors == ((LinearForm(0, 1), -1), (LinearForm(1, 2), 1))
    again = RationalPolynomialFL(R.c, R.factors)
    assert again == R


def test_eval_rp_examples():
    R = parse_rp("(m + n) * (m + 2n) * m^-1 * n^-1")
    assert eval_rp(R, 1, 1) == 6
    assert eval_rp(parse_rp("m * (m + n)^-1"), 1, 0) == 1
    assert eval_rp(parse_rp("n * (m + n)^-1"), 1, 0) is Singular.ZERO
    assert eval_rp(parse_rp("m * n^-1"), 1, 0) is Singular.UNDEFINED


def test_degree_and_simple_zero():
    assert degree(parse_rp("(m + n) * n^-1")) == 0
    R1 = parse_rp("m * (m + 2n) * (m + n)^-2")
    assert is_simple_zero(R1, 0, 1)
    assert not is_simple_zero(parse_rp("m^2 * n"), 0, 1)


def test_power_form_order():
    assert power_form_order(parse_rp("(m + n)^2 * (m + 2n)^2")) == 2
    assert power_form_order(parse_rp("(m + n)^3 * (m + 2n)^6")) == 3
    R1 = parse_rp("m * (m + 2n) * (m + n)^-2")
    assert power_form_order(R1, excluded=[LinearForm(0, 1), LinearForm(1, 1)]) == 1
    with pytest.raises(EmptyAfterExclusionError):
        power_form_order(parse_rp("n^2 * (m + n)^-4"), excluded=[LinearForm(0, 2), LinearForm(1, 1)])


def test_root_polynomial_reproduces_values():
    R = parse_rp("3/2 * (m + n)^2 * (m + 2n)^-4")
    r = power_form_order(R)
    S = root_polynomial(R, r)
    for m in range(1, 8):
        for n in range(1, 8):
            assert eval_rp(R, m, n) == R.c * eval_rp(S, m, n) ** r


def test_substitution_examples():
    factor = rp(1, ((1, -1), 1), allow_signed=True)
    assert substitute(factor, (1, 1, 0), (0, 1, 0)).factors == ((LinearForm(1, 0), 1),)
    swapped = substitute(parse_rp("(m + n) * n^-1"), (0, 1, 0), (1, 0, 0))
    assert swapped == parse_rp("(m + n) * m^-1")
    with pytest.raises(InvalidShiftError):
        substitute(factor, (1, 0, 1), (0, 1, 0))
    with pytest.raises(DegenerateSubstitutionError):
        substitute(factor, (1, 0, 0), (1, 0, 0))


def test_substitution_commutes_with_evaluation():
    rng = random.Random(5)
    for _ in range(1000):
        factors = []
        for _ in range(rng.randint(1, 3)):
            factors.append(((rng.randint(0, 3), rng.randint(1, 3)), rng.choice([-2, -1, 1, 2])))
        R = rp(Fraction(rng.randint(1, 5), rng.randint(1, 5)), *factors)
        sigma_m = (rng.randint(1, 3), rng.randint(0, 3), 0)
        sigma_n = (rng.randint(0, 3), rng.randint(1, 3), 0)
        S = substitute(R, sigma_m, sigma_n)
        m, n = rng.randint(-6, 6), rng.randint(-6, 6)
        mm = sigma_m[0] * m + sigma_m[1] * n
        nn = sigma_n[0] * m + sigma_n[1] * n
        assert eval_rp(S, m, n) == eval_rp(R, mm, nn)
        if sigma_m[0] * sigma_n[1] != sigma_m[1] * sigma_n[0]:
            assert degree(S) == degree(R)


def test_parse_and_format():
    R = parse_rp("2 * (1 m + 2 n)^1 * (0 m + 1 n)^-1")
    assert R == rp(2, ((1, 2), 1), ((0, 1), -1))
    assert parse_rp(format_rp(R)) == R
    signed = parse_rp("(m - n) * (m + n) * m^-1 * n^-1", allow_signed=True)
    assert signed.signed
    assert parse_rp(format_rp(signed), allow_signed=True) == signed
    with pytest.raises(SchemaError):
        parse_rp("(m - n)")
    with pytest.raises(SchemaError):
        parse_rp("2 * (m + q)")


def test_main_a_base_point():
    m, n = LinearForm(1, 0), LinearForm(0, 1)
    assert main_a_base_point([n, m, LinearForm(1, 1), LinearForm(1, 2)]) == (1, 0)
    assert main_a_base_point([m, n, LinearForm(1, 1), LinearForm(1, 2)]) is None


def test_main_b_report_on_worked_example():
    R1 = parse_rp("m * (m + 2n) * (m + n)^-2")
    R2 = parse_rp("n * (m + n)^-1")
    report = main_b_report(R1, R2)
    assert report.r2_shape_ok and report.r1_not_power
    assert report.base_point == (0, 1)
    assert report.satisfied
    assert not main_b_report(parse_rp("(m + 2n)^2"), R2).r1_not_power


def test_lattice_identity_examples():
    identity = [[1, 0], [0, 1]]
    check = lattice_indicator_check(identity, 5, -3)
    assert check.indicator == 1 and check.dual == ((0, 0),) and check.agrees
    diag = [[2, 0], [0, 3]]
    assert lattice_indicator_check(diag, 2, 3).indicator == 1
    assert lattice_indicator_check(diag, 1, 3).indicator == 0
    assert lattice_indicator_check(diag, 1, 3).agrees
    with pytest.raises(SingularMatrixError):
        lattice_indicator_check([[1, 2], [2, 4]], 0, 0)


def test_lattice_identity_random():
    rng = random.Random(17)
    done = 0
    while done < 1000:
        A = [[rng.randint(-4, 4), rng.randint(-4, 4)], [rng.randint(-4, 4), rng.randint(-4, 4)]]
        det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        if det == 0 or abs(det) > 12:
            continue
        check = lattice_indicator_check(A, rng.randint(-50, 50), rng.randint(-50, 50))
        assert len(check.dual) == abs(det)
        assert check.agrees
        done += 1
