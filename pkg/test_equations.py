#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Quadratic Equation Tests
"""

import random

import pytest

from equations import (
    QuadEquation,
    minimal_shift,
    monochromatic_search,
    shifted_family,
    solution_family,
    to_recurrence_forms,
    verify_triple,
)
from errors import HypothesisViolationError, InvalidShiftError
from linforms import LinearForm
from numtheory import liouville_table

PYTHAGOREAN_LIKE = QuadEquation(1, -1, 0, 1, 0)  # x² − y² = xz


def random_admissible(rng):
    a, e = rng.randint(1, 6), rng.randint(1, 6)
    b, f = rng.randint(-6, 6), rng.randint(-6, 6)
    return QuadEquation(a, b, a + b, e, f)


def test_family_for_x2_minus_y2():
    family = solution_family(PYTHAGOREAN_LIKE)
    assert family(5, 2) == (25, 10, 21)
    assert verify_triple(PYTHAGOREAN_LIKE, 25, 10, 21)
    assert 625 - 100 == 25 * 21


def test_families_solve_random_equations():
    rng = random.Random(8)
    for _ in range(20):
        eq = random_admissible(rng)
        family = solution_family(eq)
        assert family.verify(eq)
        for m in range(-4, 5):
            for n in range(-4, 5):
                x, y, z = family(m, n)
                assert verify_triple(eq, x, y, z)
                assert verify_triple(eq, 3 * x, 3 * y, 3 * z)


def test_inadmissible_equation_rejected():
    with pytest.raises(HypothesisViolationError):
        solution_family(QuadEquation(1, 1, 1, 1, 0))


def test_shifted_family():
    family = shifted_family(PYTHAGOREAN_LIKE, 1)
    assert family.verify(PYTHAGOREAN_LIKE)
    assert family(1, 1) == (4, 2, 3)
    rng = random.Random(9)
    for _ in range(20):
        eq = random_admissible(rng)
        shifted = shifted_family(eq, minimal_shift(eq))
        assert shifted.verify(eq)
        assert all(form.nonnegative for form in shifted.forms)
    with pytest.raises(InvalidShiftError):
        shifted_family(QuadEquation(1, 3, 4, 1, 0), 1)


def test_recurrence_forms_for_x2_minus_y2():
    report = to_recurrence_forms(PYTHAGOREAN_LIKE, 2)
    assert report.L1 == LinearForm(1, 3)
    assert report.L2 == LinearForm(1, 2)
    assert report.L3 == LinearForm(1, 2)
    assert report.L4 == LinearForm(0, 1)
    assert report.difference == LinearForm(1, 1)
    assert report.independent_34 and report.independent_1_diff and report.independent_2_diff
    assert report.hypotheses_hold


def test_degenerate_case_flagged():
    report = to_recurrence_forms(QuadEquation(1, 0, 1, 1, -1), 2)
    assert report.degenerate_case
    assert not report.hypotheses_hold
    assert not report.e_plus_f_nonzero


def test_dependent_forms_reported():
    # L2 = m + n and L3 − L4 = m + n coincide
    report = to_recurrence_forms(QuadEquation(1, 1, 2, 1, -1), 2)
    assert not report.independent_2_diff


def test_single_color_search():
    triples = monochromatic_search(lambda n: n * 0, PYTHAGOREAN_LIKE, 100)
    first = triples[0]
    assert (first.k, first.m, first.n) == (1, 2, 1)
    assert (first.x, first.y, first.z) == (4, 2, 3)
    assert all(verify_triple(PYTHAGOREAN_LIKE, t.x, t.y, t.z) for t in triples)
    assert [(t.k, t.m, t.n) for t in triples] == sorted((t.k, t.m, t.n) for t in triples)


def test_liouville_coloring_search():
    colors = liouville_table(10_000)
    triples = monochromatic_search(colors, PYTHAGOREAN_LIKE, 10_000)
    assert triples
    for t in triples:
        assert colors[t.x] == colors[t.y] == colors[t.z] == t.color
        assert max(t.x, t.y, t.z) <= 10_000
    distinct = monochromatic_search(colors, PYTHAGOREAN_LIKE, 10_000, distinct=True)
    assert len(distinct) <= len(triples)


def test_empty_range():
    assert monochromatic_search(lambda n: n * 0, PYTHAGOREAN_LIKE, 0) == []


def test_search_covers_every_pair_when_f_is_negative():
    eq = QuadEquation(1, 1, 2, 2, -1)
    family = solution_family(eq)
    N = 100
    triples = monochromatic_search(lambda n: n * 0, eq, N, workers=1)
    assert (10, 19, 81) in {(t.x, t.y, t.z) for t in triples}
    expected = set()
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            base = family(m, n)
            if min(base) < 1:
                continue
            for k in range(1, N // max(base) + 1):
                x, y, z = (k * v for v in base)
                if not x == y == z:
                    expected.add((k, m, n))
    assert {(t.k, t.m, t.n) for t in triples} == expected
    assert all(verify_triple(eq, t.x, t.y, t.z) for t in triples)


def test_search_mn_max_caps_pairs():
    eq = QuadEquation(1, 1, 2, 2, -1)
    capped = monochromatic_search(lambda n: n * 0, eq, 100, mn_max=5, workers=1)
    assert capped
    assert all(t.m <= 5 and t.n <= 5 for t in capped)
