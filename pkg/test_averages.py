#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Ergodic Average Tests
"""

from fractions import Fraction

import numpy as np
import pytest

from actions import (
    OMEGA,
    DilationAction,
    FgAction,
    FiniteSpace,
    FourierRotationAction,
    additive_sequence,
    character_observable,
    cycle,
    fourier_basis,
    indicator,
    interval_indicator,
    rotation_by,
    trivial_action,
)
from averages import (
    archimedean_progression_means,
    concentration_statistic,
    correlation,
    digit_density,
    dilation_product_average,
    form_polynomial,
    linear_lift_check,
    multilinear_average,
    omega_product_average,
    pretentious_projection,
    rational_pair_average,
    recurrence_profile,
    single_average,
)
from errors import (
    AllPointsExcludedError,
    EmptySetError,
    HypothesisViolationError,
    SpaceMismatchError,
    UnsupportedActionError,
)
from folner import SdeltaSpec, phi_K
from linforms import ONE, LinearForm, rp
from multfn import Archimedean, Liouville, ModifiedDirichletCharacter
from numtheory import liouville, liouville_table

M_FORM, N_FORM = LinearForm(1, 0), LinearForm(0, 1)
SZEMEREDI_FORMS = [M_FORM, N_FORM, LinearForm(1, 1), LinearForm(1, 2)]


def liouville_rotation():
    return rotation_by(Liouville())


def chi3_rotation():
    return rotation_by(ModifiedDirichletCharacter(3, 1))


def test_single_average_of_trivial_action():
    action = trivial_action(4)
    F = np.array([0.5, 1.0, -2.0, 3.0])
    for a, b, N in ((1, 0, 10), (3, 2, 57)):
        report = single_average(action, F, a, b, N)
        assert np.allclose(report.value, F)
        assert report.contributing_count == N


def test_single_average_of_liouville_rotation():
    report = single_average(liouville_rotation(), character_observable(2), 1, 0, 10 ** 6)
    assert report.norm <= 0.01


def test_single_average_of_character_rotation():
    F = character_observable(2)
    report = single_average(chi3_rotation(), F, 3, 1, 5000)
    assert np.array_equal(report.value, F)


def test_single_average_matches_orbit_loop():
    space = FiniteSpace(6)
    action = FgAction(space, [(cycle(6, 3), OMEGA), (cycle(6, 2), additive_sequence({2: 1, 3: 2}))])
    F = np.random.default_rng(0).random(6)
    N = 50
    direct = sum(action.apply(n, F) for n in range(1, N + 1)) / N
    assert np.allclose(single_average(action, F, 1, 0, N).value, direct, atol=1e-12)


def test_single_average_on_fourier_rotation():
    action = FourierRotationAction(Archimedean(1.0))
    report = single_average(action, fourier_basis(1), 1, 0, 1000)
    expected = np.mean(np.exp(1j * np.log(np.arange(1, 1001))))
    assert report.value.mapping[1] == pytest.approx(expected)


def test_dilation_progressions_skip_multiples():
    action = DilationAction(7)
    report = single_average(action, np.ones(7), 1, 0, 70)
    assert report.excluded_count == 10
    assert report.contributing_count == 60


def test_multilinear_average_of_constants():
    action = liouville_rotation()
    ones = np.ones(2)
    report = multilinear_average([action] * 4, [ones] * 4, SZEMEREDI_FORMS, 40)
    assert np.allclose(report.value, 1)
    assert report.contributing_count == 1600


def test_multilinear_single_form_is_single_average():
    action = liouville_rotation()
    F = character_observable(2)
    N = 300
    one = multilinear_average([action], [F], [M_FORM], N)
    assert np.allclose(one.value, single_average(action, F, 1, 0, N).value, atol=1e-12)


def test_multilinear_spaces_must_match():
    with pytest.raises(SpaceMismatchError):
        multilinear_average([liouville_rotation(), trivial_action(3)], [np.ones(2), np.ones(3)], SZEMEREDI_FORMS[:2], 10)
    with pytest.raises(UnsupportedActionError):
        multilinear_average([FourierRotationAction(Liouville())], [fourier_basis()], [M_FORM], 10)


@pytest.mark.slow
def test_multilinear_liouville_four_forms():
    action = liouville_rotation()
    F = character_observable(2)
    report = multilinear_average([action] * 4, [F] * 4, SZEMEREDI_FORMS, 3000)
    assert abs(report.integral) <= 0.05


def test_rational_pair_of_constants():
    action = liouville_rotation()
    F1, F2 = np.array([2.0, 3.0]), np.array([-1.0, 0.5])
    report = rational_pair_average(action, action, F1, F2, ONE, ONE, 12)
    assert np.allclose(report.value, F1 * F2)
    assert report.excluded_count == 0


def m2mn_pair():
    R1 = rp(1, (M_FORM, 1), (N_FORM, -1))
    R2 = rp(1, ((1, -1), 1), ((1, 1), 1), (M_FORM, -1), (N_FORM, -1), allow_signed=True)
    return R1, R2


def test_rational_pair_filter_counts():
    action = liouville_rotation()
    R1, R2 = m2mn_pair()
    F = character_observable(2)
    N = 60
    report = rational_pair_average(action, action, F, F, R1, R2, N, domain="m>n")
    assert report.excluded_count == N * (N + 1) // 2
    assert report.contributing_count + report.excluded_count == N * N
    # F ∘ T_{m/n} · F ∘ T_{(m²−n²)/mn} = λ(m−n)λ(m+n) F²
    table = liouville_table(2 * N)
    m, n = np.meshgrid(np.arange(1, N + 1), np.arange(1, N + 1), indexing="ij")
    keep = m > n
    expected = np.mean((table[m - n] * table[m + n])[keep])
    assert report.value[0] == pytest.approx(expected)


def test_rational_pair_needs_some_point():
    action = liouville_rotation()
    R1, R2 = m2mn_pair()
    F = character_observable(2)
    with pytest.raises(AllPointsExcludedError):
        rational_pair_average(action, action, F, F, R1, R2, 1, domain="m>n")


@pytest.mark.slow
def test_rational_pair_cauchy_gap():
    action = liouville_rotation()
    R1, R2 = m2mn_pair()
    F = character_observable(2)
    small = rational_pair_average(action, action, F, F, R1, R2, 1000, domain="m>n")
    large = rational_pair_average(action, action, F, F, R1, R2, 2000, domain="m>n")
    assert np.sqrt(np.mean(np.abs(large.value - small.value) ** 2)) <= 0.05


def test_recurrence_on_whole_space():
    action = liouville_rotation()
    Rs = [form_polynomial(form) for form in SZEMEREDI_FORMS]
    profile = recurrence_profile(action, np.ones(2), Rs, 20, epsilon=0.05)
    assert np.all(profile.measures == 1)
    assert profile.good_density == 1
    assert profile.running[-1] == 1


def test_recurrence_needs_positive_measure():
    with pytest.raises(EmptySetError):
        recurrence_profile(liouville_rotation(), np.zeros(2), [form_polynomial(M_FORM)], 5, epsilon=0.1)


@pytest.mark.slow
def test_dilation_counterexample():
    action = DilationAction(10007)
    A = interval_indicator(action.space, Fraction(1, 3), Fraction(2, 3))
    Rs = [form_polynomial(form) for form in (M_FORM, N_FORM, LinearForm(1, 1))]
    profile = recurrence_profile(action, A, Rs, 100, epsilon=0.0, include_base=False)
    assert profile.contributing_count == 100 * 100
    assert profile.max_measure <= 0.01


@pytest.mark.slow
def test_liouville_recurrence_with_q_trick():
    action = liouville_rotation()
    A = indicator(action.space, [True, False])
    Rs = [form_polynomial(form) for form in SZEMEREDI_FORMS]
    Qs = [element.value for element in phi_K(3)]
    profile = recurrence_profile(action, A, Rs, 2000, epsilon=0.05, include_base=False, q_trick=Qs, q_base=(1, 0))
    assert profile.benchmark == pytest.approx(0.5 ** 4 - 0.05)
    assert profile.good_density >= 0.1
    assert profile.good_density < 1
    assert np.nanmax(profile.measures) <= profile.mu_A
    assert np.nanmin(profile.measures) >= 0
    assert [Q for Q, _ in profile.per_q] == Qs


def test_liouville_recurrence_good_set_matches_sign_patterns():
    # on Z_2 the four iterates meet in half the space exactly when λ agrees on all of them
    action = liouville_rotation()
    A = indicator(action.space, [True, False])
    Rs = [form_polynomial(form) for form in SZEMEREDI_FORMS]
    Q, N = 1296, 40
    profile = recurrence_profile(action, A, Rs, N, epsilon=0.05, include_base=False, q_trick=[Q], q_base=(1, 0))
    assert profile.benchmark == pytest.approx(0.0125)
    assert set(np.unique(profile.measures).tolist()) <= {0.0, 0.5}

    good = 0
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            x, y = Q * m + 1, Q * n
            signs = {liouville(form.alpha * x + form.beta * y) for form in SZEMEREDI_FORMS}
            good += len(signs) == 1
    assert profile.good_density == pytest.approx(good / N ** 2)
    assert 0 < profile.good_density < 1
    assert profile.per_q == [(Q, profile.good_density)]


def test_projection_of_constant_is_exact():
    action = liouville_rotation()
    report = pretentious_projection(action, np.ones(2), K=3, Q_samples=2, N=500, Qs=[1296])
    assert np.array_equal(report.F_p, np.ones(2))
    assert np.array_equal(report.F_a, np.zeros(2))


@pytest.mark.slow
def test_projection_of_character_rotation():
    action = chi3_rotation()
    F = character_observable(2)
    report = pretentious_projection(action, F, K=3, Q_samples=9, N=10 ** 5)
    assert len(report.Qs) == 9
    assert action.space.norm(report.F_a) <= 0.05
    assert report.F_p.mean() + report.F_a.mean() == pytest.approx(F.mean(), abs=1e-12)


@pytest.mark.slow
def test_projection_of_liouville_rotation():
    action = liouville_rotation()
    F = character_observable(2)
    report = pretentious_projection(action, F, K=3, Q_samples=1, N=15_000, Qs=[1296], check_N=2000)
    assert action.space.norm(report.F_p) <= 0.05
    assert report.F_p.mean() + report.F_a.mean() == pytest.approx(F.mean(), abs=1e-12)
    assert len(report.diagnostics) == 9
    with pytest.raises(UnsupportedActionError):
        pretentious_projection(DilationAction(7), np.ones(7), 3, 1, 10)


def test_concentration_of_character_rotation_is_exact():
    action = chi3_rotation()
    F = character_observable(2)
    for N in (100, 10_000):
        assert concentration_statistic(action, F, 1296, 1, N) == 0


def test_liouville_rotation_does_not_concentrate():
    value = concentration_statistic(liouville_rotation(), character_observable(2), 1296, 1, 10_000)
    assert value > 0.5


def test_shift_reference_needs_positive_b():
    with pytest.raises(HypothesisViolationError):
        concentration_statistic(chi3_rotation(), character_observable(2), 1296, -1, 100)
    running = concentration_statistic(chi3_rotation(), character_observable(2), 1296, -1, 100, reference="running")
    assert running == 0


@pytest.mark.slow
def test_archimedean_rotation_concentrates_only_on_s_delta():
    action = FourierRotationAction(Archimedean(1.0))
    F = fourier_basis(1)
    for N in (10 ** 4, 10 ** 5):
        assert concentration_statistic(action, F, 720, 1, N, reference="running") >= 0.3
        restricted = concentration_statistic(action, F, 720, 1, N, reference="running", restriction=SdeltaSpec(0.05))
        assert restricted <= 0.1


def test_correlations():
    action = liouville_rotation()
    rng = np.random.default_rng(7)
    F = rng.normal(size=2) + 1j * rng.normal(size=2)
    norm_sq = action.space.norm(F) ** 2
    assert correlation(action, F, 3, 3) == pytest.approx(norm_sq)
    assert correlation(action, F, 2, Fraction(1, 3)) == pytest.approx(np.conj(correlation(action, F, Fraction(1, 3), 2)))
    trivial = trivial_action(3)
    G = rng.normal(size=3)
    assert correlation(trivial, G, 5, Fraction(7, 2)) == pytest.approx(np.mean(G ** 2))


def test_correlation_gram_matrix_is_psd():
    rs = [1, 2, 3, Fraction(1, 2), Fraction(3, 2)]
    rng = np.random.default_rng(11)
    for action in (liouville_rotation(), DilationAction(13)):
        F = rng.normal(size=action.space.size) + 1j * rng.normal(size=action.space.size)
        gram = np.array([[correlation(action, F, r, s) for s in rs] for r in rs])
        assert np.allclose(gram, gram.conj().T)
        assert np.linalg.eigvalsh(gram).min() >= -1e-9


def test_omega_product_of_constants():
    report = omega_product_average([cycle(3), cycle(4)], [OMEGA, OMEGA], [np.full(3, 2.0), np.full(4, 3.0)],
                                   [LinearForm(1, 1), LinearForm(1, 2)], 30)
    assert np.allclose(report.value, 6.0)
    assert report.value.shape == (12,)


def test_omega_product_reduces_to_liouville_mean():
    N = 200
    report = omega_product_average([cycle(2)], [OMEGA], [character_observable(2)], [LinearForm(1, 1)], N)
    table = liouville_table(2 * N)
    expected = table[np.add.outer(np.arange(1, N + 1), np.arange(1, N + 1))].mean()
    assert report.value[0] == pytest.approx(expected)
    assert report.value[1] == pytest.approx(-expected)


@pytest.mark.slow
def test_omega_uniformity():
    report = omega_product_average(
        [cycle(3), cycle(4)],
        [OMEGA, OMEGA],
        [character_observable(3), character_observable(4)],
        [LinearForm(1, 1), LinearForm(1, 2)],
        2000,
    )
    assert abs(report.integral) <= 0.05


def test_digit_density_trivial_cases():
    assert digit_density([2], [0], [LinearForm(1, 1)], 50, streams=[np.zeros(64, dtype=int)]) == 1.0
    assert digit_density([], [], [], 50) == 1.0


@pytest.mark.slow
def test_digit_density_matches_product_of_bases():
    frequency = digit_density([2, 3], [1, 2], [LinearForm(1, 1), LinearForm(1, 2)], 2000, samples=2000, seed=3)
    assert abs(frequency - 1 / 6) <= 0.1 / 6


def test_linear_lift_on_concentrated_orbit():
    report = linear_lift_check(chi3_rotation(), character_observable(2), 1296, 1, 1, 2, 500)
    assert report.epsilon == 0
    assert report.lifted == 0
    assert report.bound == 0


def test_linear_lift_reports_bound():
    report = linear_lift_check(liouville_rotation(), character_observable(2), 1, 1, 1, 1, 300)
    assert 0 <= report.epsilon <= 2
    assert 0 <= report.lifted <= 2
    assert report.bound == pytest.approx(8 * report.epsilon)


def test_dilation_product_is_identically_one():
    report = dilation_product_average(101, 60)
    assert np.allclose(report.value, 1)
    assert report.contributing_count + report.excluded_count == 3600


def test_archimedean_progression_means_do_not_vanish():
    table = archimedean_progression_means(1.0, 1, 0, [10 ** 3, 10 ** 4])
    assert list(table["N"]) == [1000, 10_000]
    assert (table["gap"] < 0.01).all()
    assert (table["abs"] > 0.6).all()
