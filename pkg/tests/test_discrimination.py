"""Tests for the phase-discrimination game: closed forms vs. the POVM oracle."""

import math

import numpy as np
import pytest

from helpers import random_amplitudes, random_channel

from sloccsim.discrimination import (
    PhaseChannel,
    Povm,
    apply_phase,
    closed_form_error_balanced,
    closed_form_error_general,
    closed_form_error_product,
    dephase_channel_check,
    error_from_povm,
    helstrom_error,
    optimal_povm,
    output_mixture,
    statistics_sensitivity,
)
from sloccsim.linalg import eigh
from sloccsim.states import (
    DensityMatrix4,
    MixedDiagonal,
    OverlapAmplitudes,
    PureProduct,
    SpinLabel,
    SpinSuperposition,
    Statistics,
    VanishingProjection,
    project_mixed,
    project_pure,
    project_superposition,
)

DOWN, UP = SpinLabel.DOWN, SpinLabel.UP
S = 1.0 / math.sqrt(2.0)
THIRD = 1.0 / 3.0


def balanced_state(stats=Statistics.BOSON):
    return project_pure(PureProduct(DOWN, UP), OverlapAmplitudes.balanced(), stats)


def channel(phi12, p1=THIRD, omega=(0.0, 1.0, 0.0, 0.0)):
    return PhaseChannel(omega=omega, phi=(phi12, 0.0), priors=(p1, 1.0 - p1))


# ---------------------------------------------------------------------------
# PhaseChannel / Povm types


def test_phase_channel_rejects_bad_priors():
    with pytest.raises(ValueError, match="sum to 1"):
        PhaseChannel(omega=(0, 1, 0, 0), phi=(0, 0), priors=(0.6, 0.6))
    with pytest.raises(ValueError, match="nonnegative"):
        PhaseChannel(omega=(0, 1, 0, 0), phi=(0, 0), priors=(1.4, -0.4))


def test_povm_rejects_incomplete_elements():
    half = 0.5 * np.eye(4)
    with pytest.raises(ValueError, match="identity"):
        Povm(elements=(half, half / 2))


def test_povm_rejects_negative_element():
    pos = np.diag([1.5, 1.0, 1.0, 1.0]).astype(complex)
    neg = np.eye(4) - pos
    with pytest.raises(ValueError, match="negative eigenvalue"):
        Povm(elements=(pos, neg))


def test_povm_rejects_non_hermitian():
    el = np.eye(4, dtype=complex)
    el[0, 1] = 0.5
    with pytest.raises(ValueError, match="Hermitian"):
        Povm(elements=(el, np.eye(4) - el))


# ---------------------------------------------------------------------------
# apply_phase


def test_apply_phase_zero_angle_is_identity():
    state = balanced_state()
    ch = PhaseChannel(omega=(3, 1, 4, 1), phi=(0.0, 0.0), priors=(0.5, 0.5))
    np.testing.assert_array_equal(apply_phase(ch, 1, state).entries, state.entries)


def test_apply_phase_multiplies_branch_phases():
    state = balanced_state()
    ch = PhaseChannel(omega=(0, 1.3, -0.4, 0), phi=(0.7, 0.0), priors=(0.5, 0.5))
    out = apply_phase(ch, 1, state)
    expected = state.entries * np.exp(1j * np.array([0, 1.3, -0.4, 0]) * 0.7)
    np.testing.assert_allclose(out.entries, expected, atol=1e-15)
    assert out.norm_sq_raw == state.norm_sq_raw


def test_apply_phase_uniform_generator_is_global_phase():
    state = balanced_state()
    ch = PhaseChannel(omega=(2.5,) * 4, phi=(0.9, 0.0), priors=(0.5, 0.5))
    out = apply_phase(ch, 1, state)
    np.testing.assert_allclose(out.entries,
                               np.exp(1j * 2.5 * 0.9) * state.entries, atol=1e-15)
    np.testing.assert_allclose(out.projector(), state.projector(), atol=1e-15)


def test_apply_phase_rejects_bad_index():
    with pytest.raises(ValueError, match="phase index"):
        apply_phase(channel(0.3), 3, balanced_state())


# ---------------------------------------------------------------------------
# dephase_channel_check


def test_dephase_check_diagonal_states():
    rng = np.random.default_rng(101)
    for _ in range(20):
        diag = rng.uniform(0, 1, 4)
        diag /= diag.sum()
        rho = DensityMatrix4(mat=np.diag(diag).astype(complex), trace_raw=1.0)
        assert dephase_channel_check(random_channel(rng), rho)


def test_dephase_check_coherent_input_reported_unchecked():
    rho = project_mixed(MixedDiagonal(weights=(0, 1, 0, 0)),
                        OverlapAmplitudes.balanced(), Statistics.BOSON)
    assert dephase_channel_check(channel(0.7), rho)


def test_dephase_check_uniform_generator():
    rho = DensityMatrix4(mat=np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex),
                         trace_raw=1.0)
    ch = PhaseChannel(omega=(1.1,) * 4, phi=(2.0, -1.0), priors=(0.5, 0.5))
    assert dephase_channel_check(ch, rho)


# ---------------------------------------------------------------------------
# output_mixture


def test_output_mixture_certain_phase_is_pure():
    state = balanced_state()
    ch = PhaseChannel(omega=(0, 1, 0, 0), phi=(0.8, 0.0), priors=(1.0, 0.0))
    rho = output_mixture(ch, state)
    psi1 = apply_phase(ch, 1, state)
    np.testing.assert_allclose(rho.mat, psi1.projector(), atol=1e-14)


def test_output_mixture_equal_phases_is_pure():
    state = balanced_state()
    ch = PhaseChannel(omega=(0, 1, 0, 0), phi=(0.8, 0.8), priors=(0.3, 0.7))
    rho = output_mixture(ch, state)
    values = [p.value for p in eigh(rho.mat)]
    np.testing.assert_allclose(values, [1, 0, 0, 0], atol=1e-12)


def test_output_mixture_orthogonal_hypotheses_rank_two():
    # balanced state, generator difference 1, phi12 = pi gives orthogonal
    # hypothesis states; equal priors then produce eigenvalues (1/2, 1/2).
    state = balanced_state()
    ch = channel(math.pi, p1=0.5)
    rho = output_mixture(ch, state)
    values = [p.value for p in eigh(rho.mat)]
    np.testing.assert_allclose(values, [0.5, 0.5, 0, 0], atol=1e-12)


# ---------------------------------------------------------------------------
# error_from_povm


def test_error_from_povm_always_guess_one():
    state = balanced_state()
    ch = channel(1.1, p1=0.3)
    povm = Povm(elements=(np.eye(4, dtype=complex), np.zeros((4, 4), complex)))
    assert error_from_povm(povm, ch, state) == pytest.approx(0.7, abs=1e-14)


def test_error_from_povm_always_guess_two():
    state = balanced_state()
    ch = channel(1.1, p1=0.3)
    povm = Povm(elements=(np.zeros((4, 4), complex), np.eye(4, dtype=complex)))
    assert error_from_povm(povm, ch, state) == pytest.approx(0.3, abs=1e-14)


def test_error_from_povm_requires_two_elements():
    povm = Povm(elements=(np.eye(4, dtype=complex),))
    with pytest.raises(ValueError, match="exactly 2"):
        error_from_povm(povm, channel(0.5), balanced_state())


def test_optimal_povm_error_matches_helstrom():
    rng = np.random.default_rng(7)
    for _ in range(100):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        state = project_pure(PureProduct(DOWN, UP), amps, Statistics.FERMION)
        outcome = optimal_povm(ch, state)
        reference = helstrom_error(ch.priors[0], ch.priors[1],
                                   apply_phase(ch, 1, state),
                                   apply_phase(ch, 2, state))
        assert outcome.p_err == pytest.approx(reference, abs=1e-10)


# ---------------------------------------------------------------------------
# optimal_povm


def test_optimal_povm_no_overlap_error_is_smaller_prior():
    amps = OverlapAmplitudes(l=S, r=0.0, l_prime=0.0, r_prime=S)
    state = project_pure(PureProduct(DOWN, UP), amps, Statistics.BOSON)
    for phi12 in np.linspace(0, 2 * math.pi, 13):
        outcome = optimal_povm(channel(float(phi12)), state)
        assert outcome.p_err == pytest.approx(THIRD, abs=1e-12)


def test_optimal_povm_identical_hypotheses():
    state = balanced_state()
    for p1 in (0.2, 0.5, 0.8):
        outcome = optimal_povm(channel(0.0, p1=p1), state)
        assert outcome.p_err == pytest.approx(min(p1, 1 - p1), abs=1e-12)


def test_optimal_povm_degenerate_guesses_more_probable_phase():
    state = balanced_state()
    outcome = optimal_povm(channel(0.0, p1=0.25), state)
    np.testing.assert_allclose(outcome.povm.elements[0], np.zeros((4, 4)),
                               atol=1e-14)
    assert outcome.p_err == pytest.approx(0.25, abs=1e-14)
    assert outcome.lambda_plus == pytest.approx(0.0, abs=1e-12)


def test_optimal_povm_lambda_plus_closed_form():
    rng = np.random.default_rng(13)
    for _ in range(200):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        state = project_pure(PureProduct(DOWN, UP), amps, Statistics.BOSON)
        outcome = optimal_povm(ch, state)
        p1, p2 = ch.priors
        disc = max(1.0 - 4.0 * p1 * p2 * abs(outcome.overlap) ** 2, 0.0)
        lam_ref = 0.5 * (p1 - p2 + math.sqrt(disc))
        assert outcome.lambda_plus == pytest.approx(max(lam_ref, 0.0), abs=1e-10)


def test_optimal_povm_trace_identity():
    # p_err = p1 - Tr[(p1 P1 - p2 P2) Pi1]
    rng = np.random.default_rng(17)
    for _ in range(100):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        state = project_pure(PureProduct(DOWN, UP), amps, Statistics.FERMION)
        outcome = optimal_povm(ch, state)
        p1, p2 = ch.priors
        psi1 = apply_phase(ch, 1, state)
        psi2 = apply_phase(ch, 2, state)
        delta = p1 * psi1.projector() - p2 * psi2.projector()
        traced = p1 - np.trace(delta @ outcome.povm.elements[0]).real
        assert outcome.p_err == pytest.approx(traced, abs=1e-10)


def test_optimal_povm_elements_always_valid():
    # Povm construction re-validates: hermitian, positive, complete
    rng = np.random.default_rng(19)
    for _ in range(50):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        state = project_pure(PureProduct(DOWN, UP), amps, Statistics.BOSON)
        outcome = optimal_povm(ch, state)
        assert isinstance(outcome.povm, Povm)
        total = outcome.povm.elements[0] + outcome.povm.elements[1]
        np.testing.assert_allclose(total, np.eye(4), atol=1e-10)


# ---------------------------------------------------------------------------
# helstrom_error


def test_helstrom_orthogonal_states():
    psi1 = balanced_state()
    ch = channel(math.pi, p1=0.23)
    out1 = apply_phase(ch, 1, psi1)
    out2 = apply_phase(ch, 2, psi1)
    assert helstrom_error(0.23, 0.77, out1, out2) == pytest.approx(0.0, abs=1e-12)


def test_helstrom_identical_states():
    state = balanced_state()
    assert helstrom_error(0.3, 0.7, state, state) == pytest.approx(0.3, abs=1e-14)
    assert helstrom_error(0.9, 0.1, state, state) == pytest.approx(0.1, abs=1e-14)


def test_helstrom_rejects_bad_priors():
    state = balanced_state()
    with pytest.raises(ValueError):
        helstrom_error(0.5, 0.6, state, state)


# ---------------------------------------------------------------------------
# closed forms


def test_product_form_no_overlap_constant():
    amps = OverlapAmplitudes(l=S, r=0.0, l_prime=0.0, r_prime=S)
    for phi12 in np.linspace(-2 * math.pi, 2 * math.pi, 17):
        err = closed_form_error_product(amps, channel(float(phi12)))
        assert err == pytest.approx(THIRD, abs=1e-12)


def test_product_form_balanced_reduction():
    rng = np.random.default_rng(23)
    amps = OverlapAmplitudes.balanced()
    for _ in range(200):
        ch = random_channel(rng)
        assert closed_form_error_product(amps, ch) == pytest.approx(
            closed_form_error_balanced(ch), abs=1e-12)


def test_product_form_raises_on_vanishing_weight():
    amps = OverlapAmplitudes(l=S, r=0.0, l_prime=S, r_prime=0.0)
    with pytest.raises(VanishingProjection):
        closed_form_error_product(amps, channel(0.5))


def test_balanced_zero_error_point():
    assert closed_form_error_balanced(channel(math.pi)) == pytest.approx(0.0, abs=1e-14)


def test_balanced_identical_hypotheses_give_prior_guess():
    # at phi12 = 0 the two hypotheses coincide, so the best strategy is to
    # guess the more probable phase; the POVM oracle agrees
    err = closed_form_error_balanced(channel(0.0))
    assert err == pytest.approx(THIRD, abs=1e-12)
    oracle = optimal_povm(channel(0.0), balanced_state())
    assert err == pytest.approx(oracle.p_err, abs=1e-10)


def test_balanced_certain_phase_never_errs():
    ch = PhaseChannel(omega=(0, 1, 0, 0), phi=(0.4, 0.0), priors=(0.0, 1.0))
    assert closed_form_error_balanced(ch) == 0.0


def test_general_form_reduces_to_product_when_up_only():
    rng = np.random.default_rng(29)
    prep = SpinSuperposition(up_amp=1.0, down_amp=0.0)
    for _ in range(100):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        for stats in (Statistics.BOSON, Statistics.FERMION):
            assert closed_form_error_general(prep, amps, stats, ch) == pytest.approx(
                closed_form_error_product(amps, ch), abs=1e-12)


def test_general_form_fermion_balanced_equal_weights_drops_down_branch():
    # real balanced amplitudes make l r' = l' r, so eta = -1 cancels the
    # down-down branch and the product-form value is recovered
    rng = np.random.default_rng(31)
    prep = SpinSuperposition(up_amp=S, down_amp=S)
    amps = OverlapAmplitudes.balanced()
    for _ in range(50):
        ch = random_channel(rng)
        assert closed_form_error_general(prep, amps, Statistics.FERMION,
                                         ch) == pytest.approx(
            closed_form_error_product(amps, ch), abs=1e-12)


def test_general_form_fermion_beats_boson_at_pi():
    # frozen values for omega = (dd=1, du=3, ud=2), a = b, balanced overlaps,
    # p1 = 1/3, phi12 = pi, worked out by hand:
    #   fermion overlap = 0            -> p_err = 0
    #   boson overlap  = -2/3          -> p_err = (1 - 7/9) / 2 = 1/9
    prep = SpinSuperposition(up_amp=S, down_amp=S)
    amps = OverlapAmplitudes.balanced()
    ch = channel(math.pi, omega=(1.0, 3.0, 2.0, 0.0))
    fermion = closed_form_error_general(prep, amps, Statistics.FERMION, ch)
    boson = closed_form_error_general(prep, amps, Statistics.BOSON, ch)
    assert fermion == pytest.approx(0.0, abs=1e-12)
    assert boson == pytest.approx(1.0 / 9.0, abs=1e-12)
    assert fermion < boson - 1e-6


def test_general_form_matches_povm_oracle():
    rng = np.random.default_rng(37)
    for _ in range(100):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        phase = rng.uniform(0, 2 * math.pi)
        a = math.cos(phase)
        b = math.sin(phase)
        if abs(a) < 0.1 and abs(b) < 0.1:
            continue
        prep = SpinSuperposition(up_amp=a, down_amp=b)
        for stats in (Statistics.BOSON, Statistics.FERMION):
            try:
                state = project_superposition(prep, amps, stats)
            except VanishingProjection:
                continue
            closed = closed_form_error_general(prep, amps, stats, ch)
            assert closed == pytest.approx(optimal_povm(ch, state).p_err, abs=1e-10)


# ---------------------------------------------------------------------------
# statistics_sensitivity


def test_statistics_independent_for_product_preparation():
    rng = np.random.default_rng(41)
    for _ in range(100):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        result = statistics_sensitivity(PureProduct(DOWN, UP), amps, ch)
        assert result.boson_err == pytest.approx(result.fermion_err, abs=1e-12)


def test_statistics_dependent_for_superposition_preparation():
    prep = SpinSuperposition(up_amp=S, down_amp=S)
    amps = OverlapAmplitudes.balanced()
    ch = channel(math.pi, omega=(1.0, 3.0, 2.0, 0.0))
    result = statistics_sensitivity(prep, amps, ch)
    assert abs(result.boson_err - result.fermion_err) > 1e-3


def test_statistics_equal_without_overlap():
    rng = np.random.default_rng(43)
    prep = SpinSuperposition(up_amp=0.8, down_amp=0.6)
    for _ in range(30):
        amps = random_amplitudes(rng).without_overlap()
        if abs(amps.l * amps.r_prime) ** 2 < 1e-6:
            continue
        ch = random_channel(rng)
        result = statistics_sensitivity(prep, amps, ch)
        assert result.boson_err == pytest.approx(result.fermion_err, abs=1e-12)
        assert result.boson_err == pytest.approx(result.distinguishable_err,
                                                 abs=1e-12)


def test_statistics_sensitivity_rejects_mixtures():
    with pytest.raises(ValueError, match="pure preparation"):
        statistics_sensitivity(MixedDiagonal(weights=(1, 0, 0, 0)),
                               OverlapAmplitudes.balanced(), channel(0.3))


def test_statistics_sensitivity_propagates_vanishing():
    prep = PureProduct(DOWN, DOWN)
    with pytest.raises(VanishingProjection):
        statistics_sensitivity(prep, OverlapAmplitudes.balanced(), channel(0.3))


# ---------------------------------------------------------------------------
# game-level invariants


def test_error_bounded_by_smaller_prior():
    rng = np.random.default_rng(47)
    for _ in range(200):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        err = closed_form_error_product(amps, ch)
        assert err <= min(ch.priors) + 1e-12
        assert err >= -1e-15


def test_error_symmetric_under_hypothesis_swap():
    rng = np.random.default_rng(53)
    for _ in range(100):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        swapped = PhaseChannel(omega=ch.omega, phi=(ch.phi[1], ch.phi[0]),
                               priors=(ch.priors[1], ch.priors[0]))
        assert closed_form_error_product(amps, ch) == pytest.approx(
            closed_form_error_product(amps, swapped), abs=1e-12)


def test_error_even_in_phase_difference_for_real_amplitudes():
    rng = np.random.default_rng(59)
    for _ in range(100):
        amps = random_amplitudes(rng, real_only=True)
        phi12 = rng.uniform(0, 2 * math.pi)
        p1 = rng.uniform(0, 1)
        forward = closed_form_error_product(amps, channel(phi12, p1=p1))
        backward = closed_form_error_product(amps, channel(-phi12, p1=p1))
        assert forward == pytest.approx(backward, abs=1e-12)


def test_error_invariant_under_generator_shift():
    rng = np.random.default_rng(61)
    prep = SpinSuperposition(up_amp=S, down_amp=S)
    for _ in range(100):
        amps = random_amplitudes(rng)
        ch = random_channel(rng)
        shift = rng.uniform(-3, 3)
        shifted = PhaseChannel(omega=tuple(w + shift for w in ch.omega),
                               phi=ch.phi, priors=ch.priors)
        assert closed_form_error_product(amps, ch) == pytest.approx(
            closed_form_error_product(amps, shifted), abs=1e-12)
        assert closed_form_error_general(prep, amps, Statistics.BOSON,
                                         ch) == pytest.approx(
            closed_form_error_general(prep, amps, Statistics.BOSON, shifted),
            abs=1e-12)
