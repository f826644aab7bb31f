"""Weighting filter: realization, discretization, and sequence filtering."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import expm_filter, relative_error
from ridecomfort.errors import DimensionError, DomainError, ValidationError
from ridecomfort.sickness import (
    FilterSpec,
    SicknessFilter,
    continuous_matrices,
    filter_sequence,
    transfer_function,
)

taus = st.floats(0.05, 20.0)


def distinct_spec(t1, t2):
    if abs(t1 - t2) < 1e-3:
        t2 = t2 + 1.0
    return FilterSpec(tau1=t1, tau2=t2)


def test_realization_example():
    A, B, C = continuous_matrices(FilterSpec(tau1=1.0, tau2=2.0))
    np.testing.assert_allclose(A, [[-1.5, 1.0], [-0.5, 0.0]], atol=1e-15)
    np.testing.assert_allclose(B, [[0.5], [0.0]], atol=1e-15)
    np.testing.assert_allclose(C, [[1.0, 0.0]], atol=1e-15)
    eig = np.sort(np.linalg.eigvals(A))
    np.testing.assert_allclose(eig, [-1.0, -0.5], atol=1e-12)


@settings(max_examples=40)
@given(taus, taus)
def test_dc_gain_is_zero(t1, t2):
    spec = distinct_spec(t1, t2)
    A, B, C = continuous_matrices(spec)
    dc = float((C @ np.linalg.solve(-A, B))[0, 0])
    assert abs(dc) < 1e-12


def test_band_center_gain():
    # peak of |H| sits at omega = 1/sqrt(tau1 tau2) where the denominator
    # reduces to j omega (tau1 + tau2), so the gain is 1/(tau1 + tau2)
    spec = FilterSpec(tau1=5.0, tau2=1.0)
    w0 = 1.0 / np.sqrt(spec.tau1 * spec.tau2)
    gain = abs(transfer_function(spec, 1j * w0))
    assert gain == pytest.approx(1.0 / (spec.tau1 + spec.tau2), rel=1e-12)
    nearby = abs(transfer_function(spec, 1j * w0 * np.array([0.5, 0.9, 1.1, 2.0])))
    assert np.all(nearby < gain)


@settings(max_examples=40)
@given(taus, taus, st.integers(0, 10 ** 6))
def test_state_space_matches_transfer_function(t1, t2, seed):
    spec = distinct_spec(t1, t2)
    A, B, C = continuous_matrices(spec)
    rng = np.random.default_rng(seed)
    s = rng.uniform(-2.0, 2.0, 20) + 1j * rng.uniform(-10.0, 10.0, 20)
    eye = np.eye(2)
    for sk in s:
        got = complex((C @ np.linalg.solve(sk * eye - A, B))[0, 0])
        want = complex(transfer_function(spec, sk))
        assert abs(got - want) < 1e-10 * max(1.0, abs(want))


def test_equal_time_constants_rejected():
    with pytest.raises(ValidationError):
        FilterSpec(tau1=2.0, tau2=2.0)
    with pytest.raises(ValidationError):
        FilterSpec(tau1=-1.0, tau2=2.0)


def test_discretize_small_step_taylor():
    filt = SicknessFilter(FilterSpec(tau1=5.0, tau2=1.0))
    dt = 1e-4
    Ad, _ = filt.discretize(dt)
    assert np.max(np.abs(Ad - np.eye(2) - filt.A * dt)) <= 10.0 * dt ** 2


def test_discretize_eigenvalues():
    filt = SicknessFilter(FilterSpec(tau1=1.0, tau2=2.0))
    Ad, _ = filt.discretize(0.1)
    eig = np.sort(np.linalg.eigvals(Ad))
    np.testing.assert_allclose(eig, [np.exp(-0.1), np.exp(-0.05)], atol=1e-9)


@settings(max_examples=40)
@given(taus, taus, st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_discretize_semigroup(t1, t2, dt1, dt2):
    filt = SicknessFilter(distinct_spec(t1, t2))
    A1, _ = filt.discretize(dt1)
    A2, _ = filt.discretize(dt2)
    A12, _ = filt.discretize(dt1 + dt2)
    assert np.max(np.abs(A1 @ A2 - A12)) < 1e-12


def test_discretize_rejects_nonpositive_step():
    filt = SicknessFilter()
    with pytest.raises(DomainError):
        filt.discretize(0.0)


def test_discretize_many_matches_scalar(rng):
    filt = SicknessFilter()
    dts = rng.uniform(0.05, 0.5, 12)
    Ad, Bd = filt.discretize_many(dts)
    for k, dt in enumerate(dts):
        a, b = filt.discretize(float(dt))
        np.testing.assert_allclose(Ad[k], a, atol=1e-14)
        np.testing.assert_allclose(Bd[k], b, atol=1e-14)


def test_zero_input_stays_zero():
    out = filter_sequence(FilterSpec(), np.zeros(40), np.full(40, 0.1))
    assert np.all(out.main == 0.0)
    assert np.all(out.tail == 0.0)


def test_tail_length_and_step():
    dt = np.full(25, 0.2)
    out = filter_sequence(FilterSpec(), np.ones(25), dt, cooldown=30.0)
    assert out.tail_time_step == pytest.approx(0.2)
    assert out.n_tail == int(np.ceil(30.0 / 0.2))
    out0 = filter_sequence(FilterSpec(), np.ones(25), dt, cooldown=0.0)
    assert out0.n_tail == 0


def test_step_response_matches_dense_integration():
    """Held unit step, coarse stepping vs 1e-4 fixed-step integration."""
    spec = FilterSpec(tau1=5.0, tau2=1.0)
    coarse = filter_sequence(spec, np.ones(200), np.full(200, 0.1), cooldown=0.0)

    filt = SicknessFilter(spec)
    fine_dt = 1e-4
    Ad, Bd = filt.discretize(fine_dt)
    n = int(round(20.0 / fine_dt))
    x = np.zeros(2)
    dense = np.empty(n)
    for k in range(n):
        dense[k] = x[0]
        x = Ad @ x + Bd
    t_dense = np.arange(n) * fine_dt

    pk_coarse = int(np.argmax(coarse.main))
    pk_dense = int(np.argmax(dense))
    assert coarse.main[pk_coarse] == pytest.approx(dense[pk_dense], rel=0.005)
    # peak time can only be localized to the coarse sampling
    assert abs(pk_coarse * 0.1 - t_dense[pk_dense]) <= 0.1


def test_sinusoid_steady_state_amplitude():
    spec = FilterSpec(tau1=5.0, tau2=1.0)
    w0 = 1.0 / np.sqrt(5.0)
    period = 2.0 * np.pi / w0
    dt = 0.05
    t = np.arange(0.0, 7.0 * period, dt)
    out = filter_sequence(spec, np.sin(w0 * t), np.full(t.size, dt), cooldown=0.0)
    settled = out.main[t >= 5.0 * period]
    amp = float(np.max(np.abs(settled)))
    assert amp == pytest.approx(abs(transfer_function(spec, 1j * w0)), rel=0.01)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_linearity(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    m = 30
    dt = rng.uniform(0.05, 0.5, m)
    u = rng.uniform(-2.0, 2.0, m)
    w = rng.uniform(-2.0, 2.0, m)
    spec = FilterSpec()
    mixed = filter_sequence(spec, alpha * u + beta * w, dt)
    fu = filter_sequence(spec, u, dt)
    fw = filter_sequence(spec, w, dt)
    np.testing.assert_allclose(mixed.main, alpha * fu.main + beta * fw.main,
                               atol=1e-12)
    np.testing.assert_allclose(mixed.tail, alpha * fu.tail + beta * fw.tail,
                               atol=1e-12)


def test_zero_input_decay_after_excitation(rng):
    spec = FilterSpec(tau1=5.0, tau2=1.0)
    dt = 0.1
    m = 50
    u = rng.uniform(-2.0, 2.0, m)
    horizon = 10.0 * max(spec.tau1, spec.tau2)
    out = filter_sequence(spec, u, np.full(m, dt), cooldown=horizon + 5.0)
    peak = float(np.max(np.abs(out.main)))
    t_tail = (1 + np.arange(out.n_tail)) * out.tail_time_step
    late = np.abs(out.tail[t_tail >= horizon])
    assert late.size and np.all(late < 1e-3 * peak)
    # decay envelope: the second half of the tail never exceeds the first
    half = out.n_tail // 2
    assert np.max(np.abs(out.tail[half:])) <= np.max(np.abs(out.tail[:half]))


def test_matches_substepped_matrix_exponential(rng):
    spec = FilterSpec(tau1=0.796, tau2=7.96)
    for _ in range(5):
        m = int(rng.integers(20, 80))
        dt = rng.uniform(0.05, 0.5, m)
        u = rng.uniform(-2.0, 2.0, m)
        got = filter_sequence(spec, u, dt)
        main, tail, dtb = expm_filter(spec.tau1, spec.tau2, u, dt, 30.0)
        assert relative_error(got.main, main) < 1e-9
        assert relative_error(got.tail, tail) < 1e-9


def test_mismatched_lengths_rejected():
    with pytest.raises(DimensionError):
        filter_sequence(FilterSpec(), np.ones(5), np.full(4, 0.1))
