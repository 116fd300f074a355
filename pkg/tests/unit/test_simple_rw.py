#!/usr/bin/env python
import pytest
from hypothesis import given, settings, strategies as st

from kplume.exceptions import InvalidDispersion, InvalidStepCount
from kplume.kinetics import KineticsParams, START_FREE, STATIONARY, occupation_mean, occupation_pmf
from kplume.lattice import SimpleRW, condvar_simple, joint_pmf_simple, marginal_x_simple

from test_utils import brute_force_condvar, brute_force_pmf


def test_parity(half_half):
    pmf = joint_pmf_simple(half_half, 0.25, 0.25, 3)
    assert pmf[(2, 1)] == 0.0
    assert all((x + y) % 2 == 0 for (x, y), _ in pmf.items())


def test_two_right_steps(half_half):
    pmf = joint_pmf_simple(half_half, 0.25, 0.25, 2)
    assert pmf[(4, 0)] == pytest.approx(1 / 64, rel=1e-13)


def test_column_past_n(half_half):
    """x = 3 at n = 2 needs one vertical step, so y = +-1"""
    pmf = joint_pmf_simple(half_half, 0.25, 0.25, 2)
    assert pmf.column(3) == pytest.approx({-1: 1 / 32, 1: 1 / 32}, abs=1e-15)
    assert pmf.total_mass() == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_columns_past_n_against_brute_force(n):
    params = KineticsParams(0.3, 0.4, STATIONARY)
    model = SimpleRW(0.1, 0.4)
    expected = brute_force_pmf(params, model.step_distribution(), n)
    pmf = joint_pmf_simple(params, 0.1, 0.4, n)
    for x in range(n + 1, 2 * n + 1):
        expected_col = {y: p for (px, y), p in expected.items() if px == x}
        col = {y: p for y, p in pmf.column(x).items() if p > 0.0}
        assert set(col) == set(expected_col)
        for y, p in expected_col.items():
            assert col[y] == pytest.approx(p, abs=1e-14)


def test_support_bounds(figure_kinetics):
    pmf = joint_pmf_simple(figure_kinetics, 0.25, 0.25, 10)
    assert all(0 <= x <= 20 and abs(y) <= 10 for (x, y), _ in pmf.items())
    assert pmf.is_valid(1e-12)


def test_edge_columns_have_no_spread(half_half):
    """At x = 0 and x = 2n the particle only ever stepped horizontally"""
    curve = condvar_simple(half_half, 0.25, 0.25, 5)
    assert curve[0].cond_var == 0.0
    assert curve[10].cond_var == 0.0


def test_one_step_lateral(always_free):
    """A single vertical step: Var = 1 at x = 1"""
    curve = condvar_simple(always_free, 0.25, 0.25, 1)
    assert curve[1].cond_var == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_against_brute_force(n):
    params = KineticsParams(0.3, 0.4, STATIONARY)
    model = SimpleRW(0.1, 0.4)
    expected = brute_force_pmf(params, model.step_distribution(), n)
    pmf = model.joint_pmf(params, n)
    for point in set(expected) | set(pmf.support):
        assert pmf[point] == pytest.approx(expected.get(point, 0.0), abs=1e-14)
    curve = model.condvar(params, n)
    for entry in curve:
        assert entry.cond_var == pytest.approx(brute_force_condvar(expected, entry.x), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    a=st.floats(min_value=0.01, max_value=1.0),
    b=st.floats(min_value=0.01, max_value=1.0),
    alpha=st.floats(min_value=0.0, max_value=0.5),
    n=st.integers(min_value=1, max_value=12),
)
def test_closed_form_matches_convolution(a, b, alpha, n):
    params = KineticsParams(a, b)
    model = SimpleRW(alpha, 0.5 - alpha)
    closed = model.joint_pmf(params, n)
    conv = model.joint_pmf_convolution(params, n)
    assert closed.max_abs_diff(conv) <= 1e-12
    assert model.condvar(params, n).max_abs_diff(model.condvar_convolution(params, n)) <= 1e-9


def test_marginal_matches_joint(figure_kinetics):
    marginal = marginal_x_simple(figure_kinetics, 0.25, 0.25, 15)
    joint = joint_pmf_simple(figure_kinetics, 0.25, 0.25, 15).marginal_x()
    for x, p in marginal.items():
        assert p == pytest.approx(joint.get(x, 0.0), abs=1e-14)


def test_total_variance(figure_kinetics):
    """sum y^2 P(x, y) = Var(Y_1) E[K_n]"""
    model = SimpleRW()
    pmf = model.joint_pmf(figure_kinetics, 30)
    expected = model.lateral_variance() * occupation_mean(occupation_pmf(figure_kinetics, 30))
    assert pmf.second_moment_y() == pytest.approx(expected, abs=1e-10)


def test_reflection_symmetry():
    """a + b = 1 with a stationary start: Var(n + x) = Var(n - x)"""
    params = KineticsParams(0.1, 0.9, STATIONARY)
    curve = condvar_simple(params, 0.25, 0.25, 50)
    assert curve.reflection_deviation(50) <= 1e-9


def test_no_reflection_symmetry_in_general():
    params = KineticsParams(0.1, 0.1, START_FREE)
    curve = condvar_simple(params, 0.25, 0.25, 20)
    assert curve.reflection_deviation(20) > 1e-6


def test_slow_exchange_dips(twin_peaks):
    """a = b = 0.01, n = 50: the variance curve is not monotone"""
    curve = condvar_simple(twin_peaks, 0.25, 0.25, 50)
    assert curve.find_dip(1e-6) is not None
    assert joint_pmf_simple(twin_peaks, 0.25, 0.25, 50).local_maxima_x().count >= 2


def test_conditional_mean_zero(figure_kinetics):
    curve = condvar_simple(figure_kinetics, 0.25, 0.25, 20)
    assert curve.max_abs_mean() <= 1e-12


@pytest.mark.parametrize("alpha,beta", [(0.3, 0.3), (-0.1, 0.6)])
def test_invalid_weights(alpha, beta):
    with pytest.raises(InvalidDispersion):
        SimpleRW(alpha, beta)


def test_invalid_steps(half_half):
    with pytest.raises(InvalidStepCount):
        joint_pmf_simple(half_half, 0.25, 0.25, 0)


def test_repr():
    assert repr(SimpleRW(0.1, 0.4)) == "SimpleRW(alpha=0.1, beta=0.4)"
