#!/usr/bin/env python
import pytest

from kplume.exceptions import InvalidXi, SupportOverflow
from kplume.kinetics import KineticsParams, occupation_mean, occupation_pmf
from kplume.lattice import (
    NearestNeighbor,
    condvar_45,
    condvar_nn,
    joint_pmf_nn,
    nn_reduction_deviation,
)

from test_utils import brute_force_pmf


def test_single_diagonal_step(always_free):
    pmf = joint_pmf_nn(always_free, 0.2, 1)
    assert pmf[(2, 1)] == pytest.approx(0.2, rel=1e-15)
    assert pmf[(2, 0)] == pytest.approx(0.1, rel=1e-14)
    assert pmf[(1, 0)] == 0.0


@pytest.mark.parametrize("xi", [0.0, 0.25, -0.1, 0.3])
def test_invalid_xi(xi):
    with pytest.raises(InvalidXi):
        NearestNeighbor(xi)


def test_step_law():
    model = NearestNeighbor(0.1)
    assert len(model.dispersion_steps()) == 6
    assert model.lateral_variance() == pytest.approx(0.4)
    assert model.params_dict() == {"xi": 0.1}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_against_brute_force(n):
    params = KineticsParams(0.4, 0.3)
    model = NearestNeighbor(0.15)
    expected = brute_force_pmf(params, model.step_distribution(), n)
    pmf = joint_pmf_nn(params, 0.15, n)
    for point in set(expected) | set(pmf.support):
        assert pmf[point] == pytest.approx(expected.get(point, 0.0), abs=1e-14)


def test_normalized_and_total_variance(figure_kinetics):
    model = NearestNeighbor(0.2)
    pmf = model.joint_pmf(figure_kinetics, 20)
    assert pmf.is_valid(1e-12)
    expected = model.lateral_variance() * occupation_mean(occupation_pmf(figure_kinetics, 20))
    assert pmf.second_moment_y() == pytest.approx(expected, abs=1e-10)


def test_reduces_to_forty_five(twin_peaks):
    """xi = 0.2, a = b = 0.01, n = 25: Var = 4 xi E[K_n | column], so the curve never drops"""
    curve = condvar_nn(twin_peaks, 0.2, 25)
    diagonal = condvar_45(twin_peaks, 0.25, 0.25, 25)
    assert curve.xs() == diagonal.xs()
    for near, diag in zip(curve, diagonal):
        assert near.cond_var == pytest.approx(0.8 * diag.cond_var, rel=1e-10, abs=1e-12)
        assert near.marginal == pytest.approx(diag.marginal, rel=1e-10)
    assert nn_reduction_deviation(curve, diagonal, 0.2) <= 1e-10
    assert curve.find_dip(1e-6) is None
    assert curve.is_nondecreasing(1e-10)
    assert curve.max_abs_mean() <= 1e-12


@pytest.mark.parametrize("xi", [0.05, 0.15])
def test_reduction_holds_for_other_xi(figure_kinetics, xi):
    curve = condvar_nn(figure_kinetics, xi, 12)
    diagonal = condvar_45(figure_kinetics, 0.25, 0.25, 12)
    assert nn_reduction_deviation(curve, diagonal, xi) <= 1e-10


def test_reduction_gap_for_wrong_xi(half_half):
    curve = condvar_nn(half_half, 0.2, 6)
    diagonal = condvar_45(half_half, 0.25, 0.25, 6)
    assert nn_reduction_deviation(curve, diagonal, 0.1) > 1e-3
    assert nn_reduction_deviation(curve, condvar_45(half_half, 0.25, 0.25, 5), 0.2) == float("inf")


def test_point_budget(half_half):
    with pytest.raises(SupportOverflow):
        joint_pmf_nn(half_half, 0.2, 30, point_budget=1000)
