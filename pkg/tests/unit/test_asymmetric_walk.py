#!/usr/bin/env python
import pytest
from hypothesis import given, settings, strategies as st

from kplume.exceptions import InvalidProbability, ParameterException
from kplume.kinetics import KineticsParams, START_FREE
from kplume.lattice import (
    AsymmetricWalkParams,
    asym_joint_pmf,
    asym_marginal,
    check_conditional_symmetry,
    conditional_variance_y,
    joint_pmf_simple,
    symmetry_walk_params,
)

SKEWED = AsymmetricWalkParams(0.4, 0.1, 0.3, 0.2)


@st.composite
def walk_params(draw):
    weight = st.just(0.0) | st.floats(min_value=0.05, max_value=1.0)
    weights = [draw(weight) for _ in range(4)]
    total = sum(weights)
    if total == 0.0:
        weights, total = [1.0, 1.0, 1.0, 1.0], 4.0
    omega, epsilon, gamma = (w / total for w in weights[:3])
    return AsymmetricWalkParams(omega, epsilon, gamma, max(0.0, 1.0 - omega - epsilon - gamma))


def test_one_step():
    pmf = asym_joint_pmf(AsymmetricWalkParams(0.25, 0.25, 0.25, 0.25), 1)
    assert pmf.support == pytest.approx({(1, 0): 0.25, (-1, 0): 0.25, (0, 1): 0.25, (0, -1): 0.25})


def test_return_to_origin():
    """Two steps back home: 2 omega epsilon + 2 gamma delta"""
    assert asym_joint_pmf(SKEWED, 2)[(0, 0)] == pytest.approx(0.20, rel=1e-14)
    assert asym_joint_pmf(SKEWED, 3)[(0, 0)] == 0.0


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_closed_matches_convolution(n):
    closed = asym_joint_pmf(SKEWED, n, "closed")
    conv = asym_joint_pmf(SKEWED, n, "convolution")
    assert closed.max_abs_diff(conv) <= 1e-14
    assert closed.is_valid(1e-12)


def test_marginal_matches_joint():
    marginal = asym_marginal(SKEWED, 8)
    joint = asym_joint_pmf(SKEWED, 8).marginal_x()
    for x in range(-8, 9):
        assert marginal[x] == pytest.approx(joint.get(x, 0.0), abs=1e-15)


@pytest.mark.parametrize("method", ["closed", "convolution"])
def test_conditional_symmetry(method):
    assert check_conditional_symmetry(SKEWED, 12, method) <= 1e-12


def test_symmetric_walk_is_exactly_symmetric():
    walk = AsymmetricWalkParams(0.3, 0.3, 0.25, 0.15)
    assert check_conditional_symmetry(walk, 12) == 0.0


def test_horizontal_only_walk():
    """gamma = delta = 0: the vertical coordinate never moves"""
    walk = AsymmetricWalkParams(0.5, 0.5, 0.0, 0.0)
    assert check_conditional_symmetry(walk, 5) == 0.0
    joint = asym_joint_pmf(walk, 5)
    assert all(y == 0 for (_, y), _ in joint.items())


@settings(max_examples=40, deadline=None)
@given(params=walk_params(), n=st.integers(min_value=1, max_value=15))
def test_conditional_symmetry_property(params, n):
    assert check_conditional_symmetry(params, n) <= 1e-12
    joint = asym_joint_pmf(params, n)
    for x in range(1, n + 1):
        left = conditional_variance_y(joint, -x)
        right = conditional_variance_y(joint, x)
        if left is not None and right is not None:
            assert left == pytest.approx(right, rel=1e-9, abs=1e-12)


def test_unknown_method():
    with pytest.raises(ParameterException):
        asym_joint_pmf(SKEWED, 3, "guess")


def test_invalid_params():
    with pytest.raises(InvalidProbability):
        AsymmetricWalkParams(0.5, 0.5, 0.5, 0.0)
    with pytest.raises(InvalidProbability):
        AsymmetricWalkParams(1.5, -0.5, 0.0, 0.0)


def test_mirrored():
    assert SKEWED.mirrored() == AsymmetricWalkParams(0.1, 0.4, 0.3, 0.2)
    assert SKEWED.as_dict() == {"omega": 0.4, "epsilon": 0.1, "gamma": 0.3, "delta": 0.2}


def test_symmetry_walk_params():
    walk = symmetry_walk_params(KineticsParams(0.1, 0.9), 0.25, 0.25)
    assert walk.omega == pytest.approx(0.225)
    assert walk.epsilon == pytest.approx(0.325)
    assert walk.gamma == walk.delta == pytest.approx(0.225)


def test_symmetry_walk_params_needs_iid_chain():
    with pytest.raises(ParameterException):
        symmetry_walk_params(KineticsParams(0.1, 0.1), 0.25, 0.25)


def test_kinetic_walk_is_shifted_asymmetric_walk():
    """With a + b = 1 the kinetic simple walk is the asymmetric walk started at (n, 0)"""
    kinetics = KineticsParams(0.3, 0.7)
    n = 10
    kinetic = joint_pmf_simple(kinetics, 0.2, 0.3, n)
    walk = asym_joint_pmf(symmetry_walk_params(kinetics, 0.2, 0.3), n)
    for (x, y), p in kinetic.items():
        assert walk[(x - n, y)] == pytest.approx(p, rel=1e-10, abs=1e-16)
    assert len(walk) == len(kinetic)


def test_kinetic_walk_needs_stationary_start():
    kinetics = KineticsParams(0.3, 0.7, START_FREE)
    with pytest.raises(ParameterException):
        symmetry_walk_params(kinetics, 0.25, 0.25)


def test_conditional_variance_empty_column():
    assert conditional_variance_y(asym_joint_pmf(SKEWED, 2), 5) is None
