#!/usr/bin/env python
"""Structural properties shared by every dispersion model."""
import pytest
from hypothesis import given, settings, strategies as st

from kplume.kinetics import (
    KineticsParams,
    START_ADSORBED,
    START_FREE,
    STATIONARY,
    occupation_mean,
    occupation_pmf,
)
from kplume.lattice import FortyFive, NearestNeighbor, SimpleRW, condvar_simple
from kplume.model_dispatcher import ModelHandler

rate = st.floats(min_value=0.01, max_value=1.0)
inits = st.sampled_from([STATIONARY, START_FREE, START_ADSORBED])


@st.composite
def lattice_models(draw):
    kind = draw(st.sampled_from(["simple", "ff45", "nn"]))
    if kind == "nn":
        return NearestNeighbor(draw(st.floats(min_value=0.01, max_value=0.24)))
    alpha = draw(st.floats(min_value=0.0, max_value=0.5))
    model_class = SimpleRW if kind == "simple" else FortyFive
    return model_class(alpha, 0.5 - alpha)


@settings(max_examples=40, deadline=None)
@given(model=lattice_models(), a=rate, b=rate, init=inits, n=st.integers(min_value=1, max_value=25))
def test_pmf_is_a_probability(model, a, b, init, n):
    pmf = model.joint_pmf(KineticsParams(a, b, init), n)
    assert pmf.is_valid(1e-10)


@settings(max_examples=40, deadline=None)
@given(model=lattice_models(), a=rate, b=rate, init=inits, n=st.integers(min_value=1, max_value=25))
def test_total_lateral_variance(model, a, b, init, n):
    """E[S_Y^2] = Var(Y_1) E[K_n]"""
    params = KineticsParams(a, b, init)
    expected = model.lateral_variance() * occupation_mean(occupation_pmf(params, n))
    assert model.joint_pmf(params, n).second_moment_y() == pytest.approx(expected, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(model=lattice_models(), a=rate, b=rate, n=st.integers(min_value=1, max_value=20))
def test_lateral_mean_vanishes(model, a, b, n):
    curve = model.condvar(KineticsParams(a, b), n)
    assert curve.max_abs_mean() <= 1e-10
    assert curve.marginal_total() == pytest.approx(1.0, abs=1e-10)
    assert all(entry.cond_var >= -1e-12 for entry in curve)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(min_value=0.05, max_value=0.95), n=st.integers(min_value=1, max_value=40))
def test_reflection_when_chain_is_iid(a, n):
    """a + b = 1 from the stationary start: Var(n + x) = Var(n - x)"""
    curve = condvar_simple(KineticsParams(a, 1.0 - a), 0.25, 0.25, n)
    assert curve.reflection_deviation(n) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(
    key=st.sampled_from(["simple", "ff45", "nn"]),
    a=rate,
    b=rate,
    n=st.integers(min_value=1, max_value=10),
)
def test_dispatch_matches_direct_construction(key, a, b, n):
    params = KineticsParams(a, b)
    model = ModelHandler(model=key)
    direct = {"simple": SimpleRW(), "ff45": FortyFive(), "nn": NearestNeighbor()}[key]
    assert model.joint_pmf(params, n).support == direct.joint_pmf(params, n).support
