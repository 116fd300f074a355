#!/usr/bin/env python
import math

import numpy as np
import pytest

from kplume.exceptions import InvalidStepCount, ParameterException
from kplume.gaussian import GaussianDispersion, condvar_curve
from kplume.kinetics import KineticsParams
from kplume.lattice import FortyFive, NearestNeighbor, SimpleRW
from kplume.montecarlo import (
    MomentAccumulator,
    SimulationConfig,
    concordance,
    mean_deviation,
    simulate,
    total_variation,
)


def test_blocks(half_half):
    config = SimulationConfig(SimpleRW(), half_half, 3, 10, block_size=4)
    assert config.blocks() == [(0, 4), (1, 4), (2, 2)]


@pytest.mark.parametrize(
    "kwargs,exc",
    [
        ({"n": 0}, InvalidStepCount),
        ({"particles": 0}, ParameterException),
        ({"seed": -1}, ParameterException),
        ({"block_size": 0}, ParameterException),
    ],
)
def test_invalid_config(half_half, kwargs, exc):
    values = {"n": 3, "particles": 10}
    values.update(kwargs)
    with pytest.raises(exc):
        SimulationConfig(SimpleRW(), half_half, **values)


def test_invalid_bin_width(half_half):
    with pytest.raises(ParameterException):
        SimulationConfig(GaussianDispersion(), half_half, 3, 10, bin_width=0.0)


def test_all_adsorbed_lattice(never_released):
    summary = simulate(SimulationConfig(SimpleRW(), never_released, 10, 5000))
    assert summary.histogram == {(0, 0): 5000}
    assert summary.columns[0].variance == 0.0


def test_all_adsorbed_gaussian(never_released):
    summary = simulate(SimulationConfig(GaussianDispersion(), never_released, 10, 5000))
    assert summary.atom_count == 5000
    assert summary.histogram == {}
    assert summary.total_count() == 5000


def test_two_right_steps(half_half, mc_particles):
    """P(S(2) = (4, 0)) = 1/64 within four standard errors"""
    summary = simulate(SimulationConfig(SimpleRW(), half_half, 2, mc_particles, seed=7))
    p = 1 / 64
    assert abs(summary.probability((4, 0)) - p) <= 4 * math.sqrt(p * (1 - p) / mc_particles)


def test_forty_five_variance(always_free, mc_particles):
    """Every column has lateral variance n = 7"""
    model = FortyFive()
    summary = simulate(SimulationConfig(model, always_free, 7, mc_particles, seed=11))
    assert all(x % 2 == 0 for x in summary.columns)
    assert concordance(summary, model.condvar(always_free, 7)) <= 5.0


@pytest.mark.parametrize("model", [SimpleRW(), NearestNeighbor(0.2)], ids=["simple", "nn"])
def test_total_variation(figure_kinetics, mc_particles, model):
    summary = simulate(SimulationConfig(model, figure_kinetics, 10, mc_particles, seed=3))
    exact = model.joint_pmf(figure_kinetics, 10)
    assert total_variation(summary, exact) <= 0.02
    assert concordance(summary, model.condvar(figure_kinetics, 10)) <= 5.0
    assert mean_deviation(summary) <= 5.0


def test_total_variation_n_mismatch(half_half):
    summary = simulate(SimulationConfig(SimpleRW(), half_half, 2, 100))
    with pytest.raises(ParameterException):
        total_variation(summary, SimpleRW().joint_pmf(half_half, 3))


def test_gaussian_concordance(half_half, mc_particles):
    """Binned variances follow the continuous-part curve"""
    dispersion = GaussianDispersion()
    config = SimulationConfig(dispersion, half_half, 10, mc_particles, seed=5)
    summary = simulate(config)
    model = dispersion.model(half_half, 10)
    xs = [row.x for row in summary.column_stats()]
    curve = condvar_curve(model, xs, atom_factor=False)
    assert concordance(summary, curve) <= 5.0
    expected_atom = model.occupation[0] * mc_particles
    assert abs(summary.atom_count - expected_atom) <= 5 * math.sqrt(expected_atom)
    with pytest.raises(ParameterException):
        summary.empirical_pmf()


@pytest.mark.parametrize(
    "model", [SimpleRW(), GaussianDispersion()], ids=["lattice", "gaussian"]
)
def test_reproducible_across_workers(figure_kinetics, model):
    base = dict(
        model=model, kinetics=figure_kinetics, n=20, particles=5000, seed=42, block_size=700
    )
    one = simulate(SimulationConfig(workers=1, **base))
    many = simulate(SimulationConfig(workers=4, **base))
    assert one.histogram == many.histogram
    assert one.atom_count == many.atom_count
    assert one.column_stats() == many.column_stats()


def test_seed_changes_draws(half_half):
    first = simulate(SimulationConfig(SimpleRW(), half_half, 20, 2000, seed=1))
    second = simulate(SimulationConfig(SimpleRW(), half_half, 20, 2000, seed=2))
    assert first.histogram != second.histogram


def test_moment_merge():
    rng = np.random.default_rng(0)
    left = rng.normal(1.0, 2.0, 500)
    right = rng.exponential(3.0, 300)
    merged = MomentAccumulator.from_values(left).merge(MomentAccumulator.from_values(right))
    whole = MomentAccumulator.from_values(np.concatenate([left, right]))
    assert merged.count == whole.count
    for name in ("mean", "m2", "m3", "m4"):
        assert getattr(merged, name) == pytest.approx(getattr(whole, name), rel=1e-10)


def test_moment_merge_with_empty():
    acc = MomentAccumulator.from_values(np.array([1.0, 2.0, 4.0]))
    assert acc.merge(MomentAccumulator()) is acc
    assert MomentAccumulator().merge(acc) is acc


def test_moments_from_counts():
    acc = MomentAccumulator.from_counts({-1: 2, 1: 2})
    assert acc.count == 4
    assert acc.mean == 0.0
    assert acc.variance == pytest.approx(4 / 3)
    assert MomentAccumulator.from_counts({}).count == 0


def test_variance_standard_error():
    rng = np.random.default_rng(1)
    acc = MomentAccumulator.from_values(rng.normal(0.0, 1.0, 100000))
    # Normal data: SE of the sample variance is about sqrt(2 / c)
    assert acc.variance_se == pytest.approx(math.sqrt(2 / 100000), rel=0.05)
    assert MomentAccumulator.from_values(np.array([1.0, 2.0])).variance_se == math.inf


def test_summary_curve(half_half):
    summary = simulate(SimulationConfig(SimpleRW(), half_half, 5, 3000, seed=9))
    curve = summary.as_curve()
    assert curve.marginal_total() == pytest.approx(1.0)
    assert sum(summary.marginal_counts().values()) == 3000
    info = summary.as_dict()
    assert info["particles"] == 3000
    assert info["model"] == "simple"
