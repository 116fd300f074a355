#!/usr/bin/env python
"""py.test fixtures to be used in kplume test suite."""
from os import path

import pytest

from kplume import KineticsParams, STATIONARY, START_FREE, START_ADSORBED
from kplume.utilities import active_settings, apply_settings


PWD = path.dirname(path.realpath(__file__))

# (a, b) of the three published parameter columns
FIGURE_KINETICS = [(0.1, 0.9), (0.1, 0.1), (0.01, 0.01)]


def pytest_addoption(parser):
    """Add mc_particles option to py.test invocations."""
    parser.addoption(
        "--mc_particles",
        action="store",
        dest="mc_particles",
        type=int,
        default=200000,
        help="Number of particles used by the Monte Carlo tests",
    )


@pytest.fixture(scope="session")
def mc_particles(request):
    return request.config.getoption("mc_particles")


@pytest.fixture(scope="module")
def half_half():
    """a = b = 1/2 from the stationary distribution: every step is a fair coin."""
    return KineticsParams(0.5, 0.5, STATIONARY)


@pytest.fixture(scope="module")
def always_free():
    """Starts free and never adsorbs: K_n = n."""
    return KineticsParams(0.0, 0.3, START_FREE)


@pytest.fixture(scope="module")
def never_released():
    """Starts adsorbed and never desorbs: K_n = 0."""
    return KineticsParams(0.3, 0.0, START_ADSORBED)


@pytest.fixture(scope="module", params=FIGURE_KINETICS, ids=lambda ab: f"a={ab[0]}-b={ab[1]}")
def figure_kinetics(request):
    a, b = request.param
    return KineticsParams(a, b, STATIONARY)


@pytest.fixture(scope="module")
def twin_peaks():
    """Slow exchange: f_50 piles up at both ends."""
    return KineticsParams(0.01, 0.01, STATIONARY)


@pytest.fixture
def restore_settings():
    """Put the run-wide settings back after a test replaces them."""
    previous = active_settings()
    yield previous
    apply_settings(previous)
