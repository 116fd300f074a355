import logging

# Logging configuration
log = logging.getLogger(__name__)  # noqa
log.addHandler(logging.NullHandler())  # noqa

__version__ = "0.1.0"

from kplume.kinetics import KineticsParams  # noqa
from kplume.kinetics import InitialDistribution, STATIONARY, START_FREE, START_ADSORBED  # noqa
from kplume.kinetics import occupation_pmf, stationary, count_modes  # noqa
from kplume.distributions import StepDistribution, LatticePmf, CondVarCurve  # noqa
from kplume.convolution import convolve_powers, mixture_pmf, condvar_from_pmf  # noqa
from kplume.lattice import SimpleRW, FortyFive, NearestNeighbor, AsymmetricWalkParams  # noqa
from kplume.gaussian import GaussianModel, GaussianDispersion  # noqa
from kplume.montecarlo import SimulationConfig, simulate, total_variation  # noqa
from kplume.model_dispatcher import ModelHandler, model_dispatcher, models  # noqa
from kplume.exceptions import KplumeBaseException, ParameterException  # noqa
from kplume.exceptions import ConfigInvalidException, SupportOverflow, AllMassAtomic  # noqa
from kplume.verification import Verifier  # noqa

__all__ = (
    "KineticsParams",
    "InitialDistribution",
    "STATIONARY",
    "START_FREE",
    "START_ADSORBED",
    "occupation_pmf",
    "stationary",
    "count_modes",
    "StepDistribution",
    "LatticePmf",
    "CondVarCurve",
    "convolve_powers",
    "mixture_pmf",
    "condvar_from_pmf",
    "SimpleRW",
    "FortyFive",
    "NearestNeighbor",
    "AsymmetricWalkParams",
    "GaussianModel",
    "GaussianDispersion",
    "SimulationConfig",
    "simulate",
    "total_variation",
    "ModelHandler",
    "model_dispatcher",
    "models",
    "KplumeBaseException",
    "ParameterException",
    "ConfigInvalidException",
    "SupportOverflow",
    "AllMassAtomic",
    "Verifier",
)
