"""
Gaussian dispersion: X_k ~ N(0, 2 alpha) and Y_k ~ N(0, 2 beta), independent.

Given K_n = k >= 1 the particle sits at N((k, 0), diag(2 k alpha, 2 k beta)); given K_n = 0 it
never left the origin. The law of S(n) is an atom of mass f_n(0) at (0, 0) plus a mixture of n
bivariate normals weighted by f_n(k). Every sum over k is taken in log space with logsumexp,
so points far from the bulk do not underflow to 0/0.
"""
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate
from scipy.special import logsumexp

from kplume import log
from kplume.distributions import CondVarCurve, CondVarEntry
from kplume.exceptions import AllMassAtomic, InvalidDispersion, InvalidStepCount
from kplume.kinetics import KineticsParams, OccupationPmf, occupation_pmf
from kplume.utilities import parallel_map

ArrayLike = Union[float, Sequence[float], np.ndarray]

# Spacing of the x-grid used for conditional variance curves
DEFAULT_GRID_STEP = 0.01
# Half-width, in standard deviations, of the quadrature boxes
QUAD_SIGMAS = 8.0
# Grid points per parallel chunk in condvar_curve
CURVE_CHUNK = 4096


def check_gaussian_scales(alpha: float, beta: float) -> None:
    if not alpha > 0.0 or not beta > 0.0:
        raise InvalidDispersion(
            f"Gaussian alpha and beta must be > 0, got alpha={alpha!r} beta={beta!r}"
        )


@dataclass(frozen=True)
class GaussianModel:
    """
    Gaussian-dispersion plume at time n.

    :param params: Adsorption kinetics.

    :param alpha: Half the variance of one horizontal dispersion step.

    :param beta: Half the variance of one vertical dispersion step.

    :param n: Number of time steps.
    """

    params: KineticsParams
    alpha: float
    beta: float
    n: int
    occupation: OccupationPmf = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        check_gaussian_scales(self.alpha, self.beta)
        if self.n < 1:
            raise InvalidStepCount(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "occupation", occupation_pmf(self.params, self.n))

    def log_weights(self) -> Tuple[np.ndarray, np.ndarray]:
        """(k, log f_n(k)) for k = 1..n; zero weights map to -inf."""
        k = np.arange(1, self.n + 1, dtype=float)
        with np.errstate(divide="ignore"):
            log_f = np.log(self.occupation.probs[1:])
        return k, log_f

    def as_dict(self) -> Dict[str, Any]:
        return {"alpha": self.alpha, "beta": self.beta}


class GaussianDispersion:
    """Dispersion-only half of GaussianModel; binds to kinetics and n on demand."""

    model_name = "gauss"

    def __init__(self, alpha: float = 0.25, beta: float = 0.25) -> None:
        check_gaussian_scales(alpha, beta)
        self.alpha = alpha
        self.beta = beta

    def model(self, params: KineticsParams, n: int) -> GaussianModel:
        return GaussianModel(params, self.alpha, self.beta, n)

    def params_dict(self) -> Dict[str, Any]:
        return {"alpha": self.alpha, "beta": self.beta}

    def lateral_variance(self) -> float:
        return 2.0 * self.beta

    def condvar(self, params: KineticsParams, n: int) -> CondVarCurve:
        return condvar_curve(self.model(params, n))

    def __repr__(self) -> str:
        return f"GaussianDispersion(alpha={self.alpha!r}, beta={self.beta!r})"


def _as_output(values: np.ndarray) -> Any:
    if np.ndim(values) == 0:
        return float(values)
    return values


def atom_mass(model: GaussianModel) -> float:
    """P(S(n) = (0, 0)) = f_n(0)."""
    return model.occupation[0]


def density(model: GaussianModel, x: ArrayLike, y: ArrayLike) -> Any:
    """
    Density of the continuous part, normalised to integrate to 1:

        (1 - f_n(0))^-1 sum_{k>=1} f_n(k) / (4 pi k sqrt(alpha beta))
            * exp(-(x-k)^2 / (4 k alpha) - y^2 / (4 k beta))

    Returns 0 everywhere when the atom carries all the mass.
    """
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    continuous = 1.0 - atom_mass(model)
    if continuous <= 0.0:
        return _as_output(np.zeros(x_arr.shape))
    k, log_f = model.log_weights()
    xs = x_arr[..., None]
    ys = y_arr[..., None]
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        terms = (
            log_f
            - np.log(4.0 * math.pi * k * math.sqrt(model.alpha * model.beta))
            - (xs - k) ** 2 / (4.0 * k * model.alpha)
            - ys ** 2 / (4.0 * k * model.beta)
        )
        values = np.exp(logsumexp(terms, axis=-1)) / continuous
    return _as_output(values)


def marginal_density(model: GaussianModel, x: ArrayLike) -> Any:
    """Density of S_X(n) on its continuous part: the 1-D normal mixture over k >= 1."""
    x_arr = np.asarray(x, dtype=float)
    continuous = 1.0 - atom_mass(model)
    if continuous <= 0.0:
        return _as_output(np.zeros(x_arr.shape))
    k, log_f = model.log_weights()
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        terms = (
            log_f
            - np.log(2.0 * np.sqrt(math.pi * k * model.alpha))
            - (x_arr[..., None] - k) ** 2 / (4.0 * k * model.alpha)
        )
        values = np.exp(logsumexp(terms, axis=-1)) / continuous
    return _as_output(values)


def condvar_gaussian(model: GaussianModel, x: ArrayLike, atom_factor: bool = True) -> Any:
    """
    2 beta (1 - f_n(0)) sum_k e_k f_n(k) sqrt(k) / sum_k e_k f_n(k) / sqrt(k),
    with e_k = exp(-(x-k)^2 / (4 k alpha)).

    :param atom_factor: Keep the (1 - f_n(0)) prefactor. Without it the value is the variance
        of S_Y given S_X = x on the continuous part alone, which is what a simulation that
        bins x and sets the atom aside estimates.
    """
    f0 = atom_mass(model)
    if f0 >= 1.0:
        raise AllMassAtomic(
            "f_n(0) = 1: every particle is still at the origin, conditional variance undefined"
        )
    x_arr = np.asarray(x, dtype=float)
    k, log_f = model.log_weights()
    half_log_k = 0.5 * np.log(k)
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        log_w = log_f - (x_arr[..., None] - k) ** 2 / (4.0 * k * model.alpha)
        log_ratio = logsumexp(log_w + half_log_k, axis=-1) - logsumexp(
            log_w - half_log_k, axis=-1
        )
    values = 2.0 * model.beta * np.exp(log_ratio)
    if atom_factor:
        values = values * (1.0 - f0)
    return _as_output(values)


def default_domain(model: GaussianModel) -> Tuple[float, float]:
    """[-4 sqrt(2 n alpha), n + 4 sqrt(2 n alpha)]."""
    spread = 4.0 * math.sqrt(2.0 * model.n * model.alpha)
    return -spread, model.n + spread


def monotone_domain(model: GaussianModel) -> Tuple[float, float]:
    """
    [0, n + 4 sqrt(n alpha)], where the conditional variance is nondecreasing.

    Far left of the origin the widest (large-k) components dominate, so the variance
    rises again as x moves left and the curve is not monotone there.
    """
    return 0.0, model.n + 4.0 * math.sqrt(model.n * model.alpha)


def grid(
    model: GaussianModel,
    step: float = DEFAULT_GRID_STEP,
    domain: Optional[Tuple[float, float]] = None,
) -> np.ndarray:
    """Evenly spaced points lo, lo + step, ... <= hi over the domain."""
    if step <= 0.0:
        raise InvalidDispersion(f"Grid step must be > 0, got {step!r}")
    lo, hi = default_domain(model) if domain is None else domain
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def condvar_curve(
    model: GaussianModel,
    xs: Optional[ArrayLike] = None,
    step: float = DEFAULT_GRID_STEP,
    atom_factor: bool = True,
) -> CondVarCurve:
    """
    Conditional variance over a grid of x values (the default domain when xs is None).

    Entry marginals are values of the marginal density, not masses; conditional means are 0 by
    the y -> -y symmetry.
    """
    points = grid(model, step) if xs is None else np.asarray(xs, dtype=float)
    chunks = [points[i : i + CURVE_CHUNK] for i in range(0, len(points), CURVE_CHUNK)]

    def evaluate(chunk: np.ndarray) -> List[CondVarEntry]:
        variances = np.atleast_1d(condvar_gaussian(model, chunk, atom_factor))
        marginals = np.atleast_1d(marginal_density(model, chunk))
        return [
            CondVarEntry(float(x), float(m), 0.0, float(v))
            for x, m, v in zip(chunk, marginals, variances)
        ]

    entries: List[CondVarEntry] = []
    for part in parallel_map(evaluate, chunks):
        entries.extend(part)
    log.debug(f"condvar_curve: n={model.n} points={len(entries)} atom_factor={atom_factor}")
    return CondVarCurve(entries)


@dataclass(frozen=True)
class MixtureDensity:
    """Atom at the origin plus the normalised continuous density."""

    atom_mass: float
    model: GaussianModel

    def __call__(self, x: ArrayLike, y: ArrayLike) -> Any:
        return density(self.model, x, y)

    @property
    def continuous_weight(self) -> float:
        return 1.0 - self.atom_mass


def mixture(model: GaussianModel) -> MixtureDensity:
    return MixtureDensity(atom_mass(model), model)


def continuous_mass(model: GaussianModel, epsabs: float = 1e-10, epsrel: float = 1e-10) -> float:
    """
    (1 - f_n(0)) * integral of the continuous density, by adaptive quadrature.

    Each normal component is integrated over its own box of QUAD_SIGMAS standard deviations
    and the results are weighted by f_n(k).
    """
    alpha, beta = model.alpha, model.beta
    masses = []
    for k in range(1, model.n + 1):
        weight = model.occupation[k]
        if weight == 0.0:
            continue
        sx = math.sqrt(2.0 * k * alpha)
        sy = math.sqrt(2.0 * k * beta)
        norm = 4.0 * math.pi * k * math.sqrt(alpha * beta)

        def component(y: float, x: float, k: int = k, norm: float = norm) -> float:
            return math.exp(-((x - k) ** 2) / (4.0 * k * alpha) - y * y / (4.0 * k * beta)) / norm

        value, _ = integrate.dblquad(
            component,
            k - QUAD_SIGMAS * sx,
            k + QUAD_SIGMAS * sx,
            lambda _x, sy=sy: -QUAD_SIGMAS * sy,
            lambda _x, sy=sy: QUAD_SIGMAS * sy,
            epsabs=epsabs,
            epsrel=epsrel,
        )
        masses.append(weight * value)
    return math.fsum(masses)


def total_mass(model: GaussianModel) -> float:
    """Atom plus quadrature of the continuous part; 1 up to quadrature error."""
    return atom_mass(model) + continuous_mass(model)


def marginal_mass_deviation(model: GaussianModel, x: float) -> float:
    """|integral of density(x, y) dy - marginal_density(x)|, the y-integral by quad."""
    half_width = QUAD_SIGMAS * math.sqrt(2.0 * model.n * model.beta)
    value, _ = integrate.quad(
        lambda y: density(model, x, y),
        -half_width,
        half_width,
        points=[0.0],
        epsabs=1e-13,
        epsrel=1e-11,
        limit=200,
    )
    return abs(value - marginal_density(model, x))
