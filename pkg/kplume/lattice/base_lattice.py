"""
Base class for lattice dispersion models.

A model supplies the law of one dispersion step (X_k, Y_k). Advection adds one unit in x to
every free step, and the particle makes one step per free time unit, so
S(n) = sum_{k <= K_n} (X_k + 1, Y_k).

Defines generic methods built on the convolution engine; child classes override joint_pmf
and condvar with their closed forms where one exists.
"""
from typing import Any, Callable, Dict, List, Optional
import math

import numpy as np
from scipy.special import gammaln

from kplume import log
from kplume.convolution import condvar_from_pmf, pmf_by_convolution
from kplume.distributions import CondVarCurve, CondVarEntry, LatticePmf, StepDistribution
from kplume.exceptions import InvalidDispersion, InvalidStepCount
from kplume.kinetics import KineticsParams, occupation_pmf
from kplume.utilities import parallel_map, resolve_threshold

DISPERSION_TOL = 1e-12


def check_alpha_beta(alpha: float, beta: float) -> None:
    """alpha, beta >= 0 with alpha + beta = 1/2."""
    if alpha < 0.0 or beta < 0.0:
        raise InvalidDispersion(f"alpha and beta must be >= 0, got alpha={alpha!r} beta={beta!r}")
    if abs(alpha + beta - 0.5) > DISPERSION_TOL:
        raise InvalidDispersion(f"alpha + beta must equal 1/2, got {alpha + beta!r}")


def check_steps(n: int) -> None:
    if n < 1:
        raise InvalidStepCount(f"n must be >= 1, got {n}")


def log_occupation(params: KineticsParams, n: int) -> np.ndarray:
    """log f_n(k), -inf where f_n(k) = 0."""
    probs = occupation_pmf(params, n).probs
    with np.errstate(divide="ignore"):
        return np.log(probs)


def log_factorial(values: np.ndarray) -> np.ndarray:
    """log(m!) elementwise; negative m (invalid index combinations) map to +inf."""
    values = np.asarray(values, dtype=float)
    out = gammaln(np.maximum(values, 0.0) + 1.0)
    return np.where(values < 0.0, np.inf, out)


def log_binomial(m: np.ndarray, r: np.ndarray) -> np.ndarray:
    """log C(m, r), -inf outside 0 <= r <= m."""
    m = np.asarray(m, dtype=float)
    r = np.asarray(r, dtype=float)
    return -(log_factorial(r) + log_factorial(m - r) - log_factorial(m))


def columns_to_curve(
    columns: List[Optional[CondVarEntry]], threshold: Optional[float] = None
) -> CondVarCurve:
    cutoff = resolve_threshold(threshold)
    return CondVarCurve([c for c in columns if c is not None and c.marginal > cutoff])


class BaseLatticeModel:
    """
    Defines model independent methods.

    Child classes must provide dispersion_steps(); closed-form joint_pmf/condvar are optional.
    """

    model_name = "base"

    def dispersion_steps(self) -> StepDistribution:
        """Law of the dispersion component (X_k, Y_k), before advection."""
        raise NotImplementedError

    def params_dict(self) -> Dict[str, Any]:
        raise NotImplementedError

    def step_distribution(self) -> StepDistribution:
        """Law of a free step including the advective shift: (X_k + 1, Y_k)."""
        return StepDistribution((dx + 1, dy, p) for dx, dy, p in self.dispersion_steps())

    def lateral_variance(self) -> float:
        """Var(Y_1)."""
        return self.dispersion_steps().variance_y()

    def joint_pmf_convolution(
        self, params: KineticsParams, n: int, point_budget: Optional[int] = None
    ) -> LatticePmf:
        check_steps(n)
        occupation = occupation_pmf(params, n)
        return pmf_by_convolution(self.step_distribution(), occupation, point_budget)

    def condvar_convolution(
        self, params: KineticsParams, n: int, threshold: Optional[float] = None
    ) -> CondVarCurve:
        return condvar_from_pmf(self.joint_pmf_convolution(params, n), threshold)

    def joint_pmf(self, params: KineticsParams, n: int) -> LatticePmf:
        return self.joint_pmf_convolution(params, n)

    def condvar(self, params: KineticsParams, n: int) -> CondVarCurve:
        return self.condvar_convolution(params, n)

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params_dict().items())
        return f"{self.__class__.__name__}({args})"


def assemble_columns(
    n: int,
    xs: List[int],
    column: Callable[[int], Dict[int, float]],
    x_scale: int = 1,
) -> LatticePmf:
    """Evaluate independent columns (possibly in parallel) and merge in x order."""
    results = parallel_map(column, xs)
    support: Dict[Any, float] = {}
    for x, col in zip(xs, results):
        for y, p in col.items():
            if p > 0.0:
                support[(x * x_scale, y)] = p
    log.debug(f"assemble_columns: n={n} columns={len(xs)} points={len(support)}")
    return LatticePmf(n, support)


def column_mean(col: Dict[int, float]) -> float:
    """E[S_Y | column] from one column of a joint pmf."""
    ys = sorted(col)
    mass = math.fsum(col[y] for y in ys)
    if mass <= 0.0:
        return 0.0
    return math.fsum(y * col[y] for y in ys) / mass
