"""
Asymmetric simple random walk in the plane, started at the origin, without kinetics.

Steps (1, 0), (-1, 0), (0, 1), (0, -1) have probabilities omega, epsilon, gamma, delta. The law
of the vertical coordinate given the horizontal one is the same at x and -x, whatever the
four probabilities are; the cross-multiplied form of that identity is what
check_conditional_symmetry measures.
"""
from typing import Any, Dict, Optional, Tuple
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import logsumexp, xlogy

from kplume.convolution import convolve_powers
from kplume.distributions import LatticePmf, StepDistribution
from kplume.exceptions import InvalidProbability, ParameterException
from kplume.kinetics import KineticsParams
from kplume.kplume_globals import NORMALIZATION_TOL
from kplume.lattice.base_lattice import check_alpha_beta, check_steps, log_factorial

METHODS = ("closed", "convolution")


@dataclass(frozen=True)
class AsymmetricWalkParams:
    omega: float
    epsilon: float
    gamma: float
    delta: float

    def __post_init__(self) -> None:
        for name in ("omega", "epsilon", "gamma", "delta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidProbability(f"{name} must lie in [0, 1], got {value!r}")
        total = self.omega + self.epsilon + self.gamma + self.delta
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidProbability(f"Step probabilities sum to {total!r}, not 1")

    def step_distribution(self) -> StepDistribution:
        return StepDistribution(
            [
                (1, 0, self.omega),
                (-1, 0, self.epsilon),
                (0, 1, self.gamma),
                (0, -1, self.delta),
            ]
        )

    def mirrored(self) -> "AsymmetricWalkParams":
        """Same walk reflected in the vertical axis."""
        return AsymmetricWalkParams(self.epsilon, self.omega, self.gamma, self.delta)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "omega": self.omega,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "delta": self.delta,
        }


def symmetry_walk_params(
    kinetics: KineticsParams, alpha: float, beta: float
) -> AsymmetricWalkParams:
    """
    One-step law of the kinetic simple-RW particle when the chain is i.i.d. (a + b = 1 and
    stationary start), shifted by (-1, 0): omega = b alpha, epsilon = b alpha + a,
    gamma = delta = b beta, so that S(n) is (n, 0) plus the position of this walk.
    """
    check_alpha_beta(alpha, beta)
    a, b = kinetics.a, kinetics.b
    if abs(a + b - 1.0) > NORMALIZATION_TOL:
        raise ParameterException(f"The chain is i.i.d. only when a + b = 1, got {a + b!r}")
    if abs(kinetics.initial[0] - b) > NORMALIZATION_TOL:
        raise ParameterException(
            f"The chain is i.i.d. only from its stationary start, got init={kinetics.init}"
        )
    return AsymmetricWalkParams(b * alpha, b * alpha + a, b * beta, b * beta)


def _closed_column(params: AsymmetricWalkParams, n: int, x: int) -> Dict[int, float]:
    """P(S^(1)_n = x, S^(2)_n = y) for x >= 0 over y = n - x (mod 2)."""
    rest = n - x
    ys = np.arange(-rest, rest + 1, 2)
    y = ys[None, :]
    j = np.arange(0, rest // 2 + 1)[:, None]
    up = (rest + y) // 2 - j
    down = (rest - y) // 2 - j
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = (
            log_factorial(n)
            - log_factorial(j)
            - log_factorial(j + x)
            - log_factorial(up)
            - log_factorial(down)
            + xlogy(j + x, params.omega)
            + xlogy(j, params.epsilon)
            + xlogy(np.maximum(up, 0), params.gamma)
            + xlogy(np.maximum(down, 0), params.delta)
        )
        col = np.exp(logsumexp(terms, axis=0))
    return {int(yv): float(p) for yv, p in zip(ys, col) if p > 0.0}


def asym_joint_pmf(params: AsymmetricWalkParams, n: int, method: str = "closed") -> LatticePmf:
    """
    Exact pmf of S_n on -n <= x <= n; y = n - x (mod 2) on the support.

    :param method: "closed" for the multinomial closed form, "convolution" for the n-fold
        convolution of the step law.
    """
    check_steps(n)
    if method == "convolution":
        return convolve_powers(params.step_distribution(), n).layer(n)
    if method != "closed":
        raise ParameterException(f"Unknown method {method!r}; use one of {METHODS}")
    support: Dict[Tuple[int, int], float] = {}
    mirror = params.mirrored()
    for x in range(0, n + 1):
        for y, p in _closed_column(params, n, x).items():
            support[(x, y)] = p
        if x > 0:
            for y, p in _closed_column(mirror, n, x).items():
                support[(-x, y)] = p
    return LatticePmf(n, support)


def _closed_marginal(params: AsymmetricWalkParams, n: int, x: int) -> float:
    """P(S^(1)_n = x) for x >= 0."""
    i = np.arange(0, (n - x) // 2 + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = (
            log_factorial(n)
            - log_factorial(i)
            - log_factorial(i + x)
            - log_factorial(n - x - 2 * i)
            + xlogy(i + x, params.omega)
            + xlogy(i, params.epsilon)
            + xlogy(n - x - 2 * i, params.gamma + params.delta)
        )
        return float(np.exp(logsumexp(terms)))


def asym_marginal(params: AsymmetricWalkParams, n: int) -> Dict[int, float]:
    """P(S^(1)_n = x) for x = -n..n."""
    check_steps(n)
    mirror = params.mirrored()
    marginal = {}
    for x in range(-n, n + 1):
        marginal[x] = _closed_marginal(params, n, x) if x >= 0 else _closed_marginal(mirror, n, -x)
    return marginal


def check_conditional_symmetry(
    params: AsymmetricWalkParams, n: int, method: str = "closed"
) -> float:
    """
    max over 0 <= x <= n and y of |P(x, y) P(S^(1) = -x) - P(-x, y) P(S^(1) = x)|.

    With method="convolution" both the joint law and its marginal come from the convolution
    route, so the two evaluations are fully independent.
    """
    joint = asym_joint_pmf(params, n, method)
    marginal: Dict[int, float]
    if method == "closed":
        marginal = asym_marginal(params, n)
    else:
        marginal = joint.marginal_x()
    worst = 0.0
    for x in range(0, n + 1):
        for y in range(-n, n + 1):
            lhs = joint[(x, y)] * marginal.get(-x, 0.0)
            rhs = joint[(-x, y)] * marginal.get(x, 0.0)
            worst = max(worst, abs(lhs - rhs))
    return worst


def conditional_variance_y(joint: LatticePmf, x: int) -> Optional[float]:
    """Var(S^(2) | S^(1) = x), or None when the column is empty."""
    col = joint.column(x)
    mass = math.fsum(col.values())
    if mass <= 0.0:
        return None
    mean = math.fsum(y * p for y, p in col.items()) / mass
    return math.fsum((y - mean) ** 2 * p for y, p in col.items()) / mass
