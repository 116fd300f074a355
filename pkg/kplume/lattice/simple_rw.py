"""
Simple random walk dispersion: (+-1, 0) with probability alpha each, (0, +-1) with beta each.

Conditioned on K_n = k the walk has j right, j + k - x left, (x + y)/2 - j up and
(x - y)/2 - j down dispersion steps, so P(S(n) = (x, y)) is a double sum of multinomial
terms over k and j. The terms are evaluated in log space and summed with logsumexp;
trinomial coefficients at n = 50 overflow 64-bit integers.
"""
from typing import Any, Dict, List, Optional
import math

import numpy as np
from scipy.special import logsumexp, xlogy

from kplume.distributions import CondVarCurve, CondVarEntry, LatticePmf, StepDistribution
from kplume.kinetics import KineticsParams
from kplume.lattice.base_lattice import (
    BaseLatticeModel,
    assemble_columns,
    check_alpha_beta,
    check_steps,
    column_mean,
    columns_to_curve,
    log_factorial,
    log_occupation,
)
from kplume.utilities import parallel_map, resolve_threshold


def _joint_column(log_f: np.ndarray, alpha: float, beta: float, n: int, x: int) -> Dict[int, float]:
    """P(S(n) = (x, y)) for every y with y = x (mod 2)."""
    k = np.arange((x + 1) // 2, n + 1)[:, None, None]
    j = np.arange(0, x // 2 + 1)[None, :, None]
    y_max = min(x, 2 * n - x)
    ys = np.arange(-y_max, y_max + 1, 2)
    y = ys[None, None, :]

    left = j + k - x
    up = (x + y) // 2 - j
    down = (x - y) // 2 - j
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = (
            log_f[k]
            + log_factorial(k)
            - log_factorial(j)
            - log_factorial(left)
            - log_factorial(up)
            - log_factorial(down)
            + xlogy(np.maximum(2 * j + k - x, 0), alpha)
            + xlogy(np.maximum(x - 2 * j, 0), beta)
        )
        terms = np.broadcast_to(terms, (k.shape[0], j.shape[1], ys.size))
        col = np.exp(logsumexp(terms, axis=(0, 1)))
    return {int(yv): float(p) for yv, p in zip(ys, col)}


def _marginal_terms(log_f: np.ndarray, alpha: float, beta: float, n: int, x: int) -> np.ndarray:
    """log f_n(k) * trinomial(k; j, j+k-x, x-2j) * alpha^(2j+k-x) * (2 beta)^(x-2j), by (k, j)."""
    k = np.arange((x + 1) // 2, n + 1)[:, None]
    j = np.arange(0, x // 2 + 1)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        return (
            log_f[k]
            + log_factorial(k)
            - log_factorial(j)
            - log_factorial(j + k - x)
            - log_factorial(x - 2 * j)
            + xlogy(np.maximum(2 * j + k - x, 0), alpha)
            + xlogy(np.maximum(x - 2 * j, 0), 2.0 * beta)
        )


def joint_pmf_simple(params: KineticsParams, alpha: float, beta: float, n: int) -> LatticePmf:
    """
    Exact pmf of S(n) on 0 <= x <= 2n, |y| <= n; zero whenever x and y differ in parity.

    :param params: Adsorption kinetics.

    :param alpha: Probability of each horizontal dispersion step.

    :param beta: Probability of each vertical dispersion step (alpha + beta = 1/2).

    :param n: Number of time steps.
    """
    check_alpha_beta(alpha, beta)
    check_steps(n)
    log_f = log_occupation(params, n)
    return assemble_columns(
        n, list(range(0, 2 * n + 1)), lambda x: _joint_column(log_f, alpha, beta, n, x)
    )


def marginal_x_simple(
    params: KineticsParams, alpha: float, beta: float, n: int
) -> Dict[int, float]:
    """P(S_X(n) = x) for x = 0..2n."""
    check_alpha_beta(alpha, beta)
    check_steps(n)
    log_f = log_occupation(params, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        return {
            x: float(np.exp(logsumexp(_marginal_terms(log_f, alpha, beta, n, x))))
            for x in range(0, 2 * n + 1)
        }


def condvar_simple(
    params: KineticsParams,
    alpha: float,
    beta: float,
    n: int,
    threshold: Optional[float] = None,
) -> CondVarCurve:
    """
    Var(S_Y(n) | S_X(n) = x) for x = 0..2n as the ratio of the two trinomial double sums;
    the numerator carries the extra weight (x - 2j). Columns with marginal mass at or below
    threshold are omitted.
    """
    check_alpha_beta(alpha, beta)
    check_steps(n)
    log_f = log_occupation(params, n)
    threshold = resolve_threshold(threshold)
    log_threshold = math.log(threshold) if threshold > 0.0 else -math.inf

    def column(x: int) -> Optional[CondVarEntry]:
        den_terms = _marginal_terms(log_f, alpha, beta, n, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            weight = np.log(np.maximum(x - 2 * np.arange(0, x // 2 + 1), 0))[None, :]
            log_den = float(logsumexp(den_terms))
            log_num = float(logsumexp(den_terms + weight))
        if not log_den > log_threshold:
            return None
        variance = math.exp(log_num - log_den) if log_num > -math.inf else 0.0
        mean = column_mean(_joint_column(log_f, alpha, beta, n, x))
        return CondVarEntry(x, math.exp(log_den), mean, variance)

    entries: List[Optional[CondVarEntry]] = parallel_map(column, list(range(0, 2 * n + 1)))
    return columns_to_curve(entries, threshold)


class SimpleRW(BaseLatticeModel):
    """Axis-parallel nearest-neighbour dispersion."""

    model_name = "simple"

    def __init__(self, alpha: float = 0.25, beta: float = 0.25) -> None:
        check_alpha_beta(alpha, beta)
        self.alpha = alpha
        self.beta = beta

    def dispersion_steps(self) -> StepDistribution:
        a, b = self.alpha, self.beta
        return StepDistribution([(1, 0, a), (-1, 0, a), (0, 1, b), (0, -1, b)])

    def params_dict(self) -> Dict[str, Any]:
        return {"alpha": self.alpha, "beta": self.beta}

    def joint_pmf(self, params: KineticsParams, n: int) -> LatticePmf:
        return joint_pmf_simple(params, self.alpha, self.beta, n)

    def condvar(self, params: KineticsParams, n: int) -> CondVarCurve:
        return condvar_simple(params, self.alpha, self.beta, n)

    def marginal_x(self, params: KineticsParams, n: int) -> Dict[int, float]:
        return marginal_x_simple(params, self.alpha, self.beta, n)
