"""
Forty-five degree dispersion: (1, +-1) with probability alpha each, (-1, +-1) with beta each.

Every dispersion step moves the particle one unit vertically, so the column position only
fixes how many steps went right, and the vertical displacement is a plain +-1 walk of length
K_n. The x-coordinate is always even: Š(n) = (2x, y) with x the number of right steps.
"""
from typing import Any, Dict, List, Optional, Tuple
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
    log_binomial,
    log_occupation,
)
from kplume.utilities import parallel_map, resolve_threshold


def _joint_column(log_f: np.ndarray, alpha: float, beta: float, n: int, x: int) -> Dict[int, float]:
    """P(Š(n) = (2x, y)) = sum_k f_n(k) C(k, x) C(k, (k+y)/2) alpha^x beta^(k-x)."""
    k = np.arange(x, n + 1)[:, None]
    ys = np.arange(-n, n + 1)
    y = ys[None, :]
    same_parity = (k - y) % 2 == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = (
            log_f[k]
            + log_binomial(k, x)
            + log_binomial(k, (k + y) // 2)
            + xlogy(x, alpha)
            + xlogy(k - x, beta)
        )
        terms = np.where(same_parity, terms, -np.inf)
        col = np.exp(logsumexp(terms, axis=0))
    return {int(yv): float(p) for yv, p in zip(ys, col) if p > 0.0}


def _marginal_terms(
    log_f: np.ndarray, alpha: float, beta: float, n: int, x: int
) -> Tuple[np.ndarray, np.ndarray]:
    """(k, log of f_n(k) C(k, x) (2 alpha)^x (2 beta)^(k-x)) for k = x..n."""
    k = np.arange(x, n + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = log_f[k] + log_binomial(k, x) + xlogy(x, 2.0 * alpha) + xlogy(k - x, 2.0 * beta)
    return k, terms


def joint_pmf_45(params: KineticsParams, alpha: float, beta: float, n: int) -> LatticePmf:
    """
    Exact pmf of Š(n); only even x-coordinates 0..2n carry mass.

    :param params: Adsorption kinetics.

    :param alpha: Probability of each right-diagonal dispersion step.

    :param beta: Probability of each left-diagonal dispersion step (alpha + beta = 1/2).

    :param n: Number of time steps.
    """
    check_alpha_beta(alpha, beta)
    check_steps(n)
    log_f = log_occupation(params, n)
    return assemble_columns(
        n,
        list(range(0, n + 1)),
        lambda x: _joint_column(log_f, alpha, beta, n, x),
        x_scale=2,
    )


def condvar_45(
    params: KineticsParams,
    alpha: float,
    beta: float,
    n: int,
    threshold: Optional[float] = None,
) -> CondVarCurve:
    """
    Var(Š_Y(n) | Š_X(n) = 2x) = E[K_n | Š_X(n) = 2x]; the curve is keyed by the column 2x.
    """
    check_alpha_beta(alpha, beta)
    check_steps(n)
    log_f = log_occupation(params, n)
    threshold = resolve_threshold(threshold)
    log_threshold = math.log(threshold) if threshold > 0.0 else -math.inf

    def column(x: int) -> Optional[CondVarEntry]:
        k, terms = _marginal_terms(log_f, alpha, beta, n, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_den = float(logsumexp(terms))
            log_num = float(logsumexp(terms + np.log(k)))
        if not log_den > log_threshold:
            return None
        variance = math.exp(log_num - log_den) if log_num > -math.inf else 0.0
        mean = column_mean(_joint_column(log_f, alpha, beta, n, x))
        return CondVarEntry(2 * x, math.exp(log_den), mean, variance)

    entries: List[Optional[CondVarEntry]] = parallel_map(column, list(range(0, n + 1)))
    return columns_to_curve(entries, threshold)


def vandermonde_identity(k: int, x: int, y: int) -> Tuple[int, int]:
    """
    (sum_j C(x, j) C(k - x, (k+y)/2 - j), C(k, (k+y)/2)) in exact integer arithmetic.

    The two agree for every 0 <= x <= k and y = k (mod 2); the first is the count of step
    sequences reaching (2x, y) split by the number j of (1, 1) steps.
    """
    if (k + y) % 2:
        return 0, 0
    up = (k + y) // 2
    if up < 0 or up > k:
        return 0, 0
    total = sum(
        math.comb(x, j) * math.comb(k - x, up - j) for j in range(0, up + 1) if up - j <= k - x
    )
    return total, math.comb(k, up)


class FortyFive(BaseLatticeModel):
    """Diagonal dispersion that decouples column position from vertical step count."""

    model_name = "ff45"

    def __init__(self, alpha: float = 0.25, beta: float = 0.25) -> None:
        check_alpha_beta(alpha, beta)
        self.alpha = alpha
        self.beta = beta

    def dispersion_steps(self) -> StepDistribution:
        a, b = self.alpha, self.beta
        return StepDistribution([(1, 1, a), (1, -1, a), (-1, 1, b), (-1, -1, b)])

    def params_dict(self) -> Dict[str, Any]:
        return {"alpha": self.alpha, "beta": self.beta}

    def joint_pmf(self, params: KineticsParams, n: int) -> LatticePmf:
        return joint_pmf_45(params, self.alpha, self.beta, n)

    def condvar(self, params: KineticsParams, n: int) -> CondVarCurve:
        return condvar_45(params, self.alpha, self.beta, n)
