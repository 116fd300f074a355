"""
Nearest-neighbour dispersion with independent components: the four diagonal steps (+-1, +-1)
each with probability xi and the horizontal steps (+-1, 0) each with 1/2 - 2 xi.

There is no closed form; the pmf and the conditional variance come from the convolution
engine with the advected step law (2, +-1), (0, +-1), (2, 0), (0, 0).
"""
from typing import Any, Dict, Optional
import math

from kplume.distributions import CondVarCurve, LatticePmf, StepDistribution
from kplume.exceptions import InvalidXi
from kplume.kinetics import KineticsParams
from kplume.kplume_globals import MASS_THRESHOLD
from kplume.lattice.base_lattice import BaseLatticeModel


def check_xi(xi: float) -> None:
    if not 0.0 < xi < 0.25:
        raise InvalidXi(f"xi must lie in the open interval (0, 1/4), got {xi!r}")


class NearestNeighbor(BaseLatticeModel):
    """Mean-zero nearest-neighbour walk whose x and y components are independent."""

    model_name = "nn"

    def __init__(self, xi: float = 0.2) -> None:
        check_xi(xi)
        self.xi = xi

    def dispersion_steps(self) -> StepDistribution:
        xi = self.xi
        side = 0.5 - 2.0 * xi
        return StepDistribution(
            [(1, 1, xi), (1, -1, xi), (-1, 1, xi), (-1, -1, xi), (1, 0, side), (-1, 0, side)]
        )

    def params_dict(self) -> Dict[str, Any]:
        return {"xi": self.xi}


def joint_pmf_nn(
    params: KineticsParams, xi: float, n: int, point_budget: Optional[int] = None
) -> LatticePmf:
    """Exact pmf of S̄(n) as a mixture of k-fold convolutions."""
    return NearestNeighbor(xi).joint_pmf_convolution(params, n, point_budget)


def condvar_nn(
    params: KineticsParams, xi: float, n: int, threshold: Optional[float] = None
) -> CondVarCurve:
    """Var(S̄_Y(n) | S̄_X(n) = x) over every column with mass above threshold."""
    return NearestNeighbor(xi).condvar_convolution(params, n, threshold)


def nn_reduction_deviation(nearest: CondVarCurve, diagonal: CondVarCurve, xi: float) -> float:
    """
    Worst relative gap between a nearest-neighbour curve and 4 xi times the forty-five degree
    curve with alpha = beta = 1/4 under the same kinetics.

    Both walks advance 0 or 2 columns per free step with probability 1/2 each, independently of
    the vertical component, so Var(S̄_Y | S̄_X = x) = 4 xi E[K_n | S̄_X = x] and the columns
    carry the same marginal mass. Columns present in only one curve count as an infinite gap.
    """
    if nearest.xs() != diagonal.xs():
        return math.inf
    worst = 0.0
    for near, diag in zip(nearest, diagonal):
        expected = 4.0 * xi * diag.cond_var
        worst = max(
            worst,
            abs(near.cond_var - expected) / max(1.0, abs(expected)),
            abs(near.marginal - diag.marginal) / max(diag.marginal, MASS_THRESHOLD),
        )
    return worst
