"""
Exact distribution of a random number of i.i.d. lattice steps.

S(n) = sum of the first K_n steps, so P(S(n) = s) = sum_k f_n(k) P(step^{*k} = s). The k-fold
convolutions are built layer by layer on dense bounding boxes (the k-fold Minkowski box of
the step support); shifted copies are added in sorted step order so the result is
reproducible bit for bit.
"""
from typing import List, Optional, Tuple
from dataclasses import dataclass

import numpy as np

from kplume import log
from kplume.distributions import CondVarCurve, LatticePmf, StepDistribution, curve_from_columns
from kplume.exceptions import InvalidStepCount, SupportOverflow
from kplume.kinetics import OccupationPmf
from kplume.utilities import resolve_point_budget


@dataclass(frozen=True)
class Layer:
    """Dense block of probabilities; values[i, j] is the mass at (x0 + i, y0 + j)."""

    x0: int
    y0: int
    values: np.ndarray

    def to_pmf(self, n: int) -> LatticePmf:
        support = {}
        for i, j in zip(*np.nonzero(self.values)):
            support[(self.x0 + int(i), self.y0 + int(j))] = float(self.values[i, j])
        return LatticePmf(n, support)


@dataclass(frozen=True)
class ConvolutionTable:
    """layers[k] is the law of the sum of k steps, k = 0..depth."""

    step: StepDistribution
    layers: List[Layer]

    @property
    def depth(self) -> int:
        return len(self.layers) - 1

    def layer(self, k: int) -> LatticePmf:
        return self.layers[k].to_pmf(k)


def table_point_count(step: StepDistribution, n: int) -> int:
    """Number of lattice points held by a table of depth n."""
    dx_min, dx_max, dy_min, dy_max = step.bounds()
    return sum((k * (dx_max - dx_min) + 1) * (k * (dy_max - dy_min) + 1) for k in range(n + 1))


def convolve_powers(
    step: StepDistribution, n: int, point_budget: Optional[int] = None
) -> ConvolutionTable:
    """
    k-fold convolutions of step for k = 0..n.

    :param step: Law of a single step.

    :param n: Deepest layer to build.

    :param point_budget: Maximum total number of lattice points over all layers
        (default: the active point_budget setting).
    """
    if n < 0:
        raise InvalidStepCount(f"convolve_powers needs n >= 0, got {n}")
    budget = resolve_point_budget(point_budget)
    points = table_point_count(step, n)
    if points > budget:
        raise SupportOverflow(
            f"Convolution table of depth {n} needs {points} points; budget is {budget}"
        )
    dx_min, dx_max, dy_min, dy_max = step.bounds()
    layers = [Layer(0, 0, np.ones((1, 1)))]
    for k in range(1, n + 1):
        prev = layers[-1]
        width = k * (dx_max - dx_min) + 1
        height = k * (dy_max - dy_min) + 1
        x0, y0 = k * dx_min, k * dy_min
        values = np.zeros((width, height))
        pw, ph = prev.values.shape
        for dx, dy, p in step:
            i = prev.x0 + dx - x0
            j = prev.y0 + dy - y0
            values[i : i + pw, j : j + ph] += p * prev.values
        layers.append(Layer(x0, y0, values))
    log.debug(f"convolve_powers: depth={n} points={points} steps={len(step)}")
    return ConvolutionTable(step, layers)


def _union_box(layers: List[Layer]) -> Tuple[int, int, int, int]:
    x_lo = min(layer.x0 for layer in layers)
    y_lo = min(layer.y0 for layer in layers)
    x_hi = max(layer.x0 + layer.values.shape[0] for layer in layers)
    y_hi = max(layer.y0 + layer.values.shape[1] for layer in layers)
    return x_lo, y_lo, x_hi, y_hi


def mixture_pmf(table: ConvolutionTable, occupation: OccupationPmf) -> LatticePmf:
    """sum_k f_n(k) * layer_k, accumulated in increasing k."""
    n = occupation.n
    if table.depth < n:
        raise InvalidStepCount(
            f"Convolution table depth {table.depth} is smaller than occupation length {n}"
        )
    used = table.layers[: n + 1]
    x_lo, y_lo, x_hi, y_hi = _union_box(used)
    total = np.zeros((x_hi - x_lo, y_hi - y_lo))
    for k, layer in enumerate(used):
        weight = occupation.probs[k]
        if weight == 0.0:
            continue
        i, j = layer.x0 - x_lo, layer.y0 - y_lo
        w, h = layer.values.shape
        total[i : i + w, j : j + h] += weight * layer.values
    return Layer(x_lo, y_lo, total).to_pmf(n)


def condvar_from_pmf(pmf: LatticePmf, threshold: Optional[float] = None) -> CondVarCurve:
    """Conditional mean and variance of the y-coordinate in every column above threshold."""
    return curve_from_columns(pmf.columns(), threshold)


def pmf_by_convolution(
    step: StepDistribution, occupation: OccupationPmf, point_budget: Optional[int] = None
) -> LatticePmf:
    """Shortcut: mixture of the convolution powers of step under occupation."""
    table = convolve_powers(step, occupation.n, point_budget)
    return mixture_pmf(table, occupation)
