"""
Seeded Monte Carlo particle tracking, an oracle independent of every exact engine.

Particles are simulated in fixed-size blocks. Block b draws from
np.random.SeedSequence(seed, spawn_key=(b,)), so the draws of particle i depend only on
(seed, i // block_size, i % block_size) and never on the worker count; block results are merged
in block order.
"""
from typing import Any, Dict, List, Optional, Tuple, Union
from dataclasses import dataclass, field
import math

import numpy as np

from kplume import log
from kplume.distributions import CondVarCurve, CondVarEntry, LatticePmf
from kplume.exceptions import InvalidStepCount, ParameterException
from kplume.gaussian import GaussianDispersion
from kplume.kinetics import KineticsParams
from kplume.kplume_globals import DEFAULT_BIN_WIDTH, MC_BLOCK_SIZE
from kplume.lattice.base_lattice import BaseLatticeModel
from kplume.utilities import parallel_map

DispersionModel = Union[BaseLatticeModel, GaussianDispersion]
Cell = Tuple[int, int]


@dataclass(frozen=True)
class SimulationConfig:
    """
    :param model: Lattice dispersion model or GaussianDispersion.

    :param kinetics: Adsorption kinetics.

    :param n: Number of time steps.

    :param particles: Number of simulated particles.

    :param seed: Non-negative integer seed.

    :param bin_width: Width of the x- and y-bins of the Gaussian model.

    :param block_size: Particles per RNG block; part of the reproducibility key.
    """

    model: DispersionModel
    kinetics: KineticsParams
    n: int
    particles: int
    seed: int = 0
    bin_width: float = DEFAULT_BIN_WIDTH
    block_size: int = MC_BLOCK_SIZE
    workers: Optional[int] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidStepCount(f"n must be >= 1, got {self.n}")
        if self.particles < 1:
            raise ParameterException(f"particles must be >= 1, got {self.particles}")
        if self.seed < 0:
            raise ParameterException(f"seed must be >= 0, got {self.seed}")
        if self.block_size < 1:
            raise ParameterException(f"block_size must be >= 1, got {self.block_size}")
        if self.is_gaussian and not self.bin_width > 0.0:
            raise ParameterException(f"bin_width must be > 0, got {self.bin_width!r}")

    @property
    def is_gaussian(self) -> bool:
        return isinstance(self.model, GaussianDispersion)

    def blocks(self) -> List[Tuple[int, int]]:
        """(block index, particles in block)."""
        full, rest = divmod(self.particles, self.block_size)
        sizes = [self.block_size] * full + ([rest] if rest else [])
        return list(enumerate(sizes))


@dataclass
class MomentAccumulator:
    """Count, mean and central power sums M2..M4 of one column or bin."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MomentAccumulator":
        count = len(values)
        if count == 0:
            return cls()
        mean = float(np.mean(values))
        dev = values - mean
        return cls(
            count,
            mean,
            float(np.sum(dev ** 2)),
            float(np.sum(dev ** 3)),
            float(np.sum(dev ** 4)),
        )

    @classmethod
    def from_counts(cls, counts: Dict[int, int]) -> "MomentAccumulator":
        """Exact moments of integer observations given as value -> count."""
        ys = sorted(counts)
        total = sum(counts.values())
        if total == 0:
            return cls()
        mean = math.fsum(y * counts[y] for y in ys) / total
        sums = [math.fsum((y - mean) ** p * counts[y] for y in ys) for p in (2, 3, 4)]
        return cls(total, mean, sums[0], sums[1], sums[2])

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """Pairwise update of the central sums; the order of merges is fixed by the caller."""
        na, nb = self.count, other.count
        if nb == 0:
            return self
        if na == 0:
            return other
        n = na + nb
        delta = other.mean - self.mean
        mean = self.mean + delta * nb / n
        m2 = self.m2 + other.m2 + delta ** 2 * na * nb / n
        m3 = (
            self.m3
            + other.m3
            + delta ** 3 * na * nb * (na - nb) / n ** 2
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n
        )
        m4 = (
            self.m4
            + other.m4
            + delta ** 4 * na * nb * (na * na - na * nb + nb * nb) / n ** 3
            + 6.0 * delta ** 2 * (na * na * other.m2 + nb * nb * self.m2) / n ** 2
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n
        )
        return MomentAccumulator(n, mean, m2, m3, m4)

    @property
    def variance(self) -> float:
        """Unbiased sample variance; 0 for a single observation."""
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def variance_se(self) -> float:
        """Standard error of the sample variance from the fourth central moment."""
        c = self.count
        if c < 4:
            return math.inf
        sigma2 = self.m2 / c
        mu4 = self.m4 / c
        value = (mu4 - sigma2 ** 2 * (c - 3) / (c - 1)) / c
        return math.sqrt(max(value, 0.0))

    @property
    def mean_se(self) -> float:
        if self.count < 2:
            return math.inf
        return math.sqrt(self.variance / self.count)


@dataclass(frozen=True)
class ColumnStats:
    x: float
    count: int
    cond_mean: float
    cond_var: float
    cond_var_se: float


@dataclass
class EmpiricalSummary:
    """
    Result of simulate().

    For lattice models histogram is keyed by lattice point and columns by x. For the Gaussian
    model histogram and columns are keyed by bin index (centre = index * bin_width) and the
    particles with K_n = 0 are counted in atom_count only.
    """

    model_name: str
    n: int
    particles: int
    seed: int
    histogram: Dict[Cell, int] = field(default_factory=dict)
    columns: Dict[int, MomentAccumulator] = field(default_factory=dict)
    atom_count: int = 0
    bin_width: Optional[float] = None

    @property
    def is_binned(self) -> bool:
        return self.bin_width is not None

    def position(self, index: int) -> float:
        if self.bin_width is None:
            return float(index)
        return index * self.bin_width

    def total_count(self) -> int:
        return sum(self.histogram.values()) + self.atom_count

    def probability(self, cell: Cell) -> float:
        return self.histogram.get(cell, 0) / self.particles

    def empirical_pmf(self) -> LatticePmf:
        """Relative frequencies as a LatticePmf (lattice models only)."""
        if self.is_binned:
            raise ParameterException("empirical_pmf needs a lattice model summary")
        return LatticePmf(
            self.n, {cell: count / self.particles for cell, count in sorted(self.histogram.items())}
        )

    def marginal_counts(self) -> Dict[int, int]:
        return {x: acc.count for x, acc in sorted(self.columns.items())}

    def column_stats(self) -> List[ColumnStats]:
        return [
            ColumnStats(self.position(x), acc.count, acc.mean, acc.variance, acc.variance_se)
            for x, acc in sorted(self.columns.items())
        ]

    def as_curve(self) -> CondVarCurve:
        return CondVarCurve(
            [
                CondVarEntry(row.x, row.count / self.particles, row.cond_mean, row.cond_var)
                for row in self.column_stats()
            ]
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model_name,
            "n": self.n,
            "particles": self.particles,
            "seed": self.seed,
            "bin_width": self.bin_width,
            "atom_count": self.atom_count,
            "cells": len(self.histogram),
            "columns": len(self.columns),
        }


def _occupation_times(
    kinetics: KineticsParams, n: int, size: int, rng: np.random.Generator
) -> np.ndarray:
    """K_n per particle by iterating the two-state chain."""
    pi_f, _ = kinetics.initial
    free = rng.random(size) < pi_f
    k = free.astype(np.int64)
    for _ in range(1, n):
        u = rng.random(size)
        free = np.where(free, u >= kinetics.a, u < kinetics.b)
        k += free
    return k


def _lattice_block(config: SimulationConfig, block: int, size: int) -> Dict[Cell, int]:
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(block,)))
    k = _occupation_times(config.kinetics, config.n, size, rng)
    assert isinstance(config.model, BaseLatticeModel)
    step = config.model.step_distribution()
    points = step.points
    cumulative = np.cumsum(step.probs)
    cumulative[-1] = 1.0
    x = np.zeros(size, dtype=np.int64)
    y = np.zeros(size, dtype=np.int64)
    for t in range(int(k.max(initial=0))):
        draws = np.searchsorted(cumulative, rng.random(size), side="right")
        idx = np.minimum(draws, len(points) - 1)
        active = t < k
        x += np.where(active, points[idx, 0], 0)
        y += np.where(active, points[idx, 1], 0)
    cells, counts = np.unique(np.stack([x, y], axis=1), axis=0, return_counts=True)
    return {(int(cx), int(cy)): int(c) for (cx, cy), c in zip(cells, counts)}


@dataclass
class _GaussianBlock:
    atom_count: int
    histogram: Dict[Cell, int]
    columns: Dict[int, MomentAccumulator]


def _gaussian_block(config: SimulationConfig, block: int, size: int) -> _GaussianBlock:
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(block,)))
    k = _occupation_times(config.kinetics, config.n, size, rng)
    assert isinstance(config.model, GaussianDispersion)
    z = rng.standard_normal((2, size))
    moved = k > 0
    if not moved.any():
        return _GaussianBlock(size, {}, {})
    kf = k[moved].astype(float)
    x = kf + np.sqrt(2.0 * config.model.alpha * kf) * z[0, moved]
    y = np.sqrt(2.0 * config.model.beta * kf) * z[1, moved]
    width = config.bin_width
    ix = np.rint(x / width).astype(np.int64)
    iy = np.rint(y / width).astype(np.int64)
    cells, counts = np.unique(np.stack([ix, iy], axis=1), axis=0, return_counts=True)
    histogram = {(int(cx), int(cy)): int(c) for (cx, cy), c in zip(cells, counts)}
    order = np.argsort(ix, kind="stable")
    ix_sorted, y_sorted = ix[order], y[order]
    bins, starts = np.unique(ix_sorted, return_index=True)
    bounds = list(starts[1:]) + [len(ix_sorted)]
    columns = {
        int(b): MomentAccumulator.from_values(y_sorted[lo:hi])
        for b, lo, hi in zip(bins, starts, bounds)
    }
    return _GaussianBlock(int(size - moved.sum()), histogram, columns)


def simulate(config: SimulationConfig) -> EmpiricalSummary:
    """
    Simulate config.particles independent particles for config.n steps.

    Identical configs give identical summaries whatever the worker count.
    """
    blocks = config.blocks()
    summary = EmpiricalSummary(
        config.model.model_name,
        config.n,
        config.particles,
        config.seed,
        bin_width=config.bin_width if config.is_gaussian else None,
    )
    log.debug(
        f"simulate: model={config.model!r} n={config.n} particles={config.particles} "
        f"blocks={len(blocks)} seed={config.seed}"
    )
    if config.is_gaussian:
        results = parallel_map(
            lambda item: _gaussian_block(config, *item), blocks, config.workers
        )
        for part in results:
            summary.atom_count += part.atom_count
            for cell, count in part.histogram.items():
                summary.histogram[cell] = summary.histogram.get(cell, 0) + count
            for b, acc in part.columns.items():
                summary.columns[b] = summary.columns.get(b, MomentAccumulator()).merge(acc)
        summary.histogram = dict(sorted(summary.histogram.items()))
        summary.columns = dict(sorted(summary.columns.items()))
        return summary

    lattice_parts = parallel_map(
        lambda item: _lattice_block(config, *item), blocks, config.workers
    )
    for part in lattice_parts:
        for cell, count in part.items():
            summary.histogram[cell] = summary.histogram.get(cell, 0) + count
    summary.histogram = dict(sorted(summary.histogram.items()))
    by_column: Dict[int, Dict[int, int]] = {}
    for (x, y), count in summary.histogram.items():
        by_column.setdefault(x, {})[y] = count
    summary.columns = {x: MomentAccumulator.from_counts(col) for x, col in by_column.items()}
    return summary


def total_variation(empirical: EmpiricalSummary, exact: LatticePmf) -> float:
    """1/2 sum |p_hat - p| over the union of both supports."""
    if empirical.n != exact.n:
        raise ParameterException(f"n mismatch: empirical {empirical.n}, exact {exact.n}")
    estimate = empirical.empirical_pmf()
    cells = sorted(set(estimate.support) | set(exact.support))
    return 0.5 * math.fsum(abs(estimate[cell] - exact[cell]) for cell in cells)


def concordance(
    empirical: EmpiricalSummary, curve: CondVarCurve, min_count: int = 1000
) -> float:
    """
    Worst |Var_hat(x) - Var(x)| / SE(x) over columns with at least min_count particles that
    the exact curve also covers. Returns 0 when no column qualifies.
    """
    exact = {entry.x: entry.cond_var for entry in curve}
    worst = 0.0
    for row in empirical.column_stats():
        if row.count < min_count or row.x not in exact:
            continue
        deviation = abs(row.cond_var - exact[row.x])
        if deviation == 0.0:
            continue
        worst = max(worst, deviation / row.cond_var_se if row.cond_var_se > 0.0 else math.inf)
    return worst


def mean_deviation(empirical: EmpiricalSummary, min_count: int = 1000) -> float:
    """Worst |E_hat[S_Y | column]| / SE over columns with at least min_count particles."""
    worst = 0.0
    for acc in empirical.columns.values():
        if acc.count < min_count or acc.mean == 0.0:
            continue
        se = acc.mean_se
        worst = max(worst, abs(acc.mean) / se if se > 0.0 else math.inf)
    return worst
