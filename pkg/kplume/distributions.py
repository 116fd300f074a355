"""Value types shared by the exact engines: step laws, lattice mass functions, variance curves."""
from typing import Dict, Iterable, Iterator, List, Optional, Tuple
from dataclasses import dataclass, field
import math

import numpy as np

from kplume.exceptions import InvalidProbability
from kplume.kinetics import ModeReport, count_modes
from kplume.kplume_globals import NORMALIZATION_TOL
from kplume.utilities import resolve_threshold

Point = Tuple[int, int]


class StepDistribution:
    """
    Finite-support law of one step on Z^2.

    Duplicate points are merged; the support is kept in sorted point order so that every
    computation that iterates over it sums in the same order.
    """

    def __init__(self, support: Iterable[Tuple[int, int, float]]) -> None:
        merged: Dict[Point, float] = {}
        for dx, dy, p in support:
            if p < 0.0:
                raise InvalidProbability(f"Step ({dx}, {dy}) has negative probability {p!r}")
            key = (int(dx), int(dy))
            merged[key] = merged.get(key, 0.0) + float(p)
        merged = {point: p for point, p in merged.items() if p > 0.0}
        if not merged:
            raise InvalidProbability("Step distribution has empty support")
        total = math.fsum(merged.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidProbability(f"Step probabilities sum to {total!r}, not 1")
        self.support: List[Tuple[int, int, float]] = [
            (dx, dy, merged[(dx, dy)]) for dx, dy in sorted(merged)
        ]

    def __iter__(self) -> Iterator[Tuple[int, int, float]]:
        return iter(self.support)

    def __len__(self) -> int:
        return len(self.support)

    def __repr__(self) -> str:
        return f"StepDistribution({self.support!r})"

    @property
    def points(self) -> np.ndarray:
        return np.array([(dx, dy) for dx, dy, _ in self.support], dtype=np.int64)

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, _, p in self.support])

    def bounds(self) -> Tuple[int, int, int, int]:
        """(min dx, max dx, min dy, max dy)."""
        xs = [dx for dx, _, _ in self.support]
        ys = [dy for _, dy, _ in self.support]
        return min(xs), max(xs), min(ys), max(ys)

    def variance_y(self) -> float:
        mean = math.fsum(dy * p for _, dy, p in self.support)
        return math.fsum((dy - mean) ** 2 * p for _, dy, p in self.support)


@dataclass
class LatticePmf:
    """Sparse probability mass function on integer points at time n."""

    n: int
    support: Dict[Point, float] = field(default_factory=dict)

    def __getitem__(self, point: Point) -> float:
        return self.support.get(point, 0.0)

    def __len__(self) -> int:
        return len(self.support)

    def items(self) -> List[Tuple[Point, float]]:
        """Entries in sorted point order."""
        return sorted(self.support.items())

    def total_mass(self) -> float:
        return math.fsum(self.support.values())

    def is_valid(self, tol: float = 1e-10) -> bool:
        if any(p < 0.0 for p in self.support.values()):
            return False
        return abs(self.total_mass() - 1.0) <= tol

    def column(self, x: int) -> Dict[int, float]:
        return {py: p for (px, py), p in self.items() if px == x}

    def columns(self) -> Dict[int, Dict[int, float]]:
        cols: Dict[int, Dict[int, float]] = {}
        for (x, y), p in self.items():
            cols.setdefault(x, {})[y] = p
        return cols

    def marginal_x(self) -> Dict[int, float]:
        return {x: math.fsum(col.values()) for x, col in self.columns().items()}

    def second_moment_y(self) -> float:
        """E[S_Y^2] = sum of y^2 P(x, y)."""
        return math.fsum(y * y * p for (_, y), p in self.items())

    def local_maxima_x(self, tol: Optional[float] = None) -> ModeReport:
        """Modes of the x-marginal over the contiguous range of occupied columns."""
        marginal = self.marginal_x()
        if not marginal:
            return ModeReport(0, [], [])
        lo, hi = min(marginal), max(marginal)
        values = [marginal.get(x, 0.0) for x in range(lo, hi + 1)]
        report = count_modes(values) if tol is None else count_modes(values, tol)
        shift = [(a + lo, b + lo) for a, b in report.plateaus]
        return ModeReport(report.count, [a for a, _ in shift], shift)

    def max_abs_diff(self, other: "LatticePmf") -> float:
        keys = set(self.support) | set(other.support)
        if not keys:
            return 0.0
        return max(abs(self[key] - other[key]) for key in keys)

    def pruned(self, threshold: float = 0.0) -> "LatticePmf":
        """Copy without entries at or below threshold."""
        return LatticePmf(self.n, {k: p for k, p in self.support.items() if p > threshold})


@dataclass(frozen=True)
class CondVarEntry:
    x: float
    marginal: float
    cond_mean: float
    cond_var: float


@dataclass
class CondVarCurve:
    """
    x -> (P(S_X = x), E[S_Y | S_X = x], Var(S_Y | S_X = x)).

    Only x with marginal mass above the threshold carry an entry; unreachable columns are
    absent rather than reported as 0.
    """

    entries: List[CondVarEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[CondVarEntry]:
        return iter(self.entries)

    def __contains__(self, x: float) -> bool:
        return any(entry.x == x for entry in self.entries)

    def __getitem__(self, x: float) -> CondVarEntry:
        for entry in self.entries:
            if entry.x == x:
                return entry
        raise KeyError(x)

    def xs(self) -> List[float]:
        return [entry.x for entry in self.entries]

    def variances(self) -> List[float]:
        return [entry.cond_var for entry in self.entries]

    def marginal_total(self) -> float:
        return math.fsum(entry.marginal for entry in self.entries)

    def max_abs_mean(self) -> float:
        return max((abs(entry.cond_mean) for entry in self.entries), default=0.0)

    def monotonicity_violation(self) -> float:
        """Largest drop Var(x_i) - Var(x_{i+1}) between consecutive entries (<= 0 if none)."""
        values = self.variances()
        drops = [values[i] - values[i + 1] for i in range(len(values) - 1)]
        return max(drops, default=0.0)

    def is_nondecreasing(self, slack: float = 0.0) -> bool:
        """True when Var(x_{i+1}) - Var(x_i) >= -slack everywhere."""
        return self.monotonicity_violation() <= slack

    def find_dip(self, drop: float = 1e-6) -> Optional[Tuple[CondVarEntry, CondVarEntry]]:
        """First pair x1 < x2 with Var(x2) < Var(x1) - drop, against the running maximum."""
        best: Optional[CondVarEntry] = None
        for entry in self.entries:
            if best is not None and entry.cond_var < best.cond_var - drop:
                return best, entry
            if best is None or entry.cond_var > best.cond_var:
                best = entry
        return None

    def reflection_deviation(self, center: float) -> float:
        """max |Var(center + d) - Var(center - d)| over d where both sides carry entries."""
        by_x = {entry.x: entry.cond_var for entry in self.entries}
        worst = 0.0
        for x, value in by_x.items():
            mirror = 2 * center - x
            if mirror in by_x:
                worst = max(worst, abs(value - by_x[mirror]))
        return worst

    def max_abs_diff(self, other: "CondVarCurve") -> float:
        """Worst variance difference over x present in both curves."""
        other_by_x = {entry.x: entry.cond_var for entry in other.entries}
        diffs = [abs(e.cond_var - other_by_x[e.x]) for e in self.entries if e.x in other_by_x]
        return max(diffs, default=0.0)


def curve_from_columns(
    columns: Dict[int, Dict[int, float]], threshold: Optional[float] = None
) -> CondVarCurve:
    """Column-wise conditional moments of a lattice pmf; fixed summation order per column."""
    threshold = resolve_threshold(threshold)
    entries = []
    for x in sorted(columns):
        col = columns[x]
        ys = sorted(col)
        mass = math.fsum(col[y] for y in ys)
        if mass <= threshold:
            continue
        mean = math.fsum(y * col[y] for y in ys) / mass
        var = math.fsum((y - mean) ** 2 * col[y] for y in ys) / mass
        entries.append(CondVarEntry(x, mass, mean, var))
    return CondVarCurve(entries)
