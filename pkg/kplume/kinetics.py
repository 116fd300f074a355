"""
Two-state free/adsorbed Markov chain and its occupation time.

K_n counts the steps among the first n in which the particle is free. Its law f_n is the
Markov binomial distribution and drives every dispersion model in kplume: a particle that
was free k times has made exactly k dispersion steps.
"""
from typing import Any, Dict, List, Sequence, Tuple, Union
from dataclasses import dataclass, field
from enum import Enum
import itertools

import numpy as np

from kplume import log
from kplume.exceptions import DegenerateChain, InvalidProbability, InvalidStepCount
from kplume.kplume_globals import MODE_TOL, NORMALIZATION_TOL

FREE = 1
ADSORBED = 0

# Paths are enumerated exhaustively; beyond this the oracle is too slow to be useful
MAX_ENUMERATION_STEPS = 20


class InitialKind(Enum):
    STATIONARY = "stationary"
    FREE = "free"
    ADSORBED = "adsorbed"
    CUSTOM = "custom"


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvalidProbability(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class InitialDistribution:
    """Law of the state in the first time step."""

    kind: InitialKind = InitialKind.STATIONARY
    free_prob: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is InitialKind.CUSTOM:
            _check_probability("custom initial free probability", self.free_prob)

    @classmethod
    def parse(cls, text: str) -> "InitialDistribution":
        """Parse 'stationary', 'free', 'adsorbed' or 'custom:<pf>'."""
        value = text.strip().lower()
        if value.startswith("custom:"):
            try:
                free_prob = float(value.split(":", 1)[1])
            except ValueError:
                raise InvalidProbability(f"Invalid custom initial distribution: {text!r}")
            return cls(InitialKind.CUSTOM, free_prob)
        try:
            kind = InitialKind(value)
        except ValueError:
            raise InvalidProbability(
                f"Unknown initial distribution {text!r}; use stationary, free, adsorbed "
                "or custom:<pf>"
            )
        if kind is InitialKind.CUSTOM:
            raise InvalidProbability("custom initial distribution needs a value: custom:<pf>")
        return cls(kind)

    def __str__(self) -> str:
        if self.kind is InitialKind.CUSTOM:
            return f"custom:{self.free_prob!r}"
        return self.kind.value


STATIONARY = InitialDistribution(InitialKind.STATIONARY)
START_FREE = InitialDistribution(InitialKind.FREE)
START_ADSORBED = InitialDistribution(InitialKind.ADSORBED)


@dataclass(frozen=True)
class KineticsParams:
    """
    Adsorption kinetics of a single particle.

    :param a: Probability of moving free -> adsorbed in one time step.

    :param b: Probability of moving adsorbed -> free in one time step.

    :param init: Distribution of the state in the first time step.
    """

    a: float
    b: float
    init: InitialDistribution = field(default=STATIONARY)

    def __post_init__(self) -> None:
        _check_probability("a", self.a)
        _check_probability("b", self.b)
        if self.a + self.b <= 0.0:
            raise DegenerateChain(
                "a = b = 0 leaves the chain frozen in its initial state; "
                "the stationary distribution is undefined"
            )

    @property
    def initial(self) -> Tuple[float, float]:
        """Resolved initial distribution (pi_f, pi_a)."""
        kind = self.init.kind
        if kind is InitialKind.STATIONARY:
            return stationary(self)
        if kind is InitialKind.FREE:
            return (1.0, 0.0)
        if kind is InitialKind.ADSORBED:
            return (0.0, 1.0)
        return (self.init.free_prob, 1.0 - self.init.free_prob)

    def as_dict(self) -> Dict[str, Any]:
        return {"a": self.a, "b": self.b, "init": str(self.init)}


@dataclass(frozen=True)
class OccupationPmf:
    """probs[k] = P(K_n = k) for k = 0..n."""

    n: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        if self.probs.shape != (self.n + 1,):
            raise ValueError(f"probs must have length n + 1 = {self.n + 1}")

    def __len__(self) -> int:
        return self.n + 1

    def __getitem__(self, k: int) -> float:
        return float(self.probs[k])

    def total(self) -> float:
        return float(np.sum(self.probs))


def stationary(params: KineticsParams) -> Tuple[float, float]:
    """Stationary distribution (rho_f, rho_a) = (b/(a+b), a/(a+b))."""
    total = params.a + params.b
    if total <= 0.0:
        raise DegenerateChain("a = b = 0: stationary distribution undefined")
    return (params.b / total, params.a / total)


def transition_matrix(params: KineticsParams) -> np.ndarray:
    """Rows/columns ordered (free, adsorbed)."""
    a, b = params.a, params.b
    return np.array([[1.0 - a, a], [b, 1.0 - b]])


def occupation_pmf(params: KineticsParams, n: int) -> OccupationPmf:
    """
    Exact law of K_n from the three-term recurrence

        f_{m}(k+1) = (1-b) f_{m-1}(k+1) + (1-a) f_{m-1}(k) - (1-a-b) f_{m-2}(k)

    with f_m(k) = 0 outside 0..m. The recurrence leaves f_m(0) undefined; {K_m = 0} is the
    single all-adsorbed path, so f_m(0) = (1-b) f_{m-1}(0).
    """
    if n < 1:
        raise InvalidStepCount(f"occupation_pmf needs n >= 1, got {n}")
    a, b = params.a, params.b
    pi_f, pi_a = params.initial

    f_prev = np.array([pi_a, pi_f])
    if n == 1:
        return OccupationPmf(1, f_prev)
    f_curr = np.array([pi_a * (1.0 - b), pi_a * b + pi_f * a, pi_f * (1.0 - a)])

    for m in range(3, n + 1):
        f_next = np.zeros(m + 1)
        f_next[0] = (1.0 - b) * f_curr[0]
        # k + 1 runs over 1..m; pad so every index exists
        curr_pad = np.append(f_curr, 0.0)
        prev_pad = np.append(f_prev, [0.0, 0.0])
        f_next[1:] = (
            (1.0 - b) * curr_pad[1:]
            + (1.0 - a) * curr_pad[:-1]
            - (1.0 - a - b) * prev_pad[:m]
        )
        f_prev, f_curr = f_curr, f_next

    # Round-off can leave tiny negatives where the exact value is 0
    f_curr = np.clip(f_curr, 0.0, None)
    log.debug(f"occupation_pmf: a={a} b={b} n={n} mass={f_curr.sum()!r}")
    return OccupationPmf(n, f_curr)


def occupation_pmf_enumerated(params: KineticsParams, n: int) -> OccupationPmf:
    """Law of K_n by summing over all 2^n state paths. Oracle for small n only."""
    if n < 1:
        raise InvalidStepCount(f"occupation_pmf_enumerated needs n >= 1, got {n}")
    if n > MAX_ENUMERATION_STEPS:
        raise InvalidStepCount(
            f"Path enumeration limited to n <= {MAX_ENUMERATION_STEPS}, got {n}"
        )
    pi_f, pi_a = params.initial
    matrix = transition_matrix(params)
    # matrix is indexed (free=0, adsorbed=1); paths use FREE=1/ADSORBED=0
    index = {FREE: 0, ADSORBED: 1}
    probs = np.zeros(n + 1)
    for path in itertools.product((ADSORBED, FREE), repeat=n):
        weight = pi_f if path[0] == FREE else pi_a
        for prev, nxt in zip(path, path[1:]):
            weight *= matrix[index[prev], index[nxt]]
            if weight == 0.0:
                break
        probs[sum(path)] += weight
    return OccupationPmf(n, probs)


def occupation_mean(pmf: OccupationPmf) -> float:
    """E[K_n]."""
    return float(np.dot(np.arange(pmf.n + 1), pmf.probs))


def occupation_variance(pmf: OccupationPmf) -> float:
    """Var(K_n)."""
    k = np.arange(pmf.n + 1)
    mean = float(np.dot(k, pmf.probs))
    return float(np.dot((k - mean) ** 2, pmf.probs))


@dataclass(frozen=True)
class ModeReport:
    """Local maxima of a 1-D mass function; each plateau of equal maxima counts once."""

    count: int
    locations: List[int]
    plateaus: List[Tuple[int, int]]


def count_modes(
    pmf: Union[OccupationPmf, Sequence[float], np.ndarray], tol: float = MODE_TOL
) -> ModeReport:
    """
    Count local maxima.

    A plateau is a run of entries within tol of its first entry, which is its level. A
    plateau is a mode when the levels of both neighbouring plateaus are lower by more than
    tol. The reported location of a mode is the left edge of its plateau.
    """
    values = pmf.probs if isinstance(pmf, OccupationPmf) else np.asarray(pmf, dtype=float)
    size = len(values)
    if size == 0:
        return ModeReport(0, [], [])

    plateaus: List[Tuple[int, int]] = []
    start = 0
    for i in range(1, size):
        if abs(values[i] - values[start]) > tol:
            plateaus.append((start, i - 1))
            start = i
    plateaus.append((start, size - 1))

    modes: List[Tuple[int, int]] = []
    for idx, (lo, hi) in enumerate(plateaus):
        level = values[lo]
        left_ok = idx == 0 or values[plateaus[idx - 1][0]] < level - tol
        right_ok = idx == len(plateaus) - 1 or values[plateaus[idx + 1][0]] < level - tol
        # A constant sequence has one plateau and no neighbours: it is a single mode
        if left_ok and right_ok:
            modes.append((lo, hi))
    return ModeReport(len(modes), [lo for lo, _ in modes], modes)


def check_normalization(pmf: OccupationPmf, tol: float = NORMALIZATION_TOL) -> bool:
    """True when all entries are >= 0 and the total mass is 1 within tol."""
    return bool(np.all(pmf.probs >= 0.0)) and abs(pmf.total() - 1.0) <= tol
