"""
The verification module runs the exact engines against their independent oracles and against
the structural properties of the plume. Each check is described in CHECK_MAPPER_DICT; the
Verifier class calls them in registry order.

Notes
-----

The keys of CHECK_MAPPER_DICT are the check names accepted by `kplume-verify --only`. Values
describe how to run the check:

* "dispatch" : The Verifier method to call.
* "description" : One line shown by `kplume-verify --list-checks`.
* "tolerance" : Threshold the measured value is compared against.

Remaining keys are passed as kwargs to the dispatch method.

Examples
--------

>>> from kplume.verification import Verifier
>>> verifier = Verifier(only=["occupation", "symmetry"])
>>> results = verifier.run()
>>> verifier.passed
True
"""
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
from dataclasses import dataclass
import math
import os
import tempfile

import numpy as np

from kplume import log
from kplume.distributions import LatticePmf
from kplume.exceptions import ParameterException, VerificationFailure
from kplume.gaussian import (
    GaussianDispersion,
    GaussianModel,
    condvar_curve,
    grid,
    marginal_mass_deviation,
    monotone_domain,
    total_mass,
)
from kplume.kinetics import (
    START_ADSORBED,
    START_FREE,
    STATIONARY,
    KineticsParams,
    count_modes,
    occupation_mean,
    occupation_pmf,
    occupation_pmf_enumerated,
)
from kplume.kplume_globals import NORMALIZATION_TOL
from kplume.lattice import (
    AsymmetricWalkParams,
    FortyFive,
    NearestNeighbor,
    SimpleRW,
    check_conditional_symmetry,
    condvar_45,
    condvar_simple,
    nn_reduction_deviation,
)
from kplume.lattice.base_lattice import BaseLatticeModel
from kplume.montecarlo import SimulationConfig, concordance, simulate, total_variation

# (a, b) of the three columns of the published figures; stationary start, alpha = beta = 1/4
FIGURE_KINETICS = [(0.1, 0.9), (0.1, 0.1), (0.01, 0.01)]
FIGURE_N = 50
NN_FIGURE = {"a": 0.01, "b": 0.01, "xi": 0.2, "n": 25}
CANONICAL_INITS = [STATIONARY, START_FREE, START_ADSORBED]
FAULT_SIZE = 1e-6

# 'dispatch' key is the Verifier method to call. dispatch and description keys are popped off
# the dictionary; remaining keys are passed as kwargs to the dispatch method.
CHECK_MAPPER_DICT: Dict[str, Dict[str, Any]] = {
    "occupation": {
        "dispatch": "_check_occupation",
        "description": "Recurrence f_n equals 2^n-path enumeration (n <= 10)",
        "tolerance": 1e-13,
        "max_n": 10,
    },
    "normalization": {
        "dispatch": "_check_normalization",
        "description": "Lattice pmfs sum to 1; Gaussian atom plus quadrature mass is 1",
        "tolerance": 1e-10,
        "gaussian_tolerance": 1e-6,
    },
    "closed_vs_convolution": {
        "dispatch": "_check_closed_vs_convolution",
        "description": "Closed forms match the convolution engine (simple, ff45; n <= 30)",
        "tolerance": 1e-10,
        "samples": 5,
        "max_n": 30,
    },
    "symmetry": {
        "dispatch": "_check_symmetry",
        "description": "Var(n + x) = Var(n - x) for the simple walk when a + b = 1",
        "tolerance": 1e-9,
    },
    "asym_symmetry": {
        "dispatch": "_check_asym_symmetry",
        "description": "Asymmetric planar walk: conditional law symmetric in x (both routes)",
        "tolerance": 1e-12,
        "samples": 20,
        "max_n": 15,
    },
    "monotone_45": {
        "dispatch": "_check_monotone_45",
        "description": "Forty-five degree conditional variance is nondecreasing",
        "tolerance": 1e-10,
        "samples": 10,
        "max_n": 60,
    },
    "monotone_gauss": {
        "dispatch": "_check_monotone_gauss",
        "description": "Gaussian conditional variance is nondecreasing on a 0.01 grid over x >= 0",
        "tolerance": 1e-9,
        "grid_step": 0.01,
    },
    "non_monotone": {
        "dispatch": "_check_non_monotone",
        "description": "Simple-walk curve (a=b=0.01, n=50) dips",
        "tolerance": 1e-6,
    },
    "nn_reduction": {
        "dispatch": "_check_nn_reduction",
        "description": "Nearest-neighbour curve (xi=0.2, n=25) is 4 xi times the 45 degree one",
        "tolerance": 1e-10,
    },
    "double_peak": {
        "dispatch": "_check_double_peak",
        "description": "f_50 and the simple-walk x-marginal are multimodal for a=b=0.01",
        "tolerance": 2,
    },
    "total_variance": {
        "dispatch": "_check_total_variance",
        "description": "sum y^2 P(x, y) = Var(Y_1) E[K_n] for all lattice models",
        "tolerance": 1e-10,
    },
    "gauss_marginal": {
        "dispatch": "_check_gauss_marginal",
        "description": "Quadrature over y of the Gaussian density gives the 1-D mixture",
        "tolerance": 1e-8,
    },
    "mc_concordance": {
        "dispatch": "_check_mc_concordance",
        "description": "Monte Carlo vs exact simple-walk pmf: TV <= 0.02, variances within 4 SE",
        "tolerance": 0.02,
        "max_z": 4.0,
        "min_count": 1000,
    },
    "gauss_mc": {
        "dispatch": "_check_gauss_mc",
        "description": "Monte Carlo binned variances vs Gaussian curve on the continuous part",
        "tolerance": 5.0,
        "min_count": 1000,
    },
    "reproducibility": {
        "dispatch": "_check_reproducibility",
        "description": "Every CLI command replayed from its manifest gives identical bytes",
        "tolerance": 0,
    },
}

CHECK_MAPPER_BASE = list(CHECK_MAPPER_DICT.items())


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def figure_params(a: float, b: float) -> KineticsParams:
    return KineticsParams(a, b, STATIONARY)


def _perturbed(pmf: LatticePmf) -> LatticePmf:
    """Copy of pmf with its first cell off the x-axis (or its first cell) moved by FAULT_SIZE."""
    support = dict(pmf.support)
    off_axis = [point for point in sorted(support) if point[1] != 0]
    first = off_axis[0] if off_axis else min(support)
    support[first] += FAULT_SIZE
    return LatticePmf(pmf.n, support)


class Verifier(object):
    """
    Run the verification checks.

    Parameters
    ----------
    only : list of str, optional
        Check names to run; all checks when None.
    a, b : float
        Kinetics of the symmetry check (a + b must equal 1).
    particles : int
        Monte Carlo sample size.
    seed : int
        Seed for Monte Carlo runs and for the random parameter sets.
    inject_fault : bool
        Perturb one pmf cell by FAULT_SIZE before comparing; the run must then fail.

    Attributes
    ----------
    results : list of CheckResult
        Populated by run().
    """

    def __init__(
        self,
        only: Optional[Sequence[str]] = None,
        a: float = 0.1,
        b: float = 0.9,
        n: int = FIGURE_N,
        particles: int = 10 ** 6,
        seed: int = 2021,
        inject_fault: bool = False,
        workdir: Optional[str] = None,
    ) -> None:
        if only:
            unknown = [name for name in only if name not in CHECK_MAPPER_DICT]
            if unknown:
                raise ParameterException(
                    f"Unknown check(s) {unknown}; available: {list(CHECK_MAPPER_DICT)}"
                )
        self.only = list(only) if only else None
        self.a = a
        self.b = b
        self.n = n
        self.particles = particles
        self.seed = seed
        self.inject_fault = inject_fault
        self.workdir = workdir
        self.results: List[CheckResult] = []

    def run(self) -> List[CheckResult]:
        """Run the selected checks in registry order."""
        self.results = []
        for name, check_dict in CHECK_MAPPER_BASE:
            if self.only is not None and name not in self.only:
                continue
            tmp_dict = check_dict.copy()
            call_method = tmp_dict.pop("dispatch")
            tmp_dict.pop("description")
            check_method: Callable[..., CheckResult] = getattr(self, call_method)
            result = check_method(name=name, **tmp_dict)
            level = "debug" if result.passed else "warning"
            getattr(log, level)(
                f"verify {name}: passed={result.passed} value={result.value!r} "
                f"tolerance={result.tolerance!r} {result.detail}"
            )
            self.results.append(result)
        return self.results

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]

    def raise_on_failure(self) -> None:
        failed = self.failures()
        if failed:
            names = ", ".join(result.name for result in failed)
            raise VerificationFailure(f"Verification failed: {names}")

    def _rng(self, name: str) -> np.random.Generator:
        key = sum(ord(c) for c in name)
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(key,)))

    def _fault(self, pmf: LatticePmf) -> LatticePmf:
        return _perturbed(pmf) if self.inject_fault else pmf

    def _random_kinetics(self, rng: np.random.Generator) -> KineticsParams:
        a, b = rng.uniform(0.05, 0.95, size=2)
        init = CANONICAL_INITS[int(rng.integers(0, len(CANONICAL_INITS)))]
        return KineticsParams(float(a), float(b), init)

    def _check_occupation(self, name: str, tolerance: float, max_n: int) -> CheckResult:
        worst = 0.0
        for a in (0.1, 0.5, 0.9):
            for b in (0.1, 0.5, 0.9):
                for init in CANONICAL_INITS:
                    params = KineticsParams(a, b, init)
                    for n in range(1, max_n + 1):
                        exact = occupation_pmf(params, n).probs
                        paths = occupation_pmf_enumerated(params, n).probs
                        worst = max(worst, float(np.max(np.abs(exact - paths))))
        return CheckResult(name, worst <= tolerance, worst, tolerance)

    def _check_normalization(
        self, name: str, tolerance: float, gaussian_tolerance: float
    ) -> CheckResult:
        worst = 0.0
        models: List[Tuple[BaseLatticeModel, int]] = [
            (SimpleRW(0.25, 0.25), FIGURE_N),
            (FortyFive(0.25, 0.25), FIGURE_N),
            (NearestNeighbor(NN_FIGURE["xi"]), int(NN_FIGURE["n"])),
        ]
        for a, b in FIGURE_KINETICS:
            params = figure_params(a, b)
            for model, n in models:
                pmf = self._fault(model.joint_pmf(params, n))
                worst = max(worst, abs(pmf.total_mass() - 1.0))
        lattice_ok = worst <= tolerance
        gauss_worst = 0.0
        for a, b in FIGURE_KINETICS:
            model_g = GaussianModel(figure_params(a, b), 0.25, 0.25, FIGURE_N)
            gauss_worst = max(gauss_worst, abs(total_mass(model_g) - 1.0))
        passed = lattice_ok and gauss_worst <= gaussian_tolerance
        detail = f"lattice={worst!r} gaussian={gauss_worst!r}"
        return CheckResult(name, passed, worst, tolerance, detail)

    def _check_closed_vs_convolution(
        self, name: str, tolerance: float, samples: int, max_n: int
    ) -> CheckResult:
        rng = self._rng(name)
        worst = 0.0
        for i in range(samples):
            params = self._random_kinetics(rng)
            alpha = float(rng.uniform(0.0, 0.5))
            # The last sample always runs at the largest n
            n = max_n if i == samples - 1 else int(rng.integers(1, max_n + 1))
            for model in (SimpleRW(alpha, 0.5 - alpha), FortyFive(alpha, 0.5 - alpha)):
                closed = self._fault(model.joint_pmf(params, n))
                convolved = model.joint_pmf_convolution(params, n)
                worst = max(worst, closed.max_abs_diff(convolved))
        return CheckResult(name, worst <= tolerance, worst, tolerance)

    def _check_symmetry(self, name: str, tolerance: float) -> CheckResult:
        if abs(self.a + self.b - 1.0) > NORMALIZATION_TOL:
            raise ParameterException(
                f"The symmetry check needs a + b = 1, got a={self.a!r} b={self.b!r}"
            )
        curve = condvar_simple(figure_params(self.a, self.b), 0.25, 0.25, self.n)
        deviation = curve.reflection_deviation(self.n)
        detail = f"a={self.a!r} b={self.b!r} n={self.n}"
        return CheckResult(name, deviation <= tolerance, deviation, tolerance, detail)

    def _check_asym_symmetry(
        self, name: str, tolerance: float, samples: int, max_n: int
    ) -> CheckResult:
        rng = self._rng(name)
        worst = 0.0
        for _ in range(samples):
            probs = rng.dirichlet(np.ones(4))
            probs[3] = 1.0 - float(np.sum(probs[:3]))
            walk = AsymmetricWalkParams(*(float(p) for p in probs))
            n = int(rng.integers(1, max_n + 1))
            for method in ("closed", "convolution"):
                worst = max(worst, check_conditional_symmetry(walk, n, method))
        return CheckResult(name, worst <= tolerance, worst, tolerance)

    def _check_monotone_45(
        self, name: str, tolerance: float, samples: int, max_n: int
    ) -> CheckResult:
        cases: List[Tuple[KineticsParams, float, int]] = [
            (figure_params(a, b), 0.25, FIGURE_N) for a, b in FIGURE_KINETICS
        ]
        rng = self._rng(name)
        for _ in range(samples):
            cases.append(
                (
                    self._random_kinetics(rng),
                    float(rng.uniform(0.0, 0.5)),
                    int(rng.integers(1, max_n + 1)),
                )
            )
        worst = 0.0
        for params, alpha, n in cases:
            curve = condvar_45(params, alpha, 0.5 - alpha, n)
            worst = max(worst, curve.monotonicity_violation())
        return CheckResult(name, worst <= tolerance, worst, tolerance)

    def _check_monotone_gauss(self, name: str, tolerance: float, grid_step: float) -> CheckResult:
        worst = 0.0
        for a, b in FIGURE_KINETICS:
            model = GaussianModel(figure_params(a, b), 0.25, 0.25, FIGURE_N)
            curve = condvar_curve(model, grid(model, grid_step, monotone_domain(model)))
            worst = max(worst, curve.monotonicity_violation())
        return CheckResult(name, worst <= tolerance, worst, tolerance)

    def _check_non_monotone(self, name: str, tolerance: float) -> CheckResult:
        simple = condvar_simple(figure_params(0.01, 0.01), 0.25, 0.25, FIGURE_N)
        dip = simple.find_dip(tolerance)
        if dip is None:
            return CheckResult(name, False, simple.monotonicity_violation(), tolerance)
        hi, lo = dip
        detail = f"Var({hi.x})={hi.cond_var:.6g} > Var({lo.x})={lo.cond_var:.6g}"
        return CheckResult(name, True, hi.cond_var - lo.cond_var, tolerance, detail)

    def _check_nn_reduction(self, name: str, tolerance: float) -> CheckResult:
        xi, n = NN_FIGURE["xi"], int(NN_FIGURE["n"])
        params = figure_params(NN_FIGURE["a"], NN_FIGURE["b"])
        nearest = NearestNeighbor(xi).condvar(params, n)
        diagonal = condvar_45(params, 0.25, 0.25, n)
        worst = nn_reduction_deviation(nearest, diagonal, xi)
        violation = nearest.monotonicity_violation()
        detail = f"columns={len(nearest)} monotonicity_violation={violation:.3g}"
        return CheckResult(name, worst <= tolerance, worst, tolerance, detail)

    def _check_double_peak(self, name: str, tolerance: float) -> CheckResult:
        params = figure_params(0.01, 0.01)
        occupation_modes = count_modes(occupation_pmf(params, FIGURE_N))
        plume_modes = SimpleRW(0.25, 0.25).joint_pmf(params, FIGURE_N).local_maxima_x()
        value = min(occupation_modes.count, plume_modes.count)
        detail = (
            f"f_n modes at {occupation_modes.locations}; x-marginal modes at "
            f"{plume_modes.locations}"
        )
        return CheckResult(name, value >= tolerance, float(value), tolerance, detail)

    def _check_total_variance(self, name: str, tolerance: float) -> CheckResult:
        worst = 0.0
        models: List[Tuple[BaseLatticeModel, int]] = [
            (SimpleRW(0.25, 0.25), FIGURE_N),
            (FortyFive(0.25, 0.25), FIGURE_N),
            (NearestNeighbor(NN_FIGURE["xi"]), int(NN_FIGURE["n"])),
        ]
        for a, b in FIGURE_KINETICS:
            params = figure_params(a, b)
            for model, n in models:
                pmf = self._fault(model.joint_pmf(params, n))
                expected = model.lateral_variance() * occupation_mean(occupation_pmf(params, n))
                worst = max(worst, abs(pmf.second_moment_y() - expected))
        return CheckResult(name, worst <= tolerance, worst, tolerance)

    def _check_gauss_marginal(self, name: str, tolerance: float) -> CheckResult:
        worst = 0.0
        for a, b in FIGURE_KINETICS:
            model = GaussianModel(figure_params(a, b), 0.25, 0.25, FIGURE_N)
            for x in (-2.0, 0.5, 10.0, 25.0, 49.5, 60.0):
                worst = max(worst, marginal_mass_deviation(model, x))
        return CheckResult(name, worst <= tolerance, worst, tolerance)

    def _check_mc_concordance(
        self, name: str, tolerance: float, max_z: float, min_count: int
    ) -> CheckResult:
        model = SimpleRW(0.25, 0.25)
        worst_tv = 0.0
        worst_z = 0.0
        for a, b in FIGURE_KINETICS:
            params = figure_params(a, b)
            exact = self._fault(model.joint_pmf(params, FIGURE_N))
            config = SimulationConfig(model, params, FIGURE_N, self.particles, self.seed)
            summary = simulate(config)
            worst_tv = max(worst_tv, total_variation(summary, exact))
            curve = condvar_simple(params, 0.25, 0.25, FIGURE_N)
            worst_z = max(worst_z, concordance(summary, curve, min_count))
        passed = worst_tv <= tolerance and worst_z <= max_z
        detail = f"tv={worst_tv!r} worst_z={worst_z!r} particles={self.particles}"
        return CheckResult(name, passed, worst_tv, tolerance, detail)

    def _check_gauss_mc(self, name: str, tolerance: float, min_count: int) -> CheckResult:
        params = figure_params(0.1, 0.1)
        config = SimulationConfig(
            GaussianDispersion(0.25, 0.25), params, 10, self.particles, self.seed
        )
        summary = simulate(config)
        model = GaussianModel(params, 0.25, 0.25, 10)
        xs = [row.x for row in summary.column_stats() if row.count >= min_count]
        continuous = condvar_curve(model, xs, atom_factor=False)
        as_displayed = condvar_curve(model, xs, atom_factor=True)
        worst_z = concordance(summary, continuous, min_count)
        displayed_z = concordance(summary, as_displayed, min_count)
        if displayed_z > tolerance:
            log.warning(
                f"Gaussian conditional variance with the (1 - f_n(0)) prefactor departs from "
                f"simulation by {displayed_z:.3g} standard errors; without it by {worst_z:.3g}"
            )
        detail = f"worst_z={worst_z!r} with_prefactor_z={displayed_z!r} bins={len(xs)}"
        return CheckResult(name, worst_z <= tolerance, worst_z, tolerance, detail)

    def _check_reproducibility(self, name: str, tolerance: float) -> CheckResult:
        from kplume.cli_tools import kplume_condvar, kplume_kinetics, kplume_mc, kplume_pmf

        commands: List[Tuple[str, Any, List[str]]] = [
            ("kinetics", kplume_kinetics, ["--a", "0.1", "--b", "0.9", "--n", "50"]),
            (
                "pmf",
                kplume_pmf,
                ["--model", "simple", "--n", "20", "--a", "0.1", "--b", "0.1"],
            ),
            (
                "condvar",
                kplume_condvar,
                ["--model", "gauss", "--n", "20", "--a", "0.1", "--b", "0.1"],
            ),
            (
                "mc",
                kplume_mc,
                ["--model", "ff45", "--n", "10", "--a", "0.3", "--b", "0.2",
                 "--particles", "20000", "--seed", str(self.seed)],
            ),
        ]
        mismatched = []
        with tempfile.TemporaryDirectory(dir=self.workdir) as tmp_dir:
            for label, module, argv in commands:
                first = os.path.join(tmp_dir, f"{label}_first.csv")
                second = os.path.join(tmp_dir, f"{label}_second.csv")
                if module.main(argv + ["--out", first]) != 0:
                    mismatched.append(f"{label}: first run failed")
                    continue
                replay = ["--from-manifest", f"{first}.manifest.json", "--out", second]
                if module.main(replay) != 0:
                    mismatched.append(f"{label}: replay failed")
                    continue
                with open(first, "rb") as f1, open(second, "rb") as f2:
                    if f1.read() != f2.read():
                        mismatched.append(label)
        detail = ", ".join(mismatched) if mismatched else "all outputs identical"
        return CheckResult(name, not mismatched, float(len(mismatched)), tolerance, detail)


def list_checks() -> List[Tuple[str, str]]:
    return [(name, check["description"]) for name, check in CHECK_MAPPER_BASE]


def format_report(results: Sequence[CheckResult]) -> str:
    width = max((len(result.name) for result in results), default=10)
    lines = []
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        value = result.value if math.isfinite(result.value) else float("inf")
        lines.append(
            f"{status}  {result.name:<{width}}  value={value:.3g}  tol={result.tolerance:.3g}"
            + (f"  {result.detail}" if result.detail else "")
        )
    passed = sum(result.passed for result in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)
