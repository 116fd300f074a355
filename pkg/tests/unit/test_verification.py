#!/usr/bin/env python
import logging

import pytest

from kplume.exceptions import ParameterException, VerificationFailure
from kplume.verification import (
    CHECK_MAPPER_DICT,
    CheckResult,
    Verifier,
    format_report,
    list_checks,
)

FAST_CHECKS = [
    "occupation",
    "closed_vs_convolution",
    "symmetry",
    "asym_symmetry",
    "monotone_45",
    "non_monotone",
    "nn_reduction",
    "double_peak",
    "total_variance",
]


def test_registry_layout():
    """Every entry names a Verifier method and carries a description and a tolerance"""
    for name, check in CHECK_MAPPER_DICT.items():
        assert hasattr(Verifier, check["dispatch"]), name
        assert check["description"]
        assert "tolerance" in check
    assert [name for name, _ in list_checks()] == list(CHECK_MAPPER_DICT)


@pytest.mark.parametrize("name", FAST_CHECKS)
def test_fast_checks_pass(name):
    verifier = Verifier(only=[name])
    results = verifier.run()
    assert [result.name for result in results] == [name]
    assert verifier.passed, format_report(results)


@pytest.mark.parametrize("name", ["closed_vs_convolution", "total_variance"])
def test_injected_fault_is_caught(name):
    verifier = Verifier(only=[name], inject_fault=True)
    verifier.run()
    assert not verifier.passed
    with pytest.raises(VerificationFailure):
        verifier.raise_on_failure()


def test_registry_order():
    verifier = Verifier(only=["symmetry", "occupation"])
    assert [result.name for result in verifier.run()] == ["occupation", "symmetry"]


def test_unknown_check():
    with pytest.raises(ParameterException):
        Verifier(only=["occupation", "telepathy"])


def test_symmetry_needs_iid_chain():
    with pytest.raises(ParameterException):
        Verifier(only=["symmetry"], a=0.1, b=0.1).run()


def test_reproducibility(tmp_path):
    verifier = Verifier(only=["reproducibility"], workdir=str(tmp_path))
    verifier.run()
    assert verifier.passed, format_report(verifier.results)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["normalization", "monotone_gauss", "gauss_marginal"])
def test_gaussian_checks_pass(name):
    verifier = Verifier(only=[name])
    verifier.run()
    assert verifier.passed, format_report(verifier.results)


@pytest.mark.slow
def test_monte_carlo_checks_pass(caplog):
    """The (1 - f_n(0)) prefactor version disagrees with the simulation and says so"""
    verifier = Verifier(only=["mc_concordance", "gauss_mc"], particles=10 ** 6)
    with caplog.at_level(logging.WARNING, logger="kplume"):
        verifier.run()
    assert verifier.passed, format_report(verifier.results)
    assert any("prefactor" in record.getMessage() for record in caplog.records)


def test_format_report():
    results = [
        CheckResult("occupation", True, 1e-16, 1e-13),
        CheckResult("symmetry", False, 0.5, 1e-9, "a=0.1 b=0.9 n=50"),
    ]
    report = format_report(results)
    lines = report.splitlines()
    assert lines[0].startswith("PASS  occupation")
    assert lines[1].startswith("FAIL  symmetry")
    assert lines[1].endswith("a=0.1 b=0.9 n=50")
    assert lines[-1] == "1/2 checks passed"


def test_check_result_as_dict():
    result = CheckResult("occupation", True, 0.0, 1e-13)
    assert result.as_dict() == {
        "name": "occupation",
        "passed": True,
        "value": 0.0,
        "tolerance": 1e-13,
        "detail": "",
    }
