"""Acceptance criteria, one test per numbered criterion.

The full verification suite is executed once through the real CLI
(`subspec verify --suite all`), which writes the machine-readable
report; each criterion test then asserts its entry and prints the
pass/fail line with the measured error.  Criterion 13 is the CLI gate
itself: exit code 0 and a complete report.

Criteria and their tolerances:
  1  q=0 spectrum ........................ abs 1e-10
  2  Lipschitz + monotone in q ........... slack 1e-9
  3  reflection symmetry ................. abs 1e-9
  4  eigenvalue derivative (HF) .......... rel 1e-6 (q=0 values abs 1e-10)
  5  large-q asymptotics ................. 0.05, monotone, <= 30 s
  6  zero counts ......................... exact
  7  normal forms ........................ 1e-12 + correct rejections
  8  bi-Plancherel ....................... rel 1e-4
  9  kernel Plancherel + c0 stability .... rel 1e-3
  10 reconstruction round trip ........... abs 1e-3 (evenness 1e-10)
  11 R x T transform kernel .............. rel 1e-5 / 1e-12 / 1e-6 / 1e-8
  12 homogeneity on R^n .................. 1e-6
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

REPORT = Path(__file__).resolve().parent / "_acceptance_report.json"

TOLERANCES = {
    1: 1e-10,
    2: 1e-9,
    3: 1e-9,
    4: 1e-6,
    5: 0.05,
    6: 0.0,
    7: 1e-12,
    8: 1e-4,
    9: 1e-3,
    10: 1e-3,
    11: 1e-5,
    12: 1e-6,
}


@pytest.fixture(scope="module")
def suite_run():
    proc = subprocess.run(
        [sys.executable, "-m", "subspec.cli", "verify", "--suite", "all", "--report", str(REPORT)],
        capture_output=True,
        text=True,
        timeout=2400,
    )
    assert REPORT.exists(), f"verify produced no report; stdout:\n{proc.stdout}\nstderr:\n{proc.stderr}"
    report = json.loads(REPORT.read_text())
    return proc, report


def _criterion(report, cid):
    for entry in report["criteria"]:
        if entry["criterion"] == cid:
            return entry
    raise AssertionError(f"criterion {cid} missing from report")


def _check(report, cid):
    entry = _criterion(report, cid)
    status = "PASS" if entry["passed"] else "FAIL"
    print(
        f"criterion {cid:2d} {status}: {entry['name']} "
        f"measured={entry['measured_error']:.3e} tol={entry['tolerance']:.1e}"
    )
    assert entry["tolerance"] == pytest.approx(TOLERANCES[cid])
    assert entry["passed"], f"criterion {cid} failed: {entry}"
    return entry


def test_criterion_01_q0_spectrum(suite_run):
    _check(suite_run[1], 1)


def test_criterion_02_lipschitz_monotone(suite_run):
    _check(suite_run[1], 2)


def test_criterion_03_reflection_symmetry(suite_run):
    _check(suite_run[1], 3)


def test_criterion_04_hellmann_feynman(suite_run):
    entry = _check(suite_run[1], 4)
    assert entry["details"]["ground_value_error"] < 1e-10


def test_criterion_05_asymptotics(suite_run):
    entry = _check(suite_run[1], 5)
    assert entry["details"]["monotone_deviation"] is True
    assert entry["details"]["derivative_ratio_error"] < 0.05
    assert entry["elapsed_seconds"] <= 30.0


def test_criterion_06_zero_counts(suite_run):
    _check(suite_run[1], 6)


def test_criterion_07_normal_forms(suite_run):
    entry = _check(suite_run[1], 7)
    assert entry["details"]["worked_examples_ok"] is True
    assert entry["details"]["rejections"] == 2


def test_criterion_08_bi_plancherel(suite_run):
    entry = _check(suite_run[1], 8)
    assert len(entry["details"]) == 12  # t in {0.5,1,2} x beta in {0,0.2,0.7,2}


def test_criterion_09_kernel_plancherel(suite_run):
    entry = _check(suite_run[1], 9)
    assert entry["details"]["c0_drift"] < 1e-3


def test_criterion_10_reconstruction(suite_run):
    entry = _check(suite_run[1], 10)
    assert entry["details"]["evenness_error"] < 1e-10


def test_criterion_11_rxt_transform(suite_run):
    entry = _check(suite_run[1], 11)
    d = entry["details"]
    assert d["chi_normalisation_error"] < 1e-12
    assert d["right_limit_error"] < 1e-6
    assert d["right_limit_converges"] is True
    assert d["one_sided_orthogonality"] < 1e-8


def test_criterion_12_homogeneity(suite_run):
    _check(suite_run[1], 12)


def test_criterion_13_verify_cli_gate(suite_run):
    proc, report = suite_run
    print(f"criterion 13 {'PASS' if proc.returncode == 0 else 'FAIL'}: verify --suite all exit code {proc.returncode}")
    assert proc.returncode == 0, proc.stdout
    assert report["all_passed"] is True
    listed = sorted(c["criterion"] for c in report["criteria"])
    assert listed == list(range(1, 13))
    for entry in report["criteria"]:
        assert "measured_error" in entry and "tolerance" in entry
