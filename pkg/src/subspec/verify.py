"""Quantitative acceptance checks, one per numbered criterion.

Each check recomputes a claim of the theory at desk scale and reports
the worst measured error against its stated tolerance.  The CLI command
``subspec verify`` drives these and emits a machine-readable report;
tests/test_acceptance.py runs the same registry under pytest.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import abelian, se2
from ._backend import backend_name
from .mathieu import (
    ALL_CLASSES,
    ParityClass,
    SpectralBranch,
    asymptotic_profile,
    count_zeros,
    dlambda_dq,
    solve_branch,
    solve_eigenvalues,
)
from .multipliers import gaussian


@dataclass
class CheckResult:
    criterion: int
    name: str
    suite: str
    passed: bool
    measured: float
    tolerance: float
    elapsed: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} criterion {self.criterion:2d} [{self.suite}] {self.name}: "
            f"measured {self.measured:.3e} vs tol {self.tolerance:.1e} ({self.elapsed:.1f}s)"
        )

    def as_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "suite": self.suite,
            "passed": bool(self.passed),
            "measured_error": float(self.measured),
            "tolerance": float(self.tolerance),
            "elapsed_seconds": round(float(self.elapsed), 3),
            "details": self.details,
        }


def _result(criterion, name, suite, measured, tolerance, t0, details=None, passed=None):
    elapsed = time.time() - t0
    if passed is None:
        passed = measured <= tolerance
    return CheckResult(
        criterion=criterion,
        name=name,
        suite=suite,
        passed=bool(passed),
        measured=float(measured),
        tolerance=float(tolerance),
        elapsed=elapsed,
        details=details or {},
    )


def check_q0_spectrum() -> CheckResult:
    """1: free spectrum (2k + i + |i-j|)^2 at q = 0, k <= 10."""
    t0 = time.time()
    worst = 0.0
    for pc in ALL_CLASSES:
        vals = solve_eigenvalues(0.0, pc, 10)
        expect = np.array([pc.lambda0(k) for k in range(11)])
        worst = max(worst, float(np.max(np.abs(vals - expect))))
    return _result(1, "q0-spectrum", "mathieu", worst, 1e-10, t0)


def check_lipschitz_monotone() -> CheckResult:
    """2: 0 <= lam(q') - lam(q) <= (q' - q) + 1e-9 on the [-50, 50] grid."""
    t0 = time.time()
    qs = np.arange(-50.0, 50.0 + 0.25, 0.5)
    worst = 0.0
    for pc in ALL_CLASSES:
        lams = np.array([solve_eigenvalues(float(q), pc, 3) for q in qs])
        for k in range(4):
            col = lams[:, k]
            dlam = col[None, :] - col[:, None]
            dq = qs[None, :] - qs[:, None]
            upper = np.triu_indices(qs.size, 1)
            viol_mono = float(np.max(np.maximum(0.0, -dlam[upper])))
            viol_lip = float(np.max(np.maximum(0.0, dlam[upper] - dq[upper])))
            worst = max(worst, viol_mono, viol_lip)
    return _result(2, "lipschitz-monotone", "mathieu", worst, 1e-9, t0)


def check_reflection() -> CheckResult:
    """3: lam_{(i,j)}(-q) = lam_{(|i-j|,j)}(q) - q."""
    t0 = time.time()
    worst = 0.0
    for q in (1.0, 7.3, 40.0):
        for pc in ALL_CLASSES:
            mirror = ParityClass(abs(pc.i - pc.j), pc.j)
            a = solve_eigenvalues(-q, pc, 3)
            b = solve_eigenvalues(q, mirror, 3) - q
            worst = max(worst, float(np.max(np.abs(a - b))))
    return _result(3, "reflection-symmetry", "mathieu", worst, 1e-9, t0)


def check_hellmann_feynman() -> CheckResult:
    """4: closed-form eigenvalue derivative vs central difference; q=0 ground values."""
    t0 = time.time()
    worst_rel = 0.0
    h = 1e-4
    for q in (0.5, 5.0, 50.0):
        for pc in ALL_CLASSES:
            pairs = solve_branch(q, pc, 3)
            up = [solve_eigenvalues(q + h, pc, 3), solve_eigenvalues(q - h, pc, 3)]
            for k, pair in enumerate(pairs):
                fd = (up[0][k] - up[1][k]) / (2.0 * h)
                worst_rel = max(worst_rel, abs(dlambda_dq(pair) - fd) / abs(fd))
    ground = {
        (0, 0): 0.5,
        (0, 1): 0.25,
        (1, 1): 0.75,
    }
    worst_abs = 0.0
    for (i, j), expect in ground.items():
        pair = solve_branch(0.0, ParityClass(i, j), 0)[0]
        worst_abs = max(worst_abs, abs(dlambda_dq(pair) - expect))
    passed = worst_rel < 1e-6 and worst_abs < 1e-10
    return _result(
        4,
        "hellmann-feynman",
        "mathieu",
        worst_rel,
        1e-6,
        t0,
        details={"ground_value_error": worst_abs, "ground_tolerance": 1e-10},
        passed=passed,
    )


def check_asymptotics() -> CheckResult:
    """5: lam/sqrt(q) -> 2(2k+i)+1 monotonically; q dlam/lam -> 1/2. Budget 30 s."""
    t0 = time.time()
    qs = [1e2, 1e3, 1e4, 1e5, 1e6]
    worst_dev = 0.0
    worst_der = 0.0
    monotone = True
    for pc in (ParityClass(0, 0), ParityClass(1, 0)):
        for k in (0, 1, 2):
            rows = asymptotic_profile(SpectralBranch(pc, k), qs)
            target = 2 * (2 * k + pc.i) + 1
            devs = [abs(r[1] - target) for r in rows]
            monotone = monotone and all(
                devs[i + 1] <= devs[i] + 1e-12 for i in range(len(devs) - 1)
            )
            worst_dev = max(worst_dev, devs[-1])
            worst_der = max(worst_der, abs(rows[-1][2] - 0.5))
    elapsed = time.time() - t0
    passed = worst_dev < 0.05 and worst_der < 0.05 and monotone and elapsed <= 30.0
    return _result(
        5,
        "large-q-asymptotics",
        "mathieu",
        max(worst_dev, worst_der),
        0.05,
        t0,
        details={
            "monotone_deviation": monotone,
            "derivative_ratio_error": worst_der,
            "runtime_budget_seconds": 30.0,
        },
        passed=passed,
    )


def check_zero_counts() -> CheckResult:
    """6: eigenfunction k of class (i,j) has 2(2k + i + |i-j|) zeros."""
    t0 = time.time()
    mismatches = 0
    for q in (0.1, 7.3, 50.0):
        for pc in ALL_CLASSES:
            pairs = solve_branch(q, pc, 5)
            for k, pair in enumerate(pairs):
                if count_zeros(pair) != pc.zero_count(k):
                    mismatches += 1
    return _result(6, "zero-counts", "mathieu", float(mismatches), 0.0, t0)


def check_normal_forms() -> CheckResult:
    """7: worked normal forms; invariance under orthogonal recombination; rejections."""
    t0 = time.time()
    nf1 = se2.normalize_sublaplacian([(1, 0, 0), (0, 0, 1)])
    nf2 = se2.normalize_sublaplacian([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    ok = (
        nf1.kind == "generic"
        and abs(nf1.alpha - 1.0) < 1e-12
        and abs(nf1.beta - 0.0) < 1e-12
        and nf2.kind == "elliptic"
        and abs(nf2.alpha - 1.0) < 1e-12
    )
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(24):
        j = int(rng.integers(2, 5))
        gens = rng.normal(size=(j, 3))
        gens[0, 0] += 1.5  # keep a rotation component
        base = se2.normalize_sublaplacian(gens)
        qmat = np.linalg.qr(rng.normal(size=(j, j)))[0]
        mixed = se2.normalize_sublaplacian(qmat @ gens)
        perm = se2.normalize_sublaplacian(gens[rng.permutation(j)])
        for other in (mixed, perm):
            ok = ok and other.kind == base.kind
            worst = max(worst, abs(other.alpha - base.alpha))
            if base.kind == "generic":
                worst = max(worst, abs(other.beta - base.beta))
    rejected = 0
    try:
        se2.normalize_sublaplacian([(0, 1, 0), (0, 0, 1)])
    except se2.AllHorizontalA:
        rejected += 1
    try:
        se2.normalize_sublaplacian([(1, 2, 0)])
    except se2.DegenerateForm:
        rejected += 1
    passed = ok and worst < 1e-12 and rejected == 2
    return _result(
        7,
        "se2-normal-form",
        "se2",
        worst,
        1e-12,
        t0,
        details={"worked_examples_ok": ok, "rejections": rejected},
        passed=passed,
    )


def check_bi_plancherel() -> CheckResult:
    """8: spectral-density integral equals the branch-sum r dr integral."""
    t0 = time.time()
    worst = 0.0
    table = {}
    for t in (0.5, 1.0, 2.0):
        for beta in (0.0, 0.2, 0.7, 2.0):
            lhs, rhs = se2.bi_plancherel_check(gaussian(t), beta)
            rel = abs(lhs - rhs) / abs(rhs)
            table[f"t={t},beta={beta}"] = rel
            worst = max(worst, rel)
    return _result(8, "bi-plancherel", "se2", worst, 1e-4, t0, details=table)


_SE2_GRIDS = {
    0.5: se2.GridSpec(radius=8.0, step=0.20, n_theta=48),
    1.0: se2.GridSpec(radius=8.0, step=0.26, n_theta=48),
    2.0: se2.GridSpec(radius=12.0, step=0.40, n_theta=48),
}


def _se2_kernel(cache: dict, t: float, c0: float):
    key = ("se2-kernel", t, c0)
    if key not in cache:
        form = se2.SE2NormalForm(kind="generic", alpha=1.0, beta=0.2)
        cache[key] = se2.synthesize_kernel(gaussian(t), form, _SE2_GRIDS[t], c0=c0)
    return cache[key]


def check_kernel_plancherel(cache: dict | None = None) -> CheckResult:
    """9: grid norm of the synthesized kernel vs the spectral integral; c0 stability."""
    t0 = time.time()
    cache = cache if cache is not None else {}
    c0_values = {}
    rels = {}
    for t in (1.0, 0.5, 2.0):
        kern = _se2_kernel(cache, t, se2.C0)
        F = gaussian(t)

        def f2(lam, F=F):
            v = np.asarray(F(lam), dtype=np.float64)
            return v * v

        sigma_side = se2.spectral_integral(f2, 0.2)
        norm = kern.l2_norm_sq()
        rels[f"t={t}"] = abs(norm - sigma_side) / sigma_side
        c0_values[f"t={t}"] = se2.C0 * math.sqrt(sigma_side / norm)
    drift = max(abs(v - c0_values["t=1.0"]) for v in c0_values.values())
    base_drift = abs(c0_values["t=1.0"] - se2.C0)
    passed = rels["t=1.0"] < 1e-3 and drift < 1e-3 and base_drift < 1e-3
    return _result(
        9,
        "se2-kernel-plancherel",
        "se2",
        max(rels.values()),
        1e-3,
        t0,
        details={"calibrated_c0": c0_values, "c0_drift": drift, "plancherel_rel": rels},
        passed=passed,
    )


def check_reconstruction(cache: dict | None = None) -> CheckResult:
    """10: multiplier round trip on the ground branch, plus evenness in r."""
    t0 = time.time()
    cache = cache if cache is not None else {}
    kern = _se2_kernel(cache, 1.0, se2.C0)
    F = gaussian(1.0)
    rec_p = se2.multiplier_reconstruct(kern, [0.5, 1.0, 2.0], 0.2)
    rec_m = se2.multiplier_reconstruct(kern, [-0.5, -1.0, -2.0], 0.2)
    worst = max(abs(fh - float(np.asarray(F(lam)))) for lam, fh in rec_p)
    even = max(abs(a[1] - b[1]) for a, b in zip(rec_p, rec_m))
    passed = worst < 1e-3 and even < 1e-10
    return _result(
        10,
        "se2-reconstruction",
        "se2",
        worst,
        1e-3,
        t0,
        details={"evenness_error": even, "evenness_tolerance": 1e-10},
        passed=passed,
    )


def check_rxt() -> CheckResult:
    """11: R x T Plancherel, chi normalisation, jump limits, orthogonality."""
    t0 = time.time()
    spec = abelian.AbelianSpec(1, 1, np.eye(1))
    F = gaussian(1.0)

    def f2(lam):
        v = np.asarray(F(lam), dtype=np.float64)
        return v * v

    kern = abelian.kernel_synthesize(F, spec, abelian.BoxGridSpec(radius=12.0, step=0.05, n_y=32))
    rel = abs(kern.l2_norm_sq() - abelian.sigma_integral(f2, spec)) / abelian.sigma_integral(
        f2, spec
    )
    chi_norm = max(
        abs(abelian.chi_rt(lam, 0.0, 0.0) - 1.0) for lam in np.linspace(0.05, 30.0, 173)
        if not float(lam).is_integer()
    )
    ys = np.arange(64) * (2.0 * math.pi / 64)
    # limit of the transform kernel from above at lam = h^2: cos(h y).
    # (The factor-2 variant printed in the source text contradicts the
    # kernel's own explicit formula; see the right-limit convergence test.)
    right = max(
        abs(abelian.chi_rt_right(h, 0.33, y) - math.cos(h * y)) for h in (1, 2, 3) for y in ys
    )
    eps_ladder = (1e-2, 1e-4, 1e-6)
    conv_ok = True
    for h in (1, 2, 3):
        sups = []
        for eps in eps_ladder:
            sups.append(
                max(abs(abelian.chi_rt(h * h + eps, 0.33, y) - abelian.chi_rt_right(h, 0.33, y)) for y in ys)
            )
        conv_ok = conv_ok and sups[0] > sups[1] > sups[2]
    ny = 2048
    yfine = np.arange(ny) * (2.0 * math.pi / ny)
    ortho = 0.0
    for h in (1, 2, 3):
        for x in (0.0, 0.9, 2.2):
            left = np.array([abelian.chi_rt_left(h, x, y) for y in yfine])
            rightv = np.array([abelian.chi_rt_right(h, x, y) for y in yfine])
            ortho = max(ortho, abs(float(np.sum(left * rightv)) * (2.0 * math.pi / ny)))
    passed = rel < 1e-5 and chi_norm < 1e-12 and right < 1e-6 and ortho < 1e-8 and conv_ok
    return _result(
        11,
        "rxt-kernel-transform",
        "abelian",
        rel,
        1e-5,
        t0,
        details={
            "chi_normalisation_error": chi_norm,
            "right_limit_error": right,
            "right_limit_converges": conv_ok,
            "one_sided_orthogonality": ortho,
        },
        passed=passed,
    )


def check_homogeneity() -> CheckResult:
    """12: dilation identity for the transform kernel on R^1 and R^2."""
    t0 = time.time()
    worst = 0.0
    table = {}
    for n in (1, 2):
        spec = abelian.AbelianSpec(n, 0)
        x = [0.7] if n == 1 else [0.6, 0.8]
        for t in (0.5, 2.0):
            lhs, rhs = abelian.chi_homogeneity_check(1.0, t, x, spec)
            diff = abs(lhs - rhs)
            table[f"n={n},t={t}"] = diff
            worst = max(worst, diff)
    return _result(12, "chi-homogeneity", "abelian", worst, 1e-6, t0, details=table)


SUITES = {
    "mathieu": [
        check_q0_spectrum,
        check_lipschitz_monotone,
        check_reflection,
        check_hellmann_feynman,
        check_asymptotics,
        check_zero_counts,
    ],
    "se2": [
        check_normal_forms,
        check_bi_plancherel,
        check_kernel_plancherel,
        check_reconstruction,
    ],
    "abelian": [check_rxt, check_homogeneity],
}


def run_suite(suite: str) -> list[CheckResult]:
    if suite == "all":
        names = ["mathieu", "se2", "abelian"]
    elif suite in SUITES:
        names = [suite]
    else:
        raise ValueError(f"unknown suite {suite!r}; pick all|mathieu|se2|abelian")
    cache: dict = {}
    results = []
    for name in names:
        for fn in SUITES[name]:
            if fn in (check_kernel_plancherel, check_reconstruction):
                results.append(fn(cache))
            else:
                results.append(fn())
    return results


def report_dict(results: list[CheckResult], suite: str) -> dict:
    return {
        "suite": suite,
        "backend": backend_name(),
        "all_passed": all(r.passed for r in results),
        "criteria": [r.as_json() for r in results],
    }
