"""Sub-Laplacian calculus on the plane motion group SE(2).

A sub-Laplacian built from generators ``X_j = a_j T + b_j X + c_j Y`` is
classified, up to group automorphism and rescaling, into one of two
normal forms: a generic one ``-(T^2 + Y^2 + beta (X^2 + Y^2))/alpha`` or
an elliptic one ``-(T^2 + X^2 + Y^2)/alpha`` (the latter is a flat
Laplacian on C x T and is handled by the abelian module).

In the family of irreducible representations indexed by r > 0 the
generic operator acts as the parity-split circle operator of
:mod:`subspec.mathieu` at potential strength q = r^2, shifted by
beta r^2.  Everything quantitative below flows from the resulting
branch maps psi(q) = lam_k(q) + beta q: the spectral (Plancherel)
density on [0, oo), synthesis of convolution kernels from multipliers,
reconstruction of multipliers from kernels, and the consistency check
between the spectral-side and group-side Plancherel integrals.

Measure conventions: eigenfunctions are unit vectors in L^2 of the
circle with flat measure dphi on [0, 2pi); kernels are integrated
against dx dy dtheta / (2pi)^2.  Under these conventions the inversion
constant ``C0`` is exactly 1; it is still calibrated numerically (see
``calibrate_c0``) and the calibration is asserted stable across
multipliers by the verification suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grids import KernelGrid, box_grid, circle_grid
from .mathieu import (
    ALL_CLASSES,
    DEFAULT_TRUNCATION,
    MathieuEigenpair,
    ParityClass,
    SpectralBranch,
    TruncationConfig,
    dlambda_dq,
    eval_eigenfunction,
    solve_branch,
    solve_eigenvalues,
)
from .multipliers import Multiplier, sup_on_tail, support_cut
from .numerics import brent_root, expand_bracket, gauss_legendre_panels, integrate_piecewise, integrate_until_stable

TWO_PI = 2.0 * math.pi

# Group-Fourier inversion constant for the measure conventions above.
# Analytically 1; the verification suite recalibrates it from the
# Plancherel identity on a Gaussian multiplier and fails on drift > 1e-3.
C0 = 1.0


class NotASubLaplacian(ValueError):
    """The generator list does not define a hypoelliptic sub-Laplacian."""


class AllHorizontalA(NotASubLaplacian):
    """Every generator has vanishing rotation component."""


class DegenerateForm(NotASubLaplacian):
    """The translation-part quadratic form vanishes identically."""


@dataclass(frozen=True)
class SE2NormalForm:
    """Classification result: kind 'generic' (alpha, beta) or 'elliptic' (alpha)."""

    kind: str
    alpha: float
    beta: float | None = None

    def __post_init__(self):
        if self.kind not in ("generic", "elliptic"):
            raise ValueError(f"unknown normal form kind {self.kind!r}")
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.kind == "generic" and (self.beta is None or self.beta < 0.0):
            raise ValueError("generic form needs beta >= 0")
        if self.kind == "elliptic" and self.beta is not None:
            raise ValueError("elliptic form carries no beta")


def normalize_sublaplacian(gens: Sequence[Sequence[float]]) -> SE2NormalForm:
    """Run the classification constructively on generator triples (a, b, c).

    Rescales so the rotation components have unit square sum (the factor
    goes into alpha), splits off the drift, and diagonalises the
    positive-semidefinite translation form; the gap between its
    eigenvalues b <= c decides elliptic (b = c) versus generic
    (beta = b/(c-b)).
    """
    arr = np.asarray(gens, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] == 0:
        raise ValueError("generators must be a nonempty list of (a, b, c) triples")
    total = float(np.linalg.norm(arr))
    if total == 0.0:
        raise AllHorizontalA("all generators vanish; no rotation component at all")
    a = arr[:, 0]
    s2 = float(np.dot(a, a))
    if s2 <= (1e-14 * total) ** 2:
        raise AllHorizontalA(
            "every generator has zero rotation component, so the fields and their "
            "brackets stay inside the translation plane and the operator is not hypoelliptic"
        )
    s = math.sqrt(s2)
    an = a / s
    u = arr[:, 1:] / s
    form = u.T @ u - np.outer(an @ u, an @ u)
    form = 0.5 * (form + form.T)
    evals = np.linalg.eigvalsh(form)
    b, c = float(evals[0]), float(evals[1])
    b = max(b, 0.0)
    trace = b + c
    if c <= 1e-14 * max(1.0, float(np.sum(u * u))):
        raise DegenerateForm(
            "the translation quadratic form vanishes: all generators are parallel to a "
            "single drifted rotation field, whose brackets do not span the group"
        )
    alpha = 1.0 / s2
    if (c - b) < 1e-10 * trace:
        return SE2NormalForm(kind="elliptic", alpha=alpha)
    return SE2NormalForm(kind="generic", alpha=alpha, beta=b / (c - b))


def enumerate_branches(beta: float, lam_cut: float, per_class: int = 64) -> list[SpectralBranch]:
    """Branches with starting eigenvalue below lam_cut, in deterministic order."""
    out = []
    for pc in ALL_CLASSES:
        for k in range(per_class):
            if pc.lambda0(k) < lam_cut:
                out.append(SpectralBranch(pc, k, beta))
            else:
                break
    return out


def psi(q: float, branch: SpectralBranch, cfg: TruncationConfig = DEFAULT_TRUNCATION) -> float:
    """Branch map lam_k(q) + beta q."""
    if q < 0.0:
        raise ValueError(f"branch map is defined for q >= 0, got {q}")
    lam = float(solve_eigenvalues(q, branch.parity, branch.k, cfg)[branch.k])
    return lam + branch.beta * q


def psi_prime(q: float, branch: SpectralBranch, cfg: TruncationConfig = DEFAULT_TRUNCATION) -> float:
    """Derivative of the branch map; always in (beta, beta + 1]."""
    if q < 0.0:
        raise ValueError(f"branch map is defined for q >= 0, got {q}")
    pair = solve_branch(q, branch.parity, branch.k, cfg)[branch.k]
    return dlambda_dq(pair) + branch.beta


def psi_inverse(
    lam: float,
    branch: SpectralBranch,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
    rtol: float = 1e-12,
) -> float:
    """Unique q >= 0 with psi(q) = lam, by bracketed root finding.

    The bracket comes from lam0 + beta q <= psi(q) <= lam0 + (1+beta) q;
    for beta = 0 the upper end grows geometrically until it crosses.
    """
    lam0 = branch.lambda0
    if lam < lam0 - 1e-9 * max(1.0, abs(lam0)):
        raise ValueError(f"lambda={lam} below branch start {lam0}")
    if lam <= lam0:
        return 0.0

    def f(q: float) -> float:
        return psi(q, branch, cfg) - lam

    lo = (lam - lam0) / (1.0 + branch.beta)
    if branch.beta > 0.0:
        hi = (lam - lam0) / branch.beta
    else:
        lo_start = max(lo, 1e-300)
        lo, hi = expand_bracket(f, lo_start, max(2.0 * lo_start, 1.0))
        if lo == hi:
            return lo
    return brent_root(f, lo, hi, rtol=rtol)


def contributing_branches(lam: float, beta: float) -> list[SpectralBranch]:
    return enumerate_branches(beta, lam)


def plancherel_density(
    lam: float, beta: float, cfg: TruncationConfig = DEFAULT_TRUNCATION
) -> float:
    """Density of the spectral Plancherel measure at lam > 0.

    Sums 1/(2 psi') over the branches whose starting eigenvalue lies
    strictly below lam; the enumeration terminates because the starting
    values grow quadratically with the branch index.
    """
    if lam <= 0.0:
        raise ValueError(f"plancherel density is defined for lambda > 0, got {lam}")
    total = 0.0
    for branch in contributing_branches(lam, beta):
        q = psi_inverse(lam, branch, cfg)
        pair = solve_branch(q, branch.parity, branch.k, cfg)[branch.k]
        total += 0.5 / (dlambda_dq(pair) + beta)
    return total


def matrix_coefficient(
    r: float,
    g: tuple[complex, float],
    pair: MathieuEigenpair,
) -> complex:
    """Diagonal matrix coefficient of the representation at parameter r.

    Trapezoidal quadrature over the circle; the node count scales with
    the phase oscillation r|z| and is spectrally accurate for these
    periodic integrands.
    """
    z, theta = complex(g[0]), float(g[1])
    n_phi = max(256, 8 * int(math.ceil(abs(r) * abs(z))) if z != 0 else 256)
    phi = circle_grid(n_phi)
    h = eval_eigenfunction(pair, phi)
    h_shift = eval_eigenfunction(pair, phi + theta)
    phase = np.exp(1j * r * (z.real * np.cos(phi) - z.imag * np.sin(phi)))
    return complex(np.sum(phase * h_shift * h) * (TWO_PI / n_phi))


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the synthesis grid: (x, y) box plus uniform circle in theta."""

    radius: float
    step: float
    n_theta: int = 64

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = box_grid(self.radius, self.step)
        return x, x.copy(), circle_grid(self.n_theta)


@dataclass(frozen=True)
class RQuadSpec:
    """Radial quadrature policy: GL panels on [0, R], doubled until stable."""

    panels: int = 6
    order: int = 20
    max_doublings: int = 3
    probe_tol: float = 1e-8


class _BranchTable:
    """Per-call cache of eigen data for the branch sum at each radial node."""

    def __init__(self, branches: list[SpectralBranch], cfg: TruncationConfig):
        self.cfg = cfg
        self.by_class: dict[ParityClass, int] = {}
        for b in branches:
            self.by_class[b.parity] = max(self.by_class.get(b.parity, -1), b.k)
        self.branches = branches
        self._cache: dict[tuple[float, ParityClass], list[MathieuEigenpair]] = {}

    def pairs_at(self, q: float, parity: ParityClass) -> list[MathieuEigenpair]:
        key = (q, parity)
        if key not in self._cache:
            self._cache[key] = solve_branch(q, parity, self.by_class[parity], self.cfg)
        return self._cache[key]


def _branch_windows(
    branches: list[SpectralBranch],
    lam_cut: float,
    cfg: TruncationConfig,
) -> dict[SpectralBranch, float]:
    """Largest r per branch with the multiplier still above the tail cut."""
    windows = {}
    for b in branches:
        if b.lambda0 >= lam_cut:
            continue
        windows[b] = math.sqrt(psi_inverse(lam_cut, b, cfg))
    return windows


def synthesize_kernel(
    F: Multiplier,
    form: SE2NormalForm,
    grid: GridSpec,
    branch_cut: int = 8,
    r_quad: RQuadSpec = RQuadSpec(),
    c0: float = C0,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
    tail_tol: float = 1e-12,
) -> KernelGrid:
    """Convolution kernel of F applied to the normal-form sub-Laplacian.

    Integrates the branch sum of multiplier values times diagonal matrix
    coefficients against r dr, truncating branches by the multiplier
    tail and the radial integral at the point where the slowest branch
    map exits the multiplier support.
    """
    if form.kind != "generic":
        raise ValueError(
            "elliptic normal form is a flat Laplacian on C x T; synthesize it with "
            "the abelian module (n=2, m=1, A=identity)"
        )
    beta = float(form.beta)
    try:
        lam_cut = support_cut(F, tol=tail_tol)
    except ValueError as exc:
        raise ValueError(f"refusing non-decaying multiplier: {exc}") from exc
    branches = [
        b
        for b in enumerate_branches(beta, lam_cut, per_class=branch_cut)
        if sup_on_tail(F, b.lambda0, lam_cut) >= tail_tol
    ]
    if not branches:
        raise ValueError("multiplier support lies below every branch start")
    windows = _branch_windows(branches, lam_cut, cfg)
    r_max = max(windows.values())
    table = _BranchTable(branches, cfg)

    x, y, theta = grid.axes()
    n_theta = theta.size
    q_max = r_max * r_max
    z_max = math.hypot(float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    f_eff = 2.0 * math.sqrt(q_max) + 30.0
    need = max(256.0, 2.6 * (r_max * z_max + 2.0 * f_eff))
    n_phi = n_theta * int(math.ceil(need / n_theta))
    phi = circle_grid(n_phi)
    stride = n_phi // n_theta
    dphi = TWO_PI / n_phi

    shift_idx = (np.arange(n_phi)[:, None] + stride * np.arange(n_theta)[None, :]) % n_phi

    def field(xs: np.ndarray, ys: np.ndarray, panels: int) -> np.ndarray:
        nodes, weights = gauss_legendre_panels(0.0, r_max, panels, r_quad.order)
        acc = np.zeros((xs.size, ys.size, n_theta), dtype=np.complex128)
        for r, w in zip(nodes, weights):
            q = r * r
            # branch sum first: w_mat[n, s] = sum_b coeff_b H_b(phi_n) H_b(phi_n + theta_s)
            w_mat = np.zeros((n_phi, n_theta))
            touched = False
            for pc in table.by_class:
                if all(windows[b] < r for b in branches if b.parity == pc):
                    continue
                pairs = table.pairs_at(q, pc)
                for b in (bb for bb in branches if bb.parity == pc):
                    if windows[b] < r:
                        continue
                    pair = pairs[b.k]
                    fb = float(np.asarray(F(pair.lam + beta * q)))
                    if abs(fb) < 1e-15:
                        continue
                    hgrid = eval_eigenfunction(pair, phi)
                    w_mat += (w * r * fb) * (hgrid[:, None] * hgrid[shift_idx])
                    touched = True
            if not touched:
                continue
            ax = np.exp(1j * r * np.multiply.outer(xs, np.cos(phi)))
            by = np.exp(-1j * r * np.multiply.outer(np.sin(phi), ys))
            t1 = (by[:, :, None] * w_mat[:, None, :]).reshape(n_phi, ys.size * n_theta)
            acc += (ax @ t1).reshape(xs.size, ys.size, n_theta)
        return (c0 * dphi) * acc

    # settle the radial panel count on a coarse (x, y) probe subgrid
    panels = r_quad.panels
    sub = slice(None, None, max(1, x.size // 9))
    probe_prev = field(x[sub], y[sub], panels)
    for _ in range(r_quad.max_doublings):
        probe_new = field(x[sub], y[sub], 2 * panels)
        drift = float(np.max(np.abs(probe_new - probe_prev)))
        if drift < r_quad.probe_tol:
            break
        panels *= 2
        probe_prev = probe_new

    values = field(x, y, panels)
    meta = {
        "beta": beta,
        "alpha": form.alpha,
        "c0": c0,
        "lambda_cut": lam_cut,
        "r_max": r_max,
        "r_panels": panels,
        "r_order": r_quad.order,
        "n_phi": n_phi,
        "branches": [[b.parity.i, b.parity.j, b.k] for b in branches],
    }
    return KernelGrid(x=x, y=y, theta=theta, values=values, meta=meta)


def kernel_at_points(
    F: Multiplier,
    form: SE2NormalForm,
    points: Sequence[tuple[complex, float]],
    r_quad: RQuadSpec = RQuadSpec(),
    c0: float = C0,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
    tail_tol: float = 1e-12,
) -> np.ndarray:
    """Kernel values at isolated group points (direct quadrature, no FFT)."""
    if form.kind != "generic":
        raise ValueError("elliptic form routes to the abelian module")
    beta = float(form.beta)
    lam_cut = support_cut(F, tol=tail_tol)
    branches = [
        b
        for b in enumerate_branches(beta, lam_cut)
        if sup_on_tail(F, b.lambda0, lam_cut) >= tail_tol
    ]
    windows = _branch_windows(branches, lam_cut, cfg)
    r_max = max(windows.values())
    table = _BranchTable(branches, cfg)

    def val(panels: int) -> np.ndarray:
        nodes, weights = gauss_legendre_panels(0.0, r_max, panels, r_quad.order)
        out = np.zeros(len(points), dtype=np.complex128)
        for r, w in zip(nodes, weights):
            q = r * r
            for b in branches:
                if windows[b] < r:
                    continue
                pair = table.pairs_at(q, b.parity)[b.k]
                fb = float(np.asarray(F(pair.lam + beta * q)))
                if abs(fb) < 1e-15:
                    continue
                for ip, (z, th) in enumerate(points):
                    out[ip] += c0 * w * r * fb * matrix_coefficient(r, (z, th), pair)
        return out

    panels = r_quad.panels
    prev = val(panels)
    for _ in range(r_quad.max_doublings):
        new = val(2 * panels)
        if float(np.max(np.abs(new - prev))) < r_quad.probe_tol:
            return new
        panels *= 2
        prev = new
    return prev


def spectral_integral(
    F: Multiplier,
    beta: float,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
    tail_tol: float = 1e-12,
) -> float:
    """Integral of F against the spectral Plancherel measure.

    Computed from the density with panel splits at the branch starts,
    where new branches switch on with a jump.
    """
    lam_cut = support_cut(F, tol=tail_tol)
    starts = sorted({b.lambda0 for b in enumerate_branches(beta, lam_cut)})
    breakpoints = [0.0] + [s for s in starts if 0.0 < s < lam_cut] + [lam_cut]

    def f_vec(lams: np.ndarray) -> np.ndarray:
        vals = np.asarray(F(lams), dtype=np.float64)
        dens = np.array([plancherel_density(float(l), beta, cfg) for l in lams])
        return vals * dens

    return integrate_piecewise(f_vec, breakpoints, order=24, rtol=1e-8)


def bi_plancherel_check(
    F: Multiplier,
    beta: float,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
) -> tuple[float, float]:
    """Both sides of the push-forward identity between the two Plancherel integrals.

    lhs integrates |F|^2 against the spectral density; rhs integrates the
    branch sum of |F(psi(r^2))|^2 against r dr.  Equality is exact in the
    continuum (change of variables lambda = psi(q), q = r^2).
    """
    lam_cut = support_cut(F, tol=1e-9)
    starts = sorted({b.lambda0 for b in enumerate_branches(beta, lam_cut)})
    breakpoints = [0.0] + [s for s in starts if 0.0 < s < lam_cut] + [lam_cut]

    def lhs_vec(lams: np.ndarray) -> np.ndarray:
        vals = np.abs(np.asarray(F(lams), dtype=np.float64)) ** 2
        dens = np.array([plancherel_density(float(l), beta, cfg) for l in lams])
        return vals * dens

    lhs = integrate_piecewise(lhs_vec, breakpoints, order=24, rtol=1e-8)

    rhs = 0.0
    for pc in ALL_CLASSES:
        ks = [k for k in range(64) if pc.lambda0(k) < lam_cut]
        if not ks:
            continue
        kmax = max(ks)
        r_hi = math.sqrt(psi_inverse(lam_cut, SpectralBranch(pc, min(ks), beta), cfg))

        def class_vec(rs: np.ndarray, pc=pc, kmax=kmax) -> np.ndarray:
            out = np.empty_like(rs)
            for idx, r in enumerate(rs):
                lams = solve_eigenvalues(r * r, pc, kmax, cfg) + beta * r * r
                vals = np.abs(np.asarray(F(lams), dtype=np.float64)) ** 2
                out[idx] = float(np.sum(vals)) * r
            return out

        rhs += integrate_until_stable(class_vec, 0.0, r_hi, panels=2, order=24, rtol=1e-8)
    return lhs, rhs


def calibrate_c0(
    grid: GridSpec,
    beta: float = 0.2,
    t: float = 1.0,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
) -> float:
    """Fix the inversion constant from the Plancherel identity on a Gaussian."""
    from .multipliers import gaussian

    F = gaussian(t)
    form = SE2NormalForm(kind="generic", alpha=1.0, beta=beta)
    kern = synthesize_kernel(F, form, grid, c0=1.0, cfg=cfg)

    def f2(lam):
        v = np.asarray(F(lam), dtype=np.float64)
        return v * v

    sigma_side = spectral_integral(f2, beta, cfg)
    return math.sqrt(sigma_side / kern.l2_norm_sq())


def multiplier_reconstruct(
    kern: KernelGrid,
    r_list: Sequence[float],
    beta: float,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
) -> list[tuple[float, float]]:
    """Recover multiplier values from a sampled kernel on the ground branch.

    For each r: partial Fourier transform of the kernel in (x, y) at the
    circle of radius r, then the double circle quadrature against the
    ground eigenfunction.  Returns (lambda, F_hat) with lambda = psi(r^2).
    """
    x, y, theta = kern.x, kern.y, kern.theta
    n_theta = theta.size
    hmax = max(kern.dx, kern.dy)
    r_peak = max(abs(float(r)) for r in r_list)
    if r_peak > 0.95 * math.pi / hmax:
        raise ValueError(
            f"grid too coarse for r={r_peak}: Nyquist limit is {math.pi / hmax:.3f}"
        )
    wx = np.full(x.size, kern.dx)
    wx[0] *= 0.5
    wx[-1] *= 0.5
    wy = np.full(y.size, kern.dy)
    wy[0] *= 0.5
    wy[-1] *= 0.5
    w_theta = TWO_PI / n_theta
    ground = SpectralBranch(ParityClass(0, 0), 0, beta)
    out = []
    shift_idx = (np.arange(n_theta)[None, :] - np.arange(n_theta)[:, None]) % n_theta
    for r in r_list:
        q = float(r) * float(r)
        pair = solve_branch(q, ground.parity, 0, cfg)[0]
        h = eval_eigenfunction(pair, theta)
        khat = np.empty((n_theta, n_theta), dtype=np.complex128)
        for s in range(n_theta):
            xi1 = float(r) * math.cos(theta[s])
            xi2 = -float(r) * math.sin(theta[s])
            px = np.exp(-1j * xi1 * x) * wx
            py = np.exp(-1j * xi2 * y) * wy
            khat[s, :] = np.einsum("i,ijm,j->m", px, kern.values, py)
        m = khat[np.arange(n_theta)[:, None], shift_idx]
        g = complex(h @ m @ h) * (w_theta * w_theta) / (TWO_PI * TWO_PI)
        out.append((pair.lam + beta * q, float(g.real)))
    return out
