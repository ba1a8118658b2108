"""Kernel transform for sub-Laplacians on the abelian groups R^n x T^m.

With the operator in the normal form  -div_x grad_x - (A grad_y).(A grad_y)
(A an invertible m x m matrix), the Fourier symbol is
M(xi, k) = |xi|^2 + |A k|^2 and everything is explicit: the spectral
density is a lattice sum of half-integer powers, kernels are inverse
Fourier integrals, and the transform kernel chi on R x T has a jump at
every squared positive integer, with one-sided limits orthogonal on the
circle.

Conventions: Fourier transform integrates e^{-i(xi.x + k.y)} against
dx dy with y over [0, 2pi)^m; inversion carries (2pi)^{-(n+m)}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .multipliers import Multiplier, narrow_band, support_cut
from .numerics import gauss_legendre_panels

TWO_PI = 2.0 * math.pi


class DiscreteSpectrumError(ValueError):
    """Raised for n = 0: the spectrum is the point set {|Ak|^2}; use list_spectrum."""


@dataclass(frozen=True)
class AbelianSpec:
    """Group R^n x T^m with torus metric matrix A (m x m, invertible)."""

    n: int
    m: int
    A: np.ndarray | None = None

    def __post_init__(self):
        if self.n < 0 or self.m < 0 or self.n + self.m < 1:
            raise ValueError("need n, m >= 0 with n + m >= 1")
        if self.m > 0:
            a = np.asarray(self.A, dtype=np.float64)
            if a.shape != (self.m, self.m):
                raise ValueError(f"A must be {self.m}x{self.m}")
            det = float(np.linalg.det(a))
            scale = max(1.0, float(np.linalg.norm(a)) ** self.m)
            if abs(det) < 1e-12 * scale:
                raise ValueError("A is numerically singular")
            object.__setattr__(self, "A", a)
        elif self.A is not None:
            raise ValueError("A is only meaningful when m > 0")

    def lattice_below(self, radius_sq: float) -> tuple[np.ndarray, np.ndarray]:
        """Lattice points k with |Ak|^2 <= radius_sq, and those values."""
        if self.m == 0:
            return np.zeros((1, 0), dtype=np.int64), np.zeros(1)
        a = self.A
        smin = float(np.linalg.svd(a, compute_uv=False)[-1])
        box = int(math.floor(math.sqrt(max(radius_sq, 0.0)) / smin)) + 1
        ks, vals = [], []
        for k in product(range(-box, box + 1), repeat=self.m):
            kv = np.asarray(k, dtype=np.float64)
            v = float(np.sum((a @ kv) ** 2))
            if v <= radius_sq:
                ks.append(k)
                vals.append(v)
        order = np.lexsort(tuple(np.asarray(ks)[:, d] for d in range(self.m - 1, -1, -1)))
        return np.asarray(ks, dtype=np.int64)[order], np.asarray(vals)[order]


R_LINE = AbelianSpec(1, 0)
RXT = AbelianSpec(1, 1, np.eye(1))


@dataclass(frozen=True)
class SymbolPoint:
    """A point of the Fourier dual with its symbol value |xi|^2 + |Ak|^2."""

    xi: tuple[float, ...]
    k: tuple[int, ...]
    value: float

    def __post_init__(self):
        if self.value < 0.0:
            raise ValueError("symbol values are nonnegative")

    @classmethod
    def at(cls, spec: AbelianSpec, xi, k) -> "SymbolPoint":
        xi_t = tuple(float(v) for v in np.atleast_1d(xi)) if spec.n else ()
        k_t = tuple(int(v) for v in np.atleast_1d(k)) if spec.m else ()
        if len(xi_t) != spec.n or len(k_t) != spec.m:
            raise ValueError(f"expected {spec.n} continuous and {spec.m} discrete frequencies")
        val = float(np.sum(np.asarray(xi_t) ** 2))
        if spec.m:
            val += float(np.sum((spec.A @ np.asarray(k_t, dtype=np.float64)) ** 2))
        return cls(xi=xi_t, k=k_t, value=val)


@dataclass(frozen=True)
class ChiSample:
    """One sampled value of the transform kernel: chi(lam, point)."""

    lam: float
    point: tuple[float, ...]
    value: float


def kappa(spec: AbelianSpec) -> float:
    """Density constant: Fourier-Plancherel factor times half the sphere area."""
    if spec.n < 1:
        raise DiscreteSpectrumError("kappa is defined for n >= 1")
    return (TWO_PI) ** (-(spec.n + spec.m)) * math.pi ** (spec.n / 2.0) / math.gamma(spec.n / 2.0)


def sigma_density(lam: float, spec: AbelianSpec) -> float:
    """Spectral Plancherel density at lam > 0 (continuous-spectrum case n >= 1)."""
    if spec.n < 1:
        raise DiscreteSpectrumError(
            "n = 0 gives a pure point spectrum {|Ak|^2}; use list_spectrum for the atoms"
        )
    if lam <= 0.0:
        raise ValueError(f"density is defined for lambda > 0, got {lam}")
    _, vals = spec.lattice_below(lam * (1.0 - 1e-15))
    inside = vals < lam
    return kappa(spec) * float(np.sum((lam - vals[inside]) ** (spec.n / 2.0 - 1.0)))


def list_spectrum(spec: AbelianSpec, lam_max: float) -> list[float]:
    """Sorted point spectrum {|Ak|^2} up to lam_max (the n = 0 case)."""
    _, vals = spec.lattice_below(lam_max)
    return sorted(set(float(v) for v in vals))


def sigma_integral(F: Multiplier, spec: AbelianSpec, tail_tol: float = 1e-14) -> float:
    """Integral of F against the spectral measure, split at lattice thresholds."""
    lam_cut = support_cut(F, tol=tail_tol)
    _, vals = spec.lattice_below(lam_cut)
    thresholds = sorted(set([0.0] + [float(v) for v in vals if 0.0 < v < lam_cut] + [lam_cut]))
    total = 0.0
    for lo, hi in zip(thresholds[:-1], thresholds[1:]):
        # integrable (lam - |Ak|^2)^{n/2-1} endpoints: substitute lam = lo + u^2
        width = hi - lo
        nodes, weights = gauss_legendre_panels(0.0, math.sqrt(width), 12, 32)
        lams = lo + nodes * nodes
        dens = np.array([sigma_density(float(l), spec) for l in lams])
        fv = np.asarray(F(lams), dtype=np.float64)
        total += float(np.sum(weights * 2.0 * nodes * fv * dens))
    return total


@dataclass
class AbelianKernelGrid:
    """Kernel samples on a tensor grid: n symmetric x-axes, m uniform y-axes."""

    spec: AbelianSpec
    x_axes: list[np.ndarray]
    y_axes: list[np.ndarray]
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def measure_weights(self) -> list[np.ndarray]:
        ws = []
        for ax in self.x_axes:
            h = float(ax[1] - ax[0]) if ax.size > 1 else 1.0
            w = np.full(ax.size, h)
            w[0] *= 0.5
            w[-1] *= 0.5
            ws.append(w)
        for ay in self.y_axes:
            ws.append(np.full(ay.size, TWO_PI / ay.size))
        return ws

    def l2_norm_sq(self) -> float:
        acc = np.abs(self.values) ** 2
        for axis_w in reversed(self.measure_weights()):
            acc = acc @ axis_w
        return float(acc)

    def max_imag(self) -> float:
        if np.iscomplexobj(self.values):
            return float(np.max(np.abs(self.values.imag)))
        return 0.0

    def write_csv(self, path: str) -> None:
        """Kernel samples as CSV plus a JSON sidecar (group spec, truncations)."""
        axes = self.x_axes + self.y_axes
        names = [f"x{d+1}" for d in range(len(self.x_axes))] + [
            f"y{d+1}" for d in range(len(self.y_axes))
        ]
        with open(path, "w", newline="") as fh:
            fh.write(",".join(names + ["re", "im"]) + "\n")
            vals = np.asarray(self.values, dtype=np.complex128)
            for idx in np.ndindex(*vals.shape):
                coords = [repr(float(axes[d][idx[d]])) for d in range(len(axes))]
                v = vals[idx]
                fh.write(",".join(coords + [repr(v.real), repr(v.imag)]) + "\n")
        sidecar = {
            "group": {
                "n": self.spec.n,
                "m": self.spec.m,
                "A": None if self.spec.A is None else np.asarray(self.spec.A).tolist(),
            },
            "meta": {
                k: (v.item() if isinstance(v, np.generic) else v) for k, v in self.meta.items()
            },
        }
        with open(path + ".json", "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass(frozen=True)
class BoxGridSpec:
    """x-box half-width and step per axis, plus y points per circle."""

    radius: float
    step: float
    n_y: int = 64


def _x_axis(radius: float, step: float) -> np.ndarray:
    half = int(math.ceil(radius / step))
    return np.arange(-half, half + 1) * (radius / half)


def _xi_axis(xi_max: float, n_points: int) -> np.ndarray:
    return np.linspace(-xi_max, xi_max, n_points)


def kernel_synthesize(
    F: Multiplier,
    spec: AbelianSpec,
    grid: BoxGridSpec,
    tail_tol: float = 1e-14,
    xi_points: int | None = None,
    settle_tol: float = 1e-8,
) -> AbelianKernelGrid:
    """Inverse Fourier synthesis of the convolution kernel of F.

    Trapezoid over a xi-box sized so F has died at the boundary, exact
    finite lattice sum in k, with one resolution-doubling Richardson
    check on the xi quadrature.
    """
    if spec.n < 1:
        raise DiscreteSpectrumError("synthesis needs a continuous factor (n >= 1)")
    try:
        lam_cut = support_cut(F, tol=tail_tol)
    except ValueError as exc:
        raise ValueError(f"refusing non-decaying multiplier: {exc}") from exc
    ks, kvals = spec.lattice_below(lam_cut)
    xi_max = math.sqrt(lam_cut)
    x_axes = [_x_axis(grid.radius, grid.step) for _ in range(spec.n)]
    y_axes = [np.arange(grid.n_y) * (TWO_PI / grid.n_y) for _ in range(spec.m)]
    x_extent = max(float(np.max(np.abs(ax))) for ax in x_axes)
    if xi_points is None:
        # alias images sit at 2 pi / dxi; keep them well past the box
        n0 = int(math.ceil(2.0 * xi_max / (TWO_PI / (4.0 * x_extent + 8.0)))) + 1
        xi_points = max(n0, 129)

    def synth(npts: int) -> np.ndarray:
        axes = [_xi_axis(xi_max, npts) for _ in range(spec.n)]
        dxi = np.prod([ax[1] - ax[0] for ax in axes])
        if spec.n == 1:
            xi = axes[0]
            xi_sq = xi * xi
            e1 = np.exp(1j * np.multiply.outer(x_axes[0], xi))
            gk = np.empty((ks.shape[0], x_axes[0].size), dtype=np.complex128)
            for ik, kv in enumerate(kvals):
                gk[ik] = e1 @ np.asarray(F(xi_sq + kv), dtype=np.float64) * dxi
        elif spec.n == 2:
            xi1, xi2 = axes
            sq = np.add.outer(xi1 * xi1, xi2 * xi2)
            e1 = np.exp(1j * np.multiply.outer(x_axes[0], xi1))
            e2 = np.exp(1j * np.multiply.outer(xi2, x_axes[1]))
            gk = np.empty((ks.shape[0], x_axes[0].size, x_axes[1].size), dtype=np.complex128)
            for ik, kv in enumerate(kvals):
                fv = np.asarray(F(sq + kv), dtype=np.float64)
                gk[ik] = (e1 @ fv @ e2) * dxi
        else:
            raise NotImplementedError("synthesis implemented for n in {1, 2}")
        norm = (TWO_PI) ** (-(spec.n + spec.m))
        if spec.m == 0:
            return norm * gk[0]
        if spec.m > 1:
            raise NotImplementedError("synthesis implemented for m in {0, 1}")
        phases = np.exp(1j * np.multiply.outer(ks[:, 0].astype(np.float64), y_axes[0]))
        return norm * np.tensordot(gk, phases, axes=([0], [0]))

    vals = synth(xi_points)
    check = synth(2 * xi_points - 1)
    drift = float(np.max(np.abs(vals - check)))
    scale = float(np.max(np.abs(check))) or 1.0
    if drift > 0.1 * settle_tol * scale:
        vals = check
        check = synth(4 * xi_points - 3)
        drift = float(np.max(np.abs(vals - check)))
        if drift > settle_tol * scale:
            raise ValueError(
                f"xi quadrature did not settle (drift {drift:.2e}); refine the grid request "
                f"or loosen settle_tol for rough (e.g. tabulated) multipliers"
            )
    meta = {
        "lambda_cut": lam_cut,
        "xi_max": xi_max,
        "xi_points": xi_points,
        "k_count": int(ks.shape[0]),
        "richardson_drift": drift,
    }
    return AbelianKernelGrid(spec=spec, x_axes=x_axes, y_axes=y_axes, values=check, meta=meta)


def multiplier_invert(
    kern: AbelianKernelGrid,
    spec: AbelianSpec,
    lambda_list: Sequence[float],
    axis: int = 0,
) -> list[tuple[float, float]]:
    """Recover F(lambda) as the Fourier transform of the kernel at radius sqrt(lambda).

    Evaluates along the chosen coordinate axis (any unit direction works
    almost everywhere); the y-average extracts the k = 0 mode.
    """
    if spec.n < 1:
        raise DiscreteSpectrumError("inversion needs n >= 1")
    h = max(float(ax[1] - ax[0]) for ax in kern.x_axes)
    r_need = math.sqrt(max(lambda_list))
    if r_need > 0.95 * math.pi / h:
        raise ValueError(
            f"grid too coarse for sqrt(lambda)={r_need:.3f}: Nyquist limit {math.pi / h:.3f}"
        )
    ws = kern.measure_weights()
    out = []
    for lam in lambda_list:
        if lam < 0.0:
            raise ValueError("lambda must be nonnegative")
        xi = math.sqrt(lam)
        acc = np.asarray(kern.values, dtype=np.complex128)
        for d in reversed(range(len(ws))):
            w = ws[d].astype(np.complex128)
            if d == axis:
                w = w * np.exp(-1j * xi * kern.x_axes[axis])
            acc = np.tensordot(acc, w, axes=([d], [0]))
        out.append((float(lam), float(np.real(acc))))
    return out


def _chi_rt_terms(lam: float) -> tuple[np.ndarray, np.ndarray]:
    kmax = int(math.floor(math.sqrt(lam)))
    if kmax * kmax == lam:
        kmax -= 1
    ks = np.arange(0, kmax + 1)
    weights = (lam - ks * ks) ** -0.5
    return ks, weights


def chi_rt(lam: float, x: float, y: float) -> float:
    """Transform kernel of R x T (A = 1) at spectral point lam and group point (x, y).

    The e^{iky} pairs are folded into cosines, so the value is real.  At
    lam exactly a squared positive integer the kernel jumps; use
    chi_rt_left / chi_rt_right for the one-sided limits there.
    """
    if lam <= 0.0:
        raise ValueError(f"chi is defined for lambda > 0, got {lam}")
    root = math.isqrt(int(lam)) if float(lam).is_integer() else 0
    if float(lam).is_integer() and root * root == int(lam) and root > 0:
        raise ValueError(
            f"lambda = {root}^2 is a jump point; use chi_rt_left/chi_rt_right for the limits"
        )
    ks, w = _chi_rt_terms(lam)
    mult = np.where(ks == 0, 1.0, 2.0)
    num = float(np.sum(mult * np.cos(np.sqrt(lam - ks * ks) * x) * np.cos(ks * y) * w))
    den = float(np.sum(mult * w))
    return num / den


def chi_rt_left(h: int, x: float, y: float) -> float:
    """Limit of chi from below at lam = h^2: the lam = h^2 sum over |k| < h."""
    if h < 1:
        raise ValueError("h must be a positive integer")
    lam = float(h * h)
    ks = np.arange(0, h)
    w = (lam - ks * ks) ** -0.5
    mult = np.where(ks == 0, 1.0, 2.0)
    num = float(np.sum(mult * np.cos(np.sqrt(lam - ks * ks) * x) * np.cos(ks * y) * w))
    den = float(np.sum(mult * w))
    return num / den


def chi_rt_samples(lams, x: float, y: float) -> list[ChiSample]:
    """chi on a lambda grid at a fixed group point (jump points skipped)."""
    out = []
    for lam in np.asarray(lams, dtype=np.float64):
        lam = float(lam)
        if float(lam).is_integer() and math.isqrt(int(lam)) ** 2 == int(lam) and lam > 0:
            continue
        out.append(ChiSample(lam=lam, point=(x, y), value=chi_rt(lam, x, y)))
    return out


def chi_rt_right(h: int, x: float, y: float) -> float:
    """Limit of chi from above at lam = h^2.

    The two new terms k = +-h blow up like (lam - h^2)^{-1/2} and take
    over both numerator and denominator, leaving cos(h y): the limit is
    independent of x and orthogonal on the circle to the left limit.
    """
    if h < 1:
        raise ValueError("h must be a positive integer")
    return math.cos(h * y)


def _chi_numeric(lam0: float, xs: np.ndarray, spec: AbelianSpec, delta0: float, levels: int = 4) -> np.ndarray:
    """Narrow-band extraction of chi(lam0, x) on R^n via Richardson in the band width."""
    if spec.n not in (1, 2) or spec.m != 0:
        raise NotImplementedError("numeric chi extraction implemented for R^1 and R^2")
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))

    def band_value(delta: float) -> np.ndarray:
        F = narrow_band(lam0, delta)
        s = math.sqrt(lam0)
        shell_lo = max(0.0, s - 10.0 * delta / (2.0 * s) - delta)
        shell_hi = s + 10.0 * delta / (2.0 * s) + delta
        sigma_w = delta / (2.0 * s)
        step = sigma_w / 5.0
        if spec.n == 1:
            xi = np.arange(-shell_hi, shell_hi + step, step)
            fv = np.asarray(F(xi * xi), dtype=np.float64)
            phases = np.exp(1j * xs[:, 0][:, None] * xi[None, :])
            kern_val = (phases @ fv) * step / TWO_PI
        else:
            xi1 = np.arange(-shell_hi, shell_hi + step, step)
            kern_val = np.zeros(xs.shape[0], dtype=np.complex128)
            for a in xi1:
                rem = lam0 - a * a
                xi2 = xi1[np.abs(xi1 * xi1 + a * a - lam0) <= 12.0 * delta]
                if xi2.size == 0:
                    continue
                fv = np.asarray(F(a * a + xi2 * xi2), dtype=np.float64)
                ph = np.exp(1j * np.multiply.outer(xs[:, 1], xi2))
                kern_val += np.exp(1j * xs[:, 0] * a) * (ph @ fv)
            kern_val *= step * step / (TWO_PI**2)
        # sigma-side mass of the band
        nodes, weights = gauss_legendre_panels(max(0.0, lam0 - 12.0 * delta), lam0 + 12.0 * delta, 8, 24)
        dens = kappa(spec) * nodes ** (spec.n / 2.0 - 1.0)
        mass = float(np.sum(weights * np.asarray(F(nodes)) * dens))
        return np.real(kern_val) / mass

    vals = [band_value(delta0 / 2.0**lvl) for lvl in range(levels)]
    rich = [(4.0 * vals[i + 1] - vals[i]) / 3.0 for i in range(levels - 1)]
    return rich[-1][0] if xs.shape[0] == 1 else rich[-1]


def chi_homogeneity_check(
    lam: float,
    t: float,
    x: Sequence[float],
    spec: AbelianSpec,
    delta0: float = 0.02,
) -> tuple[float, float]:
    """Both sides of the dilation identity chi(t^2 lam, x) = chi(lam, t x) on R^n.

    Each side comes out of the narrow-band synthesis route on its own
    spectral point; nothing is shared between the two evaluations.
    """
    if spec.m != 0:
        raise ValueError("homogeneity check is for the pure Euclidean case m = 0")
    if t <= 0.0 or lam <= 0.0:
        raise ValueError("need t > 0 and lam > 0")
    xv = np.asarray(x, dtype=np.float64).reshape(1, spec.n)
    lhs = float(_chi_numeric(t * t * lam, xv, spec, delta0))
    rhs = float(_chi_numeric(lam, t * xv, spec, delta0))
    return lhs, rhs
