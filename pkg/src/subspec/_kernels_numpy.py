"""Pure-numpy backend for the symmetric tridiagonal eigensolver.

Same contract as the numba backend: Sturm-sequence bisection for the
lowest eigenvalues, inverse iteration for eigenvectors.  The Sturm
recurrence is vectorised over candidate shifts so bisection for all
requested eigenvalues advances in lockstep; the per-row python loop is
the price of staying numba-free.
"""

from __future__ import annotations

import numpy as np

_EPS = np.finfo(np.float64).eps
_SAFMIN = np.finfo(np.float64).tiny


def _pivmin(off: np.ndarray) -> float:
    e2 = float(np.max(off * off)) if off.size else 1.0
    return _SAFMIN * max(1.0, e2)


def sturm_counts(diag: np.ndarray, off: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift."""
    n = diag.shape[0]
    pivmin = _pivmin(off)
    d = diag[0] - shifts
    d[np.abs(d) < pivmin] = -pivmin
    counts = (d < 0.0).astype(np.int64)
    for i in range(1, n):
        d = diag[i] - shifts - (off[i - 1] * off[i - 1]) / d
        small = np.abs(d) < pivmin
        if small.any():
            d[small] = -pivmin
        counts += d < 0.0
    return counts


def eigvals_ascending(diag: np.ndarray, off: np.ndarray, nev: int) -> np.ndarray:
    """Lowest ``nev`` eigenvalues of the symmetric tridiagonal (diag, off)."""
    n = diag.shape[0]
    radius = np.zeros(n)
    if n > 1:
        radius[:-1] += np.abs(off)
        radius[1:] += np.abs(off)
    glo = float(np.min(diag - radius))
    ghi = float(np.max(diag + radius))
    width = max(abs(glo), abs(ghi), 1.0)
    lo = np.full(nev, glo - 2.0 * _EPS * width)
    hi = np.full(nev, ghi + 2.0 * _EPS * width)
    ks = np.arange(nev)
    for _ in range(110):
        tol = 2.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi)) + 2.0 * _SAFMIN
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        above = sturm_counts(diag, off, mid) > ks
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def _tridiag_solve(sub: np.ndarray, dia: np.ndarray, sup: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a tridiagonal system with partial pivoting (dgtsv-style)."""
    n = dia.shape[0]
    dl = sub.copy()
    d = dia.copy()
    du = np.zeros(n)
    du[: n - 1] = sup
    du2 = np.zeros(n)
    x = b.copy()
    pivmin = _SAFMIN * max(1.0, float(np.max(np.abs(dia))) ** 2)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            piv = d[i] if abs(d[i]) > pivmin else np.copysign(pivmin, d[i]) if d[i] != 0 else pivmin
            m = dl[i] / piv
            d[i + 1] -= m * du[i]
            x[i + 1] -= m * x[i]
            if i < n - 2:
                du2[i] = 0.0
        else:
            m = d[i] / dl[i]
            d[i], dl[i] = dl[i], d[i]
            tmp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = tmp - m * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -m * du[i + 1]
            x[i], x[i + 1] = x[i + 1], x[i] - m * x[i + 1]
    if abs(d[n - 1]) < pivmin:
        d[n - 1] = pivmin
    x[n - 1] /= d[n - 1]
    if n > 1:
        if abs(d[n - 2]) < pivmin:
            d[n - 2] = pivmin
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        if abs(d[i]) < pivmin:
            d[i] = pivmin
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return x


def eigvec_inverse_iteration(diag: np.ndarray, off: np.ndarray, lam: float) -> np.ndarray:
    """Unit eigenvector for an isolated eigenvalue via inverse iteration.

    The shift is nudged off the eigenvalue by a few ulps so the solve
    cannot overflow; iterates are rescaled by their max before
    normalising.
    """
    n = diag.shape[0]
    pert = 64.0 * _EPS * max(1.0, abs(lam))
    shifted = diag - (lam + pert)
    v = np.ones(n) / np.sqrt(n)
    for _ in range(3):
        w = _tridiag_solve(off, shifted, off, v)
        mx = float(np.max(np.abs(w)))
        if mx == 0.0 or not np.isfinite(mx):
            v = np.cos(1.7 * np.arange(n, dtype=np.float64) + 0.3)
            v /= np.linalg.norm(v)
            continue
        w = w / mx
        v = w / np.linalg.norm(w)
    return v
