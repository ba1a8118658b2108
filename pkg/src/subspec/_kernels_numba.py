"""Numba backend for the symmetric tridiagonal eigensolver.

Scalar inner loops compiled with @njit; semantics match
``_kernels_numpy`` (Sturm-sequence bisection, partial-pivot inverse
iteration).
"""

from __future__ import annotations

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps
_SAFMIN = np.finfo(np.float64).tiny


@njit(cache=True)
def _sturm_count(diag, off, x, pivmin):
    n = diag.shape[0]
    d = diag[0] - x
    if abs(d) < pivmin:
        d = -pivmin
    count = 1 if d < 0.0 else 0
    for i in range(1, n):
        d = diag[i] - x - (off[i - 1] * off[i - 1]) / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            count += 1
    return count


@njit(cache=True)
def sturm_counts(diag, off, shifts):
    pivmin = _SAFMIN
    for i in range(off.shape[0]):
        e2 = off[i] * off[i]
        if e2 * _SAFMIN > pivmin:
            pivmin = e2 * _SAFMIN
    out = np.empty(shifts.shape[0], dtype=np.int64)
    for j in range(shifts.shape[0]):
        out[j] = _sturm_count(diag, off, shifts[j], pivmin)
    return out


@njit(cache=True)
def eigvals_ascending(diag, off, nev):
    n = diag.shape[0]
    pivmin = _SAFMIN
    for i in range(off.shape[0]):
        e2 = off[i] * off[i]
        if e2 * _SAFMIN > pivmin:
            pivmin = e2 * _SAFMIN
    glo = diag[0]
    ghi = diag[0]
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(off[i - 1])
        if i < n - 1:
            r += abs(off[i])
        if diag[i] - r < glo:
            glo = diag[i] - r
        if diag[i] + r > ghi:
            ghi = diag[i] + r
    width = max(abs(glo), abs(ghi), 1.0)
    glo -= 2.0 * _EPS * width
    ghi += 2.0 * _EPS * width
    out = np.empty(nev, dtype=np.float64)
    for k in range(nev):
        lo = glo if k == 0 else out[k - 1] - 4.0 * _EPS * width
        hi = ghi
        for _ in range(110):
            tol = 2.0 * _EPS * max(abs(lo), abs(hi)) + 2.0 * _SAFMIN
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if _sturm_count(diag, off, mid, pivmin) > k:
                hi = mid
            else:
                lo = mid
        out[k] = 0.5 * (lo + hi)
    return out


@njit(cache=True)
def _tridiag_solve(sub, dia, sup, b):
    n = dia.shape[0]
    dl = sub.copy()
    d = dia.copy()
    du = np.zeros(n)
    for i in range(n - 1):
        du[i] = sup[i]
    du2 = np.zeros(n)
    x = b.copy()
    dmax = 0.0
    for i in range(n):
        if abs(dia[i]) > dmax:
            dmax = abs(dia[i])
    pivmin = _SAFMIN * max(1.0, dmax * dmax)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            piv = d[i]
            if abs(piv) < pivmin:
                piv = pivmin if piv >= 0.0 else -pivmin
            m = dl[i] / piv
            d[i + 1] -= m * du[i]
            x[i + 1] -= m * x[i]
            if i < n - 2:
                du2[i] = 0.0
        else:
            m = d[i] / dl[i]
            tmp_d = d[i]
            d[i] = dl[i]
            dl[i] = tmp_d
            tmp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = tmp - m * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -m * du[i + 1]
            tmp_x = x[i]
            x[i] = x[i + 1]
            x[i + 1] = tmp_x - m * x[i + 1]
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


@njit(cache=True)
def eigvec_inverse_iteration(diag, off, lam):
    n = diag.shape[0]
    pert = 64.0 * _EPS * max(1.0, abs(lam))
    shifted = diag - (lam + pert)
    v = np.ones(n) / np.sqrt(n)
    for it in range(3):
        w = _tridiag_solve(off, shifted, off, v)
        mx = 0.0
        for i in range(n):
            if abs(w[i]) > mx:
                mx = abs(w[i])
        if mx == 0.0 or not np.isfinite(mx):
            for i in range(n):
                v[i] = np.cos(1.7 * float(i) + 0.3)
            s = 0.0
            for i in range(n):
                s += v[i] * v[i]
            s = np.sqrt(s)
            for i in range(n):
                v[i] /= s
            continue
        s = 0.0
        for i in range(n):
            w[i] /= mx
            s += w[i] * w[i]
        s = np.sqrt(s)
        for i in range(n):
            v[i] = w[i] / s
    return v
