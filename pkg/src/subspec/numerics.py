"""Shared numerical utilities: bracketed root finding and panel quadrature."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

_EPS = float(np.finfo(np.float64).eps)


def brent_root(
    f: Callable[[float], float],
    a: float,
    b: float,
    rtol: float = 4.0 * _EPS,
    atol: float = 1e-300,
    max_iter: int = 200,
) -> float:
    """Root of f in [a, b] by Brent's method; f(a), f(b) must bracket."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ValueError(f"root not bracketed on [{a}, {b}]: f={fa}, {fb}")
    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * _EPS * abs(b) + rtol * abs(b) + atol
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0:
            return b
        if abs(e) < tol or abs(fa) <= abs(fb):
            d = e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(tol * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                d = e = m
        a, fa = b, fb
        if abs(d) > tol:
            b += d
        else:
            b += tol if m > 0.0 else -tol
        fb = f(b)
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
    return b


def expand_bracket(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    hi_max: float = 1e18,
) -> tuple[float, float]:
    """Grow hi geometrically until f changes sign on [lo, hi]."""
    flo = f(lo)
    if flo == 0.0:
        return lo, lo
    for _ in range(200):
        fhi = f(hi)
        if flo * fhi <= 0.0:
            return lo, hi
        hi = 2.0 * hi + 1.0
        if hi > hi_max:
            raise ValueError("bracket expansion exceeded limit")
    raise ValueError("bracket expansion did not find a sign change")


def gauss_legendre_panels(a: float, b: float, panels: int, order: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre quadrature on [a, b]."""
    x0, w0 = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights


def integrate_until_stable(
    f_vec: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    panels: int = 2,
    order: int = 24,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    max_doublings: int = 8,
) -> float:
    """Composite GL integral with panel doubling until the value settles."""
    nodes, weights = gauss_legendre_panels(a, b, panels, order)
    val = float(np.dot(weights, f_vec(nodes)))
    for _ in range(max_doublings):
        panels *= 2
        nodes, weights = gauss_legendre_panels(a, b, panels, order)
        new = float(np.dot(weights, f_vec(nodes)))
        if abs(new - val) <= rtol * abs(new) + atol:
            return new
        val = new
    return val


def integrate_piecewise(
    f_vec: Callable[[np.ndarray], np.ndarray],
    breakpoints: Sequence[float],
    order: int = 32,
    rtol: float = 1e-9,
    atol: float = 1e-13,
    max_doublings: int = 7,
) -> float:
    """Integrate over [b0, bN] splitting at interior breakpoints.

    Each subinterval gets its own doubling ladder, so integrable kinks at
    the breakpoints do not poison the smooth panels.
    """
    pts = sorted(set(float(p) for p in breakpoints))
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi <= lo:
            continue
        total += integrate_until_stable(
            f_vec, lo, hi, panels=1, order=order, rtol=rtol, atol=atol, max_doublings=max_doublings
        )
    return total
