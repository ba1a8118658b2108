"""Spectral multipliers F(lambda): named built-ins and sampled tables."""

from __future__ import annotations

import csv
from typing import Callable

import numpy as np

Multiplier = Callable[[np.ndarray], np.ndarray]


def gaussian(t: float) -> Multiplier:
    """Heat multiplier exp(-t*lambda)."""
    if t <= 0.0:
        raise ValueError(f"gaussian multiplier needs t > 0, got {t}")

    def f(lam):
        return np.exp(-t * np.asarray(lam, dtype=np.float64))

    return f


def bump(a: float, b: float) -> Multiplier:
    """Smooth compactly supported bump on (a, b), peak value 1 at the midpoint."""
    if not b > a:
        raise ValueError(f"bump needs a < b, got [{a}, {b}]")

    def f(lam):
        lam = np.asarray(lam, dtype=np.float64)
        u = (2.0 * lam - (a + b)) / (b - a)
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
        return out

    return f


def from_table(path: str) -> Multiplier:
    """Piecewise-linear multiplier from a CSV with columns lambda,value."""
    lams, vals = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["lambda", "value"]:
            raise ValueError(f"multiplier table {path} must have header lambda,value")
        for row in reader:
            lams.append(float(row["lambda"]))
            vals.append(float(row["value"]))
    if not lams:
        raise ValueError(f"multiplier table {path} is empty")
    order = np.argsort(lams)
    xs = np.asarray(lams, dtype=np.float64)[order]
    ys = np.asarray(vals, dtype=np.float64)[order]

    def f(lam):
        return np.interp(np.asarray(lam, dtype=np.float64), xs, ys, left=ys[0], right=0.0)

    return f


def parse_named(spec: str) -> Multiplier:
    """Parse 'gaussian:T', 'bump:A:B', or 'table:PATH'."""
    parts = spec.split(":")
    name = parts[0].strip().lower()
    if name == "gaussian" and len(parts) == 2:
        return gaussian(float(parts[1]))
    if name == "bump" and len(parts) == 3:
        return bump(float(parts[1]), float(parts[2]))
    if name == "table" and len(parts) == 2:
        return from_table(parts[1])
    raise ValueError(f"unknown multiplier spec {spec!r}")


def support_cut(F: Multiplier, tol: float = 1e-12, lam_max: float = 1e9) -> float:
    """Smallest Lambda (from a geometric scan) with |F| < tol beyond it."""
    grid = np.concatenate([[0.0], np.geomspace(1e-6, lam_max, 4096)])
    vals = np.abs(np.asarray(F(grid), dtype=np.float64))
    above = np.nonzero(vals >= tol)[0]
    if above.size == 0:
        return 1.0
    idx = above[-1]
    if idx == grid.size - 1:
        raise ValueError(f"multiplier does not decay below {tol} by lambda={lam_max}")
    return float(grid[idx + 1])


def sup_on_tail(F: Multiplier, lam_lo: float, lam_hi: float) -> float:
    """Sampled sup of |F| on [lam_lo, max(lam_hi, lam_lo)]."""
    hi = max(lam_hi, lam_lo + 1.0)
    grid = np.linspace(lam_lo, hi, 2048)
    return float(np.max(np.abs(np.asarray(F(grid), dtype=np.float64))))


def narrow_band(center: float, width: float) -> Multiplier:
    """Gaussian band of given width at a spectral point; used to extract
    the transform kernel pointwise by Lebesgue differentiation."""
    if width <= 0.0 or center <= 0.0:
        raise ValueError("narrow band needs positive center and width")

    def f(lam):
        lam = np.asarray(lam, dtype=np.float64)
        u = (lam - center) / width
        return np.exp(-0.5 * u * u)

    return f
