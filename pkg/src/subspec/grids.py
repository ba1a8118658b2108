"""Sampled convolution kernels on rectangular group grids, with CSV/JSON I/O."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


def _fmt(v: float) -> str:
    """Shortest round-trip decimal; keeps golden CSV files stable."""
    return repr(float(v))


@dataclass
class KernelGrid:
    """Kernel samples on a box grid in (x, y) times a uniform circle grid in theta.

    ``values[ix, iy, it]`` holds K(x[ix], y[iy], theta[it]).  The group
    volume element carried by the grid is dx dy dtheta / (2 pi)^2, the
    normalisation under which the branch-sum Plancherel density
    integrates squared kernels exactly.
    """

    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        self.theta = np.asarray(self.theta, dtype=np.float64)
        self.values = np.asarray(self.values)
        if self.values.shape != (self.x.size, self.y.size, self.theta.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.x.size}, {self.y.size}, {self.theta.size})"
            )

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0]) if self.x.size > 1 else 1.0

    @property
    def dy(self) -> float:
        return float(self.y[1] - self.y[0]) if self.y.size > 1 else 1.0

    @property
    def dtheta(self) -> float:
        return 2.0 * math.pi / self.theta.size

    def measure_weight(self) -> float:
        """Volume element per grid cell: dx dy dtheta / (2 pi)^2."""
        return self.dx * self.dy * self.dtheta / (2.0 * math.pi) ** 2

    def l2_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.measure_weight())

    def max_imag(self) -> float:
        if np.iscomplexobj(self.values):
            return float(np.max(np.abs(self.values.imag)))
        return 0.0

    def at_origin(self) -> complex:
        ix = int(np.argmin(np.abs(self.x)))
        iy = int(np.argmin(np.abs(self.y)))
        return complex(self.values[ix, iy, 0])

    def write_csv(self, path: str) -> None:
        """CSV rows x,y,theta,re,im plus a JSON sidecar with the metadata."""
        with open(path, "w", newline="") as fh:
            fh.write("x,y,theta,re,im\n")
            vals = np.asarray(self.values, dtype=np.complex128)
            for ix, xv in enumerate(self.x):
                for iy, yv in enumerate(self.y):
                    for it, tv in enumerate(self.theta):
                        v = vals[ix, iy, it]
                        fh.write(
                            f"{_fmt(xv)},{_fmt(yv)},{_fmt(tv)},{_fmt(v.real)},{_fmt(v.imag)}\n"
                        )
        sidecar = {
            "nx": int(self.x.size),
            "ny": int(self.y.size),
            "ntheta": int(self.theta.size),
            "measure_weight": self.measure_weight(),
            "meta": _jsonable(self.meta),
        }
        with open(path + ".json", "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read_csv(cls, path: str) -> "KernelGrid":
        xs, ys, ts, res, ims = [], [], [], [], []
        with open(path, newline="") as fh:
            header = fh.readline().strip()
            if header != "x,y,theta,re,im":
                raise ValueError(f"kernel CSV {path} must start with header x,y,theta,re,im")
            for line in fh:
                parts = line.strip().split(",")
                if len(parts) != 5:
                    raise ValueError(f"malformed kernel CSV row: {line!r}")
                xs.append(float(parts[0]))
                ys.append(float(parts[1]))
                ts.append(float(parts[2]))
                res.append(float(parts[3]))
                ims.append(float(parts[4]))
        x = np.unique(np.asarray(xs))
        y = np.unique(np.asarray(ys))
        theta = np.unique(np.asarray(ts))
        vals = (np.asarray(res) + 1j * np.asarray(ims)).reshape(x.size, y.size, theta.size)
        meta = {}
        try:
            with open(path + ".json") as fh:
                meta = json.load(fh).get("meta", {})
        except FileNotFoundError:
            pass
        return cls(x=x, y=y, theta=theta, values=vals, meta=meta)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def box_grid(radius: float, step: float) -> np.ndarray:
    """Symmetric grid on [-radius, radius] containing 0, spacing <= step."""
    half = int(math.ceil(radius / step))
    return np.arange(-half, half + 1) * (radius / half)


def circle_grid(n: int) -> np.ndarray:
    return np.arange(n) * (2.0 * math.pi / n)
