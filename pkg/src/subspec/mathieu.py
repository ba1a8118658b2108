"""Spectrum of the periodic Schrodinger operator -d^2/dphi^2 + q sin^2(phi).

The operator commutes with phi -> -phi and phi -> phi + pi, so L^2 of the
circle (flat measure dphi on [0, 2pi)) splits into four invariant
subspaces labelled by a parity pair (i, j):

    i = 0/1  even/odd under reflection,
    j = 0/1  pi-periodic/pi-antiperiodic.

On each subspace the operator is a symmetric tridiagonal matrix in the
orthonormal trigonometric basis (sin^2 couples modes two frequencies
apart), and its spectrum is a strictly increasing sequence of simple
eigenvalues lam_{(i,j),k}(q).  This module computes eigenvalues,
normalised eigenfunctions, q-derivatives, zero counts, and the large-q
profile of the eigenvalue curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .numerics import brent_root

_EPS = float(np.finfo(np.float64).eps)

SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_PI = math.sqrt(math.pi)


class TruncationError(RuntimeError):
    """Eigenvalues failed to settle before the basis-size cap."""

    def __init__(self, message: str, last_delta: float):
        super().__init__(f"{message} (last delta {last_delta:.3e})")
        self.last_delta = last_delta


class AmbiguousZeroError(RuntimeError):
    """A sampled eigenfunction value sits below 1e-12 with no sign change."""


@dataclass(frozen=True)
class ParityClass:
    """Parity label (i, j): reflection parity and pi-(anti)periodicity."""

    i: int
    j: int

    def __post_init__(self):
        if self.i not in (0, 1) or self.j not in (0, 1):
            raise ValueError(f"parity indices must be 0 or 1, got ({self.i}, {self.j})")

    @classmethod
    def from_string(cls, s: str) -> "ParityClass":
        if len(s) != 2 or s[0] not in "01" or s[1] not in "01":
            raise ValueError(f"parity class must be two binary digits, got {s!r}")
        return cls(int(s[0]), int(s[1]))

    def frequencies(self, n: int) -> np.ndarray:
        """Frequencies of the first n basis modes of this class."""
        m = np.arange(n)
        if (self.i, self.j) == (0, 0):
            return 2 * m
        if (self.i, self.j) == (1, 0):
            return 2 * m + 2
        return 2 * m + 1

    def lambda0(self, k: int) -> float:
        """Eigenvalue of the free operator (q = 0) on branch k."""
        return float((2 * k + self.i + abs(self.i - self.j)) ** 2)

    def zero_count(self, k: int) -> int:
        """Number of zeros per period of the k-th eigenfunction."""
        return 2 * (2 * k + self.i + abs(self.i - self.j))

    def __str__(self) -> str:
        return f"{self.i}{self.j}"


ALL_CLASSES = (ParityClass(0, 0), ParityClass(1, 0), ParityClass(0, 1), ParityClass(1, 1))


@dataclass(frozen=True)
class TruncationConfig:
    n_min: int = 64
    lambda_tol: float = 1e-12
    n_max: int = 65536

    def __post_init__(self):
        if self.n_min < 8:
            raise ValueError("n_min must be at least 8")
        if self.lambda_tol <= 0.0:
            raise ValueError("lambda_tol must be positive")
        if self.n_max < self.n_min:
            raise ValueError("n_max must be at least n_min")


DEFAULT_TRUNCATION = TruncationConfig()


@dataclass(frozen=True)
class SpectralBranch:
    """One eigenvalue curve q -> lam_{(i,j),k}(q), optionally shifted by beta*q."""

    parity: ParityClass
    k: int
    beta: float = 0.0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("branch index k must be nonnegative")
        if self.beta < 0.0:
            raise ValueError("beta must be nonnegative")

    @property
    def lambda0(self) -> float:
        return self.parity.lambda0(self.k)


@dataclass(frozen=True)
class MathieuEigenpair:
    q: float
    parity: ParityClass
    k: int
    lam: float
    coeffs: np.ndarray = field(repr=False)
    n_used: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=np.float64))


def assemble_operator(q: float, parity: ParityClass, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tridiagonal matrix of the operator on the first n modes of a class.

    Uses sin^2 = 1/2 - cos(2phi)/2; cos(2phi) couples neighbouring modes
    with weight 1/2 (1/sqrt 2 against the constant mode) and hits the
    diagonal of the frequency-1 modes with +-1/2.
    """
    if n < 2:
        raise ValueError(f"basis size must be at least 2, got {n}")
    freqs = parity.frequencies(n).astype(np.float64)
    diag = freqs * freqs + 0.5 * q
    off = np.full(n - 1, -0.25 * q)
    if (parity.i, parity.j) == (0, 0):
        off[0] = -q / (2.0 * math.sqrt(2.0))
    elif (parity.i, parity.j) == (0, 1):
        diag[0] -= 0.25 * q
    elif (parity.i, parity.j) == (1, 1):
        diag[0] += 0.25 * q
    return diag, off


def _eigvals(q: float, parity: ParityClass, n: int, nev: int) -> np.ndarray:
    diag, off = assemble_operator(q, parity, n)
    return kernels.eigvals_ascending(diag, off, nev)


def _start_n(q: float, k_max: int, cfg: TruncationConfig) -> int:
    n = max(cfg.n_min, int(math.ceil(2.0 * math.sqrt(abs(q)))) + 40, k_max + 8)
    return n


def _converged_eigvals(
    q: float, parity: ParityClass, k_max: int, cfg: TruncationConfig
) -> tuple[np.ndarray, int]:
    nev = k_max + 1
    n = _start_n(q, k_max, cfg)
    if n > cfg.n_max:
        raise TruncationError(f"initial basis size {n} exceeds n_max={cfg.n_max}", math.inf)
    vals = _eigvals(q, parity, n, nev)
    while True:
        n2 = 2 * n
        if n2 > cfg.n_max:
            raise TruncationError(
                f"eigenvalues not settled at n_max={cfg.n_max} for q={q}, class {parity}",
                float(np.max(np.abs(vals))),
            )
        vals2 = _eigvals(q, parity, n2, nev)
        delta = float(np.max(np.abs(vals2 - vals)))
        # float64 noise floor: bisection localises eigenvalues no better
        # than a few ulps of the dominant matrix scales.
        floor = 32.0 * _EPS * (abs(q) + float(np.max(np.abs(vals2))) + 1.0)
        if delta < cfg.lambda_tol + floor:
            return vals2, n2
        vals, n = vals2, n2


def _basis_values_at_zero(parity: ParityClass, n: int) -> np.ndarray:
    """Values at phi=0 (even classes) or derivative at phi=0 (odd classes)."""
    freqs = parity.frequencies(n).astype(np.float64)
    if parity.i == 0:
        out = np.full(n, 1.0 / SQRT_PI)
        if (parity.i, parity.j) == (0, 0):
            out[0] = 1.0 / SQRT_2PI
        return out
    return freqs / SQRT_PI


def _fix_sign(parity: ParityClass, coeffs: np.ndarray) -> np.ndarray:
    marker = float(np.dot(_basis_values_at_zero(parity, coeffs.shape[0]), coeffs))
    return -coeffs if marker < 0.0 else coeffs


def solve_branch(
    q: float,
    parity: ParityClass,
    k_max: int,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
) -> list[MathieuEigenpair]:
    """Eigenpairs k = 0..k_max of the operator restricted to one class.

    The basis size doubles from its starting value until every requested
    eigenvalue moves by less than cfg.lambda_tol (plus the float64 noise
    floor); eigenvectors come from inverse iteration at the settled
    values, orthogonalised within the batch, with the sign convention
    H(0) > 0 (even classes) or H'(0) > 0 (odd classes).
    """
    if not math.isfinite(q):
        raise ValueError(f"q must be finite, got {q}")
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    vals, n_used = _converged_eigvals(q, parity, k_max, cfg)
    diag, off = assemble_operator(q, parity, n_used)
    pairs = []
    vectors: list[np.ndarray] = []
    for k in range(k_max + 1):
        v = kernels.eigvec_inverse_iteration(diag, off, float(vals[k]))
        for u in vectors:
            v = v - np.dot(u, v) * u
        nv = float(np.linalg.norm(v))
        if nv < 0.5:
            raise TruncationError(
                f"inverse iteration collapsed for q={q}, class {parity}, k={k}", nv
            )
        v = v / nv
        vectors.append(v)
        v = _fix_sign(parity, v)
        pairs.append(
            MathieuEigenpair(q=q, parity=parity, k=k, lam=float(vals[k]), coeffs=v, n_used=n_used)
        )
    return pairs


def solve_eigenvalues(
    q: float,
    parity: ParityClass,
    k_max: int,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
) -> np.ndarray:
    """Converged eigenvalues only (no eigenvectors)."""
    if not math.isfinite(q):
        raise ValueError(f"q must be finite, got {q}")
    vals, _ = _converged_eigvals(q, parity, k_max, cfg)
    return vals


def dlambda_dq(pair: MathieuEigenpair) -> float:
    """q-derivative of the eigenvalue: the sin^2 expectation of the eigenfunction.

    Closed form in the Fourier coefficients; always in (0, 1].
    """
    c = pair.coeffs
    cross = float(np.dot(c[:-1], c[1:]))
    pc = (pair.parity.i, pair.parity.j)
    if pc == (0, 0):
        quad = 2.0 * (c[0] * c[1] / math.sqrt(2.0) + 0.5 * (cross - c[0] * c[1]))
    elif pc == (0, 1):
        quad = 0.5 * c[0] * c[0] + cross
    elif pc == (1, 1):
        quad = -0.5 * c[0] * c[0] + cross
    else:
        quad = cross
    return 0.5 * (1.0 - quad)


def eval_eigenfunction(pair: MathieuEigenpair, phi) -> np.ndarray | float:
    """Pointwise eigenfunction values from the finite Fourier sum."""
    phi_arr = np.asarray(phi, dtype=np.float64)
    freqs = pair.parity.frequencies(pair.coeffs.shape[0]).astype(np.float64)
    angles = np.multiply.outer(phi_arr, freqs)
    if pair.parity.i == 0:
        table = np.cos(angles) / SQRT_PI
        if (pair.parity.i, pair.parity.j) == (0, 0):
            table[..., 0] = 1.0 / SQRT_2PI
    else:
        table = np.sin(angles) / SQRT_PI
    out = table @ pair.coeffs
    if np.isscalar(phi) or np.asarray(phi).ndim == 0:
        return float(out)
    return out


def count_zeros(pair: MathieuEigenpair) -> int:
    """Sign changes of the eigenfunction over one period.

    Samples on a half-step-offset uniform grid (dodging the exact zeros
    the odd classes put at 0 and pi), brackets each sign change, and
    refines it by bisection to confirm the zeros are distinct.
    """
    m = max(16 * (pair.k + 2), 64)
    phi = (np.arange(m) + 0.5) * (2.0 * math.pi / m)
    vals = eval_eigenfunction(pair, phi)
    scale = float(np.max(np.abs(vals)))
    nxt = np.roll(vals, -1)
    for idx in range(m):
        if abs(vals[idx]) < 1e-12 * scale and vals[idx - 1] * nxt[idx] > 0.0:
            raise AmbiguousZeroError(
                f"sample at phi={phi[idx]:.6f} is {vals[idx]:.3e} with no sign change"
            )
    brackets = np.nonzero(vals * nxt < 0.0)[0]
    zeros = []
    for idx in brackets:
        a = phi[idx]
        b = phi[(idx + 1) % m]
        if b < a:
            b += 2.0 * math.pi
        zeros.append(brent_root(lambda t: float(eval_eigenfunction(pair, t)), a, b, rtol=1e-13))
    if len(zeros) != len(set(np.round(zeros, 9))):
        raise AmbiguousZeroError("refined zeros are not distinct at 1e-9 resolution")
    return len(brackets)


def asymptotic_profile(
    branch: SpectralBranch,
    q_list,
    cfg: TruncationConfig = DEFAULT_TRUNCATION,
) -> list[tuple[float, float, float]]:
    """Rows (q, lam/sqrt(q), q*dlam_dq/lam) along one eigenvalue curve.

    The first ratio tends to 2(2k+i)+1 and the second to 1/2 as q grows.
    """
    rows = []
    for q in q_list:
        if q <= 0.0:
            raise ValueError(f"asymptotic profile needs q > 0, got {q}")
        pair = solve_branch(q, branch.parity, branch.k, cfg)[branch.k]
        dl = dlambda_dq(pair)
        rows.append((q, pair.lam / math.sqrt(q), q * dl / pair.lam))
    return rows
