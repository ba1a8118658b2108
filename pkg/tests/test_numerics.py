"""Root finding and quadrature helpers."""

import math

import numpy as np
import pytest

from subspec.numerics import (
    brent_root,
    expand_bracket,
    gauss_legendre_panels,
    integrate_piecewise,
    integrate_until_stable,
)


def test_brent_simple_root():
    root = brent_root(lambda x: x * x - 2.0, 0.0, 2.0)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-14)


def test_brent_requires_bracket():
    with pytest.raises(ValueError):
        brent_root(lambda x: x * x + 1.0, -1.0, 1.0)


def test_brent_endpoint_root():
    assert brent_root(lambda x: x, 0.0, 1.0) == 0.0


def test_expand_bracket_monotone():
    f = lambda q: math.sqrt(q) - 7.0
    lo, hi = expand_bracket(f, 1.0, 2.0)
    assert f(lo) <= 0.0 <= f(hi)
    assert brent_root(f, lo, hi) == pytest.approx(49.0, rel=1e-12)


def test_gauss_legendre_panels_polynomial_exact():
    nodes, weights = gauss_legendre_panels(-1.0, 3.0, 3, 8)
    val = float(np.dot(weights, nodes**7))
    exact = (3.0**8 - (-1.0) ** 8) / 8.0
    assert val == pytest.approx(exact, rel=1e-13)


def test_integrate_until_stable_gaussian():
    val = integrate_until_stable(lambda x: np.exp(-x * x), 0.0, 8.0, rtol=1e-12)
    assert val == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-11)


def test_integrate_piecewise_handles_kink():
    # |x - 1| has a kink at the breakpoint; splitting keeps GL spectral
    val = integrate_piecewise(lambda x: np.abs(x - 1.0), [0.0, 1.0, 3.0], rtol=1e-12)
    assert val == pytest.approx(0.5 + 2.0, rel=1e-12)


def test_integrate_piecewise_sqrt_kink():
    val = integrate_piecewise(lambda x: np.sqrt(np.abs(x - 1.0)), [0.0, 1.0, 2.0], order=48)
    assert val == pytest.approx(4.0 / 3.0, rel=1e-6)
