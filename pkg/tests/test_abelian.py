"""Kernel transform on R^n x T^m: density constants, synthesis/inversion,
the discontinuous transform kernel on R x T, homogeneity on R^n."""

import math

import numpy as np
import pytest

from subspec import abelian as ab
from subspec.multipliers import gaussian

SPEC11 = ab.AbelianSpec(1, 1, np.eye(1))
SPEC10 = ab.AbelianSpec(1, 0)
SPEC20 = ab.AbelianSpec(2, 0)


# ---------------------------------------------------------------- spec/density


def test_spec_validation():
    with pytest.raises(ValueError):
        ab.AbelianSpec(0, 0)
    with pytest.raises(ValueError):
        ab.AbelianSpec(1, 1, np.zeros((1, 1)))
    with pytest.raises(ValueError):
        ab.AbelianSpec(1, 2, np.eye(1))
    with pytest.raises(ValueError):
        ab.AbelianSpec(1, 0, np.eye(1))


def test_density_single_mode_window():
    # for lam < 1 only the k = 0 lattice point contributes
    for lam in (0.2, 0.5, 0.9):
        expect = ab.kappa(SPEC11) * lam**-0.5
        assert ab.sigma_density(lam, SPEC11) == pytest.approx(expect, rel=1e-14)


def test_kappa_value_pinned_by_plancherel():
    # (2 pi)^{-(n+m)} * omega_{n-1}/2; for n = m = 1 this is 1/(4 pi^2).
    assert ab.kappa(SPEC11) == pytest.approx(1.0 / (4.0 * math.pi**2), rel=1e-15)


def test_plane_density_is_constant():
    vals = [ab.sigma_density(lam, SPEC20) for lam in (0.1, 1.0, 42.0)]
    assert np.allclose(vals, 1.0 / (4.0 * math.pi), rtol=1e-14)


def test_discrete_spectrum_error_and_listing():
    torus = ab.AbelianSpec(0, 1, np.eye(1) * 2.0)
    with pytest.raises(ab.DiscreteSpectrumError):
        ab.sigma_density(1.0, torus)
    assert ab.list_spectrum(torus, 20.0) == [0.0, 4.0, 16.0]


def test_lattice_enumeration_with_matrix():
    spec = ab.AbelianSpec(1, 2, np.array([[1.0, 0.3], [0.0, 0.8]]))
    ks, vals = spec.lattice_below(4.0)
    for k, v in zip(ks, vals):
        assert v == pytest.approx(float(np.sum((spec.A @ k) ** 2)), rel=1e-14)
        assert v <= 4.0


# ---------------------------------------------------------------- synthesis


@pytest.fixture(scope="module")
def heat_kernel_rxt():
    return ab.kernel_synthesize(gaussian(1.0), SPEC11, ab.BoxGridSpec(radius=12.0, step=0.05, n_y=32))


def test_plancherel_rxt(heat_kernel_rxt):
    def f2(lam):
        v = gaussian(1.0)(lam)
        return v * v

    rhs = ab.sigma_integral(f2, SPEC11)
    assert heat_kernel_rxt.l2_norm_sq() == pytest.approx(rhs, rel=1e-5)


def test_kernel_real_and_origin_value(heat_kernel_rxt):
    assert heat_kernel_rxt.max_imag() < 1e-12
    i0 = int(np.argmin(np.abs(heat_kernel_rxt.x_axes[0])))
    k00 = float(heat_kernel_rxt.values[i0, 0].real)
    assert k00 == pytest.approx(ab.sigma_integral(gaussian(1.0), SPEC11), rel=1e-6)


def test_zero_multiplier_gives_zero_kernel():
    kern = ab.kernel_synthesize(
        lambda lam: np.zeros_like(np.asarray(lam, dtype=float)),
        SPEC11,
        ab.BoxGridSpec(radius=4.0, step=0.5, n_y=8),
    )
    assert np.max(np.abs(kern.values)) == 0.0


def test_multiplier_invert_round_trip(heat_kernel_rxt):
    lams = list(np.linspace(0.1, 10.0, 34))
    rec = ab.multiplier_invert(heat_kernel_rxt, SPEC11, lams)
    for lam, fh in rec:
        assert fh == pytest.approx(math.exp(-lam), abs=1e-5)


def test_multiplier_invert_nyquist_refusal(heat_kernel_rxt):
    with pytest.raises(ValueError):
        ab.multiplier_invert(heat_kernel_rxt, SPEC11, [1e5])


def test_invert_axis_independence_r2():
    spec = ab.AbelianSpec(2, 0)
    kern = ab.kernel_synthesize(gaussian(1.0), spec, ab.BoxGridSpec(radius=10.0, step=0.12))
    lams = [0.4, 1.7, 5.0]
    rec0 = ab.multiplier_invert(kern, spec, lams, axis=0)
    rec1 = ab.multiplier_invert(kern, spec, lams, axis=1)
    for (_, a), (_, b) in zip(rec0, rec1):
        assert abs(a - b) < 1e-6


def test_invert_continuity_refines_with_grid():
    lams = np.linspace(2.5, 3.5, 21)
    deltas = []
    for step in (0.2, 0.1):
        kern = ab.kernel_synthesize(gaussian(1.0), SPEC11, ab.BoxGridSpec(radius=10.0, step=step, n_y=16))
        vals = np.array([fh for _, fh in ab.multiplier_invert(kern, SPEC11, list(lams))])
        deltas.append(float(np.max(np.abs(np.diff(vals)))))
    # sampled modulus of continuity stays bounded as the grid refines
    assert deltas[1] <= deltas[0] + 1e-6


# ---------------------------------------------------------------- transform kernel


def test_chi_normalisation_at_identity():
    for lam in np.linspace(0.05, 30.0, 200):
        if float(lam).is_integer():
            continue
        assert ab.chi_rt(float(lam), 0.0, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_chi_single_mode_closed_form():
    for lam in (0.3, 0.77, 0.99):
        for x, y in ((0.0, 0.0), (1.3, 2.0), (-2.0, 0.4)):
            assert ab.chi_rt(lam, x, y) == pytest.approx(math.cos(math.sqrt(lam) * x), abs=1e-14)


def test_chi_rejects_jump_points():
    with pytest.raises(ValueError, match="chi_rt_left"):
        ab.chi_rt(4.0, 0.1, 0.2)
    ab.chi_rt(4.5, 0.1, 0.2)  # nearby non-square values are fine


def test_one_sided_limits_converge():
    for h in (1, 2, 3):
        for x in (0.0, 0.33):
            sup_l, sup_r = [], []
            for eps in (1e-2, 1e-4, 1e-6):
                ys = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
                dl = max(abs(ab.chi_rt(h * h - eps, x, y) - ab.chi_rt_left(h, x, y)) for y in ys)
                dr = max(abs(ab.chi_rt(h * h + eps, x, y) - ab.chi_rt_right(h, x, y)) for y in ys)
                sup_l.append(dl)
                sup_r.append(dr)
            # below h^2 = 1 at x = 0 the kernel is identically its limit,
            # so the difference can vanish for every eps
            assert sup_l[0] >= sup_l[1] >= sup_l[2]
            assert sup_l[2] < sup_l[0] or sup_l[0] == 0.0
            assert sup_r[0] > sup_r[1] > sup_r[2]
            assert sup_r[2] < 40.0 * math.sqrt(1e-6)  # sqrt(eps) approach rate


def test_one_sided_limits_orthogonal_on_circle():
    ny = 2048
    ys = np.arange(ny) * (2.0 * math.pi / ny)
    for h in (1, 2, 3):
        for x in (0.0, 0.9, 2.2):
            left = np.array([ab.chi_rt_left(h, x, y) for y in ys])
            right = np.array([ab.chi_rt_right(h, x, y) for y in ys])
            assert abs(float(np.sum(left * right)) * (2.0 * math.pi / ny)) < 1e-8


def test_right_limit_is_pure_mode_h():
    ys = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    for h in (1, 2, 3):
        for y in ys:
            assert ab.chi_rt_right(h, 0.5, y) == pytest.approx(math.cos(h * y), abs=1e-15)


# ---------------------------------------------------------------- narrow band / homogeneity


def test_narrow_band_kernel_is_approximate_eigenfunction():
    """Applying the operator (multiply the symbol) to a narrow-band kernel
    reproduces lam0 times the kernel up to the band width."""
    lam0 = 2.0
    grid = ab.BoxGridSpec(radius=10.0, step=0.1, n_y=16)
    errs = []
    for delta in (0.2, 0.1):
        from subspec.multipliers import narrow_band

        band = narrow_band(lam0, delta)
        k1 = ab.kernel_synthesize(band, SPEC11, grid)
        k2 = ab.kernel_synthesize(lambda lam: np.asarray(lam) * band(lam), SPEC11, grid)
        num = np.sqrt(
            np.sum(np.abs(k2.values - lam0 * k1.values) ** 2) / np.sum(np.abs(k1.values) ** 2)
        )
        errs.append(float(num))
    assert errs[1] < errs[0]
    assert errs[1] < 0.1


def test_homogeneity_closed_form_line():
    lhs, rhs = ab.chi_homogeneity_check(1.0, 2.0, [0.7], SPEC10)
    assert lhs == pytest.approx(rhs, abs=1e-8)
    assert lhs == pytest.approx(math.cos(1.4), abs=1e-8)


def test_homogeneity_identity_dilation():
    lhs, rhs = ab.chi_homogeneity_check(1.3, 1.0, [0.5], SPEC10)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_homogeneity_plane():
    lhs, rhs = ab.chi_homogeneity_check(1.0, 2.0, [0.6, 0.8], SPEC20)
    assert lhs == pytest.approx(rhs, abs=1e-6)


def test_homogeneity_requires_pure_euclidean():
    with pytest.raises(ValueError):
        ab.chi_homogeneity_check(1.0, 2.0, [0.5], SPEC11)


def test_kernel_csv_export(tmp_path, heat_kernel_rxt):
    import json

    path = str(tmp_path / "k.csv")
    heat_kernel_rxt.write_csv(path)
    with open(path) as fh:
        header = fh.readline().strip()
        first = fh.readline().strip()
    assert header == "x1,y1,re,im"
    assert len(first.split(",")) == 4
    side = json.load(open(path + ".json"))
    assert side["group"] == {"n": 1, "m": 1, "A": [[1.0]]}
    assert "lambda_cut" in side["meta"] and "xi_points" in side["meta"]


def test_symbol_point_and_chi_samples():
    sp = ab.SymbolPoint.at(SPEC11, [1.5], [2])
    assert sp.value == pytest.approx(1.5**2 + 4.0)
    with pytest.raises(ValueError):
        ab.SymbolPoint.at(SPEC11, [1.0, 2.0], [0])
    samples = ab.chi_rt_samples(np.linspace(0.5, 4.5, 5), 0.3, 0.7)
    lams = [s.lam for s in samples]
    assert 1.0 not in lams and 4.0 not in lams  # jump points skipped
    for s in samples:
        assert s.value == pytest.approx(ab.chi_rt(s.lam, 0.3, 0.7))


def test_table_multiplier_round_trip(tmp_path):
    from subspec.multipliers import from_table, parse_named

    lams = np.linspace(0.0, 40.0, 400)
    path = tmp_path / "mult.csv"
    with open(path, "w") as fh:
        fh.write("lambda,value\n")
        for lam in lams:
            fh.write(f"{lam},{math.exp(-lam)}\n")
    F = parse_named(f"table:{path}")
    assert float(F(2.0)) == pytest.approx(math.exp(-2.0), abs=1e-3)
    kern = ab.kernel_synthesize(
        F, SPEC11, ab.BoxGridSpec(radius=10.0, step=0.1, n_y=16), settle_tol=1e-4
    )
    rec = ab.multiplier_invert(kern, SPEC11, [0.5, 3.0])
    for lam, fh in rec:
        assert fh == pytest.approx(math.exp(-lam), abs=1e-3)
    bad = tmp_path / "missing_header.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        from_table(str(bad))
