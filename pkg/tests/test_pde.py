import math

import numpy as np
import pytest
from scipy.special import j0

from harmgrowth.errors import MaskDegenerate, OutOfWindow, OutsideCap, OutsideSection, UnsupportedDomain
from harmgrowth.eigensolve import J01
from harmgrowth.geometry import DomainSpec
from harmgrowth.pde import (CapMode, DiskMode, cone_exact, cylinder_exact, field_value, growth_profile,
                            max_on_section, max_on_sphere, solve_harmonic)

from oracles import cylinder_zero_one_series

CYL = DomainSpec.cylinder(1.0)
# Fourier-Bessel series, 2000 terms (tests/oracles.py).
SERIES_1_0 = 0.13933718361097416
SERIES_15_05 = 0.32945375375351926


def test_series_oracle_frozen():
    assert cylinder_zero_one_series(1.0, 0.0, 2.0) == pytest.approx(SERIES_1_0, abs=1e-15)


def test_exact_solutions():
    mode = DiskMode(1.0)
    assert mode.lam == pytest.approx(J01**2)
    v = cylinder_exact(2.0, [[0.3, 0.4]], mode.lam, mode)
    assert v == pytest.approx(math.exp(2 * J01) * j0(0.5 * J01), rel=1e-14)
    with pytest.raises(OutsideSection):
        cylinder_exact(0.0, [[1.2, 0.0]], mode.lam, mode)
    hemi = CapMode.hemisphere()
    assert hemi.alpha == pytest.approx(1.0)
    om = np.array([0.6, 0.0, 0.8])
    assert cone_exact(3.0, om, 1.0, hemi) == pytest.approx(2.4, rel=1e-14)
    with pytest.raises(OutsideCap):
        cone_exact(1.0, [0.0, 0.6, -0.8], 1.0, hemi)
    with pytest.raises(ValueError):
        cone_exact(1.0, [0.0, 0.0, 2.0], 1.0, hemi)


def test_cylinder_exact_caps_second_order():
    errs = []
    for h in (1 / 8, 1 / 16, 1 / 32):
        f = solve_harmonic(CYL, 0, 4, h, "Exact", "Exact")
        X, R = np.meshgrid(*f.axes, indexing="ij")
        ex = np.exp(J01 * X) * np.where(R < 1, j0(J01 * R), 0.0)
        errs.append(np.abs(f.values - ex)[f.unknown].max() / ex.max())
        assert f.residual < 1e-8
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(3.2 <= r <= 4.8 for r in ratios), ratios


def test_cylinder_zero_one_against_series():
    f = solve_harmonic(CYL, 0, 2, 1 / 32)
    assert field_value(f, (1.0, 0.0, 0.0)) == pytest.approx(SERIES_1_0, abs=2e-4)
    assert field_value(f, (1.5, 0.3, 0.4)) == pytest.approx(SERIES_15_05, abs=5e-4)


def test_axisymmetric_agrees_with_full_3d():
    pts = [(1.0, 0.0, 0.0), (1.5, 0.3, 0.2), (0.5, 0.5, 0.0)]
    gaps = []
    for h in (1 / 8, 1 / 16):
        f = solve_harmonic(CYL, 0, 2, h)
        g = solve_harmonic(CYL, 0, 2, h, full_3d=True)
        assert g.geometry == "cartesian"
        gaps.append(max(abs(field_value(f, p) - field_value(g, p)) for p in pts))
    assert gaps[1] < gaps[0] < 0.02


def test_maximum_principle_and_lateral_zero():
    f = solve_harmonic(DomainSpec.paraboloid(), 1, 20, 0.125)
    assert f.check_maximum_principle()
    assert f.lateral_max() == 0.0
    v = f.values[f.unknown]
    assert v.min() > 0 and v.max() < 1


def test_section_maxima_increase_along_axis():
    f = solve_harmonic(DomainSpec.paraboloid(), 1, 20, 0.125)
    m = [max_on_section(f, t) for t in np.linspace(3, 18, 16)]
    assert np.all(np.diff(m) > 0)
    with pytest.raises(OutOfWindow):
        max_on_section(f, 25.0)


def test_elliptic_paraboloid_cartesian_solve():
    e = DomainSpec.elliptic_paraboloid(1.0, 0.5, 0.5)
    f = solve_harmonic(e, 16, 20, 0.25)
    assert f.geometry == "cartesian"
    assert f.check_maximum_principle()
    assert f.residual < 1e-8


def test_hemisphere_cone_reproduces_linear_solution():
    f = solve_harmonic(DomainSpec.cone(math.pi / 2), 1, 8, 1 / 16, "Exact", "Exact")
    for r in (2.0, 4.0, 6.0):
        assert max_on_sphere(f, r) == pytest.approx(r, rel=1e-12)
    with pytest.raises(OutOfWindow):
        max_on_sphere(f, 9.0)
    with pytest.raises(UnsupportedDomain):
        max_on_section(f, 2.0)


def test_cone_growth_profile_slope():
    theta = math.pi / 4
    f = solve_harmonic(DomainSpec.cone(theta), 1, 8, 1 / 16, "Exact", "Exact")
    g = growth_profile(f)
    alpha = CapMode.from_cap(theta).alpha
    assert g.slope(log_t=True) == pytest.approx(alpha, rel=0.02)


def test_errors():
    with pytest.raises(MaskDegenerate):
        solve_harmonic(DomainSpec.paraboloid(), 1, 4, 0.5)
    with pytest.raises(MaskDegenerate):
        solve_harmonic(DomainSpec.paraboloid(), 0, 4, 0.1)
    with pytest.raises(UnsupportedDomain):
        solve_harmonic(DomainSpec.paraboloid(), 1, 4, 0.1, "Exact", "Exact")
    with pytest.raises(ValueError):
        solve_harmonic(CYL, 2, 1, 0.1)
    with pytest.raises(ValueError):
        solve_harmonic(CYL, 0, 1, 0.1, inlet_bc="Hot")


def test_field_csv(tmp_path):
    f = solve_harmonic(CYL, 0, 1, 0.25)
    f.to_csv(tmp_path / "f.csv", "meta")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[:2] == ["# meta", "x,rho,u"]
    assert len(lines) == 2 + int(f.inside.sum())
