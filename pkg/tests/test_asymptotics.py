import math

import numpy as np
import pytest

from harmgrowth.asymptotics import (GrowthCurve, Provenance, adaptive_simpson, compare_growth,
                                    cone_growth_integral, cylinder_growth_integral, formula_curve,
                                    hm_lower_bound, huber_lower_bound, shift_curve, upper_half_decreasing)
from harmgrowth.errors import NoOverlap, QuadratureFailure

from oracles import trapezoid

# Integral from e to e^4 of (1 + 1/(1 + log y)) / y: 3 + ln(5/2).
CONE_EXACT = 3.916290731874155
CONE_TRAPEZOID_1E6 = 3.916290731927184

J01SQ = 5.783185962946781


def varying_alpha(y):
    return 1 + 1 / (1 + math.log(y))


def test_cone_integral_against_closed_form_and_trapezoid():
    assert CONE_EXACT == pytest.approx(3 + math.log(2.5), abs=1e-15)
    got = cone_growth_integral(varying_alpha, math.e**4)
    assert got == pytest.approx(CONE_EXACT, abs=1e-9)
    oracle = trapezoid(lambda y: (1 + 1 / (1 + np.log(y))) / y, math.e, math.e**4, 10**6)
    assert oracle == pytest.approx(CONE_TRAPEZOID_1E6, abs=1e-14)
    assert got == pytest.approx(oracle, abs=1e-9)


def test_cone_constant_alpha_is_power_law():
    for r in (10.0, 1e3, 1e8):
        assert cone_growth_integral(lambda y: 2.5, r) == pytest.approx(2.5 * (math.log(r) - 1), abs=1e-10)


def test_cylinder_integral_paraboloid_closed_form():
    # a = sqrt(t), lambda of the rescaled section constant j01^2: 2 j01 (sqrt t - 1).
    for t in (4.0, 100.0, 400.0):
        got = cylinder_growth_integral(math.sqrt, lambda s: J01SQ, t)
        assert got == pytest.approx(2 * math.sqrt(J01SQ) * (math.sqrt(t) - 1), abs=1e-8)
    assert cylinder_growth_integral(math.sqrt, lambda s: J01SQ, 1.0) == 0.0
    with pytest.raises(ValueError):
        cylinder_growth_integral(math.sqrt, lambda s: J01SQ, 0.5)


def test_cylinder_integral_straight_cylinder_is_linear():
    got = cylinder_growth_integral(lambda s: 1.0, lambda s: J01SQ, 9.0)
    assert got == pytest.approx(8 * math.sqrt(J01SQ), abs=1e-12)


def test_simpson_polynomials_and_orientation():
    assert adaptive_simpson(lambda x: x**3 - 2 * x, 0.0, 2.0) == pytest.approx(0.0, abs=1e-14)
    assert adaptive_simpson(math.sin, math.pi, 0.0) == pytest.approx(-2.0, abs=1e-10)
    assert adaptive_simpson(math.exp, 1.0, 1.0) == 0.0


def test_simpson_failures():
    # Nodes are dyadic points of [-1, 2], so x = 0 is never sampled; the pole defeats refinement.
    with pytest.raises(QuadratureFailure):
        adaptive_simpson(lambda x: 1 / x, -1.0, 2.0)
    with pytest.raises(QuadratureFailure):
        adaptive_simpson(lambda x: math.inf, 0.0, 1.0)


def test_huber_bound():
    assert huber_lower_bound(lambda y: 1.0, 2 * math.e**3) == pytest.approx(math.e**2, rel=1e-10)
    assert huber_lower_bound(lambda y: 1.0, 2 * math.e**3, C=0.5) == pytest.approx(0.5 * math.e**2, rel=1e-10)
    with pytest.raises(ValueError):
        huber_lower_bound(lambda y: 1.0, 5.0)


def test_hm_bound():
    assert hm_lower_bound(1.0) == 1.0
    assert hm_lower_bound(250.0) == 0.004
    for bad in (0.5, 0.0, float("nan")):
        with pytest.raises(ValueError):
            hm_lower_bound(bad)


def test_growth_curve_validation_and_csv(tmp_path):
    with pytest.raises(ValueError):
        GrowthCurve([1, 1], [0, 1], Provenance.PDE_MEASURED)
    with pytest.raises(ValueError):
        GrowthCurve([1, 2], [0, math.inf], "PdeMeasured")
    c = GrowthCurve([1, 2, 3], [0.0, 1.0, 2.0], "FormulaCone")
    assert c.provenance is Provenance.FORMULA_CONE
    assert c.slope() == pytest.approx(1.0)
    c.rho = np.array([0.1, 0.0, -0.1])
    c.to_csv(tmp_path / "g.csv", "meta")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[:3] == ["# meta", "t,value,provenance,rho", "1.0,0.0,FormulaCone,0.1"]


def test_compare_growth():
    pred = GrowthCurve([1, 2, 4, 6, 8], [1.0, 2.0, 4.0, 6.0, 8.0], Provenance.FORMULA_CYLINDER)
    meas = GrowthCurve([2, 4, 6, 8, 16], [2.2, 4.2, 6.2, 8.2, 99.0], Provenance.PDE_MEASURED)
    cmp_ = compare_growth(pred, meas)
    np.testing.assert_allclose(cmp_.t, [2, 4, 6, 8])
    np.testing.assert_allclose(cmp_.rho, [0.1, 0.05, 0.2 / 6, 0.025])
    assert cmp_.trend < 0
    assert upper_half_decreasing(cmp_)
    flat = compare_growth(pred, GrowthCurve([4, 6, 8], [4.4, 6.6, 8.8], Provenance.PDE_MEASURED))
    assert not upper_half_decreasing(flat)
    with pytest.raises(NoOverlap):
        compare_growth(pred, GrowthCurve([10, 20], [1.0, 2.0], Provenance.PDE_MEASURED))


def test_formula_curve_matches_single_integrals():
    ts = [1.0, 4.0, 9.0, 25.0]
    curve = formula_curve("cylinder", math.sqrt, lambda s: J01SQ, ts)
    np.testing.assert_allclose(curve.values, 2 * math.sqrt(J01SQ) * (np.sqrt(ts) - 1), atol=1e-8)
    cone = formula_curve("cone", None, varying_alpha, [math.e, math.e**2, math.e**4])
    assert cone.values[-1] == pytest.approx(CONE_EXACT, abs=1e-8)
    assert shift_curve(cone, 1.0).values[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        formula_curve("sphere", None, varying_alpha, [3.0])
