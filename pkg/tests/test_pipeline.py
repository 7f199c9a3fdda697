import math

import numpy as np
import pytest

from harmgrowth.eigensolve import J01
from harmgrowth.geometry import DomainSpec
from harmgrowth.pipeline import cone_formula_curve, cone_growth_check, cylinder_growth_check


def test_paraboloid_short_window_with_eigensolver_lambda():
    chk = cylinder_growth_check(DomainSpec.paraboloid(), 25.0, 100.0, 0.25, h_eig=1 / 64)
    assert chk.profile.unit_lambda == pytest.approx(J01**2, rel=0.02)
    assert chk.max_abs_rho < 0.10
    # Outlet anchoring: rho vanishes at the outlet end of the curve up to the trim.
    assert abs(chk.comparison.rho[-1]) < abs(chk.comparison.rho[0])
    assert 0.9 < chk.increment_ratio < 1.1


def test_straight_cylinder_check_is_tight():
    chk = cylinder_growth_check(DomainSpec.cylinder(1.0), 1.0, 9.0, 1 / 16, unit_lambda=J01**2)
    assert chk.increment_ratio == pytest.approx(1.0, abs=0.01)


def test_cone_check_and_formula():
    chk = cone_growth_check(DomainSpec.cone(math.pi / 2), 1.0, 8.0, 1 / 8)
    assert chk.alpha0.alpha == pytest.approx(1.0)
    assert abs(chk.relative_error) < 0.02
    curve = cone_formula_curve(2.0, [math.e, 10.0, 100.0])
    np.testing.assert_allclose(curve.values, 2 * (np.log([math.e, 10.0, 100.0]) - 1), atol=1e-9)
    with pytest.raises(ValueError):
        cone_growth_check(DomainSpec.cylinder(), 1.0, 2.0, 0.1)
