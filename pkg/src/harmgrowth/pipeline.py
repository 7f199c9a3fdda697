"""Composite experiments: formula versus measured growth."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import (GrowthComparison, GrowthCurve, compare_growth, cone_growth_integral,
                          cylinder_growth_integral, formula_curve, shift_curve)
from .eigensolve import CharacteristicConstant, LambdaProfile, characteristic_constant, lambda_profile
from .geometry import DomainKind, DomainSpec
from .pde import CapMode, HarmonicField, growth_profile, max_on_section, solve_harmonic


@dataclass
class CylinderGrowthCheck:
    field: HarmonicField
    profile: LambdaProfile
    measured: GrowthCurve
    predicted: GrowthCurve
    comparison: GrowthComparison
    increment_ratio: float

    @property
    def max_abs_rho(self):
        return float(np.abs(self.comparison.rho).max())


def cylinder_growth_check(domain: DomainSpec, t_min: float, t_max: float, h: float,
                          h_eig: float = 1 / 128, trim: float = 0.15, tol: float = 1e-9,
                          unit_lambda: float | None = None) -> CylinderGrowthCheck:
    """Solve with Zero/One caps and compare log M(t) with the cylinder formula.

    The truncated solution carries an arbitrary constant factor.  It is fixed
    by identifying the unit outlet data with the formula: log M(t_max) is set
    to the integral up to t_max.  ``increment_ratio`` compares growth across
    the interior window without any normalisation.
    """
    field = solve_harmonic(domain, t_min, t_max, h, "Zero", "One")
    raw = growth_profile(field, trim=trim)
    knots = np.geomspace(1.0, t_max, 64)
    prof = lambda_profile(domain, knots, h=h_eig, unit_lambda=unit_lambda)
    predicted = formula_curve("cylinder", domain.a, prof.rescaled, raw.t, tol)
    i_out = cylinder_growth_integral(domain.a, prof.rescaled, t_max, tol)
    log_m_out = math.log(max_on_section(field, t_max))
    measured = shift_curve(raw, i_out - log_m_out)
    cmp = compare_growth(predicted, measured)
    ratio = (raw.values[-1] - raw.values[0]) / (predicted.values[-1] - predicted.values[0])
    return CylinderGrowthCheck(field, prof, measured, predicted, cmp, float(ratio))


@dataclass
class ConeGrowthCheck:
    field: HarmonicField
    measured: GrowthCurve
    alpha0: CharacteristicConstant
    slope: float

    @property
    def relative_error(self):
        return self.slope / self.alpha0.alpha - 1.0


def cone_growth_check(domain: DomainSpec, r_min: float, r_max: float, h: float,
                      inlet_bc="Exact", outlet_bc="Exact", trim: float = 0.15) -> ConeGrowthCheck:
    """Slope of log M~(r) against log r on the interior window versus the cap's alpha0."""
    if domain.kind is not DomainKind.LIPSCHITZ_CONE:
        raise ValueError("cone_growth_check needs a cone")
    field = solve_harmonic(domain, r_min, r_max, h, inlet_bc, outlet_bc)
    cap = field.cap or CapMode.from_cap(domain.cap_angle)
    measured = growth_profile(field, trim=trim)
    return ConeGrowthCheck(field, measured, characteristic_constant(cap.lam, 3), measured.slope(log_t=True))


def cone_formula_curve(alpha: float, r_list, tol: float = 1e-9) -> GrowthCurve:
    return formula_curve("cone", None, lambda y: alpha, r_list, tol)
