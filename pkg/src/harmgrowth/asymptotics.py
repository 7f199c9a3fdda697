"""Growth formulas: cylinder and cone integrals, Huber bound, harmonic-measure bound."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import NoOverlap, QuadratureFailure

DEFAULT_TOL = 1e-9
MAX_DEPTH = 40


class Provenance(str, Enum):
    FORMULA_CYLINDER = "FormulaCylinder"
    FORMULA_CONE = "FormulaCone"
    HUBER_BOUND = "HuberBound"
    PDE_MEASURED = "PdeMeasured"
    EXACT_ORACLE = "ExactOracle"


@dataclass
class GrowthCurve:
    """Samples (t, value) of log M(t) or log M~(r) with their origin."""

    t: np.ndarray
    values: np.ndarray
    provenance: Provenance
    rho: Optional[np.ndarray] = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.provenance = Provenance(self.provenance)
        if self.t.shape != self.values.shape or self.t.ndim != 1:
            raise ValueError("t and values must be 1-D arrays of equal length")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("t must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("growth values must be finite")

    def __len__(self):
        return len(self.t)

    def at(self, t):
        return np.interp(t, self.t, self.values)

    def slope(self, log_t=False):
        """Least-squares slope of value against t (or log t)."""
        x = np.log(self.t) if log_t else self.t
        return float(np.polyfit(x, self.values, 1)[0])

    def to_csv(self, path, header_comment=None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("t", "value", "provenance", "rho"))
            rho = self.rho if self.rho is not None else [math.nan] * len(self.t)
            for ti, vi, ri in zip(self.t, self.values, rho):
                w.writerow((repr(float(ti)), repr(float(vi)), self.provenance.value,
                            "nan" if math.isnan(ri) else repr(float(ri))))


# ---------------------------------------------------------------------------
# Adaptive Simpson
# ---------------------------------------------------------------------------
def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = DEFAULT_TOL,
                     max_depth: int = MAX_DEPTH) -> float:
    """Integral of f over [a, b] with absolute error about ``tol``.

    Classic interval-halving Simpson with Richardson correction; an explicit
    stack avoids Python's recursion limit.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6 * (flo + 4 * flm + fmid)
        right = (hi - mid) / 6 * (fmid + 4 * frm + fhi)
        delta = left + right - s
        if not math.isfinite(delta):
            raise QuadratureFailure(f"non-finite integrand near [{lo}, {hi}]")
        if abs(delta) <= 15 * eps:
            total += left + right + delta / 15
            continue
        if depth >= max_depth:
            raise QuadratureFailure(f"refinement depth exceeded {max_depth} near [{lo}, {hi}]")
        stack.append((mid, hi, fmid, frm, fhi, right, eps / 2, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, eps / 2, depth + 1))
    return sign * total


def cylinder_growth_integral(a_profile: Callable, lambda_profile: Callable, t: float,
                             tol: float = DEFAULT_TOL, t0: float = 1.0) -> float:
    """Integral from t0 (default 1) to t of sqrt(lambda(tau)) / a(tau).

    ``lambda_profile`` is the eigenvalue of the rescaled section D_tau; pass
    ``LambdaProfile.rescaled`` for a table of physical eigenvalues.
    """
    if t < t0:
        raise ValueError(f"t must be >= {t0}")
    return adaptive_simpson(lambda s: math.sqrt(float(lambda_profile(s))) / float(a_profile(s)), t0, t, tol)


def cone_growth_integral(alpha_profile: Callable, r: float, tol: float = DEFAULT_TOL,
                         r0: float = math.e) -> float:
    """Integral from e to r of alpha(y) / y, evaluated in u = log y."""
    if r < r0:
        raise ValueError(f"r must be >= {r0}")
    return adaptive_simpson(lambda u: float(alpha_profile(math.exp(u))), math.log(r0), math.log(r), tol)


def huber_lower_bound(alpha1_profile: Callable, r: float, C: float = 1.0, tol: float = DEFAULT_TOL) -> float:
    """C exp(int_e^{r/2} alpha1(t)/t dt)."""
    if r < 2 * math.e:
        raise ValueError("r must be >= 2e")
    return C * math.exp(cone_growth_integral(alpha1_profile, r / 2, tol))


def hm_lower_bound(m_tilde: float) -> float:
    """Reciprocal harmonic-measure bound 1 / M~(r) for u normalised at x0."""
    if not m_tilde >= 1:
        raise ValueError("m_tilde must be >= 1")
    return 1.0 / m_tilde


@dataclass
class GrowthComparison:
    t: np.ndarray
    rho: np.ndarray
    trend: float

    def rows(self):
        return list(zip(self.t.tolist(), self.rho.tolist()))


def compare_growth(predicted: GrowthCurve, measured: GrowthCurve) -> GrowthComparison:
    """rho(t) = measured / predicted - 1 on the shared t-range, plus the slope of |rho| vs log t.

    Measured nodes inside the predicted range are kept; predicted values are
    interpolated linearly onto them.
    """
    lo = max(predicted.t[0], measured.t[0])
    hi = min(predicted.t[-1], measured.t[-1])
    sel = (measured.t >= lo) & (measured.t <= hi)
    if hi <= lo or sel.sum() < 1:
        raise NoOverlap("growth curves share no t-window")
    t = measured.t[sel]
    p = predicted.at(t)
    if np.any(p == 0):
        raise ValueError("predicted growth vanishes on the overlap")
    rho = measured.values[sel] / p - 1.0
    trend = float(np.polyfit(np.log(t), np.abs(rho), 1)[0]) if len(t) >= 2 else 0.0
    return GrowthComparison(t=t, rho=rho, trend=trend)


def formula_curve(kind: str, profile_a: Optional[Callable], profile: Callable, t_list, tol=DEFAULT_TOL):
    """GrowthCurve of the cylinder (kind="cylinder") or cone (kind="cone") formula.

    Values are accumulated interval by interval, each piece getting an equal
    share of ``tol``.
    """
    t_list = np.asarray(t_list, dtype=float)
    piece_tol = tol / max(len(t_list), 1)
    if kind == "cylinder":
        first = cylinder_growth_integral(profile_a, profile, float(t_list[0]), piece_tol)
        step = lambda a, b: cylinder_growth_integral(profile_a, profile, b, piece_tol, t0=a)
        prov = Provenance.FORMULA_CYLINDER
    elif kind == "cone":
        first = cone_growth_integral(profile, float(t_list[0]), piece_tol)
        step = lambda a, b: cone_growth_integral(profile, b, piece_tol, r0=a)
        prov = Provenance.FORMULA_CONE
    else:
        raise ValueError(f"unknown formula kind {kind!r}")
    vals = [first]
    for a, b in zip(t_list[:-1], t_list[1:]):
        vals.append(vals[-1] + step(float(a), float(b)))
    return GrowthCurve(t_list, vals, prov)


def shift_curve(curve: GrowthCurve, shift: float) -> GrowthCurve:
    """Same curve with ``shift`` added, i.e. u multiplied by e^shift."""
    return GrowthCurve(curve.t, curve.values + shift, curve.provenance)


def upper_half_decreasing(comparison: GrowthComparison) -> bool:
    """|rho| strictly decreasing over the upper half of the compared window."""
    t = comparison.t
    mid = 0.5 * (t[0] + t[-1])
    r = np.abs(comparison.rho[t >= mid])
    return bool(len(r) >= 2 and np.all(np.diff(r) < 0))
