"""Finite-volume Laplace solves on truncated domains and separable exact solutions.

Circular cross-sections use the axisymmetric reduction on a meridian
half-plane (axial coordinate, distance to the axis).  Elliptic sections use a
7-point Cartesian lattice.  Boundaries are stair-stepped: a node is an
unknown only when it lies strictly inside the domain and strictly between
the two caps.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import RegularGridInterpolator
from scipy.special import j0

from .asymptotics import GrowthCurve, Provenance
from .eigensolve import J01, EigenResult, beltrami_lambda1, characteristic_constant, dirichlet_lambda1
from .errors import (MaskDegenerate, OutOfWindow, OutsideCap, OutsideSection, SolverDivergence,
                     UnsupportedDomain)
from .geometry import DomainKind, DomainSpec, SectionMask
from .linalg import DirectSPD, pcg, relative_residual

RESIDUAL_TOL = 1e-8
CG_RTOL = 1e-10


class InletBC(str, Enum):
    ZERO = "Zero"
    EXACT = "Exact"


class OutletBC(str, Enum):
    ONE = "One"
    EXACT = "Exact"


# ---------------------------------------------------------------------------
# Section and cap modes used by the exact solutions
# ---------------------------------------------------------------------------
@dataclass
class DiskMode:
    """Principal Dirichlet mode J0(j01 |Y| / R) of the disk of radius R."""

    radius: float = 1.0

    @property
    def lam(self):
        return (J01 / self.radius) ** 2

    def contains(self, Y):
        return np.linalg.norm(np.atleast_2d(Y), axis=1) <= self.radius * (1 + 1e-12)

    def __call__(self, Y):
        r = np.linalg.norm(np.atleast_2d(Y), axis=1)
        return np.where(r < self.radius, j0(J01 * r / self.radius), 0.0)


@dataclass
class GridMode:
    """Section mode sampled on a grid (e.g. an ellipse eigenfunction), bilinear in between."""

    eig: EigenResult
    contains_fn: Callable

    def __post_init__(self):
        y1, y2 = self.eig.coords
        self._interp = RegularGridInterpolator((y1[:, 0], y2[0, :]), self.eig.eigenfunction,
                                               bounds_error=False, fill_value=0.0)

    @property
    def lam(self):
        return self.eig.lam

    def contains(self, Y):
        return self.contains_fn(np.atleast_2d(Y))

    def __call__(self, Y):
        return self._interp(np.atleast_2d(Y))


@dataclass
class CapMode:
    """Principal Laplace-Beltrami mode of a polar cap, as a function of the polar angle."""

    cap_angle: float
    psi: Callable
    lam: float

    @property
    def alpha(self):
        return characteristic_constant(self.lam, 3).alpha

    @classmethod
    def hemisphere(cls):
        return cls(math.pi / 2, np.cos, 2.0)

    @classmethod
    def from_cap(cls, cap_angle):
        if abs(cap_angle - math.pi / 2) < 1e-15:
            return cls.hemisphere()
        eig = beltrami_lambda1(cap_angle)
        return cls(cap_angle, eig.psi_at_angle, eig.lam)

    def __call__(self, theta):
        th = np.asarray(theta, dtype=float)
        return np.where(th < self.cap_angle, self.psi(np.minimum(th, self.cap_angle)), 0.0)


def cylinder_exact(x, Y, lam, psi1):
    """e^{sqrt(lam) x} psi1(Y), the separable solution in R x D with A_1 = 1."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if not np.all(psi1.contains(Y)):
        raise OutsideSection("Y lies outside the cross-section")
    out = np.exp(math.sqrt(lam) * np.asarray(x, dtype=float)) * psi1(Y)
    return float(out[0]) if out.size == 1 else out


def cone_exact(r, omega, alpha0, psi, axis=2):
    """r^alpha0 psi(omega) for unit vectors omega; psi is a CapMode."""
    om = np.atleast_2d(np.asarray(omega, dtype=float))
    norms = np.linalg.norm(om, axis=1)
    if np.any(np.abs(norms - 1) > 1e-9):
        raise ValueError("omega must be unit vectors")
    theta = np.arccos(np.clip(om[:, axis], -1.0, 1.0))
    if np.any(theta > psi.cap_angle * (1 + 1e-12)):
        raise OutsideCap("omega lies outside the cap")
    out = np.power(np.asarray(r, dtype=float), alpha0) * psi(theta)
    return float(out[0]) if out.size == 1 else out


# ---------------------------------------------------------------------------
# Harmonic fields
# ---------------------------------------------------------------------------
@dataclass
class HarmonicField:
    """Discrete harmonic function on a truncated domain.

    ``geometry`` is "axisym" (axes x and rho), "cone" (axes z and rho) or
    "cartesian" (axes x, y, z).  ``unknown`` marks solved nodes; all other
    nodes carry Dirichlet data in ``values``.
    """

    geometry: str
    axes: tuple
    h: float
    values: np.ndarray
    unknown: np.ndarray
    inside: np.ndarray
    bc: dict
    residual: float
    domain: DomainSpec
    t_min: float
    t_max: float
    cap: Optional[CapMode] = None
    bc_range: tuple = (0.0, 0.0)

    def check_maximum_principle(self, rel=1e-12):
        lo, hi = self.bc_range
        span = max(hi - lo, 1e-300)
        v = self.values[self.unknown]
        return bool(np.all(v >= lo - rel * span) and np.all(v <= hi + rel * span))

    def lateral_max(self):
        """Largest |value| on lateral boundary nodes (should be 0)."""
        lateral = ~self.inside
        return float(np.abs(self.values[lateral]).max()) if lateral.any() else 0.0

    # -- sampling ---------------------------------------------------------
    def interpolator(self):
        if not hasattr(self, "_interp"):
            self._interp = RegularGridInterpolator(self.axes, self.values, bounds_error=False, fill_value=0.0)
        return self._interp

    def to_csv(self, path, header_comment=None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            w = csv.writer(fh, lineterminator="\n")
            if self.values.ndim == 2:
                names = ("x", "rho", "u") if self.geometry == "axisym" else ("z", "rho", "u")
                w.writerow(names)
                A, B = np.meshgrid(*self.axes, indexing="ij")
                for a, b, u in zip(A[self.inside], B[self.inside], self.values[self.inside]):
                    w.writerow((repr(float(a)), repr(float(b)), repr(float(u))))
            else:
                # Mid-plane slice z = 0.
                w.writerow(("x", "y", "u"))
                k = int(np.argmin(np.abs(self.axes[2])))
                for i, xv in enumerate(self.axes[0]):
                    for j, yv in enumerate(self.axes[1]):
                        if self.inside[i, j, k]:
                            w.writerow((repr(float(xv)), repr(float(yv)), repr(float(self.values[i, j, k]))))


def _graph_solve(n_nodes, edges, fixed_mask, fixed_values, method):
    """Assemble and solve the weighted graph Laplacian restricted to free nodes.

    ``edges`` is a list of (p, q, w) arrays over flat node indices.  Returns
    (solution over all nodes, relative residual).
    """
    free = ~fixed_mask
    idx = -np.ones(n_nodes, dtype=np.int64)
    n = int(free.sum())
    if n == 0:
        raise MaskDegenerate("no interior nodes")
    idx[free] = np.arange(n)
    diag = np.zeros(n)
    rhs = np.zeros(n)
    rows, cols, vals = [], [], []
    for p, q, w in edges:
        fp, fq = free[p], free[q]
        both = fp & fq
        rows += [idx[p[both]], idx[q[both]]]
        cols += [idx[q[both]], idx[p[both]]]
        vals += [-w[both], -w[both]]
        np.add.at(diag, idx[p[fp]], w[fp])
        np.add.at(diag, idx[q[fq]], w[fq])
        pf = fp & ~fq
        np.add.at(rhs, idx[p[pf]], w[pf] * fixed_values[q[pf]])
        qf = fq & ~fp
        np.add.at(rhs, idx[q[qf]], w[qf] * fixed_values[p[qf]])
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag)
    A = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    if method == "direct":
        x = DirectSPD(A).solve(rhs)
    elif method == "cg":
        x, _ = pcg(A, rhs, rtol=CG_RTOL)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(x)):
        raise SolverDivergence("non-finite values in the solution")
    res = relative_residual(A, x, rhs)
    if res > RESIDUAL_TOL:
        raise SolverDivergence(f"relative residual {res:.3e} exceeds {RESIDUAL_TOL:g}")
    out = fixed_values.astype(float).copy()
    out[free] = x
    return out, res


def _meridian_edges(shape, h_ax, h_rad):
    """Finite-volume couplings of (1/rho)(rho u_rho)_rho + u_xx on a node grid with rho_j = j h_rad."""
    n_ax, n_rad = shape
    ids = np.arange(n_ax * n_rad).reshape(shape)
    rho = h_rad * np.arange(n_rad)
    vol = rho * h_rad
    vol[0] = h_rad**2 / 8
    w_ax = np.broadcast_to(vol / (h_rad * h_ax**2), (n_ax - 1, n_rad))
    w_rad = np.broadcast_to((rho[:-1] + 0.5 * h_rad) / h_rad**2, (n_ax, n_rad - 1))
    return [
        (ids[:-1, :].ravel(), ids[1:, :].ravel(), np.ascontiguousarray(w_ax).ravel()),
        (ids[:, :-1].ravel(), ids[:, 1:].ravel(), np.ascontiguousarray(w_rad).ravel()),
    ]


def _cartesian_edges(shape, h):
    ids = np.arange(int(np.prod(shape))).reshape(shape)
    w = 1.0 / h**2
    edges = []
    for ax in range(3):
        sl_a = [slice(None)] * 3
        sl_b = [slice(None)] * 3
        sl_a[ax] = slice(None, -1)
        sl_b[ax] = slice(1, None)
        p = ids[tuple(sl_a)].ravel()
        edges.append((p, ids[tuple(sl_b)].ravel(), np.full(p.shape, w)))
    return edges


def _section_mode(domain: DomainSpec, h: float):
    if domain.circular:
        return DiskMode(1.0)
    b = domain.ellipse_b
    eig = dirichlet_lambda1(SectionMask.ellipse(1.0, b, h))
    return GridMode(eig, lambda Y: (Y[:, 0]) ** 2 + (Y[:, 1] / b) ** 2 <= 1 + 1e-12)


def solve_harmonic(domain: DomainSpec, t_min: float, t_max: float, h: float,
                   inlet_bc="Zero", outlet_bc="One", method: Optional[str] = None,
                   full_3d: bool = False) -> HarmonicField:
    """Discrete harmonic function on the domain truncated at t_min and t_max.

    Cylinder-like domains are cut by the planes x = t_min, t_max; cones by
    the spheres |xi| = t_min, t_max (t_min = 0 leaves the apex untouched).
    Exact caps take their data from ``cylinder_exact`` (straight cylinders)
    or ``cone_exact`` (cones).
    """
    inlet_bc, outlet_bc = InletBC(inlet_bc), OutletBC(outlet_bc)
    if not t_min < t_max:
        raise ValueError("t_min must be < t_max")
    if h <= 0:
        raise ValueError("h must be positive")
    if domain.kind is DomainKind.LIPSCHITZ_CONE:
        return _solve_cone(domain, t_min, t_max, h, inlet_bc, outlet_bc, method or "direct")
    if domain.kind not in (DomainKind.PARABOLOID, DomainKind.HORN, DomainKind.STRAIGHT_CYLINDER,
                           DomainKind.ELLIPTIC_PARABOLOID):
        raise UnsupportedDomain(f"no Laplace solver for {domain.kind.value}")
    exact = InletBC.EXACT in (inlet_bc,) or outlet_bc is OutletBC.EXACT
    if exact and domain.kind is not DomainKind.STRAIGHT_CYLINDER:
        raise UnsupportedDomain("Exact caps need a separable solution (straight cylinder)")
    if domain.kind is DomainKind.PARABOLOID or domain.kind is DomainKind.ELLIPTIC_PARABOLOID:
        if t_min <= 0:
            raise MaskDegenerate("paraboloid sections vanish at the origin")
    n_ax = int(round((t_max - t_min) / h))
    h_ax = (t_max - t_min) / n_ax
    xs = t_min + h_ax * np.arange(n_ax + 1)
    a = np.asarray(domain.a(xs), dtype=float)
    if float(np.min(a)) * domain.ellipse_b < 4 * h:
        raise MaskDegenerate(f"section thinner than 4 cells (min radius {np.min(a) * domain.ellipse_b:.3g}, h={h})")
    if domain.circular and not full_3d:
        return _solve_axisym(domain, xs, h_ax, h, a, inlet_bc, outlet_bc, method or "direct")
    return _solve_cartesian(domain, xs, h, a, inlet_bc, outlet_bc, method or "cg")


def _cap_values(domain, inlet_bc, outlet_bc, mode, x_first, x_last, Ypts, inside_first, inside_last):
    lam = mode.lam if mode is not None else None
    v0 = np.zeros(len(Ypts))
    v1 = np.ones(len(Ypts))
    if inlet_bc is InletBC.EXACT:
        v0 = math.exp(math.sqrt(lam) * x_first) * mode(Ypts)
    if outlet_bc is OutletBC.EXACT:
        v1 = math.exp(math.sqrt(lam) * x_last) * mode(Ypts)
    return np.where(inside_first, v0, 0.0), np.where(inside_last, v1, 0.0)


def _solve_axisym(domain, xs, h_ax, h, a, inlet_bc, outlet_bc, method):
    n_rad = int(math.ceil(float(a.max()) / h)) + 2
    rho = h * np.arange(n_rad)
    inside = rho[None, :] < a[:, None]
    shape = inside.shape
    fixed = ~inside.copy()
    fixed[0, :] = True
    fixed[-1, :] = True
    vals = np.zeros(shape)
    mode = DiskMode(domain.A) if InletBC.EXACT in (inlet_bc,) or outlet_bc is OutletBC.EXACT else None
    Y = np.stack([rho, np.zeros_like(rho)], axis=1)
    vals[0, :], vals[-1, :] = _cap_values(domain, inlet_bc, outlet_bc, mode, xs[0], xs[-1], Y,
                                          inside[0], inside[-1])
    edges = _meridian_edges(shape, h_ax, h)
    out, res = _graph_solve(vals.size, edges, fixed.ravel(), vals.ravel(), method)
    bc_vals = np.concatenate([vals[0], vals[-1], [0.0]])
    return HarmonicField("axisym", (xs, rho), h, out.reshape(shape), ~fixed, inside,
                         {"inlet": inlet_bc.value, "outlet": outlet_bc.value, "method": method},
                         res, domain, xs[0], xs[-1], bc_range=(float(bc_vals.min()), float(bc_vals.max())))


def _solve_cartesian(domain, xs, h, a, inlet_bc, outlet_bc, method):
    amax = float(a.max())
    b = domain.ellipse_b
    n1 = int(math.ceil(amax / h)) + 1
    n2 = int(math.ceil(amax * b / h)) + 1
    ys = h * np.arange(-n1, n1 + 1)
    zs = h * np.arange(-n2, n2 + 1)
    if len(xs) * len(ys) * len(zs) > 2_000_000:
        raise MaskDegenerate("3-D grid exceeds 2e6 cells; increase h")
    X, Yg, Zg = np.meshgrid(xs, ys, zs, indexing="ij")
    aa = a[:, None, None]
    inside = (Yg / aa) ** 2 + (Zg / (b * aa)) ** 2 < 1.0
    fixed = ~inside
    fixed[0] = True
    fixed[-1] = True
    vals = np.zeros(inside.shape)
    exact = inlet_bc is InletBC.EXACT or outlet_bc is OutletBC.EXACT
    mode = None
    if exact:
        mode = DiskMode(domain.A) if domain.circular else _scaled_grid_mode(domain, h)
    Ypts = np.stack([Yg[0].ravel(), Zg[0].ravel()], axis=1)
    v0, v1 = _cap_values(domain, inlet_bc, outlet_bc, mode, xs[0], xs[-1], Ypts,
                         inside[0].ravel(), inside[-1].ravel())
    vals[0] = v0.reshape(inside[0].shape)
    vals[-1] = v1.reshape(inside[-1].shape)
    edges = _cartesian_edges(inside.shape, h)
    if abs((xs[1] - xs[0]) - h) > 1e-12 * h:
        raise ValueError("t_max - t_min must be a multiple of h for the Cartesian solver")
    out, res = _graph_solve(vals.size, edges, fixed.ravel(), vals.ravel(), method)
    bc_vals = np.concatenate([vals[0].ravel(), vals[-1].ravel(), [0.0]])
    return HarmonicField("cartesian", (xs, ys, zs), h, out.reshape(inside.shape), ~fixed, inside,
                         {"inlet": inlet_bc.value, "outlet": outlet_bc.value, "method": method},
                         res, domain, xs[0], xs[-1], bc_range=(float(bc_vals.min()), float(bc_vals.max())))


def _scaled_grid_mode(domain, h):
    # Straight elliptic cylinder of semi-axes (A, A b): eigenfunction on the physical grid.
    A, b = domain.A, domain.ellipse_b
    eig = dirichlet_lambda1(SectionMask.ellipse(A, A * b, h))
    return GridMode(eig, lambda Y: (Y[:, 0] / A) ** 2 + (Y[:, 1] / (A * b)) ** 2 <= 1 + 1e-12)


def _solve_cone(domain, t_min, t_max, h, inlet_bc, outlet_bc, method):
    theta = domain.cap_angle
    if t_min > 0 and t_min * math.sin(min(theta, math.pi / 2)) < 4 * h:
        raise MaskDegenerate("inner cap thinner than 4 cells")
    if inlet_bc is InletBC.EXACT and t_min == 0:
        inlet_bc = InletBC.ZERO
    n = int(math.ceil(t_max / h)) + 2
    z_lo = 0 if theta <= math.pi / 2 else -n
    zs = h * np.arange(z_lo, n + 1)
    rho = h * np.arange(n + 1)
    Z, R = np.meshgrid(zs, rho, indexing="ij")
    r = np.hypot(Z, R)
    polar = np.arctan2(R, Z)
    inside = (polar < theta) & (r > 0)
    inner = r <= t_min
    outer = r >= t_max
    fixed = ~inside | inner | outer
    vals = np.zeros(r.shape)
    exact = inlet_bc is InletBC.EXACT or outlet_bc is OutletBC.EXACT
    cap = CapMode.from_cap(theta) if exact else None
    if exact:
        u_exact = np.where(inside, np.power(r, cap.alpha) * cap(polar), 0.0)
    if inlet_bc is InletBC.EXACT:
        vals[inner & inside] = u_exact[inner & inside]
    if outlet_bc is OutletBC.EXACT:
        vals[outer & inside] = u_exact[outer & inside]
    else:
        vals[outer & inside] = 1.0
    # Only cap nodes adjacent to unknowns affect the solution; report their range.
    edges = _meridian_edges(r.shape, h, h)
    out, res = _graph_solve(vals.size, edges, fixed.ravel(), vals.ravel(), method)
    free = ~fixed
    nb = np.zeros_like(free)
    nb[1:] |= free[:-1]
    nb[:-1] |= free[1:]
    nb[:, 1:] |= free[:, :-1]
    nb[:, :-1] |= free[:, 1:]
    touching = vals[fixed & nb]
    bc_vals = np.concatenate([touching, [0.0]])
    return HarmonicField("cone", (zs, rho), h, out.reshape(r.shape), free, inside,
                         {"inlet": inlet_bc.value, "outlet": outlet_bc.value, "method": method},
                         res, domain, float(t_min), float(t_max), cap=cap,
                         bc_range=(float(bc_vals.min()), float(bc_vals.max())))


# ---------------------------------------------------------------------------
# Maxima over sections and spheres
# ---------------------------------------------------------------------------
def max_on_section(field: HarmonicField, t: float) -> float:
    """Maximum of the field over the plane x = t, linear between adjacent grid planes."""
    if field.geometry == "cone":
        raise UnsupportedDomain("cone fields are measured on spheres")
    xs = field.axes[0]
    if not xs[0] <= t <= xs[-1]:
        raise OutOfWindow(f"t={t} outside [{xs[0]}, {xs[-1]}]")
    plane_max = _plane_maxima(field)
    return float(np.interp(t, xs, plane_max))


def _plane_maxima(field):
    if not hasattr(field, "_plane_max"):
        v = np.where(field.inside, field.values, -np.inf)
        axes = tuple(range(1, v.ndim))
        pm = v.max(axis=axes)
        field._plane_max = np.where(np.isfinite(pm), pm, 0.0)
    return field._plane_max


def max_on_sphere(field: HarmonicField, r: float, n_arc: Optional[int] = None) -> float:
    """Maximum over the sphere |xi| = r of the bilinearly interpolated field.

    Works on cone fields and on axisymmetric cylinder-like fields; points of
    the sphere outside the solved window count as 0.
    """
    if field.geometry == "cartesian":
        raise UnsupportedDomain("max_on_sphere needs a meridian-plane field")
    if field.geometry == "cone":
        if not field.t_min <= r <= field.t_max:
            raise OutOfWindow(f"r={r} outside [{field.t_min}, {field.t_max}]")
        theta = field.domain.cap_angle
    else:
        if not 0 < r <= field.t_max:
            raise OutOfWindow(f"r={r} outside (0, {field.t_max}]")
        theta = math.pi if field.domain.two_sided else math.pi / 2
    if n_arc is None:
        n_arc = max(64, int(math.ceil(4 * r * theta / field.h)))
    phi = np.linspace(0.0, theta, n_arc)
    pts = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1)
    return float(field.interpolator()(pts).max())


def field_value(field: HarmonicField, point) -> float:
    """Interpolated field value at a point of R^3 (0 outside the solved window)."""
    p = np.asarray(point, dtype=float)
    if field.geometry == "cartesian":
        return float(field.interpolator()(p[None, :])[0])
    ax, Y = field.domain.axial_radial(p[None, :])
    return float(field.interpolator()(np.array([[ax[0], np.linalg.norm(Y[0])]]))[0])


def growth_profile(field: HarmonicField, t_list=None, trim: float = 0.15) -> GrowthCurve:
    """Measured log M(t) (planes) or log M~(r) (spheres) on the trimmed interior window."""
    lo = field.t_min + trim * (field.t_max - field.t_min)
    hi = field.t_max - trim * (field.t_max - field.t_min)
    if t_list is None:
        if field.geometry == "cone":
            t_list = np.linspace(lo, hi, 41)
        else:
            xs = field.axes[0]
            t_list = xs[(xs >= lo) & (xs <= hi)]
    else:
        t_list = np.asarray(t_list, dtype=float)
        if np.any(t_list < field.t_min) or np.any(t_list > field.t_max):
            raise OutOfWindow("t_list leaves the solved window")
        t_list = t_list[(t_list >= lo) & (t_list <= hi)]
    if field.geometry == "cone":
        m = np.array([max_on_sphere(field, float(t)) for t in t_list])
    else:
        m = np.array([max_on_section(field, float(t)) for t in t_list])
    if np.any(m <= 0):
        raise SolverDivergence("non-positive maximum on a section; field underflowed")
    return GrowthCurve(t_list, np.log(m), Provenance.PDE_MEASURED)
