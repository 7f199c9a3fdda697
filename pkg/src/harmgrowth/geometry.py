"""Domain families, cross-sections, rescaling maps and Hausdorff certification.

Cylinder-like families (paraboloid, horn, straight and elliptic cylinders)
run along the x1 axis.  Cones are opened around the last coordinate axis, so
the half-space cone with cap angle pi/2 is ``{z > 0}``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

from .errors import EmptyCloud, EmptySection, UnsupportedDomain, WindowTooLarge


class DomainKind(str, Enum):
    PARABOLOID = "Paraboloid"
    HORN = "Horn"
    STRAIGHT_CYLINDER = "StraightCylinder"
    LIPSCHITZ_CONE = "LipschitzCone"
    ELLIPTIC_PARABOLOID = "EllipticParaboloid"
    # Walk-on-spheres controls with a known exit probability.
    WHOLE_SPACE = "WholeSpace"
    BALL_EXTERIOR = "BallExterior"


CYLINDER_LIKE_KINDS = {
    DomainKind.PARABOLOID,
    DomainKind.HORN,
    DomainKind.STRAIGHT_CYLINDER,
    DomainKind.ELLIPTIC_PARABOLOID,
}


@dataclass(frozen=True)
class DomainSpec:
    """Parametric unbounded domain in R^3.

    ``A`` and ``alpha`` parametrise the profile ``a(t)``: ``A t^alpha`` for
    paraboloids, ``A (1 + t)^alpha`` for the horn, the constant radius ``A``
    for the straight cylinder and the inner radius for ``BallExterior``.
    ``ellipse_b`` is the second semi-axis of the unit cross-section.
    ``profile`` optionally replaces the closed-form horn profile; it is not
    serialised.
    """

    kind: DomainKind
    dim: int = 3
    A: float = 1.0
    alpha: float = 0.5
    ellipse_b: float = 1.0
    cap_angle: Optional[float] = None
    profile: Optional[Callable[[float], float]] = field(default=None, compare=False, repr=False)
    profile_prime: Optional[Callable[[float], float]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", DomainKind(self.kind))
        if self.dim < 3:
            raise ValueError("dim must be >= 3")
        if self.A <= 0:
            raise ValueError("A must be positive")
        if not 0 < self.ellipse_b <= 1:
            raise ValueError("ellipse_b must lie in (0, 1]")
        if self.kind in (DomainKind.PARABOLOID, DomainKind.ELLIPTIC_PARABOLOID, DomainKind.HORN):
            if not 0 < self.alpha < 1:
                raise ValueError("alpha must lie in (0, 1)")
        if self.kind is DomainKind.LIPSCHITZ_CONE:
            if self.cap_angle is None or not 0 < self.cap_angle < math.pi:
                raise ValueError("cap_angle must lie in (0, pi)")

    # -- constructors -----------------------------------------------------
    @classmethod
    def paraboloid(cls, A=1.0, alpha=0.5):
        return cls(DomainKind.PARABOLOID, A=A, alpha=alpha)

    @classmethod
    def elliptic_paraboloid(cls, A=1.0, alpha=0.5, b=0.5):
        return cls(DomainKind.ELLIPTIC_PARABOLOID, A=A, alpha=alpha, ellipse_b=b)

    @classmethod
    def horn(cls, A=1.0, alpha=0.5, profile=None, profile_prime=None):
        return cls(DomainKind.HORN, A=A, alpha=alpha, profile=profile, profile_prime=profile_prime)

    @classmethod
    def cylinder(cls, radius=1.0, b=1.0):
        return cls(DomainKind.STRAIGHT_CYLINDER, A=radius, ellipse_b=b)

    @classmethod
    def cone(cls, cap_angle):
        return cls(DomainKind.LIPSCHITZ_CONE, cap_angle=cap_angle)

    # -- serialisation ----------------------------------------------------
    def to_dict(self):
        return {
            "kind": self.kind.value,
            "dim": self.dim,
            "A": self.A,
            "alpha": self.alpha,
            "ellipse_b": self.ellipse_b,
            "cap_angle": self.cap_angle,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        return cls(
            kind=DomainKind(d["kind"]),
            dim=int(d.get("dim", 3)),
            A=float(d.get("A", 1.0)),
            alpha=float(d.get("alpha", 0.5)),
            ellipse_b=float(d.get("ellipse_b", 1.0)),
            cap_angle=None if d.get("cap_angle") is None else float(d["cap_angle"]),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    # -- geometry ---------------------------------------------------------
    @property
    def axis(self):
        """Index of the coordinate axis the domain opens along."""
        return self.dim - 1 if self.kind is DomainKind.LIPSCHITZ_CONE else 0

    @property
    def circular(self):
        return self.ellipse_b == 1.0

    @property
    def two_sided(self):
        return self.kind is DomainKind.STRAIGHT_CYLINDER

    def a(self, t):
        """Section profile a(t) along the domain axis (vectorised)."""
        t = np.asarray(t, dtype=float)
        k = self.kind
        if k in (DomainKind.PARABOLOID, DomainKind.ELLIPTIC_PARABOLOID):
            return self.A * np.power(np.maximum(t, 0.0), self.alpha)
        if k is DomainKind.HORN:
            if self.profile is not None:
                return np.vectorize(self.profile, otypes=[float])(t)
            return self.A * np.power(1.0 + np.maximum(t, 0.0), self.alpha)
        if k is DomainKind.STRAIGHT_CYLINDER:
            return np.full_like(t, self.A)
        if k is DomainKind.LIPSCHITZ_CONE:
            if self.cap_angle >= math.pi / 2:
                raise UnsupportedDomain("cone sections along the axis are unbounded for cap_angle >= pi/2")
            return np.maximum(t, 0.0) * math.tan(self.cap_angle)
        raise UnsupportedDomain(f"{k.value} has no section profile")

    def a_prime(self, t):
        t = np.asarray(t, dtype=float)
        k = self.kind
        if k in (DomainKind.PARABOLOID, DomainKind.ELLIPTIC_PARABOLOID):
            return self.A * self.alpha * np.power(t, self.alpha - 1.0)
        if k is DomainKind.HORN:
            if self.profile_prime is not None:
                return np.vectorize(self.profile_prime, otypes=[float])(t)
            if self.profile is not None:
                eps = 1e-6 * np.maximum(1.0, np.abs(t))
                return (self.a(t + eps) - self.a(t - eps)) / (2 * eps)
            return self.A * self.alpha * np.power(1.0 + t, self.alpha - 1.0)
        if k is DomainKind.STRAIGHT_CYLINDER:
            return np.zeros_like(t)
        if k is DomainKind.LIPSCHITZ_CONE:
            return np.full_like(t, math.tan(self.cap_angle))
        raise UnsupportedDomain(f"{k.value} has no section profile")

    def axial_radial(self, points):
        """Split points (n, 3) into axial coordinate and the transverse part."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        ax = self.axis
        others = [i for i in range(p.shape[1]) if i != ax]
        return p[:, ax], p[:, others]

    def contains(self, points):
        """Open-set membership for an (n, 3) array of points."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        k = self.kind
        if k is DomainKind.WHOLE_SPACE:
            return np.ones(len(p), dtype=bool)
        if k is DomainKind.BALL_EXTERIOR:
            return np.linalg.norm(p, axis=1) > self.A
        if k is DomainKind.LIPSCHITZ_CONE:
            r = np.linalg.norm(p, axis=1)
            z = p[:, self.axis]
            return (r > 0) & (z > r * math.cos(self.cap_angle))
        x, Y = self.axial_radial(p)
        if k is DomainKind.STRAIGHT_CYLINDER:
            a = np.full_like(x, self.A)
            ok = np.ones(len(p), dtype=bool)
        else:
            ok = x > 0
            a = np.where(ok, self.a(np.maximum(x, 0.0)), 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (Y[:, 0] / a) ** 2 + (Y[:, 1] / (self.ellipse_b * a)) ** 2
        return ok & (a > 0) & (q < 1.0)


# ---------------------------------------------------------------------------
# Cross-sections
# ---------------------------------------------------------------------------
@dataclass
class SectionMask:
    """Grid nodes of a planar section; node (i, j) sits at origin + (i, j) * h.

    The array always carries a ring of excluded nodes so every included node
    has its four neighbours stored.
    """

    h: float
    origin: tuple
    mask: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        if not self.mask.any():
            raise EmptySection("section mask has no interior nodes")
        m = self.mask
        if m[0, :].any() or m[-1, :].any() or m[:, 0].any() or m[:, -1].any():
            m = np.pad(m, 1)
            self.origin = (self.origin[0] - self.h, self.origin[1] - self.h)
            self.mask = m
        _, n_comp = ndimage.label(self.mask)  # 4-neighbour connectivity
        if n_comp != 1:
            raise EmptySection(f"section mask has {n_comp} connected components")

    @property
    def shape(self):
        return self.mask.shape

    @property
    def bbox(self):
        ny1, ny2 = self.mask.shape
        return (
            (self.origin[0], self.origin[0] + (ny1 - 1) * self.h),
            (self.origin[1], self.origin[1] + (ny2 - 1) * self.h),
        )

    def coords(self):
        ny1, ny2 = self.mask.shape
        y1 = self.origin[0] + self.h * np.arange(ny1)
        y2 = self.origin[1] + self.h * np.arange(ny2)
        return np.meshgrid(y1, y2, indexing="ij")

    @classmethod
    def from_predicate(cls, predicate, lo, hi, h, scale=1.0):
        """Nodes lo + k h (k = 0..) up to hi on each axis where predicate(y1, y2) holds."""
        n1 = int(round((hi[0] - lo[0]) / h)) + 1
        n2 = int(round((hi[1] - lo[1]) / h)) + 1
        y1 = lo[0] + h * np.arange(n1)
        y2 = lo[1] + h * np.arange(n2)
        Y1, Y2 = np.meshgrid(y1, y2, indexing="ij")
        return cls(h=h, origin=(lo[0], lo[1]), mask=predicate(Y1, Y2), scale=scale)

    @classmethod
    def ellipse(cls, p, q, h, scale=1.0):
        """Open ellipse with semi-axes (p, q) centred on a grid node."""
        n1 = int(math.ceil(p / h)) + 1
        n2 = int(math.ceil(q / h)) + 1
        return cls.from_predicate(
            lambda y1, y2: (y1 / p) ** 2 + (y2 / q) ** 2 < 1.0,
            (-n1 * h, -n2 * h),
            (n1 * h, n2 * h),
            h,
            scale=scale,
        )

    @classmethod
    def disk(cls, radius, h):
        return cls.ellipse(radius, radius, h, scale=radius)

    @classmethod
    def rectangle(cls, width, height, h):
        """Open rectangle (0, width) x (0, height); edges fall on grid lines when h divides them."""
        return cls.from_predicate(
            lambda y1, y2: (y1 > 0) & (y1 < width) & (y2 > 0) & (y2 < height),
            (0.0, 0.0),
            (width, height),
            h,
        )

    def scaled(self, c):
        """Same node pattern on a grid c times coarser (exact geometric scaling)."""
        return SectionMask(h=self.h * c, origin=(self.origin[0] * c, self.origin[1] * c),
                           mask=self.mask.copy(), scale=self.scale * c)


def section_at(domain: DomainSpec, t: float, h: float) -> SectionMask:
    """Section {Y : (t, Y) in domain} on a uniform grid of spacing h."""
    if t <= 0:
        raise ValueError("t must be positive")
    a = float(domain.a(t))
    p, q = a, a * domain.ellipse_b
    if q < 2 * h:
        raise EmptySection(f"section at t={t} has min semi-axis {q:.3g} < 2h = {2 * h:.3g}")
    return SectionMask.ellipse(p, q, h, scale=a)


# ---------------------------------------------------------------------------
# Windows and rescaled samples
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SlabWindow:
    """Compact window [x_lo, x_hi] x closed ball of radius ``radius`` in Y."""

    x_lo: float = -1.0
    x_hi: float = 1.0
    radius: float = 2.0


@dataclass(frozen=True)
class ShellWindow:
    """Compact spherical shell r_lo <= |xi| <= r_hi."""

    r_lo: float = 0.5
    r_hi: float = 2.0


@dataclass
class RescaledSample:
    t: float
    window: object
    boundary: np.ndarray
    interior: np.ndarray
    reference_boundary: np.ndarray
    reference_interior: np.ndarray

    @property
    def cloud(self):
        return np.vstack([self.boundary, self.interior])

    @property
    def reference(self):
        return np.vstack([self.reference_boundary, self.reference_interior])

    def distance(self):
        return hausdorff_distance(self.cloud, self.reference)


def _grid_sizes(n_samples, n_phi):
    per_phi = max(n_samples // n_phi, 16)
    n_s = max(int(round(math.sqrt(per_phi / 4.0))), 3)
    n_axial = max(per_phi // n_s, 4)
    return n_axial, n_s


def _ellipse_radius(p, q, phi):
    return 1.0 / np.sqrt((np.cos(phi) / p) ** 2 + (np.sin(phi) / q) ** 2)


def _cylinder_cloud(radius_fn, window, n_samples, n_phi=24):
    """Matched parametric sampling of {(x, s r(x, phi) e_phi)} in a slab window.

    ``radius_fn(x, phi)`` is the star-shaped section radius; it is clipped to
    the window radius.  Returns (boundary, interior) clouds.
    """
    n_x, n_s = _grid_sizes(n_samples, n_phi)
    xs = np.linspace(window.x_lo, window.x_hi, n_x)
    ss = np.linspace(0.0, 1.0, n_s)
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    X, S, PHI = np.meshgrid(xs, ss[1:], phis, indexing="ij")
    R = np.minimum(radius_fn(X, PHI), window.radius)
    keep = R > 0
    pts = np.stack([X, S * R * np.cos(PHI), S * R * np.sin(PHI)], axis=-1)
    on_bdry = (S == 1.0) | (X == window.x_lo) | (X == window.x_hi)
    axis_x = xs[np.min(np.minimum(radius_fn(xs[:, None], phis[None, :]), window.radius), axis=1) > 0]
    axis_pts = np.stack([axis_x, np.zeros_like(axis_x), np.zeros_like(axis_x)], axis=-1)
    bdry = pts[keep & on_bdry]
    inner = np.vstack([pts[keep & ~on_bdry], axis_pts])
    return bdry, inner


def _orient(points, axis):
    """Map clouds built with the axis first into the domain's coordinates."""
    if axis == 0:
        return points
    out = np.empty_like(points)
    out[:, axis] = points[:, 0]
    others = [i for i in range(points.shape[1]) if i != axis]
    out[:, others] = points[:, 1:]
    return out


def _cylinderlike_profile(domain):
    if domain.kind in CYLINDER_LIKE_KINDS:
        return domain.a
    if domain.kind is DomainKind.LIPSCHITZ_CONE and domain.cap_angle < math.pi / 2:
        return domain.a
    raise UnsupportedDomain(f"{domain.kind.value} has no cylinder-like rescaling")


def rescale_cylinderlike(domain: DomainSpec, t: float, window: SlabWindow = SlabWindow(),
                         n_samples: int = 4000, clip_window: bool = False) -> RescaledSample:
    """Sample Gamma_t = (Omega_t - t e1)/a(t) and the limiting cylinder R x D on ``window``.

    Omega_t is the slab t/2 < x < 3t/2.  Cones with cap angle below pi/2 are
    accepted with the section radius t tan(theta) as profile; they serve as
    negative controls.  With ``clip_window`` the window is shrunk into the
    rescaled slab instead of raising ``WindowTooLarge``.
    """
    a_fn = _cylinderlike_profile(domain)
    at = float(a_fn(t))
    half = t / (2 * at)
    if window.x_lo <= -half or window.x_hi >= half:
        if not clip_window:
            raise WindowTooLarge(f"window x-range exceeds the rescaled slab |x| < {half:.4g}")
        lim = half * (1 - 1e-9)
        window = SlabWindow(max(window.x_lo, -lim), min(window.x_hi, lim), window.radius)
    b = domain.ellipse_b

    def gamma_radius(x, phi):
        r = a_fn(np.maximum(t + at * x, 0.0)) / at
        return _ellipse_radius(np.maximum(r, 1e-300), np.maximum(r * b, 1e-300), phi) * (r > 0)

    def ref_radius(x, phi):
        return _ellipse_radius(1.0, b, phi) * np.ones_like(x)

    bd, inner = _cylinder_cloud(gamma_radius, window, n_samples)
    rbd, rinner = _cylinder_cloud(ref_radius, window, n_samples)
    ax = domain.axis
    return RescaledSample(t, window, _orient(bd, ax), _orient(inner, ax), _orient(rbd, ax), _orient(rinner, ax))


def _angle_root(R, profile, t_hi):
    """Polar angle of the circle where the sphere |xi| = R meets |Y| = profile(x)."""
    # g(theta) = R sin(theta) - profile(R cos(theta)) increases on [0, theta_hi].
    lo, hi = 0.0, t_hi
    if R * math.sin(hi) - float(profile(R * math.cos(hi))) <= 0:
        return hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if R * math.sin(mid) - float(profile(max(R * math.cos(mid), 0.0))) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def spherical_section_caps(domain: DomainSpec, R: float):
    """Spherical section {|xi| = R} of an axisymmetric domain as a list of caps.

    Each cap is (direction, half_angle) with direction +1 / -1 along the
    domain axis.  A half-angle of pi is the whole sphere.
    """
    k = domain.kind
    if not domain.circular:
        raise UnsupportedDomain("spherical sections are caps only for circular cross-sections")
    if k is DomainKind.LIPSCHITZ_CONE:
        return [(1, domain.cap_angle)]
    if k is DomainKind.STRAIGHT_CYLINDER:
        if R <= domain.A:
            return [(1, math.pi)]
        th = math.asin(domain.A / R)
        return [(1, th), (-1, th)]
    if k in (DomainKind.PARABOLOID, DomainKind.HORN):
        return [(1, _angle_root(R, domain.a, math.pi / 2))]
    raise UnsupportedDomain(f"{k.value} has no spherical-cap section")


def _shell_cloud(angle_fn, window, n_samples, directions=(1,), n_phi=24):
    """Matched sampling of {r (cos(s Theta(r)) e + sin(s Theta(r)) e_phi)} on a shell."""
    n_r, n_s = _grid_sizes(n_samples // len(directions), n_phi)
    rs = np.linspace(window.r_lo, window.r_hi, n_r)
    ss = np.linspace(0.0, 1.0, n_s)
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    th_r = np.array([angle_fn(r) for r in rs])
    bds, inners = [], []
    for sgn in directions:
        Rg, S, PHI = np.meshgrid(rs, ss[1:], phis, indexing="ij")
        TH = np.broadcast_to(th_r[:, None, None], Rg.shape) * S
        ax = sgn * Rg * np.cos(TH)
        pts = np.stack([ax, Rg * np.sin(TH) * np.cos(PHI), Rg * np.sin(TH) * np.sin(PHI)], axis=-1)
        on_bdry = (S == 1.0) | (Rg == window.r_lo) | (Rg == window.r_hi)
        bds.append(pts[on_bdry])
        axis_pts = np.stack([sgn * rs, np.zeros_like(rs), np.zeros_like(rs)], axis=-1)
        inners.append(np.vstack([pts[~on_bdry], axis_pts]))
    return np.vstack(bds), np.vstack(inners)


def rescale_conelike(domain: DomainSpec, t: float, window: ShellWindow = ShellWindow(),
                     n_samples: int = 4000, reference_angle: Optional[float] = None) -> RescaledSample:
    """Sample Gamma_t = (Omega cap {|xi| <= t^2})/t and a reference cone on a shell window.

    The reference cap angle defaults to the domain's own cap angle for cones
    and to 0 (the axis ray) otherwise.
    """
    if window.r_hi > t:
        raise WindowTooLarge(f"shell window radius {window.r_hi} exceeds t = {t}")
    caps_at = lambda r: spherical_section_caps(domain, r * t)
    first = caps_at(window.r_lo)
    directions = tuple(sgn for sgn, _ in first)
    bd, inner = _shell_cloud(lambda r: caps_at(r)[0][1], window, n_samples, directions)
    if reference_angle is None:
        reference_angle = domain.cap_angle if domain.kind is DomainKind.LIPSCHITZ_CONE else 0.0
    rbd, rinner = _shell_cloud(lambda r: reference_angle, window, n_samples, directions)
    ax = domain.axis
    return RescaledSample(t, window, _orient(bd, ax), _orient(inner, ax), _orient(rbd, ax), _orient(rinner, ax))


# ---------------------------------------------------------------------------
# Hausdorff distance
# ---------------------------------------------------------------------------
def _directed(a, b, chunk_bytes=32 * 2**20):
    rows = max(1, chunk_bytes // (8 * b.shape[0] * b.shape[1]))
    worst = 0.0
    for i in range(0, a.shape[0], rows):
        diff = a[i:i + rows, None, :] - b[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        worst = max(worst, float(d2.min(axis=1).max()))
    return math.sqrt(worst)


def hausdorff_distance(cloud_a, cloud_b) -> float:
    """Symmetric Hausdorff distance between finite point clouds (brute force)."""
    a = np.atleast_2d(np.asarray(cloud_a, dtype=float))
    b = np.atleast_2d(np.asarray(cloud_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptyCloud("Hausdorff distance needs two non-empty clouds")
    return max(_directed(a, b), _directed(b, a))


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------
REPORT_COLUMNS = ("t", "d_H", "a_prime", "a_over_t", "lambda", "alpha", "alpha1")

# d_H must shrink by at least this factor per decade of t.
SHRINK_PER_DECADE = 2.0
# Final |alpha - alpha1| for cone-like PASS.
ALPHA_GAP_TOL = 0.02
# d_H values below this count as an exact fixed point.
DH_FLOOR = 1e-12
# Cone-like: alpha(t) must stay within this factor over the sampled t range.
ALPHA_SPREAD_MAX = 2.0


@dataclass
class CertificationReport:
    kind: str
    rows: list
    flags: dict

    @property
    def passed(self):
        return all(self.flags.values())

    def column(self, name):
        return np.array([r[name] for r in self.rows], dtype=float)

    def to_csv(self, path, header_comment=None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REPORT_COLUMNS)
            for r in self.rows:
                w.writerow([_fmt(r[c]) for c in REPORT_COLUMNS])


def _fmt(v):
    return "nan" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))


def _shrinks(t, d):
    """d_H decreases by SHRINK_PER_DECADE per decade (or is already at the floor)."""
    t = np.asarray(t, float)
    d = np.asarray(d, float)
    if np.any(~np.isfinite(d)):
        return False
    if np.all(d <= DH_FLOOR):
        return True
    if np.any(np.diff(d) > 0) and not np.all(d[1:] <= DH_FLOOR):
        return False
    decades = math.log10(t[-1] / t[0])
    if d[-1] <= DH_FLOOR:
        return True
    return bool(d[0] / d[-1] >= SHRINK_PER_DECADE ** decades)


def _check_t_list(t_list):
    t = np.asarray(t_list, dtype=float)
    if len(t) < 4 or np.any(np.diff(t) <= 0) or math.log10(t[-1] / t[0]) < 2 - 1e-12:
        raise ValueError("t_list needs >= 4 increasing entries spanning >= 2 decades")
    return t


def certify_cylinderlike(domain: DomainSpec, t_list, window: SlabWindow = SlabWindow(),
                         n_samples: int = 4000, h_eig: float = 1 / 64) -> CertificationReport:
    """Discrete check of the cylinder-like conditions on a sampled range of t."""
    from .eigensolve import dirichlet_lambda1

    t = _check_t_list(t_list)
    b = domain.ellipse_b
    lam_unit = dirichlet_lambda1(SectionMask.ellipse(1.0, b, h_eig)).lam
    rows, radii = [], []
    a_fn = _cylinderlike_profile(domain)
    for ti in t:
        s = rescale_cylinderlike(domain, ti, window, n_samples, clip_window=True)
        xs = np.linspace(s.window.x_lo, s.window.x_hi, 201)
        r = a_fn(np.maximum(ti + float(a_fn(ti)) * xs, 0.0)) / float(a_fn(ti))
        radii.append(r)
        rows.append({
            "t": float(ti),
            "d_H": s.distance(),
            "a_prime": float(domain.a_prime(ti)),
            "a_over_t": float(a_fn(ti)) / float(ti),
            # D_t is the unit cross-section for every parametric family.
            "lambda": lam_unit,
            "alpha": float("nan"),
            "alpha1": float("nan"),
        })
    r_all = np.concatenate(radii)
    r_in, r_out = float(r_all.min()), float(min(r_all.max(), window.radius))
    lam_lo = lam_unit / r_out**2
    lam_hi = lam_unit / r_in**2 if r_in > 0 else math.inf
    dh = [r["d_H"] for r in rows]
    ap = np.array([r["a_prime"] for r in rows])
    aot = np.array([r["a_over_t"] for r in rows])
    lam = np.array([r["lambda"] for r in rows])
    flags = {
        "d_H_to_zero": bool(_shrinks(t, dh)),
        "a_prime_decreasing_to_zero": bool(np.all(np.diff(ap) <= 1e-15) and ap[-1] <= ap[0] / 2 or np.all(ap == 0)),
        "a_over_t_to_zero": bool(np.all(np.diff(aot) < 0)),
        "lambda_bounded": bool(math.isfinite(lam_hi) and np.all(lam >= lam_lo * (1 - 1e-12))
                               and np.all(lam <= lam_hi * (1 + 1e-12))),
    }
    return CertificationReport("cylinder-like", rows, flags)


def _fit_cone_angle(domain, t, window, n_samples):
    """Cap angle of the cone closest in Hausdorff distance to Gamma_t on the window."""
    from scipy.optimize import minimize_scalar

    # Axisymmetric sets: the Hausdorff distance equals that of a meridian half-plane.
    def meridian(sample):
        pts = sample.cloud
        others = [i for i in range(3) if i != domain.axis]
        sel = (np.abs(pts[:, others[1]]) < 1e-12) & (pts[:, others[0]] >= 0)
        return pts[sel]

    base = rescale_conelike(domain, t, window, n_samples * 4, reference_angle=0.0)
    g = meridian(base)

    def cost(theta):
        s = rescale_conelike(domain, t, window, n_samples * 4, reference_angle=theta)
        ref = s.reference
        others = [i for i in range(3) if i != domain.axis]
        sel = (np.abs(ref[:, others[1]]) < 1e-12) & (ref[:, others[0]] >= 0)
        return hausdorff_distance(g, ref[sel])

    caps = spherical_section_caps(domain, t)
    guess = caps[0][1]
    lo, hi = max(0.0, guess * 0.5 - 0.2), min(math.pi, guess * 1.5 + 0.2)
    res = minimize_scalar(cost, bounds=(lo, hi), method="bounded", options={"xatol": 1e-7})
    if cost(guess) <= res.fun:
        return guess
    return float(res.x)


def certify_conelike(domain: DomainSpec, t_list, window: ShellWindow = ShellWindow(),
                     n_samples: int = 4000) -> CertificationReport:
    """Discrete check of the cone-like conditions and of alpha(t) - alpha1(t) -> 0."""
    from .eigensolve import beltrami_lambda1, characteristic_constant

    t = _check_t_list(t_list)
    rows = []
    for ti in t:
        theta_fit = _fit_cone_angle(domain, ti, window, n_samples)
        s = rescale_conelike(domain, ti, window, n_samples, reference_angle=theta_fit)
        caps = spherical_section_caps(domain, ti)
        theta_1 = caps[0][1]
        alpha_fit = _cap_alpha(theta_fit, domain.dim)
        alpha_1 = _cap_alpha(theta_1, domain.dim)
        rows.append({
            "t": float(ti),
            "d_H": s.distance(),
            "a_prime": float("nan"),
            "a_over_t": float("nan"),
            "lambda": _cap_lambda(theta_1),
            "alpha": alpha_fit,
            "alpha1": alpha_1,
        })
    al = np.array([r["alpha"] for r in rows])
    al1 = np.array([r["alpha1"] for r in rows])
    gap = np.abs(al - al1)
    finite = bool(np.all(np.isfinite(al)) and np.all(np.isfinite(al1)))
    flags = {
        "d_H_to_zero": bool(_shrinks(t, [r["d_H"] for r in rows])),
        "alpha_bounded": finite and bool(al.min() > 0 and al.max() / al.min() <= ALPHA_SPREAD_MAX),
        "alpha_gap_to_zero": finite and bool(gap[-1] < ALPHA_GAP_TOL and gap[-1] <= gap[0] + 1e-9),
    }
    return CertificationReport("cone-like", rows, flags)


_cap_cache = {}


def _cap_lambda(theta):
    from .eigensolve import beltrami_lambda1

    if theta >= math.pi:
        return 0.0
    key = round(theta, 12)
    if key not in _cap_cache:
        _cap_cache[key] = beltrami_lambda1(theta).lam
    return _cap_cache[key]


def _cap_alpha(theta, dim):
    from .eigensolve import characteristic_constant

    if theta <= 0:
        return math.inf
    lam = _cap_lambda(theta)
    if lam <= 0:
        return 0.0
    return characteristic_constant(lam, dim).alpha
