"""Principal Dirichlet eigenvalues of planar sections and spherical caps."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import InvalidCap, NoConvergence, NonpositiveLambda
from .geometry import DomainKind, DomainSpec, SectionMask
from .linalg import DirectSPD, pcg

# Residual target used to stop inverse iteration, relative to lambda.
EIG_RTOL = 1e-9
MAX_INVERSE_ITER = 10_000


@dataclass
class EigenResult:
    """Principal eigenpair.

    For planar sections ``eigenfunction`` has the mask's shape (zero outside)
    and ``coords`` holds the (y1, y2) node grids.  For caps it is a 1-D array
    over the polar angles in ``coords``.
    """

    lam: float
    eigenfunction: np.ndarray
    residual: float
    h: float
    coords: tuple = ()
    iterations: int = 0
    mask: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def lambda_(self):
        return self.lam

    def to_csv(self, path, header_comment=None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            w = csv.writer(fh, lineterminator="\n")
            if self.mask is not None:
                w.writerow(("y1", "y2", "psi"))
                y1, y2 = self.coords
                for i, j in zip(*np.nonzero(self.mask)):
                    w.writerow((repr(float(y1[i, j])), repr(float(y2[i, j])), repr(float(self.eigenfunction[i, j]))))
            else:
                w.writerow(("theta", "psi"))
                for th, v in zip(self.coords[0], self.eigenfunction):
                    w.writerow((repr(float(th)), repr(float(v))))

    def psi_at_angle(self, theta):
        """Cap eigenfunction at polar angle(s) theta; zero outside the cap."""
        th = np.asarray(theta, dtype=float)
        grid = self.coords[0]
        return np.where(th < grid[-1], np.interp(th, grid, self.eigenfunction), 0.0)


# ---------------------------------------------------------------------------
# Planar sections
# ---------------------------------------------------------------------------
def laplacian_5pt(mask, h):
    """Negative 5-point Laplacian on the True nodes of ``mask`` with zero exterior.

    Returns (A, index) where ``index`` maps grid nodes to unknowns (-1 outside).
    """
    mask = np.asarray(mask, dtype=bool)
    index = -np.ones(mask.shape, dtype=np.int64)
    n = int(mask.sum())
    index[mask] = np.arange(n)
    rows, cols = [np.arange(n)], [np.arange(n)]
    vals = [np.full(n, 4.0 / h**2)]
    I, J = np.nonzero(mask)
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nb = index[I + di, J + dj]
        ok = nb >= 0
        rows.append(index[I[ok], J[ok]])
        cols.append(nb[ok])
        vals.append(np.full(int(ok.sum()), -1.0 / h**2))
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return A, index


def dirichlet_lambda1(section: SectionMask, method: str = "direct", rtol: float = EIG_RTOL,
                      max_iter: int = MAX_INVERSE_ITER) -> EigenResult:
    """Smallest eigenvalue of the 5-point Dirichlet Laplacian on ``section``.

    Inverse iteration with shift 0.  ``method`` selects the inner solver:
    "direct" factorises once, "cg" runs warm-started Jacobi PCG each sweep.
    The grid spacing is physical, so the eigenvalue is in physical units.
    """
    h = section.h
    A, index = laplacian_5pt(section.mask, h)
    n = A.shape[0]
    if method == "direct":
        lu = DirectSPD(A)
        solve = lambda b, x0: lu.solve(b)
    elif method == "cg":
        solve = lambda b, x0: pcg(A, b, x0=x0, rtol=1e-12)[0]
    else:
        raise ValueError(f"unknown method {method!r}")

    x = np.ones(n)
    lam = float(x @ (A @ x) / (x @ x))
    res = math.inf
    for it in range(1, max_iter + 1):
        y = solve(x, x / lam)
        x = y / np.abs(y).max()
        Ax = A @ x
        lam = float(x @ Ax / (x @ x))
        res = float(np.abs(Ax - lam * x).max())
        if res < rtol * lam:
            break
    else:
        raise NoConvergence(f"inverse iteration residual {res:.3e} after {max_iter} iterations")
    if x.sum() < 0:
        x = -x
    x = x / x.max()
    psi = np.zeros(section.mask.shape)
    psi[section.mask] = x
    return EigenResult(lam=lam, eigenfunction=psi, residual=res, h=h,
                       coords=tuple(section.coords()), iterations=it, mask=section.mask.copy())


def richardson(values, hs, order=None):
    """Extrapolate lambda(h) to h = 0.

    With three values the observed order is estimated from the ratio of
    successive differences (falling back to ``order`` or 1 if the sequence is
    not monotone).  Returns (estimate, order_used).
    """
    v = np.asarray(values, dtype=float)
    hs = np.asarray(hs, dtype=float)
    r = hs[0] / hs[1]
    if order is None:
        order = 1.0
        if len(v) >= 3:
            d1, d2 = v[-3] - v[-2], v[-2] - v[-1]
            if d1 * d2 > 0 and abs(d2) > 0:
                order = math.log(d1 / d2) / math.log(r)
    f = r**order
    return float((f * v[-1] - v[-2]) / (f - 1)), float(order)


# ---------------------------------------------------------------------------
# Spherical caps
# ---------------------------------------------------------------------------
S_LAUNCH = 1e-8
SHOOT_STEP = 1e-4


def _launch(lam, s0):
    c1 = -lam / 2
    c2 = lam * (lam - 2) / 16
    return 1 + c1 * s0 + c2 * s0 * s0, s0 * (2 - s0) * (c1 + 2 * c2 * s0)


def _shoot(lam, s1, n, s0, stop_on_sign=False, keep_path=False):
    """RK4 for the Legendre equation in s = 1 - x, launched from the regular series at s0.

    Uses the flux form w = s (2 - s) psi', w' = -lam psi, which stays well
    conditioned at the singular end s = 0.  Returns (psi(s1), crossed, path)
    where ``crossed`` says psi became non-positive before the rim.
    """
    lam = float(lam)
    psi, w = _launch(lam, s0)
    hh = (s1 - s0) / n
    path = [psi] if keep_path else None
    s = s0
    for k in range(n):
        sm = s + 0.5 * hh
        se = s0 + (k + 1) * hh
        g0 = 1.0 / (s * (2 - s))
        gm = 1.0 / (sm * (2 - sm))
        ge = 1.0 / (se * (2 - se))
        k1p, k1w = w * g0, -lam * psi
        p2, w2 = psi + 0.5 * hh * k1p, w + 0.5 * hh * k1w
        k2p, k2w = w2 * gm, -lam * p2
        p3, w3 = psi + 0.5 * hh * k2p, w + 0.5 * hh * k2w
        k3p, k3w = w3 * gm, -lam * p3
        p4, w4 = psi + hh * k3p, w + hh * k3w
        k4p, k4w = w4 * ge, -lam * p4
        psi += hh / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        w += hh / 6 * (k1w + 2 * k2w + 2 * k3w + k4w)
        s = se
        if keep_path:
            path.append(psi)
        if psi <= 0 and k < n - 1:
            if stop_on_sign:
                return psi, True, path
    return psi, psi <= 0, path


def beltrami_lambda1(cap_angle: float, n_grid: int = 2000, rtol: float = 1e-13) -> EigenResult:
    """Principal Dirichlet eigenvalue of the Laplace-Beltrami operator on a cap of S^2.

    Shooting on (1-x^2) psi'' - 2x psi' + lam psi = 0 from the pole x = 1 to
    x = cos(cap_angle), RK4 with step min(1e-4, (1 - cos theta)/n_grid).
    Bisection on "psi changes sign before the rim" (monotone in lam)
    isolates the first eigenvalue; Brent's method then drives psi(rim) to
    zero.  The reported residual is |psi(rim)| of the sup-normalised
    eigenfunction.
    """
    theta = float(cap_angle)
    if not 0 < theta < math.pi:
        raise InvalidCap(f"cap angle {theta} outside (0, pi)")
    s1 = 2.0 * math.sin(theta / 2) ** 2
    s0 = min(S_LAUNCH, 1e-4 * s1)
    step = min(SHOOT_STEP, s1 / n_grid)
    n = max(int(math.ceil((s1 - s0) / step)), 1)
    crossed = lambda l: _shoot(l, s1, n, s0, stop_on_sign=True)[1]

    # Small caps look like disks of radius theta.
    lo, hi = 0.0, max(4.0, 2.0 * J01**2 / theta**2)
    for _ in range(60):
        if crossed(hi):
            break
        lo, hi = hi, 2 * hi
    else:
        raise NoConvergence("could not bracket the cap eigenvalue")
    while hi - lo > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        if crossed(mid):
            hi = mid
        else:
            lo = mid
    g = lambda l: _shoot(l, s1, n, s0)[0]
    if g(lo) * g(hi) > 0:
        lam = 0.5 * (lo + hi)
    else:
        lam = brentq(g, lo, hi, xtol=1e-300, rtol=max(rtol, 4 * np.finfo(float).eps))
    _, _, path = _shoot(lam, s1, n, s0, keep_path=True)
    path = np.array(path)
    psi = path / path.max()
    svals = s0 + (s1 - s0) / n * np.arange(n + 1)
    angles = 2.0 * np.arcsin(np.sqrt(svals / 2.0))
    return EigenResult(lam=float(lam), eigenfunction=psi, residual=abs(psi[-1]), h=step, coords=(angles,))


# ---------------------------------------------------------------------------
# Characteristic constant
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class CharacteristicConstant:
    alpha: float
    lambda_source: float
    dim: int

    def quadratic_residual(self):
        a, d, lam = self.alpha, self.dim, self.lambda_source
        return abs(a * a + (d - 2) * a - lam) / max(lam, a * a)


def characteristic_constant(lam: float, d: int = 3) -> CharacteristicConstant:
    """Positive root of s^2 + (d-2) s - lam = 0.

    Written as 2 lam / ((d-2) + sqrt((d-2)^2 + 4 lam)) so small lam does not
    cancel.
    """
    if not lam > 0:
        raise NonpositiveLambda(f"lambda must be positive, got {lam}")
    if d < 3:
        raise ValueError("d must be >= 3")
    b = d - 2
    alpha = 2.0 * lam / (b + math.sqrt(b * b + 4.0 * lam))
    return CharacteristicConstant(alpha=alpha, lambda_source=float(lam), dim=int(d))


# ---------------------------------------------------------------------------
# lambda(t) profiles
# ---------------------------------------------------------------------------
@dataclass
class LambdaProfile:
    """Principal section eigenvalue lambda(t) at sampled t with a monotone interpolant.

    ``values`` are physical eigenvalues of the sections at height t.
    ``unit_lambda`` is the eigenvalue of the unit cross-section, so
    ``values == unit_lambda / a(t)**2``.
    """

    t: np.ndarray
    values: np.ndarray
    unit_lambda: float
    a_values: np.ndarray

    def __post_init__(self):
        if len(self.t) >= 2:
            self._interp = PchipInterpolator(self.t, self.values, extrapolate=False)
            self._interp_rescaled = PchipInterpolator(self.t, self.values * self.a_values**2, extrapolate=False)
        else:
            self._interp = self._interp_rescaled = None

    def __call__(self, t):
        return self._evaluate(self._interp, self.values, t)

    def rescaled(self, t):
        """Eigenvalue of the rescaled section D_t = section / a(t)."""
        return self._evaluate(self._interp_rescaled, self.values * self.a_values**2, t)

    def _evaluate(self, interp, values, t):
        tt = np.asarray(t, dtype=float)
        if interp is None:
            out = np.full_like(tt, values[0])
        else:
            out = interp(np.clip(tt, self.t[0], self.t[-1]))
        return float(out) if out.ndim == 0 else out

    def to_csv(self, path, header_comment=None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("t", "lambda"))
            for ti, li in zip(self.t, self.values):
                w.writerow((repr(float(ti)), repr(float(li))))


_unit_cache = {}


def unit_section_lambda(domain: DomainSpec, h: float = 1 / 64) -> float:
    """Eigenvalue of the unit cross-section (disk, or ellipse with semi-axes 1 and b)."""
    key = (domain.ellipse_b, h)
    if key not in _unit_cache:
        _unit_cache[key] = dirichlet_lambda1(SectionMask.ellipse(1.0, domain.ellipse_b, h)).lam
    return _unit_cache[key]


def lambda_profile(domain: DomainSpec, t_list, h: float = 1 / 64, unit_lambda: Optional[float] = None) -> LambdaProfile:
    """lambda(t) = lambda(unit section) / a(t)^2 at each t in ``t_list``.

    Every parametric section is a(t) times the unit cross-section, so one
    eigensolve on the unit shape (grid spacing ``h`` relative to the unit
    shape) serves all t.  ``unit_lambda`` overrides that solve, e.g. with
    the exact disk value.
    """
    t = np.asarray(t_list, dtype=float)
    if t.ndim != 1 or len(t) == 0 or np.any(np.diff(t) <= 0) or np.any(t <= 0):
        raise ValueError("t_list must be positive and strictly increasing")
    if domain.kind not in (DomainKind.PARABOLOID, DomainKind.HORN, DomainKind.STRAIGHT_CYLINDER,
                           DomainKind.ELLIPTIC_PARABOLOID):
        from .errors import UnsupportedDomain
        raise UnsupportedDomain(f"{domain.kind.value} has no planar section profile")
    a = np.asarray(domain.a(t), dtype=float)
    if np.any(a <= 0):
        from .errors import EmptySection
        raise EmptySection("section profile vanishes on t_list")
    lam_u = unit_section_lambda(domain, h) if unit_lambda is None else float(unit_lambda)
    return LambdaProfile(t=t, values=lam_u / a**2, unit_lambda=lam_u, a_values=a)


J01 = 2.404825557695773


def disk_lambda_exact(radius=1.0):
    return (J01 / radius) ** 2
