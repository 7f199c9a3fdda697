"""Walk-on-spheres estimates of the harmonic measure of a spherical cut."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import OutsideDomain, PathBudgetExceeded, UnsupportedDomain
from .geometry import DomainKind, DomainSpec
from .rng import uniform_pair

N_PROFILE_SAMPLES = 64
GOLDEN_ITERS = 60
MAX_STEPS = 10**6
_INVPHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class WosEstimate:
    p_hat: float
    stderr: float
    n_paths: int
    mean_steps: float
    seed: int
    n_capped: int = 0


def _profile_distance(domain, x, rho):
    """Lower bound on the distance from meridian points (x, rho) to the surface rho = a(xi).

    64 samples of the exact point-to-circle distance bracket the minimiser;
    a vectorised golden-section search refines it, and the final bracket
    width times the Lipschitz constant of the distance is subtracted.
    """
    a_x = np.asarray(domain.a(x), dtype=float)
    D = np.maximum(a_x - rho, 0.0)
    lo = np.maximum(x - D, 0.0)
    hi = x + D
    k = np.linspace(0.0, 1.0, N_PROFILE_SAMPLES)
    xi = lo[:, None] + (hi - lo)[:, None] * k[None, :]
    dist = lambda s: np.hypot(x[:, None] - s, rho[:, None] - domain.a(s)) if s.ndim == 2 else \
        np.hypot(x - s, rho - domain.a(s))
    vals = dist(xi)
    j = np.argmin(vals, axis=1)
    step = (hi - lo) / (N_PROFILE_SAMPLES - 1)
    rows = np.arange(len(x))
    best = vals[rows, j]
    b_lo = np.maximum(xi[rows, j] - step, lo)
    b_hi = np.minimum(xi[rows, j] + step, hi)
    # Golden-section on [b_lo, b_hi].
    c = b_hi - _INVPHI * (b_hi - b_lo)
    d = b_lo + _INVPHI * (b_hi - b_lo)
    fc, fd = dist(c), dist(d)
    for _ in range(GOLDEN_ITERS):
        left = fc < fd
        b_hi = np.where(left, d, b_hi)
        b_lo = np.where(left, b_lo, c)
        new_c = b_hi - _INVPHI * (b_hi - b_lo)
        new_d = b_lo + _INVPHI * (b_hi - b_lo)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, dist(new_c), fd)
        fd_next = np.where(left, fc, dist(new_d))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    refined = np.minimum(np.minimum(fc, fd), best)
    mid = 0.5 * (b_lo + b_hi)
    lip = np.sqrt(1.0 + np.asarray(domain.a_prime(np.maximum(mid, 1e-12)), dtype=float) ** 2)
    return np.maximum(refined - lip * (b_hi - b_lo), 0.0)


def distance_to_boundary(domain: DomainSpec, x, check: bool = True):
    """Positive lower bound on dist(x, boundary) for one point or an (n, 3) array.

    Exact for cones, circular cylinders, whole space and ball exteriors;
    elliptic cylinders use the convexity bound (1 - s) * b * A where s is the
    elliptic level of the point.
    """
    p = np.atleast_2d(np.asarray(x, dtype=float))
    single = np.ndim(x) == 1
    if check and not np.all(domain.contains(p)):
        raise OutsideDomain("point lies outside the domain")
    k = domain.kind
    if k is DomainKind.WHOLE_SPACE:
        out = np.full(len(p), np.inf)
    elif k is DomainKind.BALL_EXTERIOR:
        out = np.linalg.norm(p, axis=1) - domain.A
    elif k is DomainKind.LIPSCHITZ_CONE:
        r = np.linalg.norm(p, axis=1)
        phi = np.arccos(np.clip(p[:, domain.axis] / np.where(r > 0, r, 1.0), -1.0, 1.0))
        out = r * np.sin(np.minimum(domain.cap_angle - phi, math.pi / 2))
    else:
        xa, Y = domain.axial_radial(p)
        if k is DomainKind.STRAIGHT_CYLINDER:
            if domain.circular:
                out = domain.A - np.linalg.norm(Y, axis=1)
            else:
                A, b = domain.A, domain.ellipse_b
                s = np.hypot(Y[:, 0] / A, Y[:, 1] / (A * b))
                out = (1 - s) * A * b
        elif k in (DomainKind.PARABOLOID, DomainKind.HORN) and domain.circular:
            out = _profile_distance(domain, xa, np.linalg.norm(Y, axis=1))
            if k is DomainKind.HORN:
                out = np.minimum(out, xa)
        else:
            raise UnsupportedDomain(f"no distance bound for {k.value}")
    out = np.maximum(out, 0.0)
    return float(out[0]) if single else out


def _unit_directions(u1, u2):
    z = 1.0 - 2.0 * u1
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    ph = 2.0 * math.pi * u2
    return np.stack([s * np.cos(ph), s * np.sin(ph), z], axis=1)


def wos_exit_probability(domain: DomainSpec, x0, r_cut: float, n_paths: int,
                         eps_shell: float | None = None, seed: int = 0,
                         max_steps: int = MAX_STEPS, strict: bool = False,
                         batch: int = 1 << 16) -> WosEstimate:
    """Fraction of walk-on-spheres paths from x0 reaching |xi| = r_cut before the lateral boundary.

    A path stops once it is within ``eps_shell`` (default 1e-3 r_cut) of
    either piece and is credited to the nearer one.  Paths still running
    after ``max_steps`` count as lateral absorption, or raise
    PathBudgetExceeded when ``strict``.  Path i at step k uses the Philox
    block (seed; k, i), so results do not depend on ``batch``.
    """
    x0 = np.asarray(x0, dtype=float)
    if n_paths <= 0:
        raise ValueError("n_paths must be positive")
    if not domain.contains(x0[None, :])[0]:
        raise OutsideDomain("x0 lies outside the domain")
    if not np.linalg.norm(x0) < r_cut:
        raise ValueError("x0 must lie inside the cut sphere")
    if eps_shell is None:
        eps_shell = 1e-3 * r_cut
    if eps_shell <= 0:
        raise ValueError("eps_shell must be positive")
    hits = 0
    total_steps = 0
    capped = 0
    for start in range(0, n_paths, batch):
        ids = np.arange(start, min(start + batch, n_paths), dtype=np.uint64)
        pos = np.repeat(x0[None, :], len(ids), axis=0)
        step = 0
        while len(ids):
            d_lat = distance_to_boundary(domain, pos, check=False)
            d_cut = r_cut - np.linalg.norm(pos, axis=1)
            done = np.minimum(d_lat, d_cut) <= eps_shell
            if done.any():
                hits += int(np.count_nonzero(d_cut[done] < d_lat[done]))
                total_steps += step * int(done.sum())
                keep = ~done
                ids, pos, d_lat, d_cut = ids[keep], pos[keep], d_lat[keep], d_cut[keep]
                if not len(ids):
                    break
            if step >= max_steps:
                if strict:
                    raise PathBudgetExceeded(f"{len(ids)} paths exceeded {max_steps} steps")
                capped += len(ids)
                total_steps += step * len(ids)
                break
            u1, u2 = uniform_pair(seed, ids, step)
            pos = pos + np.minimum(d_lat, d_cut)[:, None] * _unit_directions(u1, u2)
            step += 1
    p = hits / n_paths
    return WosEstimate(p_hat=p, stderr=math.sqrt(p * (1 - p) / n_paths), n_paths=int(n_paths),
                       mean_steps=total_steps / n_paths, seed=int(seed), n_capped=capped)


@dataclass(frozen=True)
class BoundReport:
    p_hat: float
    stderr: float
    n_paths: int
    bound: float
    passed: bool
    seed: int
    mean_steps: float

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def verify_reciprocal_bound(domain: DomainSpec, x0, r_cut: float, m_tilde: float, n_paths: int,
                            seed: int = 0, eps_shell: float | None = None) -> BoundReport:
    """Check p_hat + 3 stderr >= 1 / M~(r) with a walk-on-spheres estimate."""
    from .asymptotics import hm_lower_bound

    bound = hm_lower_bound(m_tilde)
    est = wos_exit_probability(domain, x0, r_cut, n_paths, eps_shell, seed)
    return BoundReport(p_hat=est.p_hat, stderr=est.stderr, n_paths=est.n_paths, bound=bound,
                       passed=bool(est.p_hat + 3 * est.stderr >= bound), seed=est.seed,
                       mean_steps=est.mean_steps)


def half_ball_axis_measure(s: float, R: float) -> float:
    """Harmonic measure of the hemisphere |xi| = R, z > 0 seen from (0, 0, s) in the half-ball."""
    # Poisson integral of the odd extension of the indicator, evaluated on the axis.
    return (R * R - s * s) / s * (1.0 / (R - s) - 1.0 / math.sqrt(R * R + s * s)) - 1.0


def annulus_measure(r0: float, R: float, s: float) -> float:
    """Probability of reaching |x| = R before |x| = r0 from radius s in R^3."""
    return (1.0 / r0 - 1.0 / s) / (1.0 / r0 - 1.0 / R)
