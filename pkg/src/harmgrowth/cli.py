"""Batch experiment runner: JSON config in, CSV/JSON artifacts out.

Exit status: 0 on success or PASS, 2 on certification FAIL, 1 on error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigInvalid, HarmGrowthError

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class Experiment(str, Enum):
    EIG = "Eig"
    CERTIFY = "Certify"
    GROWTH = "Growth"
    SOLVE = "Solve"
    WOS = "Wos"
    VERIFY_ALL = "VerifyAll"


DEFAULTS = {
    "h": None,
    "t_list": None,
    "t_min": None,
    "t_max": None,
    "tol": 1e-9,
    "n_paths": 10_000,
    "seed": 0,
    "x0": None,
    "r_cut": None,
    "eps_shell": None,
    "m_tilde": None,
    "inlet_bc": "Zero",
    "outlet_bc": "One",
    "mode": None,
    "section": None,
    "n_samples": 4000,
    "trim": 0.15,
    "huber_c": 1.0,
}


@dataclass
class ExperimentConfig:
    experiment: Experiment
    domain: object
    params: dict
    out: Optional[str]
    raw: dict = field(repr=False, default_factory=dict)

    def get(self, key):
        return self.params[key]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------
def _number(cfg, key, positive=False, integer=False, minimum=None):
    v = cfg.get(key)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigInvalid(key, "must be a number")
    if integer and (not float(v).is_integer()):
        raise ConfigInvalid(key, "must be an integer")
    if not math.isfinite(v):
        raise ConfigInvalid(key, "must be finite")
    if positive and v <= 0:
        raise ConfigInvalid(key, "must be positive")
    if minimum is not None and v < minimum:
        raise ConfigInvalid(key, f"must be >= {minimum}")
    return int(v) if integer else float(v)


def _require(params, key):
    if params.get(key) is None:
        raise ConfigInvalid(key, "is required for this experiment")
    return params[key]


def _parse_domain(obj):
    from .geometry import DomainKind, DomainSpec

    if not isinstance(obj, dict):
        raise ConfigInvalid("domain", "must be an object")
    if "kind" not in obj:
        raise ConfigInvalid("domain.kind", "is required")
    try:
        DomainKind(obj["kind"])
    except ValueError:
        raise ConfigInvalid("domain.kind", f"unknown kind {obj['kind']!r}") from None
    for key in ("dim", "A", "alpha", "ellipse_b", "cap_angle"):
        v = obj.get(key)
        if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float))):
            raise ConfigInvalid(f"domain.{key}", "must be a number")
    if obj.get("dim", 3) != 3:
        raise ConfigInvalid("domain.dim", "only d = 3 is supported")
    try:
        return DomainSpec.from_dict(obj)
    except ValueError as exc:
        msg = str(exc)
        key = msg.split()[0] if msg.split() else "domain"
        raise ConfigInvalid(f"domain.{key}", msg) from None


def _t_list(params, decades=False):
    t = params.get("t_list")
    if t is None:
        return None
    if not isinstance(t, list) or not t:
        raise ConfigInvalid("t_list", "must be a non-empty list")
    for i, v in enumerate(t):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            raise ConfigInvalid(f"t_list[{i}]", "must be a positive number")
    arr = np.asarray(t, dtype=float)
    if np.any(np.diff(arr) <= 0):
        raise ConfigInvalid("t_list", "must be strictly increasing")
    if decades and (len(arr) < 4 or math.log10(arr[-1] / arr[0]) < 2 - 1e-12):
        raise ConfigInvalid("t_list", "needs >= 4 entries spanning >= 2 decades")
    return arr


def parse_config(obj, overrides=None) -> ExperimentConfig:
    """Validate a config mapping against the target operation's preconditions."""
    from .geometry import DomainKind

    if not isinstance(obj, dict):
        raise ConfigInvalid("$", "config must be a JSON object")
    obj = dict(obj)
    for k, v in (overrides or {}).items():
        if v is not None:
            obj[k] = v
    if "experiment" not in obj:
        raise ConfigInvalid("experiment", "is required")
    try:
        exp = Experiment(obj["experiment"])
    except ValueError:
        raise ConfigInvalid("experiment", f"unknown experiment {obj['experiment']!r}") from None
    known = set(DEFAULTS) | {"experiment", "domain", "out"}
    for k in obj:
        if k not in known:
            raise ConfigInvalid(k, "unknown field")
    params = {k: obj.get(k, v) for k, v in DEFAULTS.items()}
    domain = _parse_domain(obj["domain"]) if obj.get("domain") is not None else None
    if domain is None and not (exp is Experiment.EIG and params.get("section") is not None):
        raise ConfigInvalid("domain", "is required")

    params["h"] = _number(params, "h", positive=True)
    params["tol"] = _number(params, "tol", positive=True)
    params["n_paths"] = _number(params, "n_paths", positive=True, integer=True)
    params["n_samples"] = _number(params, "n_samples", positive=True, integer=True)
    params["eps_shell"] = _number(params, "eps_shell", positive=True)
    params["huber_c"] = _number(params, "huber_c", positive=True)
    params["trim"] = _number(params, "trim", minimum=0)
    if params["trim"] >= 0.5:
        raise ConfigInvalid("trim", "must be < 0.5")
    seed = params.get("seed")
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigInvalid("seed", "must be an unsigned 64-bit integer")
    if params["mode"] not in (None, "cylinder", "cone"):
        raise ConfigInvalid("mode", "must be 'cylinder' or 'cone'")
    if params["inlet_bc"] not in ("Zero", "Exact"):
        raise ConfigInvalid("inlet_bc", "must be 'Zero' or 'Exact'")
    if params["outlet_bc"] not in ("One", "Exact"):
        raise ConfigInvalid("outlet_bc", "must be 'One' or 'Exact'")

    if exp is Experiment.EIG:
        sec = params.get("section")
        if sec is not None:
            if not isinstance(sec, dict) or sec.get("shape") not in ("disk", "ellipse", "square", "cap"):
                raise ConfigInvalid("section.shape", "must be one of disk, ellipse, square, cap")
            for key in ("radius", "b", "side", "cap_angle"):
                v = sec.get(key)
                if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0):
                    raise ConfigInvalid(f"section.{key}", "must be a positive number")
            if sec["shape"] == "cap" and not 0 < sec.get("cap_angle", 0) < math.pi:
                raise ConfigInvalid("section.cap_angle", "must lie in (0, pi)")
            if sec["shape"] == "ellipse" and not 0 < sec.get("b", 1.0) <= 1:
                raise ConfigInvalid("section.b", "must lie in (0, 1]")
        is_cap = (sec or {}).get("shape") == "cap" or (
            sec is None and domain.kind is DomainKind.LIPSCHITZ_CONE)
        if not is_cap:
            if params["h"] is None:
                params["h"] = 1 / 128
            if params["h"] > 0.125:
                raise ConfigInvalid("h", "section must span >= 16 cells (h <= 1/8 of the unit shape)")
    elif exp is Experiment.CERTIFY:
        _require(params, "t_list")
        _t_list(params, decades=True)
    elif exp is Experiment.GROWTH:
        _require(params, "t_list")
        t = _t_list(params)
        lo = math.e if _mode(params, domain) == "cone" else 1.0
        if t[0] < lo:
            raise ConfigInvalid("t_list[0]", f"must be >= {lo:.6g}")
    elif exp in (Experiment.SOLVE, Experiment.VERIFY_ALL):
        _require(params, "h")
        _require(params, "t_min")
        _require(params, "t_max")
        t_min = params["t_min"] = _number(params, "t_min", minimum=0)
        t_max = params["t_max"] = _number(params, "t_max", positive=True)
        if not t_min < t_max:
            raise ConfigInvalid("t_max", "must exceed t_min")
        if exp is Experiment.VERIFY_ALL:
            _require(params, "t_list")
            _t_list(params, decades=_mode(params, domain) is not None)
    elif exp is Experiment.WOS:
        x0 = _require(params, "x0")
        if not isinstance(x0, list) or len(x0) != 3 or any(
                isinstance(v, bool) or not isinstance(v, (int, float)) for v in x0):
            raise ConfigInvalid("x0", "must be a list of 3 numbers")
        _require(params, "r_cut")
        r_cut = params["r_cut"] = _number(params, "r_cut", positive=True)
        if not np.linalg.norm(x0) < r_cut:
            raise ConfigInvalid("x0", "must lie inside the cut sphere")
        if not domain.contains(np.asarray(x0, dtype=float)[None, :])[0]:
            raise ConfigInvalid("x0", "must lie inside the domain")
        m = _number(params, "m_tilde")
        if m is not None and m < 1:
            raise ConfigInvalid("m_tilde", "must be >= 1")
    return ExperimentConfig(exp, domain, params, obj.get("out"), raw=obj)


def _mode(params, domain):
    from .geometry import DomainKind

    if params.get("mode"):
        return params["mode"]
    if domain is None:
        return None
    return "cone" if domain.kind is DomainKind.LIPSCHITZ_CONE else "cylinder"


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------
def _artifact(prefix, kind, ext="csv"):
    return f"{prefix}.{kind}.{ext}"


def _run_eig(cfg, prefix, meta):
    from .eigensolve import beltrami_lambda1, dirichlet_lambda1
    from .geometry import DomainKind, SectionMask, section_at
    from .io import write_rows

    p = cfg.params
    sec = p.get("section")
    h = p["h"]
    if sec is not None:
        shape = sec["shape"]
        if shape == "cap":
            res = beltrami_lambda1(sec["cap_angle"])
        elif shape == "disk":
            res = dirichlet_lambda1(SectionMask.disk(sec.get("radius", 1.0), h))
        elif shape == "ellipse":
            r = sec.get("radius", 1.0)
            res = dirichlet_lambda1(SectionMask.ellipse(r, r * sec.get("b", 1.0), h))
        else:
            side = sec.get("side", 1.0)
            res = dirichlet_lambda1(SectionMask.rectangle(side, side, h))
    elif cfg.domain.kind is DomainKind.LIPSCHITZ_CONE:
        res = beltrami_lambda1(cfg.domain.cap_angle)
    elif p.get("t_min") is not None:
        res = dirichlet_lambda1(section_at(cfg.domain, p["t_min"], h))
    else:
        d = cfg.domain
        scale = d.A if d.kind is DomainKind.STRAIGHT_CYLINDER else 1.0
        res = dirichlet_lambda1(SectionMask.ellipse(scale, scale * d.ellipse_b, h))
    write_rows(_artifact(prefix, "eig"), ("lambda", "residual", "h", "iterations"),
               [(res.lam, res.residual, res.h, res.iterations)], meta)
    res.to_csv(_artifact(prefix, "eigenfunction"), meta)
    print(f"Eig: lambda={res.lam:.10g} residual={res.residual:.3e} h={res.h:.6g}")
    return EXIT_OK


def _certify(cfg, t):
    from .geometry import certify_conelike, certify_cylinderlike

    if _mode(cfg.params, cfg.domain) == "cone":
        return certify_conelike(cfg.domain, t, n_samples=cfg.params["n_samples"])
    return certify_cylinderlike(cfg.domain, t, n_samples=cfg.params["n_samples"])


def _run_certify(cfg, prefix, meta):
    t = _t_list(cfg.params, decades=True)
    rep = _certify(cfg, t)
    rep.to_csv(_artifact(prefix, "certify"), meta)
    verdict = "PASS" if rep.passed else "FAIL"
    failed = [k for k, v in rep.flags.items() if not v]
    print(f"Certify ({rep.kind}): {verdict}" + (f" failed={','.join(failed)}" if failed else ""))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _alpha_profile(domain):
    """alpha1(t) of the spherical sections (constant for cones)."""
    from .geometry import DomainKind, _cap_alpha

    if domain.kind is DomainKind.LIPSCHITZ_CONE:
        a0 = _cap_alpha(domain.cap_angle, 3)
        return lambda r: a0
    raise ConfigInvalid("domain.kind", "cone formulas need a cone-like domain")


def _run_growth(cfg, prefix, meta):
    from .asymptotics import GrowthCurve, Provenance, formula_curve, huber_lower_bound
    from .eigensolve import lambda_profile
    from .io import write_rows

    p = cfg.params
    t = _t_list(p)
    d = cfg.domain
    if _mode(p, d) == "cone":
        alpha = _alpha_profile(d)
        curve = formula_curve("cone", None, alpha, t, p["tol"])
        curve.to_csv(_artifact(prefix, "growth"), meta)
        rows = []
        for r in t:
            if r >= 2 * math.e:
                hb = huber_lower_bound(alpha, float(r), p["huber_c"], p["tol"])
                rows.append((r, math.log(hb), Provenance.HUBER_BOUND.value, math.nan))
        write_rows(_artifact(prefix, "huber"), ("t", "value", "provenance", "rho"), rows, meta)
    else:
        knots = np.geomspace(1.0, float(t[-1]), 64) if t[-1] > 1 else np.array([1.0])
        prof = lambda_profile(d, knots, h=p["h"] or 1 / 128)
        prof.to_csv(_artifact(prefix, "lambda"), meta)
        curve = formula_curve("cylinder", d.a, prof.rescaled, t, p["tol"])
        curve.to_csv(_artifact(prefix, "growth"), meta)
    print(f"Growth: {len(t)} samples, log M({t[-1]:g}) = {curve.values[-1]:.10g}")
    return EXIT_OK


def _run_solve(cfg, prefix, meta):
    from .pde import growth_profile, solve_harmonic

    p = cfg.params
    field = solve_harmonic(cfg.domain, p["t_min"], p["t_max"], p["h"], p["inlet_bc"], p["outlet_bc"])
    curve = growth_profile(field, trim=p["trim"])
    curve.to_csv(_artifact(prefix, "solve"), meta)
    field.to_csv(_artifact(prefix, "field"), meta)
    log_t = field.geometry == "cone"
    print(f"Solve: residual={field.residual:.3e} max_principle={field.check_maximum_principle()} "
          f"slope={curve.slope(log_t=log_t):.6g}")
    return EXIT_OK


def _run_wos(cfg, prefix, meta):
    from .io import write_json, write_rows
    from .measure import verify_reciprocal_bound, wos_exit_probability

    p = cfg.params
    x0 = np.asarray(p["x0"], dtype=float)
    if p.get("m_tilde") is not None:
        rep = verify_reciprocal_bound(cfg.domain, x0, p["r_cut"], p["m_tilde"], p["n_paths"], p["seed"],
                                      p["eps_shell"])
        d = rep.to_dict()
    else:
        est = wos_exit_probability(cfg.domain, x0, p["r_cut"], p["n_paths"], p["eps_shell"], p["seed"])
        d = {"p_hat": est.p_hat, "stderr": est.stderr, "n_paths": est.n_paths, "bound": None,
             "pass": None, "seed": est.seed, "mean_steps": est.mean_steps}
    write_json(_artifact(prefix, "wos", "json"), d, meta)
    cols = ("p_hat", "stderr", "n_paths", "bound", "pass", "seed", "mean_steps")
    write_rows(_artifact(prefix, "wos"), cols, [tuple("" if d[c] is None else d[c] for c in cols)], meta)
    tail = "" if d["pass"] is None else f" bound={d['bound']:.6g} {'PASS' if d['pass'] else 'FAIL'}"
    print(f"Wos: p_hat={d['p_hat']:.6g} stderr={d['stderr']:.3g}{tail}")
    if d["pass"] is False:
        return EXIT_FAIL
    return EXIT_OK


def _run_verify_all(cfg, prefix, meta):
    from .geometry import DomainKind
    from .io import write_rows
    from .pipeline import cone_growth_check, cylinder_growth_check

    p = cfg.params
    d = cfg.domain
    t = _t_list(p, decades=True)
    rep = _certify(cfg, t)
    rep.to_csv(_artifact(prefix, "certify"), meta)
    if _mode(p, d) == "cone":
        chk = cone_growth_check(d, p["t_min"], p["t_max"], p["h"], p["inlet_bc"], p["outlet_bc"], p["trim"])
        chk.measured.to_csv(_artifact(prefix, "solve"), meta)
        write_rows(_artifact(prefix, "rho"), ("quantity", "measured", "predicted", "rho"),
                   [("alpha0", chk.slope, chk.alpha0.alpha, chk.relative_error)], meta)
        summary = f"slope={chk.slope:.6g} alpha0={chk.alpha0.alpha:.6g}"
    else:
        chk = cylinder_growth_check(d, p["t_min"], p["t_max"], p["h"], trim=p["trim"], tol=p["tol"])
        chk.profile.to_csv(_artifact(prefix, "lambda"), meta)
        chk.predicted.to_csv(_artifact(prefix, "growth"), meta)
        chk.measured.to_csv(_artifact(prefix, "solve"), meta)
        write_rows(_artifact(prefix, "rho"), ("t", "rho"), chk.comparison.rows(), meta)
        summary = f"max|rho|={chk.max_abs_rho:.4g} trend={chk.comparison.trend:.4g}"
    verdict = "PASS" if rep.passed else "FAIL"
    print(f"VerifyAll: certification {verdict}; {summary}")
    return EXIT_OK if rep.passed else EXIT_FAIL


RUNNERS = {
    Experiment.EIG: _run_eig,
    Experiment.CERTIFY: _run_certify,
    Experiment.GROWTH: _run_growth,
    Experiment.SOLVE: _run_solve,
    Experiment.WOS: _run_wos,
    Experiment.VERIFY_ALL: _run_verify_all,
}


def run(cfg: ExperimentConfig, prefix: Optional[str] = None) -> int:
    """Run one validated experiment and write its artifacts under ``prefix``."""
    from .io import metadata_line

    prefix = prefix or cfg.out
    if not prefix:
        raise ConfigInvalid("out", "an output prefix is required (--out or config.out)")
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    record = {"experiment": cfg.experiment.value,
              "domain": cfg.domain.to_dict() if cfg.domain is not None else None}
    record.update(cfg.params)
    return RUNNERS[cfg.experiment](cfg, prefix, metadata_line(record))


def build_parser():
    ap = argparse.ArgumentParser(
        prog="harmgrowth",
        description="Run growth, eigenvalue, PDE and walk-on-spheres experiments from a JSON config.",
    )
    ap.add_argument("--config", required=True, help="path to the JSON experiment config")
    ap.add_argument("--out", default=None, help="output prefix; artifacts are <prefix>.<kind>.csv "
                                                "(default: the config's 'out' field)")
    ap.add_argument("--seed", type=int, default=None, help="unsigned 64-bit RNG seed (default: config or 0)")
    ap.add_argument("--threads", type=int, default=1,
                    help="worker count; results do not depend on it (default: 1)")
    ap.add_argument("--huber-c", type=float, default=None, dest="huber_c",
                    help="constant C of the Huber lower bound (default: 1.0)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigInvalid("threads", "must be >= 1")
        try:
            with open(args.config) as fh:
                obj = json.load(fh)
        except OSError as exc:
            raise ConfigInvalid("config", f"cannot read: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigInvalid("config", f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
        cfg = parse_config(obj, {"seed": args.seed, "huber_c": args.huber_c})
        return run(cfg, args.out)
    except ConfigInvalid as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except HarmGrowthError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
