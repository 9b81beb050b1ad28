"""Experiment runners shared by the command line and configuration files.

Each runner takes an :class:`~genharnack.config.ExperimentConfig` and returns an
:class:`Outcome`: a JSON-ready payload, named CSV tables and whether every hard
assertion held.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import drift as dr
from .barrier import BarrierSpec, barrier_alpha, find_r0, verify_barrier
from .config import ExperimentConfig
from .errors import ConfigError, InfeasibleError
from .extremal1d import build_extremal, sharpness_report, verify_extremal
from .grid import GridFunction
from .harnack import harnack_integral
from .levelsets import level_set_diagnostics
from .pucci import EllipticityPair
from .pxlab import inverse_pk, profile_from_config, px_harnack_functional, residual_px_nondiv, solve_px_1d
from .serialization import atomic_write_text, dumps, log_value, write_csv


@dataclass
class Outcome:
    payload: dict
    tables: dict = field(default_factory=dict)
    passed: bool = True
    text: str = ""


def _params(cfg: ExperimentConfig, allowed: dict) -> dict:
    """Merge ``cfg.params`` over ``allowed`` defaults, rejecting unknown keys."""
    unknown = set(cfg.params) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown parameters for {cfg.experiment}: {sorted(unknown)}")
    return {**allowed, **cfg.params}


def _tol(cfg: ExperimentConfig, name: str, default: float) -> float:
    return float(cfg.tolerances.get(name, default))


def _logs(p: dict, lo: str = "m", hi: str = "M"):
    """``(ln lo, ln hi)`` from either plain or ``log_`` prefixed entries."""
    out = []
    for key in (lo, hi):
        if p.get(f"log_{key}") is not None:
            out.append(float(p[f"log_{key}"]))
        elif p.get(key) is not None:
            v = float(p[key])
            if not v > 0:
                raise ConfigError(f"{key} must be positive")
            out.append(math.log(v))
        else:
            raise ConfigError(f"need {key} or log_{key}")
    return out


def run_drift_check(cfg: ExperimentConfig) -> Outcome:
    p = _params(cfg, {"samples": False})
    f = dr.from_config(cfg.drift)
    reports = [dr.check_p1(f), dr.check_p2(f), dr.check_p3(f), dr.check_osgood(f),
               *dr.rv_properties(f), dr.check_converse_iii(f)]
    rows = []
    for r in reports:
        d = r.to_dict()
        if not p["samples"]:
            d.pop("samples")
        rows.append(d)
    return Outcome({"drift": f.to_config(), "properties": rows})


def run_osgood(cfg: ExperimentConfig) -> Outcome:
    p = _params(cfg, {"eps": [1.0, 0.1, 0.01], "shells": 60})
    f = dr.from_config(cfg.drift)
    eps = p["eps"] if isinstance(p["eps"], list) else [p["eps"]]
    out = []
    for e in eps:
        r = dr.check_osgood(f, float(e), int(p["shells"]))
        out.append({"eps": float(e), "verdict": r.verdict, "partial_sum": r.witness_constant, "detail": r.detail})
    return Outcome({"drift": f.to_config(), "osgood": out})


def run_harnack(cfg: ExperimentConfig) -> Outcome:
    p = _params(cfg, {"m": None, "M": None, "log_m": None, "log_M": None, "R": 1.0, "denominator": "full",
                      "method": "auto"})
    f = dr.from_config(cfg.drift)
    lm, lM = _logs(p)
    rep = harnack_integral(f, log_m=lm, log_M=lM, R=float(p["R"]), denominator=p["denominator"],
                           method=p["method"])
    rep.log_domain = True
    return Outcome({"drift": f.to_config(), "harnack": rep.to_dict()}, passed=rep.bound_status != "exceeds_bound")


def run_sharpness(cfg: ExperimentConfig) -> Outcome:
    p = _params(cfg, {"k": 3.0, "nodes": 401, "half_width": 2.0})
    tol = _tol(cfg, "sharpness", 1e-6)
    f = dr.from_config(cfg.drift)
    sol = build_extremal(f, float(p["k"]), int(p["nodes"]), float(p["half_width"]))
    check = verify_extremal(sol)
    payload = {"drift": f.to_config(), "k": sol.k, "nodes": int(sol.x_grid.size),
               "reached_zero_at": sol.reached_zero_at, "check": check.to_dict()}
    passed = False
    if sol.reached_zero_at is None or sol.reached_zero_at < -1.0:
        rep = sharpness_report(sol, tol)
        rep.log_domain = True
        payload["sharpness"] = rep.to_dict()
        passed = bool(rep.extra["sharp"])
    ok = np.isfinite(sol.log_u)
    ratio = np.full(sol.x_grid.shape, np.nan)
    ratio[ok] = check.ratios
    rows = [[float(x), float(y), float(yp), float(r)]
            for x, y, yp, r in zip(sol.x_grid, sol.log_u, sol.log_u_prime, ratio)]
    return Outcome(payload, {"extremal": (["x", "log_u", "log_u_prime", "ratio"], rows)}, passed)


def run_barrier(cfg: ExperimentConfig) -> Outcome:
    p = _params(cfg, {"n": 2, "lambda": 1.0, "Lambda": 1.0, "r0": None, "radial": 64, "angular": 128})
    tol = _tol(cfg, "residual", 1e-12)
    f = dr.from_config(cfg.drift)
    n = int(p["n"])
    e = EllipticityPair(float(p["lambda"]), float(p["Lambda"]))
    try:
        spec = find_r0(f, n, e) if p["r0"] is None else BarrierSpec(barrier_alpha(n, e), float(p["r0"]), n, e)
    except InfeasibleError as exc:
        return Outcome({"drift": f.to_config(), "feasible": False, "message": str(exc)}, passed=False)
    rep = verify_barrier(spec, f, int(p["radial"]), int(p["angular"]), tol)
    return Outcome({"drift": f.to_config(), "feasible": True, "barrier": spec.to_dict(), "report": rep.to_dict()},
                   passed=rep.passed)


def run_levelsets(cfg: ExperimentConfig) -> Outcome:
    p = _params(cfg, {"solution": None, "L": 6.0, "R": 1.0, "k_max": 16, "m": None, "log_m": None,
                      "ball_radius": 5.0 / 3.0})
    if not p["solution"]:
        raise ConfigError("levelsets needs a solution CSV")
    try:
        u = GridFunction.load_csv(p["solution"])
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load solution: {exc}") from exc
    f = dr.from_config(cfg.drift)
    log_m = p["log_m"] if p["log_m"] is not None else (math.log(p["m"]) if p["m"] is not None else None)
    diag = level_set_diagnostics(u, f, float(p["L"]), float(p["R"]), int(p["k_max"]), log_m=log_m,
                                 ball_radius=float(p["ball_radius"]), consts=cfg.constants)
    summary = diag.summary()
    summary["log_m"] = log_value(summary["log_m"])
    header, rows = diag.to_rows()
    return Outcome({"drift": f.to_config(), "levelsets": summary}, {"levelsets": (header, rows)},
                   passed=summary["nested"] and summary["ratio_bound_holds"])


def run_px_solve(cfg: ExperimentConfig) -> Outcome:
    p = _params(cfg, {"profile": {"kind": "sin"}, "a": None, "b": None, "ua": 1.0, "ub": 10.0, "nodes": 101})
    prof = profile_from_config(p["profile"])
    a = prof.interval[0] if p["a"] is None else float(p["a"])
    b = prof.interval[1] if p["b"] is None else float(p["b"])
    u = solve_px_1d(prof, a, b, float(p["ua"]), float(p["ub"]), int(p["nodes"]))
    rows = [[float(x), float(v)] for x, v in zip(u.coords(0), u.values)]
    return Outcome({"profile": prof.to_config(), "p_minus": prof.p_minus, "p_plus": prof.p_plus,
                    "c1_norm": prof.c1_norm, **u.meta}, {"px_solution": (["x", "u"], rows)},
                   passed=bool(u.meta.get("monotone", True)))


def run_px_inverse(cfg: ExperimentConfig) -> Outcome:
    p = _params(cfg, {"k": 3.0, "h": 1e-3})
    tol = _tol(cfg, "residual", 1e-6)
    k, h = float(p["k"]), float(p["h"])
    n = int(round(4.0 / h)) + 1
    prof = inverse_pk(k, n)
    u = GridFunction.from_function(lambda x: -np.exp(x), k - 2.0, k + 2.0, n, log_domain=True)
    rep = residual_px_nondiv(u, prof)
    rows = [[float(x), float(r), float(q)] for x, r, q in zip(rep.x, rep.residual, rep.relative)]
    return Outcome({"k": k, "h": h, "max_relative_residual": rep.max_rel, "max_abs_residual": rep.max_abs,
                    "flagged": rep.flagged, **prof.meta},
                   {"px_residual": (["x", "residual", "relative"], rows)}, passed=rep.max_rel <= tol)


def run_px_harnack(cfg: ExperimentConfig) -> Outcome:
    p = _params(cfg, {"m": None, "M": None, "log_m": None, "log_M": None, "R": 1.0})
    tol = _tol(cfg, "agreement", 1e-8)
    lm, lM = _logs(p)
    rep = px_harnack_functional(log_m=lm, log_M=lM, R=float(p["R"]))
    return Outcome({"px_harnack": rep.to_dict()}, passed=rep.agreement <= tol)


def run_suite_experiment(cfg: ExperimentConfig) -> Outcome:
    from .suite import format_table, run_suite

    p = _params(cfg, {"criteria": None})
    results = run_suite(p["criteria"])
    rows = [[r.number, r.title, r.status] for r in results]
    return Outcome({"criteria": [r.to_dict() for r in results]}, {"suite": (["criterion", "title", "status"], rows)},
                   passed=all(r.passed for r in results), text=format_table(results))


RUNNERS = {
    "drift-check": run_drift_check,
    "osgood": run_osgood,
    "harnack": run_harnack,
    "sharpness": run_sharpness,
    "barrier": run_barrier,
    "levelsets": run_levelsets,
    "px-solve": run_px_solve,
    "px-inverse": run_px_inverse,
    "px-harnack": run_px_harnack,
    "suite": run_suite_experiment,
}


def run(cfg: ExperimentConfig) -> Outcome:
    """Run one experiment; artifacts go to ``cfg.output["dir"]`` when set."""
    out = RUNNERS[cfg.experiment](cfg)
    out.payload = {"experiment": cfg.experiment, "passed": out.passed, **out.payload}
    directory = cfg.output.get("dir")
    if directory:
        atomic_write_text(os.path.join(directory, "summary.json"), dumps(out.payload))
        for name, (header, rows) in sorted(out.tables.items()):
            write_csv(os.path.join(directory, f"{name}.csv"), header, rows)
    return out
