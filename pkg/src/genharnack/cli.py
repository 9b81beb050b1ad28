"""Command line entry point ``genharnack``.

Exit codes: 0 when every hard assertion holds, 2 for configuration errors,
3 for assertion failures and 4 for numerical failures (quadrature or ODE
nonconvergence).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import ExperimentConfig
from .errors import ConfigError, DomainError, QuadratureError, TruncatedDomainError
from .experiments import run
from .serialization import dumps

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSERTION = 3
EXIT_NUMERIC = 4


def _json_arg(text: str, what: str):
    """Parse ``text`` as inline JSON, a path to a JSON file, or a bare ``kind`` name."""
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid {what} JSON: {exc}") from exc
    return {"kind": stripped}


def _add_drift(p):
    p.add_argument("--drift", default='{"kind": "log_linear", "c": 1.0}',
                   help="drift as inline JSON, a JSON file, or a kind name (default log_linear, c=1)")


def _add_out(p):
    p.add_argument("--out", help="directory for summary.json and CSV tables")


def _add_mM(p):
    p.add_argument("--m", type=float)
    p.add_argument("--M", type=float)
    p.add_argument("--log-m", type=float, dest="log_m")
    p.add_argument("--log-M", type=float, dest="log_M")
    p.add_argument("--R", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genharnack", description="Numerical checks of generalized Harnack estimates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("drift-check", help="structural properties of a drift")
    _add_drift(p)
    _add_out(p)
    p.add_argument("--samples", action="store_true", help="include sampled values in the report")

    p = sub.add_parser("osgood", help="Osgood classification by dyadic shells")
    _add_drift(p)
    _add_out(p)
    p.add_argument("--eps", type=float, nargs="+", default=[1.0, 0.1, 0.01])
    p.add_argument("--shells", type=int, default=60)

    p = sub.add_parser("harnack", help="generalized Harnack functional")
    _add_drift(p)
    _add_out(p)
    _add_mM(p)
    p.add_argument("--denominator", choices=["full", "phi"], default="full")
    p.add_argument("--method", choices=["auto", "quadrature", "closed_form"], default="auto")

    p = sub.add_parser("extremal1d", help="extremal solution u' = phi(u) and the sharpness integral")
    _add_drift(p)
    _add_out(p)
    p.add_argument("--k", type=float, default=3.0)
    p.add_argument("--nodes", type=int, default=401)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("barrier", help="radial barrier radius and verification")
    _add_drift(p)
    _add_out(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--lambda", type=float, default=1.0, dest="lam")
    p.add_argument("--Lambda", type=float, default=1.0, dest="Lam")
    p.add_argument("--r0", type=float)

    p = sub.add_parser("levelsets", help="level-set measures and scaling factors of a sampled solution")
    _add_drift(p)
    _add_out(p)
    p.add_argument("--solution", required=True, help="grid function CSV")
    p.add_argument("--L", type=float, default=6.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--k-max", type=int, default=16, dest="k_max")
    p.add_argument("--consts", help="constants as inline JSON or a JSON file")
    p.add_argument("--m", type=float, help="base level (default: infimum over the unit ball)")
    p.add_argument("--log-m", type=float, dest="log_m")

    p = sub.add_parser("px", help="variable-exponent experiments")
    pv = p.add_subparsers(dest="verb", required=True)
    q = pv.add_parser("solve", help="exact 1D solution for a profile")
    _add_out(q)
    q.add_argument("--profile", default='{"kind": "sin"}', help="profile as inline JSON or a JSON file")
    q.add_argument("--a", type=float)
    q.add_argument("--b", type=float)
    q.add_argument("--ua", type=float, default=1.0)
    q.add_argument("--ub", type=float, default=10.0)
    q.add_argument("--nodes", type=int, default=101)
    q = pv.add_parser("inverse", help="residual of exp(-e^x) against the inverse exponent p_k")
    _add_out(q)
    q.add_argument("--k", type=float, default=3.0)
    q.add_argument("--h", type=float, default=1e-3)
    q = pv.add_parser("harnack", help="closed-form functional for the variable-exponent drift")
    _add_out(q)
    _add_mM(q)

    p = sub.add_parser("suite", help="run the acceptance matrix")
    _add_out(p)
    p.add_argument("--criteria", type=int, nargs="+")

    p = sub.add_parser("run", help="run an experiment from a JSON configuration")
    p.add_argument("--config", required=True)
    return parser


def _mM(args) -> dict:
    return {k: getattr(args, k) for k in ("m", "M", "log_m", "log_M") if getattr(args, k) is not None}


def config_from_args(args) -> ExperimentConfig:
    """Translate parsed arguments into an :class:`ExperimentConfig`."""
    if args.command == "run":
        return ExperimentConfig.load(args.config)
    out = {"dir": args.out} if getattr(args, "out", None) else {}
    drift = _json_arg(args.drift, "drift") if hasattr(args, "drift") else {"kind": "log_linear", "c": 1.0}
    c = args.command
    tolerances, constants = {}, {}
    if c == "drift-check":
        exp, params = c, {"samples": args.samples}
    elif c == "osgood":
        exp, params = c, {"eps": args.eps, "shells": args.shells}
    elif c == "harnack":
        exp, params = c, {**_mM(args), "R": args.R, "denominator": args.denominator, "method": args.method}
    elif c == "extremal1d":
        exp, params = "sharpness", {"k": args.k, "nodes": args.nodes}
        tolerances = {"sharpness": args.tol}
    elif c == "barrier":
        exp, params = c, {"n": args.n, "lambda": args.lam, "Lambda": args.Lam, "r0": args.r0}
    elif c == "levelsets":
        exp, params = c, {"solution": args.solution, "L": args.L, "R": args.R, "k_max": args.k_max,
                      **{k: getattr(args, k) for k in ("m", "log_m") if getattr(args, k) is not None}}
        if args.consts:
            constants = _json_arg(args.consts, "constants")
    elif c == "px":
        if args.verb == "solve":
            exp, params = "px-solve", {"profile": _json_arg(args.profile, "profile"), "a": args.a, "b": args.b,
                                       "ua": args.ua, "ub": args.ub, "nodes": args.nodes}
        elif args.verb == "inverse":
            exp, params = "px-inverse", {"k": args.k, "h": args.h}
        else:
            exp, params = "px-harnack", {**_mM(args), "R": args.R}
    else:
        exp, params = "suite", {"criteria": args.criteria}
    return ExperimentConfig(experiment=exp, drift=drift, constants=constants, tolerances=tolerances,
                            params=params, output=out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        outcome = run(cfg)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, TruncatedDomainError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if outcome.text:
        sys.stderr.write(outcome.text)
    sys.stdout.write(dumps(outcome.payload))
    return EXIT_OK if outcome.passed else EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
