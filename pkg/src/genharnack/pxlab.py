"""Variable-exponent p(x)-Laplacian in one dimension.

* exact solutions of ``(|u'|^(p(x)-2) u')' = 0`` from the constant-flux relation
  ``u' = sign(c) |c|^(1/(p(x)-1))``,
* the model constants ``lam = min(1, p- - 1)``, ``Lam = max(1, p+ - 1)`` and the
  drift ``phi(t) = C (1 + |ln t|) t`` with ``C = ||p||_C1``,
* the nondivergence residual ``(p - 1) u'' + p' ln|u'| u'``,
* exponents ``p_k = 1 + q_k`` that make ``u = exp(-e^x)`` a solution on
  ``(k - 2, k + 2)``, from ``q' + (e^x - 1)/(e^x - x) q = 0``, ``q(k) = 1``,
* the Harnack functional ``int_m^M dt / ((R |ln t| + 1) t)`` in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .drift import log_linear
from .errors import DomainError, QuadratureError
from .grid import GridFunction
from .pucci import EllipticityPair
from .quadrature import integrate_1d, integrate_log

_SAMPLES = 2001


@dataclass
class PxProfile:
    """An exponent ``p`` on a working interval, with sampled bounds.

    ``p_minus``, ``p_plus`` and ``c1_norm = sup(|p| + |p'|)`` are computed from
    ``_SAMPLES`` uniform samples of the interval.
    """

    p: Callable
    p_prime: Callable
    interval: tuple
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    p_minus: float = field(init=False)
    p_plus: float = field(init=False)
    c1_norm: float = field(init=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        a, b = (float(v) for v in self.interval)
        if not a < b:
            raise ValueError("interval must have a < b")
        self.interval = (a, b)
        xs = np.linspace(a, b, _SAMPLES)
        pv = np.asarray(self.p(xs), dtype=float)
        dv = np.asarray(self.p_prime(xs), dtype=float)
        self.p_minus = float(np.min(pv))
        self.p_plus = float(np.max(pv))
        self.c1_norm = float(np.max(np.abs(pv) + np.abs(dv)))
        if not self.p_minus > 1:
            raise DomainError(f"exponent must exceed 1, found min p = {self.p_minus:.6g}")

    def to_config(self):
        return {"kind": self.kind, **self.params, "interval": list(self.interval)}


def constant_profile(value: float, interval=(0.0, 1.0)) -> PxProfile:
    v = float(value)
    return PxProfile(lambda x: np.full(np.shape(x), v), lambda x: np.zeros(np.shape(x)), interval,
                     "constant", {"value": v})


def affine_profile(base: float, slope: float, interval=(0.0, 1.0)) -> PxProfile:
    """``p(x) = base + slope * x``."""
    b0, s = float(base), float(slope)
    return PxProfile(lambda x: b0 + s * np.asarray(x, dtype=float),
                     lambda x: np.full(np.shape(x), s), interval, "affine", {"base": b0, "slope": s})


def sin_profile(base: float = 2.0, amplitude: float = 1.0, frequency: float = 1.0, interval=(0.0, 3.0)) -> PxProfile:
    """``p(x) = base + amplitude * sin(frequency * x)``."""
    b0, a, w = float(base), float(amplitude), float(frequency)
    return PxProfile(lambda x: b0 + a * np.sin(w * np.asarray(x, dtype=float)),
                     lambda x: a * w * np.cos(w * np.asarray(x, dtype=float)), interval, "sin",
                     {"base": b0, "amplitude": a, "frequency": w})


# -- inverse construction -------------------------------------------------------------


def _q_integrand(s):
    # (e^s - 1)/(e^s - s) - 1, written to stay accurate for large s
    return (s - 1.0) / (math.exp(s) - s)


def log_q(k: float, x) -> np.ndarray:
    """``ln q_k(x) = -(x - k) - int_k^x (s - 1)/(e^s - s) ds``.

    Integrals are accumulated between consecutive sorted abscissae.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    order = np.argsort(xs)
    out = np.empty_like(xs)
    for side in (1, -1):
        sel = order[(xs[order] - k) * side >= 0]
        if side == -1:
            sel = sel[::-1]
        prev, acc = float(k), 0.0
        for i in sel:
            acc += integrate_1d(_q_integrand, prev, xs[i], rtol=1e-13, atol=1e-16)[0]
            prev = xs[i]
            out[i] = -(xs[i] - k) - acc
    return out if np.ndim(x) else out[0]


def inverse_pk(k: float, nodes: int = 4001) -> PxProfile:
    """Exponent ``p_k = 1 + q_k`` on ``(k - 2, k + 2)`` making ``exp(-e^x)`` a solution.

    ``q_k`` solves ``q' + (e^x - 1)/(e^x - x) q = 0`` with ``q(k) = 1`` and is
    evaluated through the integrating factor; ``q_k'`` comes from the equation.
    A table on ``nodes`` points records ``min``/``max`` of ``q_k`` and
    ``max |q_k'|`` in ``meta``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    k = float(k)
    interval = (k - 2.0, k + 2.0)

    def q(x):
        return np.exp(log_q(k, x))

    def dq(x):
        x = np.asarray(x, dtype=float)
        return -q(x) * np.expm1(x) / (np.exp(x) - x)

    # a cached table backs the bounds computation in PxProfile
    xs = np.linspace(*interval, nodes)
    qt = np.exp(log_q(k, xs))
    dqt = -qt * np.expm1(xs) / (np.exp(xs) - xs)

    def p_cached(x):
        x = np.asarray(x, dtype=float)
        if x.shape == xs.shape and np.array_equal(x, xs):
            return 1.0 + qt
        return 1.0 + q(x)

    def dp_cached(x):
        x = np.asarray(x, dtype=float)
        if x.shape == xs.shape and np.array_equal(x, xs):
            return dqt
        return dq(x)

    prof = PxProfile.__new__(PxProfile)
    prof.p, prof.p_prime, prof.interval = p_cached, dp_cached, interval
    prof.kind, prof.params = "inverse_pk", {"k": k}
    prof.p_minus = float(1.0 + qt.min())
    prof.p_plus = float(1.0 + qt.max())
    prof.c1_norm = float(np.max(np.abs(1.0 + qt) + np.abs(dqt)))
    prof.meta = {"q_min": float(qt.min()), "q_max": float(qt.max()), "dq_max": float(np.abs(dqt).max())}
    return prof


def profile_from_config(cfg) -> PxProfile:
    """Build a profile from a mapping such as ``{"kind": "sin", "base": 2}`` or ``{"kind": "inverse_pk", "k": 3}``."""
    if isinstance(cfg, PxProfile):
        return cfg
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ValueError(f"profile config must be a mapping with a 'kind' key, got {cfg!r}")
    cfg = dict(cfg)
    kind = cfg.pop("kind")
    builders = {"constant": constant_profile, "affine": affine_profile, "sin": sin_profile, "inverse_pk": inverse_pk}
    if kind not in builders:
        raise ValueError(f"unknown profile kind {kind!r}")
    if kind == "inverse_pk":
        cfg.pop("interval", None)
    elif "interval" in cfg:
        cfg["interval"] = tuple(cfg["interval"])
    try:
        return builders[kind](**cfg)
    except TypeError as exc:
        raise ValueError(f"bad parameters for profile {kind!r}: {exc}") from exc


@dataclass
class UniformityReport:
    ks: list
    q_min: list
    q_max: list
    dq_max: list
    min_spread: float
    max_spread: float
    rel_tol: float

    @property
    def uniform(self) -> bool:
        return self.min_spread < 1 + self.rel_tol and self.max_spread < 1 + self.rel_tol

    def within(self, lower: float, upper: float) -> bool:
        return min(self.q_min) >= lower and max(self.q_max) <= upper


def pk_uniformity(ks=range(1, 11), nodes: int = 4001, rel_tol: float = 0.1) -> UniformityReport:
    """Bounds of ``q_k`` over ``k``; ``*_spread`` is the max/min ratio of each bound across ``k``."""
    mins, maxs, dmax = [], [], []
    for k in ks:
        prof = inverse_pk(k, nodes)
        mins.append(prof.meta["q_min"])
        maxs.append(prof.meta["q_max"])
        dmax.append(prof.meta["dq_max"])
    return UniformityReport(list(ks), mins, maxs, dmax, max(mins) / min(mins), max(maxs) / min(maxs), rel_tol)


def derive_model_params(prof: PxProfile):
    """``(EllipticityPair(min(1, p- - 1), max(1, p+ - 1)), log_linear(c1_norm))``."""
    e = EllipticityPair(min(1.0, prof.p_minus - 1.0), max(1.0, prof.p_plus - 1.0))
    return e, log_linear(prof.c1_norm)


# -- exact 1D solver -----------------------------------------------------------------


def _slope(prof, c):
    if c == 0:
        return lambda s: 0.0
    sg = math.copysign(1.0, c)
    lc = math.log(abs(c))
    return lambda s: sg * math.exp(lc / (float(prof.p(s)) - 1.0))


def _flux_gap(prof, a, b, ua, ub, c):
    try:
        return ua + integrate_1d(_slope(prof, c), a, b, rtol=1e-12, atol=1e-15)[0] - ub
    except (OverflowError, QuadratureError):
        # |c|^(1/(p-1)) overflows when p comes close to 1
        return math.copysign(math.inf, c)


def solve_px_1d(prof: PxProfile, a: float, b: float, ua: float, ub: float, nodes: int = 101) -> GridFunction:
    """Weak solution of the 1D p(x)-Laplace equation with ``u(a) = ua``, ``u(b) = ub``.

    The flux ``c = |u'|^(p-2) u'`` is constant, so ``u' = sign(c) |c|^(1/(p-1))``
    and ``c`` is the root of ``G(c) = ua + int_a^b u' ds - ub``, which is
    increasing in ``c``.  Monotonicity is sampled on a logarithmic grid before
    Brent's method is applied.  ``meta`` carries the flux, the sampled
    monotonicity and the boundary mismatch.
    """
    if not a < b:
        raise ValueError("need a < b")
    x = np.linspace(a, b, nodes)
    h = (b - a) / (nodes - 1)
    if ua == ub:
        return GridFunction(np.full(nodes, float(ua)), h, origin=(a,),
                            meta={"flux": 0.0, "monotone": True, "degenerate": True})
    G = lambda c: _flux_gap(prof, a, b, ua, ub, c)  # noqa: E731
    probe = np.concatenate([-np.logspace(3, -3, 13), [0.0], np.logspace(-3, 3, 13)])
    gvals = np.array([G(c) for c in probe])
    finite = np.isfinite(gvals)
    monotone = bool(np.all(np.diff(gvals[finite]) > 0))
    if not monotone:
        raise ArithmeticError("flux map is not increasing on the probe grid")
    sign = 1.0 if ub > ua else -1.0
    lo, hi = (0.0, 1.0) if sign > 0 else (-1.0, 0.0)
    while G(hi) < 0:
        hi *= 2.0
    while G(lo) > 0:
        lo *= 2.0
    c = brentq(G, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    g = _slope(prof, c)
    cells = np.array([integrate_1d(g, x[i], x[i + 1], rtol=1e-13, atol=1e-16)[0] for i in range(nodes - 1)])
    u = ua + np.concatenate([[0.0], np.cumsum(cells)])
    return GridFunction(u, h, origin=(a,), meta={"flux": c, "monotone": monotone, "boundary_gap": float(u[-1] - ub)})


# -- residual ------------------------------------------------------------------------


@dataclass
class PxResidualReport:
    """Residual of ``(p - 1) u'' + p' ln|u'| u' = 0`` at interior nodes.

    ``residual`` is raw (divided by ``|u'|`` for log-domain input); ``relative``
    divides it by the summed magnitudes of the pieces ``(p - 1) u''`` and
    ``p' ln|u'| u'`` (in log domain ``w''`` and ``w'^2`` are counted separately,
    so points where both terms vanish stay well defined).  Nodes with
    ``|u'| < 1e-12`` are skipped and listed in ``flagged``.
    """

    x: np.ndarray
    residual: np.ndarray
    relative: np.ndarray
    flagged: list
    vacuous: bool

    @property
    def max_abs(self) -> float:
        return float(np.nanmax(np.abs(self.residual))) if not self.vacuous else 0.0

    @property
    def max_rel(self) -> float:
        return float(np.nanmax(np.abs(self.relative))) if not self.vacuous else 0.0


def residual_px_nondiv(u: GridFunction, prof: PxProfile, log_abs_u_prime=None, grad_floor: float = 1e-12):
    """Nondivergence residual by centered differences.

    For log-domain input ``w = ln u`` the equation is divided by ``|u'|``:
    ``(p - 1)(w'' + w'^2)/|w'| + p' (ln|w'| + w) sign(w')``.  ``log_abs_u_prime``
    (interior nodes) replaces the finite-difference ``ln|u'|`` when given.
    """
    if u.dim != 1:
        raise ValueError("one-dimensional grid function expected")
    v = u.values
    h = u.h
    x = u.coords(0)[1:-1]
    d1 = (v[2:] - v[:-2]) / (2 * h)
    d2 = (v[2:] - 2 * v[1:-1] + v[:-2]) / h**2
    p = np.asarray(prof.p(x), dtype=float)
    dp = np.asarray(prof.p_prime(x), dtype=float)
    if u.log_domain:
        w = v[1:-1]
        # |u'| = |w'| u; only an exactly flat w is skipped since u itself may underflow
        keep = d1 != 0
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(np.abs(d1)) + w if log_abs_u_prime is None else np.asarray(log_abs_u_prime, dtype=float)
            t1 = (p - 1.0) * (d2 + d1**2) / np.abs(d1)
            t2 = dp * lg * np.sign(d1)
            scale = (p - 1.0) * (np.abs(d2) + d1**2) / np.abs(d1) + np.abs(dp * lg)
    else:
        grad = np.abs(d1)
        keep = grad >= grad_floor
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(grad) if log_abs_u_prime is None else np.asarray(log_abs_u_prime, dtype=float)
            t1 = (p - 1.0) * d2
            t2 = dp * lg * d1
            scale = np.abs(t1) + np.abs(t2)
    res = np.where(keep, t1 + t2, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(keep, np.where(scale > 0, np.abs(res) / scale, 0.0), np.nan)
    flagged = [float(xi) for xi in x[~keep]]
    return PxResidualReport(x, res, rel, flagged, bool(not np.any(keep)))


def px_residual_order(k: float, h: float = 1e-3):
    """Max relative residual of ``(exp(-e^x), p_k)`` on ``(k-2, k+2)`` at ``h`` and ``h/2``, and the observed order."""
    vals = []
    for step in (h, h / 2):
        n = int(round(4.0 / step)) + 1
        u = GridFunction.from_function(lambda x: -np.exp(x), k - 2.0, k + 2.0, n, log_domain=True)
        prof = inverse_pk(k, n)
        vals.append(residual_px_nondiv(u, prof).max_rel)
    return vals[0], vals[1], math.log2(vals[0] / vals[1])


# -- Harnack functional --------------------------------------------------------------


def _F(log_t, R):
    # antiderivative of 1/((R|ln t| + 1) t) in the variable ln t
    return math.copysign(math.log1p(R * abs(log_t)) / R, log_t)


@dataclass
class PxFunctionalReport:
    value: float
    quadrature_value: float
    log_m: float
    log_M: float
    R: float
    C_explicit: float
    classical_ratio_log: float

    @property
    def agreement(self) -> float:
        return abs(self.value - self.quadrature_value) / max(1.0, abs(self.value))

    def to_dict(self):
        return {"value": self.value, "quadrature_value": self.quadrature_value, "m": {"log": self.log_m},
                "M": {"log": self.log_M}, "R": self.R, "C_explicit": self.C_explicit,
                "classical_ratio_log": self.classical_ratio_log}


def explicit_constant(log_m: float, log_M: float, R: float) -> float:
    """Smallest ``C >= 1`` with ``min(M, M^(1+CR)) <= C max(m, m^(1+CR))``, solved in logarithms."""

    def gap(C):
        e = 1.0 + C * R
        return math.log(C) - (min(log_M, e * log_M) - max(log_m, e * log_m))

    if gap(1.0) >= 0:
        return 1.0
    hi = 2.0
    while gap(hi) < 0:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    return brentq(gap, 1.0, hi, xtol=1e-14, rtol=1e-14)


def px_harnack_functional(m=None, M=None, R: float = 1.0, *, log_m=None, log_M=None) -> PxFunctionalReport:
    """``int_m^M dt / ((R |ln t| + 1) t)`` by closed form, checked by quadrature.

    The closed form is ``F(M) - F(m)`` with ``F(t) = sign(ln t) ln(1 + R|ln t|)/R``.
    ``C_explicit`` is the smallest constant in the explicit power form of the
    same estimate.
    """
    lm = math.log(m) if log_m is None else float(log_m)
    lM = math.log(M) if log_M is None else float(log_M)
    if lm > lM:
        raise DomainError("need m <= M")
    if not 0 < R <= 1:
        raise DomainError("R must lie in (0, 1]")
    value = _F(lM, R) - _F(lm, R)
    quad = integrate_log(lambda s: 1.0 / (R * abs(s) + 1.0), lm, lM, breakpoints=(0.0,), rtol=1e-12)[0] if lm < lM else 0.0
    return PxFunctionalReport(value, quad, lm, lM, R, explicit_constant(lm, lM, R), lM - lm)


def corollary_sweep(prof: PxProfile | None = None, boundary=None, outer=(0.0, 3.0), inner=(0.75, 2.25),
                    nodes: int = 401):
    """Functional and classical ratio over the inner interval for several exact solutions.

    Returns a list of dicts, one per boundary pair ``(ua, ub)`` of positive data.
    """
    prof = prof or sin_profile(2.0, 1.0, 1.0, outer)
    if boundary is None:
        boundary = [(1.0, 10.0**j) for j in range(-5, 5)]
    rows = []
    for ua, ub in boundary:
        u = solve_px_1d(prof, outer[0], outer[1], ua, ub, nodes)
        x = u.coords(0)
        sel = (x >= inner[0] - 1e-12) & (x <= inner[1] + 1e-12)
        lm, lM = float(np.log(np.min(u.values[sel]))), float(np.log(np.max(u.values[sel])))
        rep = px_harnack_functional(log_m=lm, log_M=lM, R=1.0)
        rows.append({"ua": ua, "ub": ub, "functional": rep.value, "classical_ratio_log": lM - lm})
    return rows
