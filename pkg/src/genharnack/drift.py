"""Drift nonlinearities ``phi(t) = eta(t) * t`` and numerical checks of their
structural conditions.

Every drift is stored through its log-argument form ``eta_log(s) = eta(exp(s))``
so arguments like ``exp(-exp(10))`` never have to be materialized.  The derivative
that matters everywhere is the scale-free ``t * eta'(t)``, which equals
``d eta_log / ds``.

Checks return :class:`PropertyReport` objects with a three-way verdict.  Limits
at infinity are replaced by tail evaluation plus a monotone-trend test, and the
Osgood divergence test is a documented heuristic with an explicit
``"inconclusive"`` outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, QuadratureError
from .quadrature import integrate_log

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"

#: Relative step (in ln t) for finite-difference derivatives of eta.
FD_STEP = 1e-6

LOG_T_MAX = math.log(1e12)


def _sign_right(s):
    # sign with sign(0) = +1: the derivative at the kink is taken from the right
    return np.where(s >= 0, 1.0, -1.0)


@dataclass(frozen=True)
class DriftFunction:
    """A drift ``phi(t) = eta(t) t`` described by ``eta`` in log coordinates.

    Attributes
    ----------
    eta_log : callable
        ``s -> eta(exp(s))``, vectorized over numpy arrays.
    kind : str
        One of ``homogeneous``, ``power``, ``log_linear``, ``log_iterated``, ``custom``.
    params : dict
        Parameters of the built-in family (``alpha``, ``c``, ``table``).
    eta_log_prime : callable or None
        ``s -> t eta'(t)`` at ``t = exp(s)``.  Central differences are used when absent.
    antiderivative_log : callable or None
        ``s -> F(exp(s))`` with ``F' = 1/phi``; used as an exact oracle.
    kinks : tuple of float
        Values of ``s`` where ``eta`` may fail to be differentiable.
    """

    eta_log: Callable
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    eta_log_prime: Callable | None = None
    antiderivative_log: Callable | None = None
    kinks: tuple = (0.0,)

    # -- evaluators -------------------------------------------------------
    def eta(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("eta is defined for t > 0 only")
        return self.eta_log(np.log(t))

    def log_slope(self, s, h=FD_STEP):
        """``t eta'(t)`` at ``t = exp(s)``; analytic when available."""
        s = np.asarray(s, dtype=float)
        if self.eta_log_prime is not None:
            return np.asarray(self.eta_log_prime(s), dtype=float)
        return self._fd_slope(s, h)

    def _fd_slope(self, s, h=FD_STEP):
        s = np.asarray(s, dtype=float)
        central = (self.eta_log(s + h) - self.eta_log(s - h)) / (2 * h)
        forward = (self.eta_log(s + h) - self.eta_log(s)) / h
        backward = (self.eta_log(s) - self.eta_log(s - h)) / h
        out = central
        for k in self.kinks:
            # a central stencil straddling a kink mixes both branches
            out = np.where((s >= k) & (s - h < k), forward, out)
            out = np.where((s < k) & (s + h >= k), backward, out)
        return out

    def eta_prime(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("eta' is defined for t > 0 only")
        return self.log_slope(np.log(t)) / t

    def phi(self, t):
        """``phi(t)`` for ``t >= 0`` with ``phi(0) = 0`` by continuity."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("phi is defined for t >= 0 only")
        with np.errstate(divide="ignore"):
            s = np.log(t)
        pos = t > 0
        out = np.zeros_like(t)
        if np.ndim(t) == 0:
            return float(self.eta_log(s) * t) if pos else 0.0
        out[pos] = self.eta_log(s[pos]) * t[pos]
        return out

    def log_phi(self, s):
        """``ln phi(exp(s))``."""
        s = np.asarray(s, dtype=float)
        return np.log(self.eta_log(s)) + s

    def phi_prime_over_eta_log(self, s):
        """``phi'(t)`` at ``t = exp(s)``, i.e. ``eta + t eta'``."""
        return self.eta_log(s) + self.log_slope(s)

    # -- serialization ----------------------------------------------------
    def to_config(self):
        cfg = {"kind": self.kind}
        cfg.update(self.params)
        return cfg


def eval_phi(f: DriftFunction, t: float) -> float:
    """Evaluate ``phi(t) = eta(t) t`` for ``t > 0``."""
    if not t > 0:
        raise DomainError(f"eval_phi requires t > 0, got {t!r}")
    return float(f.eta_log(math.log(t)) * t)


# -- built-in families ----------------------------------------------------


def homogeneous() -> DriftFunction:
    """``phi(t) = t``."""
    return DriftFunction(
        eta_log=lambda s: np.ones_like(np.asarray(s, dtype=float)),
        kind="homogeneous",
        eta_log_prime=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        antiderivative_log=lambda s: np.asarray(s, dtype=float),
        kinks=(),
    )


def power(alpha: float) -> DriftFunction:
    """``phi(t) = t**alpha``; violates (P1) unless ``alpha == 1``.

    Used for negative tests: ``alpha < 1`` is non-Osgood, ``alpha > 1`` grows too fast.
    """
    a = float(alpha)

    def anti(s):
        s = np.asarray(s, dtype=float)
        if a == 1.0:
            return s
        return np.exp((1.0 - a) * s) / (1.0 - a)

    return DriftFunction(
        eta_log=lambda s: np.exp((a - 1.0) * np.asarray(s, dtype=float)),
        kind="power",
        params={"alpha": a},
        eta_log_prime=lambda s: (a - 1.0) * np.exp((a - 1.0) * np.asarray(s, dtype=float)),
        antiderivative_log=anti,
        kinks=(),
    )


def log_linear(c: float = 1.0) -> DriftFunction:
    """``phi(t) = c (1 + |ln t|) t``, the p(x)-Laplacian drift."""
    c = float(c)
    return DriftFunction(
        eta_log=lambda s: c * (1.0 + np.abs(s)),
        kind="log_linear",
        params={"c": c},
        eta_log_prime=lambda s: c * _sign_right(np.asarray(s, dtype=float)),
        antiderivative_log=lambda s: np.sign(s) * np.log1p(np.abs(s)) / c,
    )


def log_iterated() -> DriftFunction:
    """``phi(t) = (1 + |ln t|)(1 + ln(1 + |ln t|)) t``."""

    def eta(s):
        a = np.abs(np.asarray(s, dtype=float))
        return (1.0 + a) * (1.0 + np.log1p(a))

    def slope(s):
        s = np.asarray(s, dtype=float)
        a = np.abs(s)
        return _sign_right(s) * (2.0 + np.log1p(a))

    def anti(s):
        s = np.asarray(s, dtype=float)
        return np.sign(s) * np.log1p(np.log1p(np.abs(s)))

    return DriftFunction(
        eta_log=eta,
        kind="log_iterated",
        eta_log_prime=slope,
        antiderivative_log=anti,
    )


def custom(table) -> DriftFunction:
    """Drift from a table of ``(t, eta(t))`` pairs.

    ``eta`` is interpolated monotonically (PCHIP) in ``ln t`` and held constant
    beyond the ends of the table.
    """
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ValueError("custom drift table must be a list of (t, eta) pairs")
    order = np.argsort(arr[:, 0])
    arr = arr[order]
    if np.any(arr[:, 0] <= 0):
        raise DomainError("custom drift table needs t > 0")
    s_tab = np.log(arr[:, 0])
    if np.any(np.diff(s_tab) <= 0):
        raise ValueError("custom drift table has repeated t values")
    interp = PchipInterpolator(s_tab, arr[:, 1], extrapolate=False)
    lo, hi = s_tab[0], s_tab[-1]

    def eta(s):
        s = np.clip(np.asarray(s, dtype=float), lo, hi)
        return interp(s)

    return DriftFunction(
        eta_log=eta,
        kind="custom",
        params={"table": [[float(t), float(e)] for t, e in arr]},
        kinks=(0.0, float(lo), float(hi)),
    )


def from_config(cfg) -> DriftFunction:
    """Build a drift from a JSON-style mapping such as ``{"kind": "log_linear", "c": 1.0}``."""
    if isinstance(cfg, DriftFunction):
        return cfg
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ValueError(f"drift config must be a mapping with a 'kind' key, got {cfg!r}")
    kind = cfg["kind"]
    extra = set(cfg) - {"kind"}
    allowed = {
        "homogeneous": set(),
        "power": {"alpha"},
        "log_linear": {"c"},
        "log_iterated": set(),
        "custom": {"table"},
    }
    if kind not in allowed:
        raise ValueError(f"unknown drift kind {kind!r}")
    if extra - allowed[kind]:
        raise ValueError(f"unexpected fields for drift {kind!r}: {sorted(extra - allowed[kind])}")
    if kind == "homogeneous":
        return homogeneous()
    if kind == "power":
        if "alpha" not in cfg:
            raise ValueError("power drift needs an 'alpha' field")
        return power(cfg["alpha"])
    if kind == "log_linear":
        return log_linear(cfg.get("c", 1.0))
    if kind == "log_iterated":
        return log_iterated()
    if "table" not in cfg:
        raise ValueError("custom drift needs a 'table' field")
    return custom(cfg["table"])


# -- property checks -------------------------------------------------------


@dataclass
class PropertyReport:
    """Outcome of one structural check.

    ``samples`` holds ``(ln t, measured value)`` pairs; log coordinates keep tail
    evaluations far beyond the floating-point range representable.
    """

    property_id: str
    verdict: str
    witness_constant: float | None = None
    samples: list = field(default_factory=list)
    detail: str = ""

    def to_dict(self):
        return {
            "property_id": self.property_id,
            "verdict": self.verdict,
            "witness_constant": self.witness_constant,
            "samples": [[float(a), float(b)] for a, b in self.samples],
            "detail": self.detail,
        }


def _refine_log(s):
    s = np.asarray(s, dtype=float)
    mid = 0.5 * (s[:-1] + s[1:])
    return np.sort(np.concatenate([s, mid]))


def _safe_eval(fn, s):
    with np.errstate(all="ignore"):
        out = np.asarray(fn(s), dtype=float)
    if out.shape != np.shape(s) or not np.all(np.isfinite(out)):
        raise FloatingPointError("evaluator returned non-finite values")
    return out


def check_p1(f: DriftFunction, grid=None, tol=1e-12, lipschitz_window=(1e-4, 1e4)):
    """Check (P1) on a log-spaced grid of ``t``.

    Tested: ``phi`` nondecreasing, ``eta >= 1``, ``eta`` nonincreasing below 1 and
    nondecreasing above, and that finite-difference Lipschitz quotients of
    ``phi`` on ``lipschitz_window`` stay bounded when the grid is refined twice.
    """
    if grid is None:
        grid = np.logspace(-8, 8, 1601)
    t = np.asarray(grid, dtype=float)
    if np.any(np.diff(t) <= 0):
        raise ValueError("grid must be strictly increasing")
    if t[0] > 1e-8 * (1 + 1e-9) or t[-1] < 1e8 * (1 - 1e-9):
        raise ValueError("grid must span at least (1e-8, 1e8)")
    s = np.log(t)
    try:
        eta = _safe_eval(f.eta_log, s)
        log_phi = np.log(eta) + s
    except (FloatingPointError, ValueError) as exc:
        return PropertyReport("P1", INCONCLUSIVE, detail=f"evaluator failure: {exc}")

    problems = []
    if np.any(eta < 1.0 - tol):
        i = int(np.argmin(eta))
        problems.append(f"eta < 1 at t={t[i]:.6g} (eta={eta[i]:.6g})")
    if np.any(np.diff(log_phi) < -tol):
        problems.append("phi decreases somewhere on the grid")
    below = s < 0
    above = s >= 0
    d_below = np.diff(eta[below])
    d_above = np.diff(eta[above])
    if d_below.size and np.any(d_below > tol * np.maximum(1.0, eta[below][1:])):
        problems.append("eta increases on (0, 1)")
    if d_above.size and np.any(d_above < -tol * np.maximum(1.0, eta[above][1:])):
        problems.append("eta decreases on [1, inf)")

    lo, hi = lipschitz_window
    sw = s[(t >= lo) & (t <= hi)]
    quotients = []
    try:
        for _ in range(3):
            tw = np.exp(sw)
            ph = _safe_eval(f.eta_log, sw) * tw
            quotients.append(float(np.max(np.abs(np.diff(ph) / np.diff(tw)))))
            sw = _refine_log(sw)
    except (FloatingPointError, ValueError) as exc:
        return PropertyReport("P1", INCONCLUSIVE, detail=f"evaluator failure: {exc}")
    lip = quotients[-1]
    if not math.isfinite(lip) or lip > 2.0 * quotients[0] + 1e-12:
        problems.append("Lipschitz quotients of phi grow under refinement")

    samples = list(zip(s.tolist(), eta.tolist()))
    verdict = FAILS if problems else HOLDS
    return PropertyReport("P1", verdict, witness_constant=lip, samples=samples, detail="; ".join(problems))


def check_p2(f: DriftFunction, t_values=None, threshold=0.25, tail_fraction=0.25, fd_check=1e-4):
    """Tail test for ``t eta'(t)/eta(t) * ln eta(t) -> 0``.

    ``holds`` when ``|q|`` is nonincreasing over the last ``tail_fraction`` of the
    samples and below ``threshold`` at the largest ``t``.
    """
    if t_values is None:
        t_values = np.logspace(0, 12, 121)
    t = np.asarray(t_values, dtype=float)
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_values must be increasing")
    if t[-1] < 1e6:
        raise ValueError("t_values must reach at least 1e6")
    s = np.log(t)
    try:
        eta = _safe_eval(f.eta_log, s)
        slope = _safe_eval(f.log_slope, s)
        if f.eta_log_prime is None:
            coarse = _safe_eval(lambda x: f._fd_slope(x, 2 * FD_STEP), s)
            if np.any(np.abs(coarse - slope) > fd_check * (1.0 + np.abs(slope))):
                return PropertyReport("P2", INCONCLUSIVE, detail="finite-difference eta' unstable")
    except (FloatingPointError, ValueError) as exc:
        return PropertyReport("P2", INCONCLUSIVE, detail=f"evaluator failure: {exc}")
    q = slope / eta * np.log(eta)
    n_tail = max(5, int(len(q) * tail_fraction))
    tail = np.abs(q[-n_tail:])
    decreasing = bool(np.all(np.diff(tail) <= 1e-12 * (1.0 + tail[:-1])))
    small = bool(tail[-1] < threshold)
    verdict = HOLDS if (decreasing and small) else FAILS
    trend = "nonincreasing" if decreasing else "not monotone decreasing"
    detail = f"|q| at largest t = {tail[-1]:.6g}; tail {trend}"
    return PropertyReport("P2", verdict, witness_constant=float(tail[-1]),
                          samples=list(zip(s.tolist(), q.tolist())), detail=detail)


def _max_p3_ratio(f, s):
    eta = f.eta_log(s)
    ss = s[:, None] + s[None, :]
    ratio = f.eta_log(ss) / (eta[:, None] * eta[None, :])
    return float(np.max(ratio))


def check_p3(f: DriftFunction, grid=None, rel_stability=1e-2, max_witness=1e3):
    """Empirical ``Lambda_0 = max eta(st) / (eta(s) eta(t))`` over all grid pairs.

    ``holds`` when the maximum is finite, at most ``max_witness``, and changes by
    less than ``rel_stability`` when the grid is refined.
    """
    if grid is None:
        grid = np.logspace(-6, 6, 121)
    s = np.log(np.asarray(grid, dtype=float))
    try:
        with np.errstate(all="ignore"):
            w1 = _max_p3_ratio(f, s)
            w2 = _max_p3_ratio(f, _refine_log(s))
    except (FloatingPointError, ValueError) as exc:
        return PropertyReport("P3", INCONCLUSIVE, detail=f"evaluator failure: {exc}")
    samples = [(float(len(s)), w1), (float(2 * len(s) - 1), w2)]
    if not (math.isfinite(w1) and math.isfinite(w2)):
        return PropertyReport("P3", FAILS, witness_constant=float("inf"), samples=samples,
                              detail="ratio not finite")
    stable = abs(w2 - w1) <= rel_stability * max(abs(w1), 1e-300)
    verdict = HOLDS if (stable and w2 <= max_witness) else FAILS
    return PropertyReport("P3", verdict, witness_constant=w2, samples=samples,
                          detail=f"witness {w1:.6g} -> {w2:.6g} under refinement")


def osgood_shells(f: DriftFunction, eps=1.0, shells=60):
    """Dyadic shell integrals ``I_j = int_{eps 2^-j-1}^{eps 2^-j} dt / phi(t)``."""
    log_eps = math.log(eps)
    ln2 = math.log(2.0)
    out = np.empty(shells)
    for j in range(shells):
        hi = log_eps - j * ln2
        lo = hi - ln2
        val, _ = integrate_log(lambda s: 1.0 / float(f.eta_log(s)), lo, hi, breakpoints=f.kinks)
        out[j] = val
    return out


def check_osgood(f: DriftFunction, eps=1.0, shells=60, window=10, ratio_cut=0.9, growth_tol=1e-3):
    """Heuristic test of divergence of ``int_0^eps dt/phi(t)``.

    Over the final ``window`` shells: if every ratio ``I_{j+1}/I_j`` is at most
    ``ratio_cut`` the partial sums converge geometrically and the verdict is
    ``fails`` (non-Osgood).  If every ratio is at least ``ratio_cut``, or the
    partial sums still grow by more than ``growth_tol`` across the window, the
    verdict is ``holds``.  Anything else is ``inconclusive``.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if shells < 20:
        raise ValueError("need at least 20 shells")
    try:
        vals = osgood_shells(f, eps, shells)
    except QuadratureError as exc:
        return PropertyReport("osgood", INCONCLUSIVE, detail=str(exc))
    ln2 = math.log(2.0)
    samples = [(math.log(eps) - (j + 1) * ln2, float(v)) for j, v in enumerate(vals)]
    tail = vals[-(window + 1):]
    if np.any(tail <= 0):
        return PropertyReport("osgood", INCONCLUSIVE, samples=samples, detail="nonpositive shell integral")
    ratios = tail[1:] / tail[:-1]
    growth = float(np.sum(vals[-window:]))
    partial = float(np.sum(vals))
    if np.all(ratios <= ratio_cut):
        verdict, detail = FAILS, f"geometric decay, max ratio {ratios.max():.4g}"
    elif np.all(ratios >= ratio_cut):
        verdict, detail = HOLDS, f"shell ratios >= {ratio_cut}, min ratio {ratios.min():.4g}"
    elif growth > growth_tol:
        verdict, detail = HOLDS, f"partial sums still grow by {growth:.4g} over the last {window} shells"
    else:
        verdict, detail = INCONCLUSIVE, "neither geometric decay nor sustained growth"
    return PropertyReport("osgood", verdict, witness_constant=partial, samples=samples, detail=detail)


def _decade_points(log_t_max, count=12):
    return np.linspace(log_t_max / count, log_t_max, count)


def rv_properties(f: DriftFunction, log_t_max=LOG_T_MAX, limit_tol=0.25, rel_stability=1e-2):
    """Finite-range surrogates of the four regular-variation properties.

    Returns reports ``rv_i`` .. ``rv_iv``:

    * ``rv_i``: ``max_c |eta(ct)/eta(t) - 1|`` for ``c in {0.5, 2, 10}`` at decade
      points up to ``t_max``; holds when nonincreasing over the second half of the
      decades and below ``limit_tol`` at ``t_max``.
    * ``rv_ii``: ``ln(eta(t)/t**gamma)`` for ``gamma in {0.5, 0.1, 0.01}``.  The
      evaluation point is ``ln t = log_t_max / gamma`` since the decay only sets in
      once ``t**gamma`` dominates.  Holds when negative and decreasing there.
    * ``rv_iii``: empirical ``Lambda_1 = max eta(eta(t) t) / eta(t)``.
    * ``rv_iv``: empirical ``Lambda_2 = max r eta(t/r) / (s eta(t/s))`` over ``r <= s``.
    """
    reports = []

    # (i)
    pts = _decade_points(log_t_max)
    cs = (0.5, 2.0, 10.0)
    eta = f.eta_log(pts)
    vals = np.max([np.abs(f.eta_log(pts + math.log(c)) / eta - 1.0) for c in cs], axis=0)
    half = vals[len(vals) // 2:]
    mono = bool(np.all(np.diff(half) <= 1e-12))
    if mono and vals[-1] < limit_tol:
        v = HOLDS
    elif not mono:
        v = FAILS
    else:
        v = INCONCLUSIVE
    reports.append(PropertyReport("rv_i", v, witness_constant=float(vals[-1]),
                                  samples=list(zip(pts.tolist(), vals.tolist())),
                                  detail=f"max_c |eta(ct)/eta(t)-1| at t_max = {vals[-1]:.6g}"))

    # (ii)
    samples = []
    ok = True
    bad = False
    worst = -math.inf
    for gamma in (0.5, 0.1, 0.01):
        s_end = log_t_max / gamma
        ss = np.linspace(s_end / 2, s_end, 11)
        with np.errstate(all="ignore"):
            lr = np.log(f.eta_log(ss)) - gamma * ss
        samples.extend(zip(ss.tolist(), lr.tolist()))
        with np.errstate(invalid="ignore"):
            dec = bool(np.all(np.diff(lr) < 0))
        ok &= dec and lr[-1] < 0
        bad |= not dec
        worst = max(worst, float(lr[-1]))
    v = HOLDS if ok else (FAILS if bad else INCONCLUSIVE)
    reports.append(PropertyReport("rv_ii", v, witness_constant=math.exp(worst) if worst < 700 else math.inf,
                                  samples=samples, detail="ln(eta(t)/t^gamma) at ln t = log_t_max/gamma"))

    # (iii)
    def lam1(s):
        e = f.eta_log(s)
        return f.eta_log(s + np.log(e)) / e

    s3 = np.linspace(math.log(1e-8), log_t_max, 2001)
    reports.append(_refined_max("rv_iii", lam1, s3, rel_stability))

    # (iv)
    def lam2_max(n):
        st = np.linspace(math.log(1e-6), math.log(1e6), n)
        sr = np.linspace(math.log(1e-6), math.log(1e6), n)
        S_t = st[:, None, None]
        S_r = sr[None, :, None]
        S_s = sr[None, None, :]
        ratio = np.exp(S_r - S_s) * f.eta_log(S_t - S_r) / f.eta_log(S_t - S_s)
        mask = np.broadcast_to(S_r <= S_s, ratio.shape)
        return float(np.max(ratio[mask]))

    w1, w2 = lam2_max(41), lam2_max(81)
    stable = abs(w2 - w1) <= rel_stability * abs(w1)
    reports.append(PropertyReport("rv_iv", HOLDS if (stable and math.isfinite(w2)) else FAILS,
                                  witness_constant=w2, samples=[(41.0, w1), (81.0, w2)],
                                  detail=f"Lambda_2 {w1:.6g} -> {w2:.6g} under refinement"))
    return reports


def _refined_max(pid, fn, s, rel_stability):
    try:
        with np.errstate(all="ignore"):
            v1 = _safe_eval(fn, s)
            s2 = _refine_log(s)
            v2 = _safe_eval(fn, s2)
    except (FloatingPointError, ValueError) as exc:
        return PropertyReport(pid, INCONCLUSIVE, detail=f"evaluator failure: {exc}")
    w1, w2 = float(np.max(v1)), float(np.max(v2))
    stable = abs(w2 - w1) <= rel_stability * abs(w1)
    i = int(np.argmax(v2))
    # a maximum still climbing at either end of the grid signals an unbounded sup
    rising_at_edge = (i == len(v2) - 1 and v2[-1] > v2[-2] * (1 + 1e-9)) or (
        i == 0 and v2[0] > v2[1] * (1 + 1e-9)
    )
    verdict = HOLDS if (stable and not rising_at_edge) else FAILS
    detail = f"max {w1:.6g} -> {w2:.6g} under refinement, attained at ln t = {s2[i]:.6g}"
    if rising_at_edge:
        detail += " (still increasing at the grid edge)"
    return PropertyReport(pid, verdict, witness_constant=w2,
                          samples=list(zip(s2.tolist(), v2.tolist())), detail=detail)


def check_converse_iii(f: DriftFunction, t_grid=None, rel_stability=1e-2):
    """Empirical ``max eta(t) / eta(eta(t) t)``; holds when finite and stable."""
    if t_grid is None:
        t_grid = np.logspace(-8, 8, 2001)
    s = np.log(np.asarray(t_grid, dtype=float))

    def ratio(x):
        e = f.eta_log(x)
        return e / f.eta_log(x + np.log(e))

    rep = _refined_max("converse_iii", ratio, s, rel_stability)
    return rep
