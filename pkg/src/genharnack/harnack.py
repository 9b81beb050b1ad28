"""The generalized Harnack functional and related quantities.

For a drift ``phi`` the functional

    I(m, M; R) = int_m^M dt / (R^2 phi(t/R) + t)

replaces ``ln(M/m)`` of the classical inequality.  All endpoints may be passed
as logarithms, and quadrature runs in ``s = ln t`` where the integrand becomes

    1 / (R eta~(s - ln R) + 1),       eta~(s) = eta(e^s),

which is bounded by one and never needs ``t`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .drift import DriftFunction
from .errors import DomainError
from .grid import GridFunction
from .levelsets import a_sequence
from .quadrature import integrate_log

FULL = "full"
PHI_ONLY = "phi"


def _resolve_logs(m, M, log_m, log_M):
    if log_m is None:
        if m is None:
            raise ValueError("pass m or log_m")
        log_m = math.log(m) if m > 0 else -math.inf
    if log_M is None:
        if M is None:
            raise ValueError("pass M or log_M")
        log_M = math.log(M) if M > 0 else -math.inf
    return float(log_m), float(log_M)


def classical_ratio(m=None, M=None, *, log_m=None, log_M=None) -> float:
    """``ln M - ln m``; ``+inf`` when ``m == 0``.

    Examples
    --------
    >>> classical_ratio(1.0, math.e**2)
    2.0
    """
    lm, lM = _resolve_logs(m, M, log_m, log_M)
    if lm == -math.inf:
        return math.inf
    return lM - lm


@dataclass
class HarnackReport:
    """Result of evaluating the Harnack functional.

    ``m`` and ``M`` are kept as logarithms; the properties exponentiate them and
    may underflow to zero for the extreme examples.
    """

    log_m: float
    log_M: float
    R: float
    integral_value: float
    classical_ratio_log: float
    log_domain: bool = False
    denominator: str = FULL
    bound_status: str = "n/a"
    abserr: float = 0.0
    method: str = "quadrature"
    extra: dict = field(default_factory=dict)

    @property
    def m(self) -> float:
        return math.exp(self.log_m)

    @property
    def M(self) -> float:
        return math.exp(self.log_M)

    def to_dict(self):
        if self.log_domain:
            mm = {"m": {"log": self.log_m}, "M": {"log": self.log_M}}
        else:
            mm = {"m": self.m, "M": self.M}
        return {
            **mm,
            "R": self.R,
            "integral_value": self.integral_value,
            "classical_ratio_log": self.classical_ratio_log,
            "log_domain": self.log_domain,
            "denominator": self.denominator,
            "bound_status": self.bound_status,
            "abserr": self.abserr,
            "method": self.method,
            **self.extra,
        }


def _integrand(f: DriftFunction, R: float, denominator: str):
    lnR = math.log(R)
    if denominator == FULL:
        return lambda s: 1.0 / (R * float(f.eta_log(s - lnR)) + 1.0)
    if denominator == PHI_ONLY:
        return lambda s: 1.0 / (R * float(f.eta_log(s - lnR)))
    raise ValueError(f"denominator must be {FULL!r} or {PHI_ONLY!r}")


def harnack_integral(f: DriftFunction, m=None, M=None, R: float = 1.0, *, log_m=None, log_M=None,
                     denominator: str = FULL, method: str = "auto", rtol: float = 1e-9) -> HarnackReport:
    """Evaluate ``int_m^M dt / (R^2 phi(t/R) + t)``.

    Parameters
    ----------
    f : DriftFunction
    m, M : float, optional
        Endpoints ``0 < m <= M``.  Alternatively pass ``log_m`` / ``log_M``.
    R : float
        Radius in ``(0, 1]``.
    denominator : {"full", "phi"}
        ``"phi"`` drops the ``+ t`` and evaluates ``int dt / (R^2 phi(t/R))``,
        which at ``R = 1`` is the ``int dt/phi`` form of the one-dimensional
        examples.
    method : {"auto", "quadrature", "closed_form"}
        ``"auto"`` uses the drift's antiderivative of ``1/phi`` when it applies
        (``denominator="phi"`` and ``R = 1``), quadrature otherwise.

    Returns
    -------
    HarnackReport
        ``bound_status`` compares the full-denominator value with
        ``ln(M/m) / (1 + R)``.
    """
    log_domain = log_m is not None or log_M is not None
    lm, lM = _resolve_logs(m, M, log_m, log_M)
    if not (math.isfinite(lm) and math.isfinite(lM)):
        raise DomainError("m and M must be positive and finite")
    if lm > lM:
        raise DomainError("need m <= M")
    if not 0 < R <= 1:
        raise DomainError("R must lie in (0, 1]")
    ratio = lM - lm
    if lm == lM:
        return HarnackReport(lm, lM, R, 0.0, 0.0, log_domain, denominator, _status(0.0, 0.0, R, denominator),
                             0.0, "exact")

    closed_ok = denominator == PHI_ONLY and R == 1.0 and f.antiderivative_log is not None
    if method == "closed_form" and not closed_ok:
        raise ValueError("closed form needs denominator='phi', R=1 and a drift antiderivative")
    if method == "closed_form" or (method == "auto" and closed_ok):
        F = f.antiderivative_log
        value = float(F(lM)) - float(F(lm))
        err = 0.0
        used = "closed_form"
    else:
        lnR = math.log(R)
        kinks = [k + lnR for k in f.kinks]
        value, err = integrate_log(_integrand(f, R, denominator), lm, lM, breakpoints=kinks, rtol=rtol)
        used = "quadrature"
    return HarnackReport(lm, lM, R, value, ratio, log_domain, denominator,
                         _status(value, ratio, R, denominator), err, used)


def _status(value, ratio, R, denominator):
    if denominator != FULL:
        return "n/a"
    bound = ratio / (1.0 + R)
    return "within_bound" if value <= bound * (1 + 1e-12) + 1e-15 else "exceeds_bound"


def rescaled_integral_identity(f: DriftFunction, m=None, M=None, R: float = 1.0, *, log_m=None, log_M=None,
                               rtol: float = 1e-10):
    """Both sides of the substitution ``t = R s``.

    Returns ``(value_a, value_b)`` with ``value_a = int_m^M dt / (R^2 phi(t/R) + t)``
    and ``value_b = int_{m/R}^{M/R} ds / (R phi(s) + s)``, each computed by its
    own quadrature.
    """
    lm, lM = _resolve_logs(m, M, log_m, log_M)
    a = harnack_integral(f, log_m=lm, log_M=lM, R=R, rtol=rtol).integral_value
    if lm == lM:
        return a, 0.0
    lnR = math.log(R)
    b, _ = integrate_log(lambda s: 1.0 / (R * float(f.eta_log(s)) + 1.0), lm - lnR, lM - lnR,
                         breakpoints=f.kinks, rtol=rtol)
    return a, b


class SumIntegralBound(NamedTuple):
    """``lhs = int_m^{L^k m} dt/(R phi(t) + t)`` against two block bounds.

    ``rhs`` is ``L * sum_{j<k} a_j``.  ``block_bound`` is ``(L - 1) L sum_{j<k} a_j``,
    which follows from bounding ``R phi(t) + t`` below by its value at the left
    end of each block ``[L^j m, L^(j+1) m]``.
    """

    lhs: float
    rhs: float
    block_bound: float


def sum_vs_integral(f: DriftFunction, m=None, L: float = 6.0, R: float = 1.0, k: int = 1, *,
                    log_m=None) -> SumIntegralBound:
    if k < 1:
        raise ValueError("k must be at least 1")
    if not L > 1:
        raise ValueError("L must exceed 1")
    lm = math.log(m) if log_m is None else float(log_m)
    lhs, _ = integrate_log(lambda s: 1.0 / (R * float(f.eta_log(s)) + 1.0), lm, lm + k * math.log(L),
                           breakpoints=f.kinks, rtol=1e-11)
    a = a_sequence(f, L=L, R=R, k_max=max(k, 1), log_m=lm)[:k]
    total = math.fsum(a)
    return SumIntegralBound(lhs, L * total, (L - 1.0) * L * total)


# -- Hölder oscillation ---------------------------------------------------------


@dataclass
class HolderReport:
    radii: np.ndarray
    osc: np.ndarray
    alpha: float
    fit_residual: float
    constant_input: bool = False
    truncated: bool = False

    def pairs(self):
        return list(zip(self.radii.tolist(), self.osc.tolist()))


def holder_oscillation(u: GridFunction, center=None, R0: float = 1.0, levels: int = 6) -> HolderReport:
    """Oscillation of ``u`` over balls of radius ``R0 2^-i`` and a fitted exponent.

    The exponent is the slope of ``ln osc`` against ``ln R`` by least squares.
    Levels whose radius falls below ``2h`` are dropped (``truncated``).  A
    constant input yields ``alpha = nan`` with ``constant_input`` set.
    """
    if levels < 3:
        raise ValueError("need at least three levels")
    center = np.zeros(u.dim) if center is None else np.atleast_1d(np.asarray(center, dtype=float))
    mesh = u.mesh()
    d2 = sum((x - c) ** 2 for x, c in zip(mesh, center))
    vals = u.linear_values()
    radii, osc = [], []
    truncated = False
    for i in range(levels):
        r = R0 * 2.0**-i
        if r < 2 * u.h:
            truncated = True
            break
        sel = vals[d2 <= r * r * (1 + 1e-12)]
        radii.append(r)
        osc.append(float(np.max(sel) - np.min(sel)))
    radii = np.asarray(radii)
    osc = np.asarray(osc)
    if len(osc) < 2 or np.any(osc <= 0):
        return HolderReport(radii, osc, float("nan"), float("nan"), bool(np.all(osc == 0)), truncated)
    X = np.log(radii)
    Y = np.log(osc)
    coef, res, *_ = np.polyfit(X, Y, 1, full=True)
    resid = float(np.sqrt(res[0] / len(X))) if len(res) else 0.0
    return HolderReport(radii, osc, float(coef[0]), resid, False, truncated)
