"""One-dimensional extremal solutions ``u' = phi(u)`` and the closed-form example
``u_k(x) = exp(-exp(x + k))``.

Trajectories are integrated as ``y = ln u`` with ``y' = eta~(y)``, where
``eta~(s) = eta(e^s)``.  Values of ``u`` such as ``exp(-exp(12))`` are never
formed; ``ln u'`` is recovered as ``ln phi(u) = y + ln eta~(y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .drift import DriftFunction
from .errors import TruncatedDomainError
from .grid import GridFunction
from .harnack import HarnackReport, harnack_integral
from .quadrature import integrate_log

#: Below this ``ln u`` the solution is treated as having reached zero.
LOG_FLOOR = -700.0
#: Above this ``ln u`` the solution is treated as having blown up.
LOG_CEIL = 700.0

RTOL = 1e-10
ATOL = 1e-12


@dataclass
class ExtremalSolution:
    """A solution of ``u' = phi(u)`` with ``u(0) = 1/k`` sampled on ``x_grid``.

    ``reached_zero_at`` is set when, integrating towards negative ``x``, the
    solution dropped below ``exp(LOG_FLOOR)``: the non-Osgood behaviour in which
    a positive solution vanishes at a finite point.  Nodes beyond it hold
    ``-inf``.
    """

    k: float
    x_grid: np.ndarray
    log_u: np.ndarray
    log_u_prime: np.ndarray
    drift: DriftFunction
    reached_zero_at: float | None = None
    meta: dict = field(default_factory=dict)

    def to_grid(self) -> GridFunction:
        h = float(self.x_grid[1] - self.x_grid[0])
        return GridFunction(self.log_u.copy(), h, origin=(float(self.x_grid[0]),), log_domain=True)


def symmetric_nodes(nodes: int, half_width: float = 2.0) -> np.ndarray:
    """Uniform nodes on ``[-half_width, half_width]`` containing ``0`` and ``+-half_width/2``.

    The count is rounded up to the next ``4q + 1``.
    """
    q = max(1, math.ceil((nodes - 1) / 4))
    return np.linspace(-half_width, half_width, 4 * q + 1)


def _integrate_branch(f: DriftFunction, y0: float, x_end: float, x_eval: np.ndarray):
    """Integrate ``y' = eta~(y)`` from ``x = 0`` to ``x_end``; restart at each kink crossing.

    Returns ``(y_at_x_eval, reached_zero_at)``.
    """
    rhs = lambda x, y: [float(f.eta_log(y[0]))]  # noqa: E731
    out = np.full(x_eval.shape, np.nan)
    x0, y = 0.0, y0
    pending = sorted(f.kinks)
    zero_at = None
    while True:
        events = []

        def floor(x, yy):
            return yy[0] - LOG_FLOOR

        def ceil(x, yy):
            return yy[0] - LOG_CEIL

        floor.terminal = ceil.terminal = True
        events += [floor, ceil]
        kink_events = []
        for kk in pending:
            def ev(x, yy, kk=kk):
                return yy[0] - kk

            ev.terminal = True
            kink_events.append((kk, ev))
            events.append(ev)
        mask = (x_eval - x0) * (x_end - x0) >= 0
        mask &= np.abs(x_eval - x0) <= abs(x_end - x0)
        sol = solve_ivp(rhs, (x0, x_end), [y], method="RK45", rtol=RTOL, atol=ATOL,
                        events=events, dense_output=True)
        x_stop = float(sol.t[-1])
        seg = mask & ((x_eval - x0) * (x_stop - x0) >= 0) & (np.abs(x_eval - x0) <= abs(x_stop - x0))
        if np.any(seg) and sol.sol is not None:
            out[seg] = sol.sol(x_eval[seg])[0]
        if sol.status == 0:
            return out, zero_at
        # y is strictly increasing, so a collapsing step size means y -> +inf going
        # right and y -> -inf going left
        forward = x_end > x0
        stalled = sol.status == -1
        if sol.t_events[1].size or (stalled and forward):
            raise TruncatedDomainError(f"solution blows up before x = {x_end}", x_stop)
        if sol.t_events[0].size or stalled:
            zero_at = x_stop
            beyond = (x_eval - x_stop) * (x_end - x_stop) > 0
            out[beyond] = -np.inf
            return out, zero_at
        hit = [kk for (kk, _), te in zip(kink_events, sol.t_events[2:]) if te.size]
        x0 = x_stop
        y = float(hit[0]) if hit else float(sol.y[0, -1])
        pending = [kk for kk in pending if kk not in hit]


def build_extremal(f: DriftFunction, k: float, nodes: int = 401, half_width: float = 2.0) -> ExtremalSolution:
    """Solve ``u' = phi(u)``, ``u(0) = 1/k`` on ``[-half_width, half_width]``.

    Integration is RK45 in ``y = ln u`` with ``rtol=1e-10`` and ``atol=1e-12``, run
    separately towards both ends, restarting at kinks of ``eta``.

    Raises
    ------
    TruncatedDomainError
        If ``ln u`` exceeds ``LOG_CEIL`` before the right end.
    """
    if not k >= 1:
        raise ValueError("k must be at least 1")
    x = symmetric_nodes(nodes, half_width)
    y0 = -math.log(k)
    ypos, _ = _integrate_branch(f, y0, half_width, x[x >= 0])
    yneg, zero_at = _integrate_branch(f, y0, -half_width, x[x <= 0])
    y = np.concatenate([yneg[:-1], ypos])
    y[x == 0] = y0
    with np.errstate(all="ignore"):
        lup = np.where(np.isfinite(y), f.log_phi(np.where(np.isfinite(y), y, 0.0)), -np.inf)
    return ExtremalSolution(float(k), x, y, lup, f, zero_at, {"nodes": int(x.size)})


@dataclass
class ExtremalCheck:
    max_ratio: float
    min_phi_prime: float
    u_pp_nonnegative: bool
    ode_residual: float
    ratios: np.ndarray

    def to_dict(self):
        return {"max_ratio": self.max_ratio, "min_phi_prime": self.min_phi_prime,
                "u_pp_nonnegative": self.u_pp_nonnegative, "ode_residual": self.ode_residual}


def verify_extremal(sol: ExtremalSolution) -> ExtremalCheck:
    """Ratio ``u''/phi(u')`` at every node and consistency of the trajectory.

    With ``u'' = phi'(u) u'`` and ``u' = phi(u)`` the ratio reduces to
    ``(eta~ + eta~')(y) / eta~(y + ln eta~(y))``.  ``u''`` is nonnegative exactly
    when ``phi'(u) >= 0``.  ``ode_residual`` is the largest gap between ``x`` and
    ``int_{y(0)}^{y(x)} ds / eta~(s)``, the integrated form of the equation,
    computed by quadrature between consecutive nodes.
    """
    f = sol.drift
    ok = np.isfinite(sol.log_u)
    y = sol.log_u[ok]
    x = sol.x_grid[ok]
    eta = f.eta_log(y)
    dphi = eta + f.log_slope(y)
    ratio = np.abs(dphi) / f.eta_log(y + np.log(eta))
    # integrated form, accumulated outwards from x = 0
    i0 = int(np.argmin(np.abs(x)))
    g = lambda s: 1.0 / float(f.eta_log(s))  # noqa: E731
    pos = np.zeros(x.size)
    for i in range(i0 + 1, x.size):
        pos[i] = pos[i - 1] + integrate_log(g, y[i - 1], y[i], breakpoints=f.kinks, rtol=1e-12)[0]
    for i in range(i0 - 1, -1, -1):
        pos[i] = pos[i + 1] - integrate_log(g, y[i], y[i + 1], breakpoints=f.kinks, rtol=1e-12)[0]
    resid = float(np.max(np.abs(pos - (x - x[i0]))))
    return ExtremalCheck(float(np.max(ratio)), float(np.min(dphi)), bool(np.all(dphi >= 0)), resid, ratio)


def sharpness_report(sol: ExtremalSolution, tol: float = 1e-6) -> HarnackReport:
    """``int_{u(-1)}^{u(1)} dt / phi(t)``, which equals ``2`` for an exact solution.

    Computed by quadrature from the sampled ``ln u(+-1)``; the classical ratio
    ``ln(u(1)/u(-1))`` is attached.
    """
    x = sol.x_grid
    i_m = int(np.argmin(np.abs(x + 1.0)))
    i_M = int(np.argmin(np.abs(x - 1.0)))
    if abs(x[i_m] + 1) > 1e-12 or abs(x[i_M] - 1) > 1e-12:
        raise ValueError("x = -1 and x = 1 must be grid nodes")
    lm, lM = float(sol.log_u[i_m]), float(sol.log_u[i_M])
    rep = harnack_integral(sol.drift, log_m=lm, log_M=lM, R=1.0, denominator="phi", method="quadrature",
                           rtol=1e-12)
    rep.extra = {"k": sol.k, "target": 2.0, "sharp": bool(abs(rep.integral_value - 2.0) <= tol)}
    return rep


def closed_form_example(k: float, x):
    """``u_k(x) = exp(-exp(x + k))`` with ``phi(t) = (1 + |ln t|) t``.

    Returns
    -------
    log_u, log_abs_u_prime, ratio
        ``-e^(x+k)``, ``(x + k) - e^(x+k)`` and
        ``|u''| / phi(|u'|) = |e^(x+k) - 1| / (e^(x+k) - (x+k) + 1)``.
    """
    z = np.asarray(x, dtype=float) + k
    a = np.exp(z)
    log_u = -a
    log_abs_up = z - a
    ratio = np.abs(np.expm1(z)) / (a - z + 1.0)
    if np.ndim(log_u) == 0:
        return float(log_u), float(log_abs_up), float(ratio)
    return log_u, log_abs_up, ratio


def closed_form_classical_ratio(k: float) -> float:
    """``ln(u_k(-1) / u_k(1)) = e^(k+1) - e^(k-1)``; ``u_k`` is decreasing."""
    return math.exp(k + 1.0) - math.exp(k - 1.0)


def closed_form_grid(k: float, nodes: int = 4001, lo: float = -2.0, hi: float = 2.0) -> GridFunction:
    """Log-domain samples of ``u_k`` on ``[lo, hi]``."""
    return GridFunction.from_function(lambda x: -np.exp(x + k), lo, hi, nodes, log_domain=True)


def classical_ratios(f: DriftFunction, ks, nodes: int = 401) -> list:
    """``ln(u(1)/u(-1))`` of the extremal solution for each ``k``."""
    out = []
    for k in ks:
        rep = sharpness_report(build_extremal(f, k, nodes))
        out.append(rep.classical_ratio_log)
    return out
