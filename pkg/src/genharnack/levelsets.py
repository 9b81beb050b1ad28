"""Level-set bookkeeping for the measure-decay argument.

Given a positive sample ``u`` and its infimum ``m`` over the unit ball, the
superlevel sets ``A_k = {u > L^k m}`` inside the ball of radius 5/3 are measured
by node counting, and compared with the decay envelopes driven by the scaling
factors

    a_k = L^(k-1) m / (R phi(L^k m) + L^k m) = (1/L) / (R eta(L^k m) + 1).

The module also covers the geometric radii ``r_l`` of the final covering step,
discrete delta-neighbourhoods of relative boundaries, and an empirical test of
the relative isoperimetric inequality on pixel sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .drift import DriftFunction
from .errors import DomainError
from .grid import GridFunction

#: Defaults for constants that are only known to exist.
DEFAULT_CONSTANTS = {
    "L": 6.0,
    "L0": 2.0,
    "eps": 0.5,
    "sigma": 1.0,
    "c0": 0.1,
    "c_eps": 1.0,
    "c": 1.0,
    "delta": 0.1,
    "k0": 0,
    "k1": 0,
}

_EPS = np.finfo(float).eps


def _log_m(m=None, log_m=None):
    if log_m is not None:
        return float(log_m)
    if m is None or not m > 0:
        raise ValueError("m must be positive (or pass log_m)")
    return math.log(m)


def a_sequence_forms(f: DriftFunction, m=None, L=6.0, R=1.0, k_max=16, *, log_m=None):
    """Both algebraic forms of ``a_k`` for ``k = 0..k_max``.

    Returns
    -------
    direct, reduced : ndarray
        ``L^(k-1) m / (R phi(L^k m) + L^k m)`` evaluated through logarithms, and
        ``(1/L) / (R eta(L^k m) + 1)``.
    """
    if not L > 1:
        raise ValueError("L must exceed 1")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    lm = _log_m(m, log_m)
    lnL = math.log(L)
    k = np.arange(k_max + 1, dtype=float)
    s = k * lnL + lm
    eta = np.asarray(f.eta_log(s), dtype=float)
    # direct form: numerator and denominator both kept as logarithms
    log_num = (k - 1) * lnL + lm
    log_den = np.logaddexp(math.log(R) + np.log(eta) + s, s)
    direct = np.exp(log_num - log_den)
    reduced = (1.0 / L) / (R * eta + 1.0)
    return direct, reduced


def a_sequence(f: DriftFunction, m=None, L=6.0, R=1.0, k_max=16, *, log_m=None, rtol=1e-12):
    """Scaling factors ``a_0 .. a_{k_max}``, cross-checked between the two forms.

    The direct form loses ``|ln(L^k m)| * eps`` of relative accuracy to the
    logarithms it passes through; that unavoidable amount is added to ``rtol``.

    Examples
    --------
    >>> from genharnack.drift import homogeneous
    >>> float(a_sequence(homogeneous(), 1.0, 6.0, 1.0, 3)[2])  # doctest: +ELLIPSIS
    0.08333333333333...
    """
    direct, reduced = a_sequence_forms(f, m, L, R, k_max, log_m=log_m)
    lm = _log_m(m, log_m)
    k = np.arange(k_max + 1)
    slack = rtol + 8 * _EPS * (np.abs(k * math.log(L) + lm) + 1.0)
    rel = np.abs(direct - reduced) / reduced
    if np.any(rel > slack):
        i = int(np.argmax(rel - slack))
        raise ArithmeticError(f"a_k forms disagree at k={i}: relative gap {rel[i]:.3g}")
    return reduced


def ball_mask(u: GridFunction, radius: float, center=None) -> np.ndarray:
    """Boolean mask of grid nodes with ``|x - center| <= radius``."""
    mesh = u.mesh()
    center = np.zeros(u.dim) if center is None else np.atleast_1d(np.asarray(center, dtype=float))
    d2 = sum((x - c) ** 2 for x, c in zip(mesh, center))
    return d2 <= radius**2 * (1 + 1e-12)


def infimum_on_ball(u: GridFunction, radius=1.0, center=None) -> float:
    """``ln inf u`` over the nodes of a ball."""
    mask = ball_mask(u, radius, center)
    if not np.any(mask):
        raise ValueError("ball contains no grid nodes")
    return float(np.min(u.log_values()[mask]))


def level_measures(u: GridFunction, m=None, L=6.0, k_max=16, ball_radius=5.0 / 3.0, *, log_m=None, center=None):
    """Measures ``|A_k| = |{x in B : u(x) > L^k m}|`` for ``k = 0..k_max``.

    Node count times ``h**n``; thresholds are compared as logarithms.  ``m``
    defaults to the infimum of ``u`` over the unit ball.
    """
    if m is None and log_m is None:
        lm = infimum_on_ball(u, 1.0, center)
    else:
        lm = _log_m(m, log_m)
    mask = ball_mask(u, ball_radius, center)
    lu = u.log_values()[mask]
    cell = u.h**u.dim
    thresholds = np.arange(k_max + 1) * math.log(L) + lm
    return np.array([np.count_nonzero(lu > th) * cell for th in thresholds])


def ball_volume(n: int, radius: float) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * radius**n


@dataclass
class LevelSetDiagnostics:
    """Scaling factors, measured level sets and predicted envelopes.

    Attributes
    ----------
    L, log_m, R : float
        Level ratio, ``ln m`` and the radius factor.
    n : int
        Space dimension.
    a : ndarray
        ``a_0 .. a_{k_max}``.
    A_meas : ndarray
        ``|A_0| .. |A_{k_max}|``.
    partial_sums : ndarray
        ``sum_{j<k} a_j`` for each ``k``.
    envelopes : dict
        Name to array of predicted upper bounds (NaN where the bound does not apply).
    """

    L: float
    log_m: float
    R: float
    n: int
    a: np.ndarray
    A_meas: np.ndarray
    ball_radius: float = 5.0 / 3.0
    partial_sums: np.ndarray = field(default=None)
    envelopes: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.partial_sums is None:
            self.partial_sums = np.concatenate([[0.0], np.cumsum(self.a)[:-1]])

    def to_rows(self):
        names = sorted(self.envelopes)
        header = ["k", "a_k", "A_k", "partial_sum", *names]
        rows = []
        for k in range(len(self.a)):
            rows.append([k, float(self.a[k]), float(self.A_meas[k]), float(self.partial_sums[k]),
                         *(float(self.envelopes[nm][k]) for nm in names)])
        return header, rows

    def summary(self):
        return {
            "L": self.L,
            "log_m": self.log_m,
            "R": self.R,
            "n": self.n,
            "nested": bool(np.all(np.diff(self.A_meas) <= 0)),
            "ratio_bound_holds": bool(np.all(self.a[1:] / self.a[:-1] <= self.L * (1 + 1e-12))),
            "envelope_flags": dict(self.flags),
        }


def level_set_diagnostics(u: GridFunction, f: DriftFunction, L=6.0, R=1.0, k_max=16, *, m=None, log_m=None,
                          ball_radius=5.0 / 3.0, consts=None) -> LevelSetDiagnostics:
    """Assemble :class:`LevelSetDiagnostics` for a grid function and attach envelopes."""
    if m is None and log_m is None:
        lm = infimum_on_ball(u)
    else:
        lm = _log_m(m, log_m)
    if not math.isfinite(lm):
        raise DomainError("the base level m must be positive and finite; pass m explicitly when inf u = 0")
    a = a_sequence(f, L=L, R=R, k_max=k_max, log_m=lm)
    meas = level_measures(u, L=L, k_max=k_max, ball_radius=ball_radius, log_m=lm)
    diag = LevelSetDiagnostics(L=float(L), log_m=lm, R=float(R), n=u.dim, a=a, A_meas=meas, ball_radius=ball_radius)
    decay_envelopes(diag, consts or {})
    return diag


def decay_envelopes(diag: LevelSetDiagnostics, consts: dict) -> dict:
    """Predicted upper bounds for ``|A_k|``; stored on ``diag`` and returned.

    ``start``: ``|B_{5/3}| - c (sum_{j<k} a_j)^n`` for ``k >= 1``.
    ``end``: ``n^-n (1 - c sum_{j=k0}^{k-1} a_j)^n`` for ``k >= k0``.
    ``geometric``: ``(1 - c0)^(k - k1) a_{k1}^n`` for ``k >= k1``.
    ``power``: ``c_eps t^-eps a_{k1}^n`` at ``t = L^(k - k1)`` for ``k >= k1``.

    The constants are configuration inputs; the comparison flags are
    diagnostics, not assertions.
    """
    c = {**DEFAULT_CONSTANTS, **consts}
    n = diag.n
    K = len(diag.a)
    k = np.arange(K)
    a = diag.a
    S = diag.partial_sums
    vol = ball_volume(n, diag.ball_radius)
    start = np.where(k >= 1, vol - c["c"] * S**n, np.nan)
    k0, k1 = int(c["k0"]), int(c["k1"])
    from_k0 = np.where(k >= k0, S - (S[k0] if k0 < K else np.nan), np.nan)
    end = np.where(k >= k0, (1.0 - c["c"] * from_k0) ** n / n**n, np.nan)
    ak1 = a[k1] if k1 < K else np.nan
    geometric = np.where(k >= k1, (1.0 - c["c0"]) ** (k - k1) * ak1**n, np.nan)
    t = np.where(k >= k1, diag.L ** (k - k1).astype(float), np.nan)
    power = c["c_eps"] * t ** (-c["eps"]) * ak1**n
    env = {"start": start, "end": end, "geometric": geometric, "power": power}
    diag.envelopes = env
    for name, bound in env.items():
        ok = np.isnan(bound) | (diag.A_meas <= bound)
        diag.flags[name] = bool(np.all(ok))
    return env


# -- covering radii -------------------------------------------------------------


@dataclass
class RadiiReport:
    radii: np.ndarray
    nu: float
    ratio: float
    l0: int
    tail_sum: float
    tails_closed: np.ndarray
    tails_summed: np.ndarray

    @property
    def max_rel_gap(self) -> float:
        return float(np.max(np.abs(self.tails_closed - self.tails_summed) / self.tails_summed))


def caffarelli_radii(a_k1: float, L0=2.0, sigma=1.0, eps=0.5, n=2, l_max=64, target=1.0 / 3.0) -> RadiiReport:
    """Radii ``r_l = sigma nu^(-(l+1) eps/n) (L0/2)^(-eps/n) a_k1`` with ``nu = L0/(L0 - 1/2)``.

    Tails ``sum_{j>=l} r_j`` are given in closed form ``r_l / (1 - nu^(-eps/n))``
    and, independently, by summing terms until they drop below ``1e-18`` of the
    total.  ``l0`` is the first index whose tail is at most ``target``.
    """
    if not L0 > 0.5:
        raise ValueError("L0 must exceed 1/2")
    if not eps > 0 or a_k1 <= 0 or sigma <= 0:
        raise ValueError("eps, sigma and a_k1 must be positive")
    nu = L0 / (L0 - 0.5)
    q = nu ** (-eps / n)
    first = sigma * (L0 / 2) ** (-eps / n) * a_k1
    l = np.arange(l_max + 1)
    radii = first * q ** (l + 1)
    closed = radii / (1.0 - q)
    # independent tail: enough terms that the remainder is below 1e-18 relative
    n_terms = int(math.ceil(math.log(1e-18) / math.log(q))) + 1
    summed = np.array([math.fsum(first * q ** (j + 1) for j in range(i, i + n_terms)) for i in range(l_max + 1)])
    below = np.nonzero(closed <= target)[0]
    if below.size == 0:
        raise ValueError(f"no tail below {target} within l_max={l_max}")
    l0 = int(below[0])
    return RadiiReport(radii, nu, q, l0, float(closed[l0]), closed, summed)


# -- pixel geometry -------------------------------------------------------------


def relative_boundary(E: np.ndarray, domain: np.ndarray | None = None) -> np.ndarray:
    """Cells of ``E`` with an axis neighbour in ``domain \\ E``."""
    E = np.asarray(E, dtype=bool)
    domain = np.ones_like(E) if domain is None else np.asarray(domain, dtype=bool)
    outside = domain & ~E
    bd = np.zeros_like(E)
    for axis in range(E.ndim):
        for shift in (1, -1):
            nb = np.zeros_like(E)
            src = [slice(None)] * E.ndim
            dst = [slice(None)] * E.ndim
            if shift == 1:
                src[axis], dst[axis] = slice(1, None), slice(None, -1)
            else:
                src[axis], dst[axis] = slice(None, -1), slice(1, None)
            nb[tuple(dst)] = outside[tuple(src)]
            bd |= nb
    return bd & E


def delta_neighborhood(E: np.ndarray, delta: float, h: float, domain: np.ndarray | None = None) -> np.ndarray:
    """Cells within Euclidean distance ``< delta`` of the relative boundary of ``E``.

    Distances are between cell centres, computed exactly by a Euclidean
    distance transform.  An empty boundary gives an empty neighbourhood.
    """
    bd = relative_boundary(E, domain)
    if not np.any(bd):
        return np.zeros(np.shape(E), dtype=bool)
    dist = ndimage.distance_transform_edt(~bd, sampling=h)
    return dist < delta


@dataclass
class IsoperimetricReport:
    deltas: list
    lhs: list
    rhs_min: list
    ratios: list
    degenerate: bool = False

    @property
    def constant(self) -> float:
        if self.degenerate or not self.ratios:
            return float("nan")
        return float(min(self.ratios))


def isoperimetric_check(E: np.ndarray, domain: np.ndarray, h: float, deltas=(0.05, 0.1, 0.2)) -> IsoperimetricReport:
    """Compare ``|I_delta(dE cap B) cap E|`` with ``min(delta |B\\E|^((n-1)/n), delta |E|^((n-1)/n), |E|)``.

    Sets with ``|E| = 0`` or ``|B \\ E| = 0`` are flagged degenerate and skipped.
    """
    E = np.asarray(E, dtype=bool) & np.asarray(domain, dtype=bool)
    n = E.ndim
    cell = h**n
    vol_E = np.count_nonzero(E) * cell
    vol_rest = np.count_nonzero(domain & ~E) * cell
    rep = IsoperimetricReport(list(deltas), [], [], [])
    if vol_E == 0 or vol_rest == 0:
        rep.degenerate = True
        return rep
    expo = (n - 1) / n
    for d in deltas:
        if d > 1:
            raise ValueError("delta must not exceed 1")
        nb = delta_neighborhood(E, d, h, domain)
        lhs = np.count_nonzero(nb & E) * cell
        rhs = min(d * vol_rest**expo, d * vol_E**expo, vol_E)
        rep.lhs.append(lhs)
        rep.rhs_min.append(rhs)
        rep.ratios.append(lhs / rhs)
    return rep


def random_connected_set(rng: np.random.Generator, X: np.ndarray, Y: np.ndarray, domain: np.ndarray,
                         blobs=(2, 7)) -> np.ndarray:
    """A union of chained disks inside ``domain``, restricted to its largest component."""
    count = int(rng.integers(blobs[0], blobs[1] + 1))
    E = np.zeros_like(domain)
    cx, cy = rng.uniform(-0.4, 0.4, size=2)
    for _ in range(count):
        rad = rng.uniform(0.08, 0.3)
        E |= (X - cx) ** 2 + (Y - cy) ** 2 < rad**2
        # next centre inside the current disk keeps the union connected
        ang = rng.uniform(0, 2 * math.pi)
        step = rng.uniform(0, rad)
        cx = float(np.clip(cx + step * math.cos(ang), -0.6, 0.6))
        cy = float(np.clip(cy + step * math.sin(ang), -0.6, 0.6))
    E &= domain
    lab, nlab = ndimage.label(E)
    if nlab > 1:
        sizes = ndimage.sum(E, lab, index=np.arange(1, nlab + 1))
        E = lab == (1 + int(np.argmax(sizes)))
    return E


def isoperimetric_suite(count=100, seed=0, deltas=(0.05, 0.1, 0.2), h=None):
    """Empirical isoperimetric constant over random connected sets in the unit disk.

    The grid spacing defaults to ``min(deltas) / 8``.  Returns the minimum ratio
    and the per-set constants.
    """
    h = min(deltas) / 8 if h is None else h
    x = np.arange(-1 + h / 2, 1, h)
    X, Y = np.meshgrid(x, x, indexing="ij")
    domain = X**2 + Y**2 < 1.0
    rng = np.random.default_rng(seed)
    constants = []
    for _ in range(count):
        E = random_connected_set(rng, X, Y, domain)
        rep = isoperimetric_check(E, domain, h, deltas)
        if not rep.degenerate:
            constants.append(rep.constant)
    return float(min(constants)), constants, h
