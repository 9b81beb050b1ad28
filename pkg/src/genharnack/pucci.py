"""Pucci extremal operators, pointwise residuals of the model inequalities on
grid functions, and the rescaling ``u(x) -> u(r x) / A``.

Residuals are classical: derivatives come from centered differences on smooth
samples, so viscosity and classical notions coincide for everything checked
here.  For log-domain samples ``w = ln u`` all quantities are divided by ``u``,
which the Pucci operators allow because they are positively homogeneous:

* ``Du / u = Dw`` and ``D^2 u / u = D^2 w + Dw (x) Dw``,
* ``phi(|Du|) / u = |Dw| eta~(ln|Dw| + w)`` with ``eta~(s) = eta(e^s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .drift import DriftFunction
from .errors import DomainError
from .grid import GridFunction

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EllipticityPair:
    """Ellipticity constants ``0 < lam <= Lam``."""

    lam: float
    Lam: float

    def __post_init__(self):
        if not (0 < self.lam <= self.Lam) or not math.isfinite(self.Lam):
            raise ValueError(f"need 0 < lambda <= Lambda < inf, got ({self.lam}, {self.Lam})")

    def to_config(self):
        return {"lambda": self.lam, "Lambda": self.Lam}


def _as_matrix(X):
    A = np.atleast_2d(np.asarray(X, dtype=float))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if np.any(np.abs(A - A.T) > 1e-12 * scale):
        raise ValueError("matrix is not symmetric")
    return A


def sym2_eigenvalues(a, b, d):
    """Eigenvalues ``(hi, lo)`` of ``[[a, b], [b, d]]``, elementwise over arrays.

    Written so that negating the matrix negates the eigenvalues exactly.
    """
    a, b, d = (np.asarray(v, dtype=float) for v in (a, b, d))
    mean = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), b)
    return mean + rad, mean - rad


def hessian_eigenvalues(X) -> np.ndarray:
    """Eigenvalues of a symmetric matrix; closed form for ``1x1`` and ``2x2``."""
    A = _as_matrix(X)
    n = A.shape[0]
    if n == 1:
        return A[0].copy()
    if n == 2:
        hi, lo = sym2_eigenvalues(A[0, 0], A[0, 1], A[1, 1])
        return np.array([float(hi), float(lo)])
    return np.linalg.eigvalsh(A)


def _extremal(eigs, lam_pos, lam_neg):
    eigs = np.asarray(eigs, dtype=float)
    pos = np.where(eigs > 0, eigs, 0.0).sum(axis=0)
    neg = np.where(eigs < 0, eigs, 0.0).sum(axis=0)
    return -lam_pos * pos - lam_neg * neg


def pucci_plus(X, e: EllipticityPair) -> float:
    """Maximal Pucci operator ``-lam * sum(e_i > 0) - Lam * sum(e_i < 0)``.

    Examples
    --------
    >>> pucci_plus([[3.0, 0.0], [0.0, -1.0]], EllipticityPair(1.0, 2.0))
    -1.0
    """
    return float(_extremal(hessian_eigenvalues(X), e.lam, e.Lam))


def pucci_minus(X, e: EllipticityPair) -> float:
    """Minimal Pucci operator ``-Lam * sum(e_i > 0) - lam * sum(e_i < 0)``."""
    return float(_extremal(hessian_eigenvalues(X), e.Lam, e.lam))


def _pucci_field(hxx, hxy, hyy, e, which):
    """Vectorized Pucci operator over stacked 2x2 (or 1x1 when ``hxy is None``) Hessians."""
    if hxy is None:
        eigs = np.asarray(hxx)[None]
    else:
        eigs = np.stack(sym2_eigenvalues(hxx, hxy, hyy))
    if which == "plus":
        return _extremal(eigs, e.lam, e.Lam)
    return _extremal(eigs, e.Lam, e.lam)


# -- residuals ---------------------------------------------------------------


@dataclass
class ResidualReport:
    """Pointwise residual of a model inequality on interior nodes.

    ``residual`` and ``tol`` have the shape of the interior block of the grid.
    For supersolutions the test at a node is ``residual >= -tol``; for
    subsolutions it is ``residual <= tol``.  ``worst_index`` is the interior
    index with the smallest margin, ``worst_margin`` that margin (negative means
    violated).  Log-domain residuals are divided by ``u``.
    """

    kind: str
    residual: np.ndarray
    tol: np.ndarray
    holds: bool
    worst_index: tuple
    worst_margin: float
    log_domain: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "kind": self.kind,
            "holds": self.holds,
            "worst_index": list(self.worst_index),
            "worst_margin": self.worst_margin,
            "max_abs_residual": float(np.max(np.abs(self.residual))),
            "log_domain": self.log_domain,
            "notes": list(self.notes),
        }


def _pad_local_max(a, shape, axis):
    """Spread a difference array back onto ``shape`` by taking neighbourhood maxima."""
    n = shape[axis]
    m = a.shape[axis]
    out = np.zeros(shape)
    if m == 0:
        return out
    # each difference of order n - m touches nodes i .. i + (n - m)
    k = n - m
    for off in range(k + 1):
        sl = [slice(None)] * len(shape)
        sl[axis] = slice(off, off + m)
        out[tuple(sl)] = np.maximum(out[tuple(sl)], np.abs(a))
    return out


def _difference_scale(v, h, order):
    """Local ``|d^order v / dx^order|`` estimated by divided differences, max over axes."""
    out = np.zeros(v.shape)
    for axis in range(v.ndim):
        n = v.shape[axis]
        o = min(order, n - 1)
        if o < order:
            continue
        d = np.diff(v, n=o, axis=axis) / h**o
        out = np.maximum(out, _pad_local_max(d, v.shape, axis))
    return out


def _derivatives(v, h):
    """Centered first and second differences on interior nodes."""
    if v.ndim == 1:
        if v.size < 3:
            raise ValueError("need at least 3 nodes per axis")
        c = v[1:-1]
        D = (v[2:] - v[:-2]) / (2 * h)
        H = (v[2:] - 2 * c + v[:-2]) / h**2
        return (D,), (H, None, None), (slice(1, -1),)
    if min(v.shape) < 3:
        raise ValueError("need at least 3 nodes per axis")
    c = v[1:-1, 1:-1]
    Dx = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2 * h)
    Dy = (v[1:-1, 2:] - v[1:-1, :-2]) / (2 * h)
    Hxx = (v[2:, 1:-1] - 2 * c + v[:-2, 1:-1]) / h**2
    Hyy = (v[1:-1, 2:] - 2 * c + v[1:-1, :-2]) / h**2
    Hxy = (v[2:, 2:] - v[2:, :-2] - v[:-2, 2:] + v[:-2, :-2]) / (4 * h**2)
    return (Dx, Dy), (Hxx, Hxy, Hyy), (slice(1, -1), slice(1, -1))


def _phi_terms(f: DriftFunction, grad_norm, w=None):
    """``phi(|Du|)`` (or ``phi(|Du|)/u`` in log domain) and ``phi'`` at the same argument."""
    g = np.asarray(grad_norm, dtype=float)
    zero = g <= 0
    with np.errstate(divide="ignore"):
        s = np.log(np.where(zero, 1.0, g))
    if w is not None:
        s = s + w
    with np.errstate(all="ignore"):
        eta = np.asarray(f.eta_log(s), dtype=float)
        slope = np.asarray(f.log_slope(s), dtype=float)
    phi = np.where(zero, 0.0, g * eta)
    dphi = np.where(zero, 0.0, eta + slope)
    return phi, np.abs(dphi)


def _residual(u: GridFunction, f: DriftFunction, e: EllipticityPair, R: float, kind: str, tol_factor: float):
    if R <= 0:
        raise ValueError("radius factor R must be positive")
    v = u.values
    h = u.h
    (grads, (hxx, hxy, hyy), inner) = _derivatives(v, h)
    center = v[inner]
    s3 = _difference_scale(v, h, 3)[inner]
    s4 = _difference_scale(v, h, 4)[inner]
    if u.log_domain:
        # second derivatives of u, divided by u
        if hxy is None:
            hxx = hxx + grads[0] ** 2
        else:
            hxx = hxx + grads[0] ** 2
            hyy = hyy + grads[1] ** 2
            hxy = hxy + grads[0] * grads[1]
        gnorm = np.sqrt(sum(g**2 for g in grads))
        phi, dphi = _phi_terms(f, gnorm, w=center)
        # error in D^2 w + Dw (x) Dw, then in Dw
        err_h = s4 / 12 + gnorm * s3 / 3
        err_d = s3 / 6
        floor = 8 * _EPS * np.abs(center) * (1 / h**2 + gnorm / h + R * dphi / h)
    else:
        gnorm = np.sqrt(sum(g**2 for g in grads))
        phi, dphi = _phi_terms(f, gnorm)
        err_h = s4 / 12
        err_d = s3 / 6
        floor = 8 * _EPS * np.abs(center) * (1 / h**2 + R * dphi / h)
    n = v.ndim
    tol = tol_factor * h**2 * (e.Lam * n * err_h + R * dphi * err_d) + e.Lam * n * floor

    if kind == "super":
        res = _pucci_field(hxx, hxy, hyy, e, "plus") + R * phi
        margin = res + tol
    else:
        res = _pucci_field(hxx, hxy, hyy, e, "minus") - R * phi
        margin = tol - res
    idx = np.unravel_index(int(np.argmin(margin)), margin.shape)
    worst = float(margin[idx])
    return ResidualReport(kind, res, tol, bool(worst >= 0), tuple(int(i) for i in idx), worst, u.log_domain)


def residual_supersolution(u: GridFunction, f: DriftFunction, e: EllipticityPair, R: float = 1.0,
                           tol_factor: float = 10.0) -> ResidualReport:
    """Residual of ``P+(D^2 u) + R phi(|Du|) >= 0`` at interior nodes.

    The tolerance is ``tol_factor * h**2`` times the local truncation scale of
    the centered differences (third and fourth divided differences), plus a
    rounding floor.  ``phi(0) = 0``.
    """
    return _residual(u, f, e, R, "super", tol_factor)


def residual_subsolution(u: GridFunction, f: DriftFunction, e: EllipticityPair, R: float = 1.0,
                         tol_factor: float = 10.0) -> ResidualReport:
    """Residual of ``P-(D^2 u) - R phi(|Du|) <= 0`` at interior nodes."""
    return _residual(u, f, e, R, "sub", tol_factor)


# -- rescaling ---------------------------------------------------------------


def rescale_threshold(A: float, L2: float, R: float, f: DriftFunction) -> float:
    """Largest admissible ``r = (1/L2) A / (R phi(A) + A) = 1 / (L2 (R eta(A) + 1))``."""
    if A <= 0 or L2 <= 0 or R <= 0:
        raise ValueError("A, L2 and R must be positive")
    return 1.0 / (L2 * (R * float(f.eta_log(math.log(A))) + 1.0))


def rescale(u: GridFunction, A: float, r: float, L2: float | None = None, R: float | None = None,
            f: DriftFunction | None = None, target: GridFunction | None = None) -> GridFunction:
    """Return ``v(x) = u(r x) / A`` sampled by linear interpolation.

    Parameters
    ----------
    u : GridFunction
        Source samples.
    A, r : float
        Value and length scales, both positive.
    L2, R, f : optional
        When all three are given the result's ``meta`` records the admissible
        threshold from :func:`rescale_threshold` and whether ``r`` respects it.
    target : GridFunction, optional
        Grid on which to sample ``v``; defaults to the grid of ``u`` itself.

    Raises
    ------
    DomainError
        If ``r`` times the target grid leaves the domain of ``u``.
    """
    if A <= 0 or r <= 0:
        raise ValueError("A and r must be positive")
    tgt = u if target is None else target
    if tgt.dim != u.dim:
        raise ValueError("target grid has a different dimension")
    pts = [r * c for c in tgt.mesh()]
    for axis, (lo, hi) in enumerate(u.bounds()):
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.min(pts[axis]) < lo - slack or np.max(pts[axis]) > hi + slack:
            raise DomainError("rescaled grid leaves the domain of u")
    # interpolate in whichever representation u is stored; log values are
    # interpolated as logs so positivity is preserved
    src = u.values
    if u.dim == 1:
        vals = np.interp(pts[0], u.coords(0), src)
    else:
        from scipy.interpolate import RegularGridInterpolator

        interp = RegularGridInterpolator((u.coords(0), u.coords(1)), src, method="linear",
                                         bounds_error=False, fill_value=None)
        vals = interp(np.stack([np.clip(p, lo, hi) for p, (lo, hi) in zip(pts, u.bounds())], axis=-1))
    vals = vals - math.log(A) if u.log_domain else vals / A
    meta = {"A": float(A), "r": float(r)}
    if L2 is not None and R is not None and f is not None:
        thr = rescale_threshold(A, L2, R, f)
        meta.update(threshold=thr, admissible=bool(r <= thr))
    return GridFunction(vals, tgt.h, origin=tgt.origin, log_domain=u.log_domain, meta=meta)
