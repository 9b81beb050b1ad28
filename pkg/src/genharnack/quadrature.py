"""Adaptive quadrature on log-scaled variables.

Integrals of the form ``int_m^M g(t) dt/t`` are evaluated in ``s = ln t`` so the
endpoints may be astronomically large or small (``m = exp(-exp(11))`` is routine
here).  The integration itself is QUADPACK's adaptive Gauss-Kronrod 21-point rule
via :func:`scipy.integrate.quad`; this module only handles panel splitting at
kinks, splitting of very long ranges, and error reporting.
"""

import math
import warnings

from scipy import integrate

from .errors import QuadratureError

#: Default relative and absolute targets.
RTOL = 1e-9
ATOL = 1e-14

# Extra panel edges at +-4**j keep panels short relative to |s|; the integrands
# here vary on the scale of |s| itself.
_SCALE_CUTS = tuple(sorted({sgn * 4.0**j for j in range(1, 30) for sgn in (-1.0, 1.0)}))


def _panels(lo, hi, breakpoints):
    cuts = {float(b) for b in breakpoints if lo < b < hi}
    cuts.update(c for c in _SCALE_CUTS if lo < c < hi)
    edges = [lo, *sorted(cuts), hi]
    return list(zip(edges[:-1], edges[1:]))


def integrate_1d(fn, lo, hi, *, breakpoints=(), rtol=RTOL, atol=ATOL, limit=200):
    """Integrate a scalar function over ``[lo, hi]``.

    Parameters
    ----------
    fn : callable
        Scalar integrand.
    lo, hi : float
        Finite limits; ``hi < lo`` flips the sign of the result.
    breakpoints : iterable of float
        Points where ``fn`` may be non-smooth.  Each becomes a panel boundary.
    rtol, atol : float
        Relative and absolute error targets per panel.

    Returns
    -------
    value, abserr : float
        Integral estimate and QUADPACK's error estimate summed over panels.

    Raises
    ------
    QuadratureError
        If a panel fails to converge; the partial sum is attached.
    """
    lo = float(lo)
    hi = float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise QuadratureError("integration limits must be finite", float("nan"))
    if lo == hi:
        return 0.0, 0.0
    sign = 1.0
    if hi < lo:
        lo, hi = hi, lo
        sign = -1.0

    total = 0.0
    err = 0.0
    for a, b in _panels(lo, hi, breakpoints):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, e, info = integrate.quad(
                fn, a, b, epsabs=atol, epsrel=rtol, limit=limit, full_output=1
            )[:3]
        if not math.isfinite(val):
            raise QuadratureError(f"non-finite integrand on [{a}, {b}]", sign * total, err)
        # QUADPACK flags roundoff (ier=2) even when the estimate is far below target
        if e > 10.0 * max(atol, rtol * abs(val)) and e > 1e-13 * (b - a):
            raise QuadratureError(
                f"quadrature did not converge on [{a}, {b}] (abserr={e:.3g})",
                sign * (total + val),
                err + e,
            )
        total += val
        err += e
    return sign * total, err


def integrate_log(g, log_lo, log_hi, **kwargs):
    """Integrate ``g(s)`` over ``s`` in ``[log_lo, log_hi]``.

    A thin alias of :func:`integrate_1d` that documents intent: ``g`` is already the
    log-substituted integrand ``t * h(t)`` evaluated at ``t = exp(s)``.
    """
    return integrate_1d(g, log_lo, log_hi, **kwargs)
