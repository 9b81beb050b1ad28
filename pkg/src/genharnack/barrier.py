"""Radial barrier ``psi(x) = M1 - M2 |x|^-alpha`` on the annulus ``r0/2 <= |x| <= 2 r0``.

The exponent is ``alpha = max(2 (n-1) Lam/lam, 1)`` and ``M1, M2`` are fixed by
``psi = 0`` on ``|x| = 2 r0`` and ``psi = -2`` on ``|x| = r0``.  A radius ``r0`` is
admissible when

    n alpha lam / (2 (2^alpha - 1)) * r0^-2  >=  phi(2^(alpha+3) alpha / r0),

checked in logarithms.  Verification evaluates the minimal Pucci operator of
the exact Hessian against ``phi(|D psi|)`` on a polar grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .drift import DriftFunction
from .errors import InfeasibleError
from .pucci import EllipticityPair, sym2_eigenvalues

R0_MIN = 1e-12


def barrier_alpha(n: int, e: EllipticityPair) -> float:
    """``max(2 (n-1) Lam / lam, 1)``."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return max(2.0 * (n - 1) * e.Lam / e.lam, 1.0)


@dataclass
class BarrierSpec:
    """Parameters of the radial barrier; ``M1`` and ``M2`` follow from ``r0``."""

    alpha: float
    r0: float
    n: int
    e: EllipticityPair
    M1: float = field(init=False)
    M2: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.r0 <= 1:
            raise ValueError("r0 must lie in (0, 1]")
        a = self.alpha
        self.M2 = 2.0 * self.r0**a / (1.0 - 2.0**-a)
        self.M1 = self.M2 * (2.0 * self.r0) ** -a

    def value(self, rho):
        return self.M1 - self.M2 * np.asarray(rho, dtype=float) ** -self.alpha

    def grad_norm(self, rho):
        return self.alpha * self.M2 * np.asarray(rho, dtype=float) ** (-self.alpha - 1)

    def hessian_eigenvalues(self, rho):
        """``(kappa, -(alpha + 1) kappa)`` with ``kappa = alpha M2 rho^(-alpha-2)``.

        ``kappa`` is the tangential eigenvalue (multiplicity ``n - 1``), the other
        one is radial.
        """
        kappa = self.alpha * self.M2 * np.asarray(rho, dtype=float) ** (-self.alpha - 2)
        return kappa, -(self.alpha + 1.0) * kappa

    def hessian(self, x):
        """``alpha M2 |x|^(-alpha-2) (I - (alpha + 2) x_hat x_hat^T)`` for points ``x`` of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        rho = np.linalg.norm(x, axis=-1)
        xh = x / rho[..., None]
        kappa = self.alpha * self.M2 * rho ** (-self.alpha - 2)
        eye = np.eye(x.shape[-1])
        return kappa[..., None, None] * (eye - (self.alpha + 2.0) * xh[..., :, None] * xh[..., None, :])

    def to_dict(self):
        return {"alpha": self.alpha, "r0": self.r0, "M1": self.M1, "M2": self.M2, "n": self.n,
                **self.e.to_config()}


def feasibility_margin(log_r0, f: DriftFunction, n: int, e: EllipticityPair) -> float:
    """``ln(lhs) - ln(rhs)`` of the admissibility inequality at ``r0 = exp(log_r0)``."""
    a = barrier_alpha(n, e)
    log_lhs = math.log(n * a * e.lam / (2.0 * (2.0**a - 1.0))) - 2.0 * log_r0
    s = (a + 3.0) * math.log(2.0) + math.log(a) - log_r0
    return log_lhs - float(f.log_phi(s))


def find_r0(f: DriftFunction, n: int, e: EllipticityPair, rel_width: float = 1e-9) -> BarrierSpec:
    """Largest admissible ``r0`` in ``[1e-12, 1]``.

    Feasible radii form an interval ``(0, r0]`` for admissible drifts, so the
    boundary is located as the root of :func:`feasibility_margin` in ``ln r0``
    (Brent's method) and then nudged onto the feasible side.

    Raises
    ------
    InfeasibleError
        If even ``r0 = 1e-12`` violates the inequality.
    """
    g = lambda lr: feasibility_margin(lr, f, n, e)  # noqa: E731
    lo, hi = math.log(R0_MIN), 0.0
    alpha = barrier_alpha(n, e)
    if g(hi) >= 0:
        return BarrierSpec(alpha, 1.0, n, e)
    if g(lo) < 0:
        raise InfeasibleError("no admissible r0 >= 1e-12: the drift grows too fast")
    root = brentq(g, lo, hi, xtol=rel_width, rtol=4 * np.finfo(float).eps)
    while g(root) < 0:
        root -= rel_width
    return BarrierSpec(alpha, math.exp(root), n, e)


@dataclass
class BarrierReport:
    passed: bool
    min_residual: float
    worst_node: tuple
    worst_radius: float
    outer_value_err: float
    inner_value_err: float
    eig_max_err: float
    L1_value: float
    grad_min: float
    L1_gradient: float
    L1: float
    extension_constant: float
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def _pucci_minus_eigs(eigs, e):
    pos = np.where(eigs > 0, eigs, 0.0).sum(axis=0)
    neg = np.where(eigs < 0, eigs, 0.0).sum(axis=0)
    return -e.Lam * pos - e.lam * neg


def _extension_constant(spec: BarrierSpec, f: DriftFunction, samples=256) -> float:
    """Deficit ``max(phi(|D g|) - P-(D^2 g), 0)`` of a C^2 radial extension into ``B_{r0/2}``.

    The extension is ``g(rho) = A + B rho^2 + C rho^4``, matching value, slope and
    curvature of the barrier at ``rho = r0/2``.
    """
    r1 = spec.r0 / 2
    a = spec.alpha
    d1 = a * spec.M2 * r1 ** (-a - 1)
    d2 = -a * (a + 1) * spec.M2 * r1 ** (-a - 2)
    C = (d2 - d1 / r1) / (8 * r1**2)
    B = (d1 / r1 - 4 * C * r1**2) / 2
    rho = np.linspace(0.0, r1, samples)
    gp = 2 * B * rho + 4 * C * rho**3
    gpp = 2 * B + 12 * C * rho**2
    tang = 2 * B + 4 * C * rho**2  # g'/rho, finite at the origin
    eigs = np.stack([tang] * (spec.n - 1) + [gpp]) if spec.n > 1 else gpp[None]
    deficit = f.phi(np.abs(gp)) - _pucci_minus_eigs(eigs, spec.e)
    return float(max(0.0, np.max(deficit)))


def verify_barrier(spec: BarrierSpec, f: DriftFunction, radial: int = 64, angular: int = 128,
                   tol: float = 1e-12) -> BarrierReport:
    """Check ``P-(D^2 psi) - phi(|D psi|) >= -tol`` on a polar grid of the annulus.

    Also checks the boundary values, compares the closed-form Hessian
    eigenvalues with a numerical eigendecomposition, and reports both halves of
    the constant ``L1`` (``max |psi|`` and ``1 / min |D psi|``) with their max.
    """
    rho = np.geomspace(spec.r0 / 2, 2 * spec.r0, radial)
    theta = np.linspace(0, 2 * np.pi, angular, endpoint=False)
    P, T = np.meshgrid(rho, theta, indexing="ij")
    n = spec.n
    pts = np.zeros(P.shape + (max(n, 1),))
    pts[..., 0] = P * np.cos(T)
    if n >= 2:
        pts[..., 1] = P * np.sin(T)
    else:
        pts[..., 0] = P * np.sign(np.cos(T) + 0.5)
    H = spec.hessian(pts)
    if n == 2:
        hi, lo = sym2_eigenvalues(H[..., 0, 0], H[..., 0, 1], H[..., 1, 1])
        eigs = np.stack([hi, lo])
    else:
        eigs = np.moveaxis(np.linalg.eigvalsh(H), -1, 0)
    numeric = np.sort(np.moveaxis(np.linalg.eigvalsh(H), -1, 0), axis=0)
    kappa, radial_eig = spec.hessian_eigenvalues(P)
    closed = np.sort(np.stack([radial_eig] + [kappa] * (n - 1)), axis=0)
    eig_err = float(np.max(np.abs(numeric - closed) / np.abs(closed)))

    res = _pucci_minus_eigs(eigs, spec.e) - f.phi(spec.grad_norm(P))
    idx = np.unravel_index(int(np.argmin(res)), res.shape)
    min_res = float(res[idx])

    outer = float(np.max(np.abs(spec.value(2 * spec.r0))))
    inner = float(abs(spec.value(spec.r0) + 2.0))
    L1_value = float(np.max(np.abs(spec.value(rho))))
    grad_min = float(np.min(spec.grad_norm(rho)))
    L1_grad = 1.0 / grad_min
    notes = []
    passed = min_res >= -tol and outer <= 1e-12 and inner <= 1e-12
    if min_res < -tol:
        notes.append(f"residual {min_res:.6g} at radius {P[idx]:.6g}")
    return BarrierReport(passed, min_res, tuple(int(i) for i in idx), float(P[idx]), outer, inner, eig_err,
                         L1_value, grad_min, L1_grad, max(L1_value, L1_grad),
                         _extension_constant(spec, f), notes)
