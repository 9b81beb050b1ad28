import math

import numpy as np
import pytest
from scipy.optimize import bisect

from genharnack import drift as dr
from genharnack.barrier import BarrierSpec, barrier_alpha, feasibility_margin, find_r0, verify_barrier
from genharnack.errors import InfeasibleError
from genharnack.pucci import EllipticityPair

ONE = EllipticityPair(1.0, 1.0)


@pytest.mark.parametrize("n,e,alpha", [(2, ONE, 2.0), (1, EllipticityPair(0.3, 5.0), 1.0),
                                       (3, EllipticityPair(1.0, 2.0), 8.0)])
def test_alpha(n, e, alpha):
    assert barrier_alpha(n, e) == alpha


def test_homogeneous_radius():
    # (2/3) r0^-2 >= 64 r0^-1 gives r0 = 1/96
    spec = find_r0(dr.homogeneous(), 2, ONE)
    assert spec.r0 == pytest.approx(1.0 / 96.0, rel=1e-6)
    assert feasibility_margin(math.log(spec.r0), dr.homogeneous(), 2, ONE) >= 0


def test_log_linear_radius_against_bisection_oracle():
    # independent oracle: 1/(96 r0) >= 1 + |ln(64/r0)| in plain arithmetic
    def g(r0):
        return 1.0 / (96.0 * r0) - (1.0 + abs(math.log(64.0 / r0)))

    root = bisect(g, 1e-6, 1e-2, xtol=1e-16)
    spec = find_r0(dr.log_linear(1.0), 2, ONE)
    assert 8e-4 <= spec.r0 <= 9e-4
    assert spec.r0 == pytest.approx(root, rel=1e-8)
    assert feasibility_margin(math.log(spec.r0), dr.log_linear(1.0), 2, ONE) >= 0


def test_superlinear_power_is_infeasible():
    with pytest.raises(InfeasibleError):
        find_r0(dr.power(2.0), 2, ONE)


def test_boundary_values():
    spec = find_r0(dr.homogeneous(), 2, ONE)
    assert spec.value(2 * spec.r0) == pytest.approx(0.0, abs=1e-15)
    assert spec.value(spec.r0) == pytest.approx(-2.0, rel=1e-14)


def test_hessian_eigenvalues_against_finite_differences():
    spec = BarrierSpec(2.5, 0.3, 3, EllipticityPair(0.8, 1.0))
    x = np.array([0.2, -0.15, 0.1])
    h = 1e-4
    psi = lambda y: float(spec.value(np.linalg.norm(y)))  # noqa: E731
    H = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            ei, ej = np.eye(3)[i] * h, np.eye(3)[j] * h
            H[i, j] = (psi(x + ei + ej) - psi(x + ei - ej) - psi(x - ei + ej) + psi(x - ei - ej)) / (4 * h * h)
    assert np.allclose(H, spec.hessian(x), rtol=1e-5, atol=1e-5)
    kappa, radial = spec.hessian_eigenvalues(np.linalg.norm(x))
    assert np.allclose(np.sort(np.linalg.eigvalsh(H)), np.sort([radial, kappa, kappa]), rtol=1e-5)


@pytest.mark.parametrize("f", [dr.homogeneous(), dr.log_linear(1.0)])
def test_verify_at_feasible_radius(f):
    spec = find_r0(f, 2, ONE)
    rep = verify_barrier(spec, f)
    assert rep.passed
    assert rep.min_residual >= -1e-12
    assert rep.eig_max_err <= 1e-12
    assert rep.outer_value_err <= 1e-12 and rep.inner_value_err <= 1e-12
    assert rep.L1 == max(rep.L1_value, rep.L1_gradient)


def test_verify_three_dimensions():
    e = EllipticityPair(1.0, 1.5)
    spec = find_r0(dr.log_linear(1.0), 3, e)
    assert verify_barrier(spec, dr.log_linear(1.0), radial=24, angular=32).passed


def test_verify_fails_at_inner_annulus_for_large_radius():
    f = dr.log_linear(1.0)
    spec = BarrierSpec(barrier_alpha(2, ONE), 1.0, 2, ONE)
    rep = verify_barrier(spec, f)
    assert not rep.passed
    assert rep.worst_radius == pytest.approx(spec.r0 / 2)
    assert rep.notes


def test_condition_is_sufficient_not_necessary():
    # doubling the feasible radius violates the admissibility inequality,
    # yet the barrier inequality itself still holds on the annulus
    f = dr.log_linear(1.0)
    spec = find_r0(f, 2, ONE)
    doubled = BarrierSpec(spec.alpha, 2 * spec.r0, 2, ONE)
    assert feasibility_margin(math.log(doubled.r0), f, 2, ONE) < 0
    assert verify_barrier(doubled, f).passed


def test_radius_bounds():
    with pytest.raises(ValueError):
        BarrierSpec(2.0, 1.5, 2, ONE)


def test_extension_constant_finite():
    spec = find_r0(dr.homogeneous(), 2, ONE)
    rep = verify_barrier(spec, dr.homogeneous())
    assert math.isfinite(rep.extension_constant) and rep.extension_constant >= 0
