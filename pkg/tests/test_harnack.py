import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genharnack import drift as dr
from genharnack.errors import DomainError
from genharnack.grid import GridFunction
from genharnack.harnack import (classical_ratio, harnack_integral, holder_oscillation, rescaled_integral_identity,
                                sum_vs_integral)

E = math.e
log_ms = st.floats(-40.0, 40.0)
gaps = st.floats(0.0, 60.0)
radii = st.floats(1e-3, 1.0)


def test_homogeneous_unit_example():
    rep = harnack_integral(dr.homogeneous(), 1.0, E, 1.0)
    assert rep.integral_value == pytest.approx(0.5, rel=1e-12)
    assert rep.bound_status == "within_bound"


def test_log_linear_phi_denominator_example():
    # int dt / phi(t) from exp(-e^3) to exp(-e) with antiderivative -ln(1 - ln t)
    rep = harnack_integral(dr.log_linear(1.0), log_m=-E**3, log_M=-E, denominator="phi")
    assert rep.integral_value == pytest.approx(math.log((1 + E**3) / (1 + E)), rel=1e-12)
    assert rep.integral_value == pytest.approx(1.7353256640555, rel=1e-12)


def test_log_linear_full_denominator_example():
    # with the extra "+ t" the integrand is 1/(2 - ln t) for t < 1
    rep = harnack_integral(dr.log_linear(1.0), log_m=-E**3, log_M=-E)
    assert rep.integral_value == pytest.approx(math.log((2 + E**3) / (2 + E)), rel=1e-10)


def test_empty_interval():
    rep = harnack_integral(dr.log_linear(1.0), 5.0, 5.0, 0.3)
    assert rep.integral_value == 0.0


@pytest.mark.parametrize("kwargs", [dict(m=2.0, M=1.0), dict(m=0.0, M=1.0), dict(m=1.0, M=2.0, R=1.5)])
def test_invalid_inputs(kwargs):
    with pytest.raises(DomainError):
        harnack_integral(dr.homogeneous(), **kwargs)


def test_closed_form_needs_phi_and_unit_radius():
    with pytest.raises(ValueError):
        harnack_integral(dr.log_linear(1.0), 1.0, 2.0, 0.5, denominator="phi", method="closed_form")


def test_report_serializes_logs():
    d = harnack_integral(dr.homogeneous(), log_m=-1000.0, log_M=-999.0).to_dict()
    assert d["m"] == {"log": -1000.0}
    assert d["M"] == {"log": -999.0}


@settings(max_examples=1000, deadline=None)
@given(log_ms, gaps, radii, st.sampled_from(["homogeneous", "log_linear"]))
def test_functional_bound(lm, gap, R, kind):
    f = dr.from_config({"kind": kind})
    rep = harnack_integral(f, log_m=lm, log_M=lm + gap, R=R)
    assert rep.integral_value <= gap / (1 + R) * (1 + 1e-8) + 1e-14


@settings(max_examples=200, deadline=None)
@given(log_ms, gaps)
def test_closed_form_matches_quadrature(lm, gap):
    f = dr.log_linear(1.0)
    a = harnack_integral(f, log_m=lm, log_M=lm + gap, denominator="phi", method="closed_form").integral_value
    b = harnack_integral(f, log_m=lm, log_M=lm + gap, denominator="phi", method="quadrature").integral_value
    assert a == pytest.approx(b, rel=1e-8, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(log_ms, gaps, radii, st.sampled_from(["homogeneous", "log_linear", "log_iterated"]))
def test_rescaled_identity(lm, gap, R, kind):
    a, b = rescaled_integral_identity(dr.from_config({"kind": kind}), log_m=lm, log_M=lm + gap, R=R)
    assert a == pytest.approx(b, rel=1e-8, abs=1e-14)


def test_rescaled_identity_example():
    a, b = rescaled_integral_identity(dr.homogeneous(), 1.0, 2.0, 0.5)
    assert a == pytest.approx(math.log(2) / 1.5, rel=1e-10)
    assert b == pytest.approx(math.log(2) / 1.5, rel=1e-10)


def test_rescaled_identity_degenerate():
    assert rescaled_integral_identity(dr.log_linear(1.0), 3.0, 3.0, 0.5) == (0.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(log_ms, st.floats(0.1, 40.0), radii, radii, st.sampled_from(["homogeneous", "log_linear"]))
def test_functional_nonincreasing_in_radius(lm, gap, R1, R2, kind):
    # an empirical property of the two built-in drifts: R eta(t/R) grows with R
    f = dr.from_config({"kind": kind})
    lo, hi = sorted((R1, R2))
    a = harnack_integral(f, log_m=lm, log_M=lm + gap, R=lo).integral_value
    b = harnack_integral(f, log_m=lm, log_M=lm + gap, R=hi).integral_value
    assert b <= a * (1 + 1e-8)


def test_classical_ratio_examples():
    assert classical_ratio(1.0, E**2) == pytest.approx(2.0)
    assert classical_ratio(3.0, 3.0) == 0.0
    k = 2
    val = classical_ratio(log_m=-math.exp(k + 1), log_M=-math.exp(k - 1))
    assert val == pytest.approx(E**2 * (E - 1 / E), rel=1e-13)
    assert val == pytest.approx(17.36725509, rel=1e-9)


def test_classical_ratio_of_zero_is_infinite():
    assert classical_ratio(0.0, 1.0) == math.inf


def _left_riemann(f, lm, L, R, k, refine):
    # left-endpoint sum of the integrand dt/(R phi(t) + t) on each block split into `refine` equal pieces
    total = 0.0
    for j in range(k):
        a = L**j * math.exp(lm)
        b = L * a
        t = np.linspace(a, b, refine + 1)[:-1]
        total += float(np.sum((b - a) / refine / (R * f.phi(t) + t)))
    return total


@pytest.mark.parametrize("f", [dr.homogeneous(), dr.log_linear(1.0)])
def test_sum_vs_integral_block_bound(f):
    res = sum_vs_integral(f, 1.0, 6.0, 1.0, 3)
    # the coarsest left Riemann sum is the block bound; refinement decreases to the integral
    assert _left_riemann(f, 0.0, 6.0, 1.0, 3, 1) == pytest.approx(res.block_bound, rel=1e-12)
    fine = _left_riemann(f, 0.0, 6.0, 1.0, 3, 20000)
    assert res.lhs <= fine <= res.block_bound
    assert fine == pytest.approx(res.lhs, rel=1e-3)


def test_sum_vs_integral_homogeneous_values():
    res = sum_vs_integral(dr.homogeneous(), 1.0, 6.0, 1.0, 1)
    assert res.lhs == pytest.approx(math.log(6) / 2, rel=1e-10)
    assert res.rhs == pytest.approx(0.5, rel=1e-14)
    # the single-factor form L * sum a_j is not an upper bound
    assert res.lhs > res.rhs


def test_sum_vs_integral_needs_positive_k():
    with pytest.raises(ValueError):
        sum_vs_integral(dr.homogeneous(), 1.0, 6.0, 1.0, 0)


def test_holder_linear():
    u = GridFunction.from_function(lambda x: x, -1.0, 1.0, 2001)
    rep = holder_oscillation(u, center=(0.0,), R0=1.0, levels=3)
    assert np.allclose(rep.osc, 2 * rep.radii, rtol=1e-12)
    assert rep.alpha == pytest.approx(1.0, abs=1e-10)


def test_holder_sqrt():
    u = GridFunction.from_function(lambda x: np.sqrt(np.abs(x)), -1.0, 1.0, 4001)
    assert holder_oscillation(u, center=(0.0,)).alpha == pytest.approx(0.5, abs=0.01)


def test_holder_constant():
    u = GridFunction.from_function(lambda x: np.full_like(x, 3.0), -1.0, 1.0, 101)
    rep = holder_oscillation(u)
    assert rep.constant_input
    assert math.isnan(rep.alpha)
