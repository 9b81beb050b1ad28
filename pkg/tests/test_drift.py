import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genharnack import drift as dr
from genharnack.errors import DomainError


def test_eval_phi_log_linear_at_one():
    assert dr.eval_phi(dr.log_linear(1.0), 1.0) == pytest.approx(1.0, rel=1e-15)


def test_eval_phi_log_linear_at_e():
    assert dr.eval_phi(dr.log_linear(1.0), math.e) == pytest.approx(2 * math.e, rel=1e-14)


def test_eval_phi_homogeneous():
    assert dr.eval_phi(dr.homogeneous(), 7.5) == 7.5


def test_eval_phi_rejects_nonpositive():
    with pytest.raises(DomainError):
        dr.eval_phi(dr.homogeneous(), 0.0)


@given(st.floats(-300.0, 300.0))
def test_log_phi_matches_phi(s):
    f = dr.log_linear(1.0)
    assert float(f.log_phi(s)) == pytest.approx(s + math.log(1.0 + abs(s)), rel=1e-13, abs=1e-13)


@given(st.floats(-50.0, 50.0).filter(lambda s: abs(s) > 1e-3))
def test_log_slope_log_linear(s):
    # t eta'(t) = sign(ln t) for eta = 1 + |ln t|
    assert float(dr.log_linear(1.0).log_slope(s)) == pytest.approx(math.copysign(1.0, s), rel=1e-9)


def test_log_slope_matches_finite_difference_for_custom():
    f = dr.custom([[0.1, 1.0], [1.0, 1.5], [10.0, 3.0], [100.0, 4.0]])
    s = np.linspace(-2.0, 4.0, 13)
    fd = (f.eta_log(s + 1e-6) - f.eta_log(s - 1e-6)) / 2e-6
    assert np.allclose(f.log_slope(s), fd, atol=1e-5)


def test_custom_constant_table():
    f = dr.custom([[1e-3, 2.0], [1e3, 2.0]])
    assert float(f.eta(5.0)) == 2.0
    assert float(f.phi(3.0)) == 6.0


@pytest.mark.parametrize("cfg", [{"kind": "homogeneous"}, {"kind": "log_linear", "c": 2.5},
                                 {"kind": "power", "alpha": 0.5}, {"kind": "log_iterated"},
                                 {"kind": "custom", "table": [[0.5, 1.0], [2.0, 3.0]]}])
def test_config_round_trip(cfg):
    f = dr.from_config(cfg)
    g = dr.from_config(f.to_config())
    s = np.linspace(-5, 5, 11)
    assert np.array_equal(f.eta_log(s), g.eta_log(s))
    assert g.to_config() == f.to_config()


@pytest.mark.parametrize("cfg", [{"kind": "nope"}, {"kind": "power"}, {"kind": "homogeneous", "c": 1}, "log_linear"])
def test_config_rejects_bad_input(cfg):
    with pytest.raises(ValueError):
        dr.from_config(cfg)


@pytest.mark.parametrize("f,verdict", [(dr.log_linear(1.0), dr.HOLDS), (dr.homogeneous(), dr.HOLDS),
                                       (dr.power(0.5), dr.FAILS)])
def test_p1(f, verdict):
    assert dr.check_p1(f).verdict == verdict


def test_p1_log_iterated_fails_below_one():
    # phi'(1-) = eta(1) + t eta'(t) at t -> 1- = 1 - 2 < 0 for this drift
    rep = dr.check_p1(dr.log_iterated())
    assert rep.verdict == dr.FAILS


def test_p1_grid_must_be_increasing():
    with pytest.raises(ValueError):
        dr.check_p1(dr.homogeneous(), grid=np.logspace(8, -8, 100))


def test_p2_log_linear_sample_value():
    rep = dr.check_p2(dr.log_linear(1.0), t_values=[math.exp(100.0)])
    (_, q), = rep.samples
    assert q == pytest.approx(math.log(101.0) / 101.0, rel=1e-4)
    assert rep.verdict == dr.HOLDS


def test_p2_homogeneous_zero():
    rep = dr.check_p2(dr.homogeneous())
    assert rep.verdict == dr.HOLDS
    assert all(q == 0 for _, q in rep.samples)


def test_p2_power_fails():
    assert dr.check_p2(dr.power(1.1)).verdict == dr.FAILS


@pytest.mark.parametrize("f", [dr.log_linear(1.0), dr.homogeneous()])
def test_p3_witness_at_most_one(f):
    rep = dr.check_p3(f)
    assert rep.verdict == dr.HOLDS
    assert rep.witness_constant <= 1.0 + 1e-12


def test_osgood_shells_homogeneous_are_ln2():
    shells = dr.osgood_shells(dr.homogeneous(), 1.0, 30)
    assert np.allclose(shells, math.log(2.0), rtol=1e-12)


def test_osgood_shells_log_linear_antiderivative():
    # int dt / ((1 - ln t) t) = -ln(1 - ln t) for t < 1
    shells = dr.osgood_shells(dr.log_linear(1.0), 0.5, 20)
    j = np.arange(20)
    hi = math.log(0.5) - j * math.log(2.0)
    lo = hi - math.log(2.0)
    exact = np.log1p(-lo) - np.log1p(-hi)
    assert np.allclose(shells, exact, rtol=1e-10)


def test_osgood_shells_sqrt_sum_to_two_sqrt_eps():
    eps = 0.1
    shells = dr.osgood_shells(dr.power(0.5), eps, 60)
    assert shells.sum() == pytest.approx(2 * math.sqrt(eps), rel=1e-9)


@pytest.mark.parametrize("eps", [1.0, 0.1, 0.01])
@pytest.mark.parametrize("f,verdict", [(dr.homogeneous(), dr.HOLDS), (dr.log_linear(1.0), dr.HOLDS),
                                       (dr.power(0.5), dr.FAILS)])
def test_osgood_classifier(f, verdict, eps):
    assert dr.check_osgood(f, eps).verdict == verdict


def test_osgood_rejects_bad_eps():
    with pytest.raises(ValueError):
        dr.check_osgood(dr.homogeneous(), 2.0)


def _rv(f):
    return {r.property_id: r for r in dr.rv_properties(f)}


def test_rv_homogeneous_all_hold_with_unit_constants():
    rv = _rv(dr.homogeneous())
    assert all(r.verdict == dr.HOLDS for r in rv.values())
    assert rv["rv_iii"].witness_constant == pytest.approx(1.0)
    assert rv["rv_iv"].witness_constant == pytest.approx(1.0)


def test_rv_log_linear():
    rv = _rv(dr.log_linear(1.0))
    assert all(r.verdict == dr.HOLDS for r in rv.values())
    assert rv["rv_iii"].witness_constant == pytest.approx(1.0 + 1.0 / math.e, rel=1e-4)


def test_rv_i_sample_value_log_linear():
    f = dr.log_linear(1.0)
    t = 1e8
    val = float(f.eta_log(math.log(2 * t)) / f.eta_log(math.log(t))) - 1.0
    assert val == pytest.approx(math.log(2.0) / (1.0 + math.log(1e8)), rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_rv_power_fails(alpha):
    rv = _rv(dr.power(alpha))
    assert rv["rv_ii"].verdict == dr.FAILS
    assert rv["rv_iii"].verdict == dr.FAILS


def test_converse_iii():
    assert dr.check_converse_iii(dr.homogeneous()).witness_constant == pytest.approx(1.0)
    rep = dr.check_converse_iii(dr.log_linear(1.0))
    assert rep.verdict == dr.HOLDS
    assert 1.0 <= rep.witness_constant < 2.0


@settings(max_examples=50)
@given(st.floats(-40.0, 40.0), st.floats(-40.0, 40.0))
def test_log_linear_submultiplicative(a, b):
    f = dr.log_linear(1.0)
    assert float(f.eta_log(a + b)) <= float(f.eta_log(a)) * float(f.eta_log(b)) * (1 + 1e-15)
