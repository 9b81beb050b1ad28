import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from genharnack import drift as dr
from genharnack.errors import DomainError
from genharnack.grid import GridFunction
from genharnack.levelsets import (DEFAULT_CONSTANTS, LevelSetDiagnostics, a_sequence, a_sequence_forms, ball_volume,
                                  caffarelli_radii, decay_envelopes, delta_neighborhood, isoperimetric_check,
                                  isoperimetric_suite, level_measures, level_set_diagnostics, relative_boundary)


def test_a_sequence_homogeneous_constant():
    assert np.allclose(a_sequence(dr.homogeneous(), 1.0, 6.0, 1.0, 10), 1.0 / 12.0, rtol=1e-15)


def test_a_sequence_log_linear_values():
    a = a_sequence(dr.log_linear(1.0), 1.0, 6.0, 1.0, 2)
    assert a[0] == pytest.approx(1.0 / 12.0, rel=1e-15)
    assert a[1] == pytest.approx((1 / 6) / (2 + math.log(6)), rel=1e-14)
    assert a[1] == pytest.approx(0.04395, abs=5e-6)


@settings(max_examples=200)
@given(st.floats(-200.0, 200.0), st.floats(1.01, 50.0), st.floats(1e-3, 1.0),
       st.sampled_from(["homogeneous", "log_linear", "log_iterated"]))
def test_a_sequence_forms_agree(lm, L, R, kind):
    direct, reduced = a_sequence_forms(dr.from_config({"kind": kind}), L=L, R=R, k_max=64, log_m=lm)
    k = np.arange(65)
    slack = 1e-12 + 8 * np.finfo(float).eps * (np.abs(k * math.log(L) + lm) + 1)
    assert np.all(np.abs(direct - reduced) <= slack * reduced)


@settings(max_examples=200)
@given(st.floats(-50.0, 50.0), st.floats(1.01, 50.0), st.floats(1e-3, 1.0), st.sampled_from(["homogeneous",
                                                                                             "log_linear"]))
def test_a_ratio_bounded_by_L(lm, L, R, kind):
    a = a_sequence(dr.from_config({"kind": kind}), L=L, R=R, k_max=64, log_m=lm)
    assert np.all(a[1:] / a[:-1] <= L)


def test_a_sequence_argument_checks():
    with pytest.raises(ValueError):
        a_sequence(dr.homogeneous(), 1.0, 1.0)
    with pytest.raises(ValueError):
        a_sequence(dr.homogeneous(), 1.0, 6.0, 1.0, 0)


def test_level_measure_of_large_constant_is_full_ball():
    u = GridFunction.from_function(lambda x: np.full_like(x, 10.0), -2.0, 2.0, 4001)
    meas = level_measures(u, m=1.0, L=6.0, k_max=2)
    full = 2 * 5 / 3
    assert meas[1] == pytest.approx(full, abs=2 * u.h)
    assert meas[2] == 0.0


def test_level_measure_of_abs():
    u = GridFunction.from_function(np.abs, -2.0, 2.0, 4001)
    meas = level_measures(u, m=0.1, L=2.0, k_max=4)
    for k, val in enumerate(meas):
        level = 0.1 * 2**k
        assert val == pytest.approx(2 * (5 / 3 - level), abs=2 * u.h)


@settings(max_examples=50)
@given(arrays(float, (15, 15), elements=st.floats(1e-3, 1e3)), st.floats(1.5, 10.0))
def test_level_sets_nested(vals, L):
    u = GridFunction(vals, 0.25, origin=(-1.75, -1.75))
    meas = level_measures(u, L=L, k_max=8)
    assert np.all(np.diff(meas) <= 0)


def test_diagnostics_need_positive_base():
    u = GridFunction.from_function(np.abs, -2.0, 2.0, 41)
    with pytest.raises(DomainError):
        level_set_diagnostics(u, dr.homogeneous())


def test_diagnostics_summary_and_rows():
    u = GridFunction.from_function(lambda X, Y: 0.1 + X**2 + Y**2, -2.0, 2.0, 81, dim=2)
    diag = level_set_diagnostics(u, dr.log_linear(1.0), L=2.0, k_max=6)
    s = diag.summary()
    assert s["nested"] and s["ratio_bound_holds"]
    header, rows = diag.to_rows()
    assert header[:4] == ["k", "a_k", "A_k", "partial_sum"]
    assert len(rows) == 7


def _flat_diag(n=1, K=5):
    return LevelSetDiagnostics(L=6.0, log_m=0.0, R=1.0, n=n, a=np.full(K, 1 / 12), A_meas=np.zeros(K))


def test_first_envelope_example():
    diag = _flat_diag()
    env = decay_envelopes(diag, {"c": 1.0})
    assert env["start"][3] == pytest.approx(10 / 3 - 0.25, rel=1e-14)
    assert ball_volume(1, 5 / 3) == pytest.approx(10 / 3)


def test_second_envelope_at_k0_is_empty_sum():
    for n in (1, 2, 3):
        env = decay_envelopes(_flat_diag(n), {"k0": 2})
        assert env["end"][2] == pytest.approx(1 / n**n)
        assert np.isnan(env["end"][1])


def test_power_envelope_at_k1():
    env = decay_envelopes(_flat_diag(2), {"k1": 1, "c_eps": 3.0})
    assert env["power"][1] == pytest.approx(3.0 * (1 / 12) ** 2)


def test_default_constants_are_complete():
    env = decay_envelopes(_flat_diag(), {})
    assert set(env) == {"start", "end", "geometric", "power"}
    assert {"L", "L0", "eps", "sigma", "c0", "c_eps", "c"} <= set(DEFAULT_CONSTANTS)


def test_caffarelli_example():
    rep = caffarelli_radii(1.0, L0=2.0, sigma=1.0, eps=2.0, n=2)
    assert rep.nu == pytest.approx(4 / 3)
    assert np.allclose(rep.radii[:5], 0.75 ** np.arange(1, 6))
    assert np.all(np.diff(rep.radii) < 0)
    # the tail starting at r_l is 4 r_l; the first one below 1/3 is l = 8
    assert rep.l0 == 8
    assert rep.tails_closed[7] > 1 / 3 >= rep.tails_closed[8]
    assert rep.max_rel_gap <= 1e-12


@settings(max_examples=50)
@given(st.floats(1e-3, 1.0), st.floats(0.6, 10.0), st.floats(0.05, 2.0), st.integers(1, 3))
def test_caffarelli_tail_identity(a, L0, eps, n):
    rep = caffarelli_radii(a, L0=L0, eps=eps, n=n, target=math.inf)
    assert rep.max_rel_gap <= 1e-12


def test_boundary_and_neighbourhood_of_empty_set():
    E = np.zeros((20, 20), dtype=bool)
    assert not relative_boundary(E).any()
    assert not delta_neighborhood(E, 0.1, 0.01).any()


def test_strip_neighbourhood_width():
    h = 0.01
    E = np.zeros((100, 100), dtype=bool)
    E[:50] = True
    nb = delta_neighborhood(E, 2 * h, h)
    rows = np.nonzero(nb.any(axis=1))[0]
    # rows within distance < 2h of the boundary row 49 on either side
    assert set(rows) == {48, 49, 50}


def _disk_grid(h):
    x = np.arange(-1 + h / 2, 1, h)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return X, Y, X**2 + Y**2 < 1.0


def test_disk_band_area():
    delta = 0.1
    h = delta / 8
    X, Y, domain = _disk_grid(h)
    rho = 0.5
    E = X**2 + Y**2 < rho**2
    area = np.count_nonzero(delta_neighborhood(E, delta, h, domain)) * h * h
    assert area == pytest.approx(math.pi * ((rho + delta) ** 2 - (rho - delta) ** 2), rel=0.05)


def test_disk_isoperimetric_ratio():
    h = 0.1 / 16
    X, Y, domain = _disk_grid(h)
    E = X**2 + Y**2 < 0.25
    rep = isoperimetric_check(E, domain, h, deltas=(0.05, 0.1, 0.2))
    assert rep.lhs[1] == pytest.approx(math.pi * (0.25 - 0.16), rel=0.05)
    assert rep.rhs_min[1] == pytest.approx(0.1 * math.sqrt(math.pi / 4), rel=0.01)
    assert rep.ratios[1] == pytest.approx(3.19, rel=0.05)
    assert max(rep.ratios) / min(rep.ratios) <= 2.0


def test_disk_band_converges_under_refinement():
    exact = math.pi * (0.25 - 0.16)
    errs = []
    for h in (0.1 / 8, 0.1 / 16, 0.1 / 32):
        X, Y, domain = _disk_grid(h)
        rep = isoperimetric_check(X**2 + Y**2 < 0.25, domain, h, deltas=(0.1,))
        errs.append(abs(rep.lhs[0] - exact))
    assert errs[0] > errs[1] > errs[2]


def test_whole_ball_is_degenerate():
    h = 0.05
    _, _, domain = _disk_grid(h)
    rep = isoperimetric_check(domain, domain, h)
    assert rep.degenerate
    assert math.isnan(rep.constant)


def test_isoperimetric_suite_small():
    lo, constants, h = isoperimetric_suite(count=10, seed=3)
    assert h == pytest.approx(0.05 / 8)
    assert len(constants) == 10
    assert lo > 0


def test_extremal_samples_have_nested_level_sets():
    from genharnack.extremal1d import build_extremal

    u = build_extremal(dr.log_linear(1.0), 3.0, nodes=801).to_grid()
    meas = level_measures(u, L=2.0, k_max=12)
    assert np.all(np.diff(meas) <= 0)
    assert meas[0] > 0


def test_sum_vs_integral_uses_the_same_scaling_factors():
    from genharnack.harnack import sum_vs_integral

    f = dr.log_linear(1.0)
    res = sum_vs_integral(f, 0.3, 6.0, 0.5, 5)
    a = a_sequence(f, 0.3, 6.0, 0.5, 5)[:5]
    assert res.rhs == 6.0 * math.fsum(a)
