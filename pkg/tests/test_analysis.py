import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from epikit import (
    ConvergenceError,
    DomainError,
    FinalSizeMethod,
    ModelParams,
    NoEpidemicError,
    PeakOfI,
    SCrossesValue,
    fastest_new_infections,
    final_size,
    final_size_sweep,
    i_of_s,
    i_rate_extrema,
    locate_event,
    peak_values,
    r_star_extremum_check,
    tau_of_s,
)
from epikit.analysis import bisect, fixed_point_iterates


def brentq_final_size(r0, s0):
    # with s0 = 1, R = 0 is a spurious root; start the bracket past it
    lo = 1e-300 if s0 < 1 else 0.5 * (1 - 1 / r0)
    return brentq(lambda r: 1 - r - s0 * math.exp(-r0 * r), lo, 1.0, xtol=1e-16, rtol=1e-15)


# --- bisection helper ----------------------------------------------------------


def test_bisect_finds_sqrt2():
    root, n = bisect(lambda x: x * x - 2, 0.0, 2.0, xtol=0.0)
    assert root == pytest.approx(math.sqrt(2), abs=4e-16)
    assert n < 70


def test_bisect_needs_sign_change_and_budget():
    with pytest.raises(DomainError):
        bisect(lambda x: x * x + 1, -1.0, 1.0)
    with pytest.raises(ConvergenceError):
        bisect(lambda x: x - 0.3, 0.0, 1.0, xtol=0.0, max_iter=5)


# --- peak ----------------------------------------------------------------------


def test_peak_values_table_rows():
    two = peak_values(ModelParams(2.0, i0=0.0))
    assert (two.s_star, round(two.i_star, 4), round(two.r_star, 4)) == (0.5, 0.1534, 0.3466)
    six = peak_values(ModelParams(6.0, i0=0.0))
    assert (round(six.s_star, 4), round(six.i_star, 4), round(six.r_star, 4)) == (
        0.1667,
        0.5347,
        0.2986,
    )
    assert six.tau_star is None


def test_peak_values_boundary_is_initial_state():
    s0 = 0.8
    report = peak_values(ModelParams(1 / s0, s0=s0))
    assert report.s_star == pytest.approx(s0, abs=1e-15)
    assert report.i_star == pytest.approx(1 - s0, abs=1e-15)
    assert report.r_star == pytest.approx(0.0, abs=1e-15)


def test_peak_values_general_s0():
    # hand substitution with S0 = 0.5, r0 = 2 * 2: r0*S0 = 2
    report = peak_values(ModelParams(4.0, s0=0.5))
    assert report.s_star == 0.25
    assert report.r_star == pytest.approx(math.log(2) / 4, abs=1e-15)
    assert report.i_star == pytest.approx(1 - 0.25 - math.log(2) / 4, abs=1e-15)


def test_peak_values_rejects_no_epidemic():
    with pytest.raises(NoEpidemicError, match="r0\\*S0 <= 1"):
        peak_values(ModelParams(0.9))


def test_peak_time_from_trajectory(sir_runs):
    report = peak_values(sir_runs[2.0].params, sir_runs[2.0])
    tau, _ = locate_event(sir_runs[2.0], PeakOfI())
    assert report.tau_star == tau


@given(st.floats(1.001, 20.0), st.floats(1e-9, 0.2))
def test_peak_consistent_with_orbit(r0, i0):
    params = ModelParams(r0, i0=i0)
    if r0 * params.s0 <= 1:
        return
    report = peak_values(params)
    assert abs(report.s_star + report.i_star + report.r_star - 1) <= 1e-12
    assert i_of_s(1 / r0, params) == pytest.approx(report.i_star, abs=1e-12)


# --- final size ----------------------------------------------------------------


@pytest.mark.parametrize(
    "r0, expected", [(2.0, 0.7968), (3.0, 0.9405), (6.0, 0.9975)]
)
def test_final_size_table_values(r0, expected):
    report = final_size(ModelParams(r0, i0=0.0))
    assert round(report.r_inf, 4) == expected
    assert report.r_inf == pytest.approx(brentq_final_size(r0, 1.0), abs=1e-14)


def test_final_size_r0_6_end_values():
    report = final_size(ModelParams(6.0, i0=0.0))
    assert round(report.s_inf, 4) == 0.0025


@pytest.mark.parametrize("r0", [1.2, 2.0, 3.0, 6.0, 10.0])
def test_fixed_point_agrees_with_bisection(r0):
    params = ModelParams(r0)
    fp = final_size(params, FinalSizeMethod.FIXED_POINT)
    bi = final_size(params, "bisection")
    assert fp.method is FinalSizeMethod.FIXED_POINT and bi.method is FinalSizeMethod.BISECTION
    assert abs(fp.r_inf - bi.r_inf) <= 1e-10
    assert fp.iterations > 1


@pytest.mark.parametrize("r0", [1.2, 2.0, 6.0])
def test_fixed_point_iterates_increase(r0):
    seq = list(fixed_point_iterates(ModelParams(r0, i0=0.0)))
    assert seq[0] == 1 - 1 / r0
    steps = np.diff(seq)
    # strictly increasing until the last (converged) step
    assert np.all(steps[:-1] > 0)
    assert steps[-1] >= 0


def test_fixed_point_needs_epidemic():
    with pytest.raises(NoEpidemicError):
        final_size(ModelParams(0.8), FinalSizeMethod.FIXED_POINT)


def test_bisection_handles_subcritical_and_threshold():
    sub = final_size(ModelParams(0.5, i0=0.01))
    assert sub.r_inf == pytest.approx(brentq_final_size(0.5, 0.99), abs=1e-14)
    near = final_size(ModelParams(1 + 1e-6, s0=1 - 1e-6))
    assert near.r_inf > 0
    assert near.r_inf == pytest.approx(brentq_final_size(1 + 1e-6, 1 - 1e-6), rel=1e-9)
    assert final_size(ModelParams(0.5, i0=0.0)).r_inf == 0.0


@settings(max_examples=200)
@given(st.floats(0.05, 20.0), st.floats(1e-9, 0.5))
def test_final_size_report_invariants(r0, i0):
    params = ModelParams(r0, i0=i0)
    rep = final_size(params)
    assert abs(rep.s_inf + rep.r_inf - 1) <= 1e-12
    assert abs(rep.s_inf - params.s0 * math.exp(-r0 * rep.r_inf)) <= 1e-12
    assert rep.residual <= 1e-12
    assert rep.r_inf >= i0
    if r0 * params.s0 > 1:
        assert rep.s_inf < 1 / r0
        assert rep.r_inf > 1 - 1 / r0


def test_sweep_examples():
    rows = final_size_sweep([2.0, 3.0, 6.0], 1.0)
    assert [round(r, 4) for _, r in rows] == [0.7968, 0.9405, 0.9975]
    near = final_size_sweep([1 + 1e-6], 1 - 1e-6)
    assert near[0][1] > 0


def test_sweep_sorted_and_monotone():
    rows = final_size_sweep([6.0, 1.5, 3.0, 0.5, 2.0], 0.999)
    r0s = [r0 for r0, _ in rows]
    values = [r for _, r in rows]
    assert r0s == sorted(r0s)
    assert np.all(np.diff(values) >= 0)


def test_sweep_error_names_offending_r0():
    with pytest.raises(DomainError, match="r0=-1"):
        final_size_sweep([2.0, -1.0], 0.9)


# --- fastest increase and extrema of dI/dtau -----------------------------------


def test_fastest_new_infections_r0_2():
    res = fastest_new_infections(ModelParams(2.0, i0=0.0))
    # with S0 = 1 the condition reduces to 3 - 4S + ln S = 0
    oracle = brentq(lambda s: 3 - 4 * s + math.log(s), 0.5, 1.0, xtol=1e-15)
    assert res.s_at_max == pytest.approx(oracle, abs=1e-12)
    assert round(res.s_at_max, 3) == 0.637
    assert round(res.rate_max, 3) == 0.175
    assert res.i_at_max == pytest.approx(res.s_at_max - 0.5, abs=1e-15)


@pytest.mark.parametrize("r0", [2.0, 3.0])
def test_fastest_matches_trajectory(fine_runs, r0):
    traj = fine_runs[r0]
    res = fastest_new_infections(traj.params)
    k = int(np.argmin(traj.rates[:, 0]))
    assert abs(traj.s[k] - res.s_at_max) <= 1e-4
    assert -traj.rates[k, 0] == pytest.approx(res.rate_max, abs=1e-6)


def test_fastest_near_threshold_rate_vanishes():
    s0 = 1 - 1e-12
    res = fastest_new_infections(ModelParams(1 / s0 + 1e-9, s0=s0))
    assert 0 < res.rate_max < 1e-6


def test_fastest_large_i0_returns_start():
    params = ModelParams(1.5, i0=0.3)
    res = fastest_new_infections(params)
    assert (res.s_at_max, res.i_at_max) == (params.s0, params.i0)


@given(st.floats(1.01, 20.0), st.floats(1e-9, 1e-3))
def test_fastest_rate_bound(r0, i0):
    params = ModelParams(r0, i0=i0)
    if r0 * params.s0 <= 1:
        return
    assert fastest_new_infections(params).rate_max <= r0 / 4


def test_fastest_no_epidemic():
    with pytest.raises(NoEpidemicError):
        fastest_new_infections(ModelParams(0.8))


def test_i_rate_extrema_bracket_peak():
    params = ModelParams(2.0, i0=0.0)
    ext = i_rate_extrema(params)
    assert ext.s_at_dImax > 0.5 > ext.s_at_dImin
    r0 = 2.0
    for s in ext:
        residual = (r0 * s - 1) ** 2 - r0 * r0 * s * i_of_s(s, params)
        assert abs(residual) <= 1e-10


def test_i_rate_extrema_match_trajectory(fine_runs):
    traj = fine_runs[3.0]
    ext = i_rate_extrema(traj.params)
    di = np.gradient(traj.i, traj.tau)
    assert abs(traj.s[int(np.argmax(di))] - ext.s_at_dImax) <= 1e-4
    assert abs(traj.s[int(np.argmin(di))] - ext.s_at_dImin) <= 1e-4


def test_i_rate_extrema_no_epidemic():
    with pytest.raises(NoEpidemicError):
        i_rate_extrema(ModelParams(1.0))


# --- time by quadrature --------------------------------------------------------


def test_tau_of_s_start_is_zero():
    params = ModelParams(2.0)
    assert tau_of_s(params.s0, params) == 0.0


def test_tau_of_s_matches_peak_time(sir_runs):
    traj = sir_runs[2.0]
    tau_peak, _ = locate_event(traj, PeakOfI())
    assert abs(tau_of_s(0.5, traj.params) - tau_peak) <= 1e-6


@pytest.mark.parametrize("s_target", [0.9, 0.5, 0.2])
def test_tau_of_s_matches_trajectory(sir_runs, s_target):
    traj = sir_runs[3.0]
    tau, _ = locate_event(traj, SCrossesValue(s_target))
    assert abs(tau_of_s(s_target, traj.params) - tau) <= 1e-6


def test_tau_of_s_decreasing_in_target():
    params = ModelParams(3.0)
    targets = np.linspace(params.s0, 0.07, 25)
    times = [tau_of_s(float(s), params) for s in targets]
    assert np.all(np.diff(times) > 0)


def test_tau_of_s_domain():
    params = ModelParams(2.0)
    s_inf = final_size(params).s_inf
    with pytest.raises(DomainError):
        tau_of_s(s_inf + 1e-7, params)
    with pytest.raises(DomainError):
        tau_of_s(params.s0 + 1e-3, params)


# --- extremum of R* ------------------------------------------------------------


def test_r_star_extremum_dense_grid():
    grid = np.arange(1, 20001) * 1e-3 + 1.0
    res = r_star_extremum_check(1.0, grid)
    assert abs(res.argmax_r0 - math.e) <= 1e-3
    assert res.max_r_star == pytest.approx(1 / math.e, abs=1e-6)
    assert res.analytic_max == pytest.approx(1 / math.e, abs=1e-12)


@pytest.mark.parametrize("s0", [1.0, 0.9, 0.5])
def test_r_star_never_exceeds_s0_over_e(s0):
    grid = np.linspace(1 / s0, 40.0, 5000)
    res = r_star_extremum_check(s0, grid)
    assert res.max_r_star <= s0 / math.e + 1e-12
    assert res.analytic_max == pytest.approx(s0 / math.e, abs=1e-12)
    assert peak_values(ModelParams(1 / s0, s0=s0)).r_star == pytest.approx(0.0, abs=1e-15)
