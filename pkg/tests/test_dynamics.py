"""Mean-field time evolution: integration, relaxation, ramps.

The linear limit (no optomechanical and no Coulomb coupling) has the exact
fixed point c = eps_l / (kh + i delta_c), which anchors the integrator
against an answer that needs no root solving at all.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from neoms.bifurcation import bistability_window
from neoms.errors import ConvergenceError
from neoms.dynamics import (ORIGIN, MeanFieldState, RampSchedule, Trajectory,
                            hysteresis_loop, integrate,
                            quasi_static_hysteresis, relax_to_steady,
                            time_derivative)
from neoms.model import CoulombSpec, DriveSpec, derive
from neoms.steady_state import (drive_offset, solve_photon_roots,
                                steady_fields, susceptibilities,
                                cubic_coefficients)
from draws import REFERENCE, clean_point, clean_system


def test_state_quadrature_round_trip():
    s = MeanFieldState(c=1.5 - 2.5j, b1=0.25j, b2=-3.0 + 0.125j, t=2.0)
    y = s.to_quadratures()
    assert y.tolist() == [1.5, -2.5, 0.0, 0.25, -3.0, 0.125]
    back = MeanFieldState.from_quadratures(y, t=2.0)
    assert back == s
    assert s.photon_number == 1.5 ** 2 + 2.5 ** 2


def test_linear_limit_settles_on_closed_form():
    params = replace(REFERENCE, g0=0.0, coulomb=CoulombSpec.direct(0.0),
                     drive_power=1e-9)
    derived = derive(params)
    f = relax_to_steady(ORIGIN, derived, DriveSpec())
    kh = 0.5 * derived.kappa
    expect = derived.eps_l / complex(kh, derived.delta_c)
    assert abs(f.c_s - expect) <= 1e-9 * abs(expect)
    assert f.b_1s == 0.0 and f.b_2s == 0.0
    assert math.isclose(f.photon_number, abs(expect) ** 2, rel_tol=1e-9)


def test_derivative_vanishes_at_algebraic_steady_state():
    rng = np.random.default_rng(13)
    for _ in range(10):
        params, derived, drives, eps_sq, roots = clean_point(
            rng, with_tones=bool(rng.integers(2)))
        eps = math.sqrt(eps_sq)
        susc = susceptibilities(derived, drives)
        scale = max(eps, derived.kappa)
        for x in roots.roots:
            f = steady_fields(x, derived, susc, drives, eps_l=eps)
            s = MeanFieldState(c=f.c_s, b1=f.b_1s, b2=f.b_2s)
            d = time_derivative(s, derived, drives, eps_l=eps)
            norm = math.sqrt(abs(d.c) ** 2 + abs(d.b1) ** 2 + abs(d.b2) ** 2)
            assert norm <= 1e-9 * scale


def test_integrate_rejects_bad_horizon(fig2_derived):
    with pytest.raises(ValueError):
        integrate(ORIGIN, fig2_derived, DriveSpec(), fig2_derived.eps_l,
                  t_final=0.0)


def test_integrate_is_deterministic():
    rng = np.random.default_rng(59)
    params, derived, drives, eps_sq, _ = clean_point(rng)
    eps = math.sqrt(eps_sq)
    t_final = 20.0 / derived.kappa
    a = integrate(ORIGIN, derived, drives, eps, t_final)
    b = integrate(ORIGIN, derived, drives, eps, t_final)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.states, b.states)
    assert isinstance(a, Trajectory) and a.nfev == b.nfev


def test_integrate_accepts_time_dependent_drive():
    rng = np.random.default_rng(67)
    params, derived, drives, eps_sq, _ = clean_point(rng)
    eps0 = math.sqrt(eps_sq)
    t_final = 10.0 / derived.kappa

    def ramp(t):
        return eps0 * min(1.0, t * derived.kappa / 5.0)

    a = integrate(ORIGIN, derived, drives, ramp, t_final)
    b = integrate(ORIGIN, derived, drives, eps0, t_final)
    # the ramped drive deposits less field early on
    assert a.photon_numbers()[1] < b.photon_numbers()[1]
    assert a.times[0] == 0.0 and a.times[-1] == t_final


def test_vacuum_relaxes_to_lowest_root():
    rng = np.random.default_rng(19)
    for _ in range(5):
        params, derived, drives, eps_sq, roots = clean_point(rng)
        eps = math.sqrt(eps_sq)
        f = relax_to_steady(ORIGIN, derived, drives, eps_l=eps)
        assert math.isclose(f.photon_number, roots.roots[0], rel_tol=1e-6)


def test_upper_branch_start_stays_on_upper_root():
    rng = np.random.default_rng(37)
    params, derived, drives, eps_sq, roots = clean_point(rng)
    eps = math.sqrt(eps_sq)
    susc = susceptibilities(derived, drives)
    top = steady_fields(roots.roots[-1], derived, susc, drives, eps_l=eps)
    start = MeanFieldState(c=top.c_s * 1.01, b1=top.b_1s, b2=top.b_2s)
    f = relax_to_steady(start, derived, drives, eps_l=eps)
    assert math.isclose(f.photon_number, roots.roots[-1], rel_tol=1e-6)


def test_middle_root_never_persists():
    rng = np.random.default_rng(43)
    params, derived, drives, eps_sq, roots = clean_point(rng)
    assert len(roots) == 3
    eps = math.sqrt(eps_sq)
    susc = susceptibilities(derived, drives)
    mid = steady_fields(roots.roots[1], derived, susc, drives, eps_l=eps)
    for factor in (0.99, 1.01):
        start = MeanFieldState(c=mid.c_s * factor, b1=mid.b_1s, b2=mid.b_2s)
        f = relax_to_steady(start, derived, drives, eps_l=eps)
        outer = (roots.roots[0], roots.roots[2])
        assert any(math.isclose(f.photon_number, r, rel_tol=1e-6)
                   for r in outer)
        assert not math.isclose(f.photon_number, roots.roots[1],
                                rel_tol=1e-3)


def test_wide_linewidth_upper_branch_never_settles(fig2_cfg, fig2_derived):
    """The eigen-unstable upper branch at the headline linewidth is a limit
    cycle: relaxation must refuse it rather than report a false fixed point."""
    win = bistability_window(fig2_derived, fig2_cfg.drives)
    power = math.sqrt(win.power_up * win.power_down)
    from neoms.model import eps_for_power
    eps = eps_for_power(fig2_derived, power)
    susc = susceptibilities(fig2_derived, fig2_cfg.drives)
    gamma = drive_offset(susc, fig2_cfg.drives)
    coeffs = cubic_coefficients(fig2_derived, susc, gamma, eps)
    roots = solve_photon_roots(coeffs)
    top = steady_fields(roots.roots[-1], fig2_derived, susc, fig2_cfg.drives,
                        eps_l=eps)
    start = MeanFieldState(c=top.c_s * 1.02, b1=top.b_1s, b2=top.b_2s)
    slow = min(fig2_derived.kappa, fig2_derived.gamma1, fig2_derived.gamma2)
    with pytest.raises(ConvergenceError) as exc:
        relax_to_steady(start, fig2_derived, fig2_cfg.drives, eps_l=eps,
                        t_max=120.0 / slow)
    assert exc.value.last_state is not None
    assert exc.value.diagnostics["derivative_norm"] > \
        exc.value.diagnostics["threshold"]


def test_ramp_schedule_validation(fig2_derived):
    with pytest.raises(ValueError):
        RampSchedule(powers=(1.0, 2.0), dwell=1.0, direction="sideways")
    with pytest.raises(ValueError):
        RampSchedule(powers=(1.0, 2.0), dwell=-1.0, direction="up")
    with pytest.raises(ValueError):
        RampSchedule(powers=(1.0,), dwell=1.0, direction="up")
    with pytest.raises(ValueError):
        RampSchedule(powers=(1.0, 3.0, 2.0), dwell=1.0, direction="up")
    with pytest.raises(ValueError):
        RampSchedule(powers=(1.0, 2.0), dwell=1.0, direction="down")
    s = RampSchedule.linear(fig2_derived, 1e-10, 5e-10, 5)
    assert s.direction == "up" and len(s.powers) == 5
    assert s.powers[0] == 1e-10 and s.powers[-1] == 5e-10
    d = RampSchedule.linear(fig2_derived, 1e-10, 5e-10, 5, direction="down")
    assert d.powers[0] == 5e-10 and d.powers[-1] == 1e-10


def _clean_loop_inputs(seed=101):
    rng = np.random.default_rng(seed)
    params, drives = clean_system(rng, min_detuning_kappa=2.5)
    derived = derive(params, drives)
    win = bistability_window(derived, drives)
    assert win.exists
    powers = tuple(np.linspace(0.5 * win.power_down, 2.0 * win.power_up, 15))
    return derived, drives, win, powers


def test_single_direction_ramp_shape():
    derived, drives, win, powers = _clean_loop_inputs()
    sched = RampSchedule(powers=powers, direction="up",
                         dwell=10.0 / min(derived.kappa, derived.gamma1,
                                          derived.gamma2))
    trace = quasi_static_hysteresis(sched, derived, drives)
    assert trace.down is None
    assert len(trace.up) == len(powers)
    assert trace.up_jump_powers and not trace.down_jump_powers


def test_loop_jumps_bracket_the_folds():
    derived, drives, win, powers = _clean_loop_inputs()
    trace = hysteresis_loop(derived, drives, powers)
    step = powers[1] - powers[0]
    assert trace.loop_area_exists
    assert win.power_up - step <= trace.up_jump <= win.power_up + step
    assert win.power_down - step <= trace.down_jump <= win.power_down + step
    # hysteresis proper: the downward jump sits strictly below the upward one
    assert trace.down_jump < trace.up_jump
