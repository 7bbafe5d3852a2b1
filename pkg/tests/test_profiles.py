"""Closed-form constants, explicit solutions, scaling, and profile I/O."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singlap import (
    BarrierSpec,
    ConfigError,
    FormatError,
    Profile1D,
    ScalingMap,
    StripSpec,
    eval_barrier,
    eval_power,
    eval_supersolution,
    first_integral,
    gamma_param,
    load_profile,
    power_amplitude,
    rescale,
    save_profile,
    scaling_map,
)

# independently frozen: c ** (g+1) * (2g-2) == (g+1) ** 2
AMPLITUDES = {
    1.5: 2.081383018504683,
    2.0: 1.6509636244473134,
    3.0: math.sqrt(2.0),
    5.0: 1.2848982934253252,
}


def test_amplitude_closed_form_identity():
    for g in (1.1, 1.5, 2.0, 3.0, 5.0, 10.0):
        c = power_amplitude(g)
        ident = c ** (g + 1.0) * (2.0 * g - 2.0) / (g + 1.0) ** 2
        assert abs(ident - 1.0) <= 1e-12


def test_amplitude_frozen_values():
    for g, want in AMPLITUDES.items():
        assert power_amplitude(g) == pytest.approx(want, rel=1e-15)
    assert power_amplitude(3.0) == pytest.approx(math.sqrt(2.0), abs=1e-12)


@pytest.mark.parametrize("bad", [1.0, 0.5, -2.0, float("nan"), float("inf")])
def test_amplitude_rejects_bad_gamma(bad):
    with pytest.raises(ConfigError):
        power_amplitude(bad)


def test_gamma_param_derived_fields():
    par = gamma_param(2.0)
    assert par.exponent == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert par.grad_exponent == pytest.approx(-1.0 / 3.0, rel=1e-15)
    assert par.amplitude == pytest.approx(AMPLITUDES[2.0], rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1.0 + 1e-6, max_value=60.0, allow_nan=False))
def test_amplitude_identity_property(g):
    c = power_amplitude(g)
    assert abs(c ** (g + 1.0) * (2.0 * g - 2.0) / (g + 1.0) ** 2 - 1.0) <= 1e-11


def test_eval_power_values():
    par = gamma_param(2.0)
    v, dv = eval_power(par, 8.0)
    assert v == pytest.approx(6.603854497789253, rel=1e-15)
    assert dv == pytest.approx(0.5503212081491043, rel=1e-15)
    # derivative is value * a / t for this pure power
    assert dv == pytest.approx(v * par.exponent / 8.0, rel=1e-14)


def test_eval_power_boundary_and_domain():
    par = gamma_param(2.0)
    v0, dv0 = eval_power(par, 0.0)
    assert v0 == 0.0 and dv0 == math.inf
    with pytest.raises(ConfigError):
        eval_power(par, -1e-9)


def test_power_solves_the_ode():
    par = gamma_param(2.5)
    t = np.linspace(0.3, 30.0, 400)
    v, _ = eval_power(par, t)
    h = 1e-4
    vp, _ = eval_power(par, t + h)
    vm, _ = eval_power(par, t - h)
    resid = -(vp - 2.0 * v + vm) / h**2 - v**-par.gamma
    assert np.max(np.abs(resid)) < 1e-4


def test_supersolution_dominates_power_and_has_sign():
    par = gamma_param(2.0)
    t = np.geomspace(1e-4, 100.0, 300)
    w, _ = eval_supersolution(par, t)
    p, _ = eval_power(par, t)
    assert np.all(w > p)
    # -w'' computed exactly from the power part: equals (A t^a)^(-gamma)
    h = 1e-5
    mid = t[(t > 1e-2) & (t < 10.0)]
    wp, _ = eval_supersolution(par, mid + h)
    wm, _ = eval_supersolution(par, mid - h)
    wv, _ = eval_supersolution(par, mid)
    neg_second = -(wp - 2.0 * wv + wm) / h**2
    assert np.all(neg_second > wv**-par.gamma)


def test_barrier_spec_validation_and_eval():
    with pytest.raises(ConfigError):
        BarrierSpec(beta=0.5)
    with pytest.raises(ConfigError):
        BarrierSpec(eps=-0.1)
    par = gamma_param(3.0)
    b = BarrierSpec(beta=2.0, eps=0.5)
    v, dv = eval_barrier(par, b, 1.5)
    pv, pdv = eval_power(par, 2.0)
    assert v == pytest.approx(2.0 * pv, rel=1e-15)
    assert dv == pytest.approx(2.0 * pdv, rel=1e-15)


def test_strip_spec_validation():
    with pytest.raises(ConfigError):
        StripSpec(height=0.0)
    with pytest.raises(ConfigError):
        StripSpec(height=1.0, theta=-1.0)
    assert StripSpec(height=2.0).theta is None


def test_first_integral_constant_on_closed_family():
    # for gamma = 3 the slope-M solution is v = sqrt(M^2 t^2 + 2 t) and the
    # conserved quantity equals M^2 / 2 identically
    par = gamma_param(3.0)
    for m in (0.5, 1.0, 4.0):
        # below t ~ 1e-4 the test's own (dv)^2/2 intermediate reaches 1e5+
        # and cancellation noise would swamp the identity being checked
        t = np.geomspace(1e-4, 1e3, 200)
        v = np.sqrt(m * m * t * t + 2.0 * t)
        dv = (m * m * t + 1.0) / v
        e = first_integral(par, v, dv)
        assert np.max(np.abs(e - 0.5 * m * m)) < 1e-11 * max(1.0, m * m)


def _power_profile(par, t_max=10.0, n=200):
    ts = np.linspace(0.0, t_max, n + 1)
    v, dv = eval_power(par, ts)
    return Profile1D(grid=ts, values=v, derivs=dv, par=par, kind="power")


def test_rescale_power_is_fixed_point():
    par = gamma_param(2.0)
    prof = _power_profile(par)
    lam = 7.3
    out = rescale(prof, lam)
    v_expect, _ = eval_power(par, out.grid)
    assert np.max(np.abs(out.values - v_expect)) <= 1e-13 * np.max(v_expect)


def test_rescale_transforms_slope_and_grid():
    par = gamma_param(2.0)
    ts = np.linspace(0.0, 10.0, 101)
    v = ts.copy()
    v[0] = 0.0
    prof = Profile1D(
        grid=ts, values=v, derivs=np.ones_like(ts), par=par, kind="linear_growth",
        limit_slope=1.0,
    )
    lam = 8.0
    out = rescale(prof, lam)
    assert out.grid[-1] == pytest.approx(10.0 / lam)
    want_slope = lam ** (1.0 - par.exponent)
    assert out.limit_slope == pytest.approx(want_slope, rel=1e-14)


def test_rescale_rejects_bad_factor():
    prof = _power_profile(gamma_param(2.0))
    for lam in (0.0, -1.0, math.inf):
        with pytest.raises(ConfigError):
            rescale(prof, lam)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=0.1, max_value=10.0),
)
def test_scaling_map_composition(la, lb):
    par = gamma_param(2.0)
    prof = _power_profile(par, n=50)
    once = scaling_map(par, la)(scaling_map(par, lb)(prof))
    both = scaling_map(par, la).compose(scaling_map(par, lb))(prof)
    assert np.allclose(once.grid, both.grid, rtol=1e-14, atol=0.0)
    assert np.allclose(once.values, both.values, rtol=1e-13, atol=0.0)


def test_scaling_map_compose_rejects_mixed_exponent():
    with pytest.raises(ConfigError):
        scaling_map(gamma_param(2.0), 2.0).compose(scaling_map(gamma_param(3.0), 2.0))


def test_profile_validation():
    par = gamma_param(2.0)
    ts = np.linspace(0.0, 1.0, 11)
    v, dv = eval_power(par, ts)
    with pytest.raises(ConfigError):  # non-increasing grid
        Profile1D(grid=ts[::-1], values=v, derivs=dv, par=par, kind="power")
    bad_v = v.copy()
    bad_v[3] = -1.0
    with pytest.raises(ConfigError):  # negative value
        Profile1D(grid=ts, values=bad_v, derivs=dv, par=par, kind="power")
    bad_d = dv.copy()
    bad_d[5] = bad_d[4] + 1.0  # derivative increases: not concave
    with pytest.raises(ConfigError):
        Profile1D(grid=ts, values=v, derivs=bad_d, par=par, kind="power")
    with pytest.raises(ConfigError):  # unknown kind
        Profile1D(grid=ts, values=v, derivs=dv, par=par, kind="mystery")


def test_raw_profiles_allow_negative_abscissae_and_convex_data():
    par = gamma_param(2.0)
    ts = np.linspace(-1.0, 1.0, 21)
    v = 2.0 + ts**2  # convex, positive: fine for a raw window
    dv = 2.0 * ts
    prof = Profile1D(grid=ts, values=v, derivs=dv, par=par, kind="raw")
    assert prof.grid[0] < 0.0


def test_profile_eval_interpolates_and_guards_domain(profile_m1):
    prof, _rep = profile_m1
    v, dv = prof.eval(np.array([0.5, 1.0, 2.0]))
    assert np.all(np.isfinite(v)) and np.all(v > 0.0)
    with pytest.raises(ConfigError):
        prof.eval(prof.grid[-1] * 1.5)


def test_save_load_round_trip(tmp_path):
    par = gamma_param(2.0)
    prof = _power_profile(par, n=64)
    csv_path, json_path = save_profile(prof, tmp_path / "p")
    assert csv_path.name == "p.csv" and json_path.name == "p.json"
    back = load_profile(csv_path)
    assert back.kind == "power"
    assert back.par.gamma == par.gamma
    assert np.array_equal(back.grid, prof.grid)
    assert np.max(np.abs(back.values - prof.values)) <= 1e-15 * np.max(prof.values)
    # the t=0 derivative survives the round trip as +inf
    assert back.derivs[0] == math.inf


def test_load_profile_without_envelope_needs_par(tmp_path):
    par = gamma_param(2.0)
    # start above zero: a bare CSV reloads as a raw window, which must be
    # strictly positive
    ts = np.linspace(0.5, 10.0, 20)
    v, dv = eval_power(par, ts)
    prof = Profile1D(grid=ts, values=v, derivs=dv, par=par, kind="raw")
    csv_path, json_path = save_profile(prof, tmp_path / "p")
    json_path.unlink()
    with pytest.raises(ConfigError):
        load_profile(csv_path)
    back = load_profile(csv_path, par=par)
    assert back.kind == "raw"


def test_load_profile_reports_corrupt_line(tmp_path):
    prof = _power_profile(gamma_param(2.0), n=16)
    csv_path, _ = save_profile(prof, tmp_path / "p")
    lines = csv_path.read_text().splitlines()
    lines[4] = "one,two,three"  # file line 5 (header is line 1)
    csv_path.write_text("\n".join(lines) + "\n")
    with pytest.raises(FormatError, match="line 5"):
        load_profile(csv_path)


def test_load_profile_checks_envelope_row_count(tmp_path):
    prof = _power_profile(gamma_param(2.0), n=16)
    csv_path, _ = save_profile(prof, tmp_path / "p")
    lines = csv_path.read_text().splitlines()
    csv_path.write_text("\n".join(lines[:-2]) + "\n")
    with pytest.raises(FormatError, match="rows"):
        load_profile(csv_path)


def test_scaling_map_validation():
    with pytest.raises(ConfigError):
        ScalingMap(lam=0.0, exponent=0.5)
