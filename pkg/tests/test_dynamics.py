"""Cascade amplitude integration against the adiabatic closed forms."""

import math

import numpy as np
import pytest

from biphoton_coding.dynamics import (
    DriveParams,
    compare_dynamics,
    default_t_final,
    dsi_analytic,
    integrate_eom,
)
from biphoton_coding.errors import NotConverged, ValidityWarning
from biphoton_coding.spectra import FrequencyGrid, PhysicalParams, jsa_single

TINY_S = FrequencyGrid(-4.0, 4.0, 3)
TINY_I = FrequencyGrid(-4.0, 4.0, 3)


def test_zero_drive_stays_in_vacuum():
    res = integrate_eom(DriveParams(omega_a_tilde=0.0), TINY_S, TINY_I)
    st = res.final
    assert st.eps == 1.0 and st.a_amp == 0.0 and st.b_amp == 0.0
    assert float(np.max(np.abs(st.c_amp))) == 0.0
    assert float(np.max(np.abs(st.d_amp))) == 0.0
    rep = compare_dynamics(DriveParams(omega_a_tilde=0.0), TINY_S, TINY_I)
    assert rep["note"] == "no biphoton generated"


def test_pulse_shape():
    d = DriveParams(omega_a_tilde=2.0, tau=0.5, pulse_center=1.0)
    peak = 2.0 / (math.sqrt(math.pi) * 0.5)
    assert d.pulse_a(1.0) == pytest.approx(peak)
    assert d.pulse_a(1.5) == pytest.approx(peak * math.exp(-1.0))
    assert d.pulse_b(1.0) == pytest.approx(peak / 2.0)


def test_default_t_final():
    d = DriveParams(pulse_center=2.0, tau=0.25, gamma3n=5.0)
    assert default_t_final(d) == pytest.approx(2.0 + 2.0 + 2.0)


def test_norm_conserved_without_decay():
    res = integrate_eom(DriveParams(gamma3n=1e-12), TINY_S, TINY_I,
                        t_final=3.0)
    assert res.final.sector_norm == pytest.approx(1.0, abs=1e-8)


def test_sector_norm_monotone_with_decay():
    d = DriveParams()
    t_eval = np.linspace(-3.0, default_t_final(d), 200)
    res = integrate_eom(d, TINY_S, TINY_I, t_eval=t_eval)
    norms = np.array([s.sector_norm for s in res.states])
    assert float(np.max(np.diff(norms))) < 1e-10
    assert res.final.total_norm <= 1.0 + 1e-10


def test_adiabatic_tracking_near_pulse_center():
    # steady-state forms -Omega_a/(2 Delta1) and
    # Omega_a Omega_b/(4 Delta1 Delta2) hold to first order in 1/Delta
    # close to the envelope peak, where the drive derivative is small
    d = DriveParams()
    window = np.linspace(-d.tau / 8.0, d.tau / 8.0, 33)
    res = integrate_eom(d, TINY_S, TINY_I, t_eval=window)
    dev_a = dev_b = 0.0
    for st in res.states:
        om_a, om_b = d.pulse_a(st.time), d.pulse_b(st.time)
        a_ref = -om_a / (2.0 * d.delta1)
        b_ref = om_a * om_b / (4.0 * d.delta1 * d.delta2)
        dev_a = max(dev_a, abs(st.a_amp - a_ref) / abs(a_ref))
        dev_b = max(dev_b, abs(st.b_amp - b_ref) / abs(b_ref))
    assert dev_a < 0.05
    assert dev_b < 0.05


def test_c_amplitude_matches_driven_decay_quadrature():
    from scipy.integrate import quad

    d = DriveParams(delta1=500.0, delta2=500.0)
    grid = FrequencyGrid(-6.0, 6.0, 5)
    t_final = default_t_final(d)
    res = integrate_eom(d, grid, grid, t_final=t_final)

    def b_adiabatic(t):
        return d.pulse_a(t) * d.pulse_b(t) / (4.0 * d.delta1 * d.delta2)

    c_scale = float(np.max(np.abs(res.final.c_amp)))
    for k, dws in enumerate(grid.omegas):
        def integrand(t, dws=dws):
            return (np.exp(1j * dws * t)
                    * np.exp(-d.gamma3n / 2.0 * (t_final - t))
                    * b_adiabatic(t))
        re = quad(lambda t: integrand(t).real, -3.0, t_final, limit=400)[0]
        im = quad(lambda t: integrand(t).imag, -3.0, t_final, limit=400)[0]
        closed = d.g_s * (re + 1j * im)
        assert abs(res.final.c_amp[k] - closed) < 0.01 * c_scale


def test_biphoton_kernel_proportional_to_jsa():
    d = DriveParams()
    params = PhysicalParams(gamma3n=d.gamma3n, tau=d.tau,
                            delta1=d.delta1, delta2=d.delta2)
    ws = np.linspace(-6.0, 6.0, 41)[:, None]
    wi = np.linspace(-9.0, 9.0, 37)[None, :]
    ratio = dsi_analytic(d, ws, wi) / jsa_single(params, ws, wi)
    r0 = ratio.flat[0]
    assert float(np.max(np.abs(ratio - r0))) < 1e-10 * abs(r0)


def test_biphoton_kernel_halves_at_half_linewidth():
    d = DriveParams()
    peak = abs(dsi_analytic(d, 0.0, 0.0)) ** 2
    for wi in (d.gamma3n / 2.0, -d.gamma3n / 2.0):
        assert abs(dsi_analytic(d, -wi, wi)) ** 2 / peak == pytest.approx(0.5)


def test_numeric_biphoton_factorizes_along_ridge():
    # D always splits into a sum-frequency factor times the idler
    # Lorentzian; dividing the Lorentzian out must collapse the surface
    # onto a single curve in the sum detuning
    d = DriveParams()
    gs = FrequencyGrid(-8.0, 8.0, 17)
    gi = FrequencyGrid(-10.0, 10.0, 21)
    res = integrate_eom(d, gs, gi)
    ridge = res.final.d_amp * (d.gamma3n / 2.0 - 1j * gi.omegas)[None, :]
    buckets = {}
    for i in range(gs.points):
        for j in range(gi.points):
            key = round(float(gs.omegas[i] + gi.omegas[j]), 9)
            buckets.setdefault(key, []).append(ridge[i, j])
    scale = max(abs(v) for vs in buckets.values() for v in vs)
    for vs in buckets.values():
        arr = np.array(vs)
        assert float(np.max(np.abs(arr - arr.mean()))) < 1e-5 * scale


def test_peak_scales_as_drive_product():
    peaks = {}
    for oa, ob in ((1.0, 1.0), (2.0, 1.0), (2.0, 2.0)):
        d = DriveParams(omega_a_tilde=oa, omega_b_tilde=ob)
        res = integrate_eom(d, TINY_S, TINY_I)
        peaks[(oa, ob)] = float(np.max(np.abs(res.final.d_amp)))
    assert peaks[(2.0, 1.0)] / peaks[(1.0, 1.0)] == pytest.approx(2.0, rel=0.01)
    assert peaks[(2.0, 2.0)] / peaks[(1.0, 1.0)] == pytest.approx(4.0, rel=0.01)


def test_deviation_shrinks_with_detuning():
    # the residual shape error of the closed form is the first
    # adiabatic correction, so doubling both detunings should halve it
    gs = FrequencyGrid(-8.0, 8.0, 12)
    gi = FrequencyGrid(-10.0, 10.0, 12)
    devs = []
    for delta in (50.0, 100.0, 200.0):
        rep = compare_dynamics(DriveParams(delta1=delta, delta2=delta), gs, gi)
        assert rep["converged"]
        devs.append(rep["max_deviation"])
    assert devs[0] > devs[1] > devs[2]
    assert devs[1] / devs[0] == pytest.approx(0.5, abs=0.15)


def test_compare_peaks_agree():
    rep = compare_dynamics(DriveParams(), TINY_S, TINY_I)
    assert rep["peak_numeric"] == pytest.approx(rep["peak_analytic"], rel=0.05)


def test_weak_drive_warning():
    d = DriveParams(omega_a_tilde=10.0, tau=0.1)
    with pytest.warns(ValidityWarning):
        integrate_eom(d, TINY_S, TINY_I, t_final=1.0)


def test_not_converged_when_stopped_inside_pulse():
    with pytest.raises(NotConverged):
        compare_dynamics(DriveParams(), TINY_S, TINY_I, t_final=0.5)
