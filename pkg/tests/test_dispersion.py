import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bsvkernels import CrystalSpec, GapSpec, PumpSpec, delta_k_crystal, gap_phase
from bsvkernels.dispersion import (air_mismatch, crystal_frame_phase, gap_frame_phase,
                                   wavenumber)


def test_collinear_mismatch_is_delta_k(bbo_spec):
    assert delta_k_crystal(bbo_spec, 0.0, 0.0) == pytest.approx(4530.0, abs=1e-9)


def test_mirror_pair_mismatch(bbo_spec):
    spec = CrystalSpec(length=2e-3, delta_k=0.0, pump_wavelength=354.7e-9,
                       n_pump=1.66451, n_signal=1.66451)
    q = 2.0e5
    k_s = 2 * math.pi * 1.66451 / 709.4e-9
    assert delta_k_crystal(spec, q, -q) == pytest.approx(q**2 / k_s, rel=1e-14)
    # hand value: k_s = 1.4742634e7 1/m
    assert k_s == pytest.approx(1.4742634e7, rel=1e-7)


def test_broadcasting(bbo_spec):
    q = np.linspace(-1e5, 1e5, 5)
    dk = delta_k_crystal(bbo_spec, q[:, None], q[None, :])
    assert dk.shape == (5, 5)
    assert np.allclose(dk, dk.T)


@given(st.floats(-3e5, 3e5), st.floats(-3e5, 3e5))
def test_mismatch_symmetric_and_even(q_s, q_i):
    spec = CrystalSpec(length=2e-3, delta_k=-3200.0, pump_wavelength=354.7e-9,
                       n_pump=1.66451, n_signal=1.66451)
    a = delta_k_crystal(spec, q_s, q_i)
    assert a == delta_k_crystal(spec, q_i, q_s)
    assert a == delta_k_crystal(spec, -q_s, -q_i)


def test_evanescent_wavevector_rejected(bbo_spec):
    with pytest.raises(ValueError):
        delta_k_crystal(bbo_spec, 2 * bbo_spec.k_signal, 0.0)
    with pytest.raises(ValueError):
        delta_k_crystal(bbo_spec, np.nan, 0.0)


def test_frame_phase_splits_mismatch(bbo_spec):
    q = np.linspace(-3e5, 3e5, 7)
    th = crystal_frame_phase(bbo_spec, q)
    total = delta_k_crystal(bbo_spec, q[:, None], q[None, :]) * bbo_spec.length
    assert np.allclose(th[:, None] + th[None, :], total, rtol=1e-13)


def test_gap_phase_vanishes_without_dispersion(bbo_spec):
    # k_p = 2 k_s in air when n_p_air * lambda_s = 2 * n_s_air * lambda_p
    gap = GapSpec(distance=5e-3, n_pump_air=1.0003, n_signal_air=1.0003)
    assert gap_phase(gap, bbo_spec, 0.0, 0.0) == pytest.approx(0.0, abs=1e-9)


def test_gap_phase_linear_in_distance(bbo_spec, air_gap):
    a = gap_phase(air_gap, bbo_spec, 1e5, -5e4)
    half = GapSpec(air_gap.distance / 2, air_gap.n_pump_air, air_gap.n_signal_air)
    assert 2 * gap_phase(half, bbo_spec, 1e5, -5e4) == pytest.approx(a, rel=1e-13)
    zero = GapSpec(0.0, air_gap.n_pump_air, air_gap.n_signal_air)
    assert gap_phase(zero, bbo_spec, 1e5, -5e4) == 0.0


def test_air_fringe_period(bbo_spec, air_gap):
    # k_p - 2 k_s in air, hand computed from the two indices
    dk = 2 * math.pi / 354.7e-9 * (1.00028574 - 1.00027572)
    assert air_mismatch(air_gap, bbo_spec) == pytest.approx(dk, rel=1e-9)
    assert 2 * math.pi / dk == pytest.approx(35.4e-3, rel=2e-3)


def test_gap_frame_phase_splits_gap_phase(bbo_spec, air_gap):
    q = np.linspace(-2e5, 2e5, 5)
    th = gap_frame_phase(air_gap, bbo_spec, q)
    total = gap_phase(air_gap, bbo_spec, q[:, None], q[None, :])
    assert np.allclose(th[:, None] + th[None, :], total, rtol=1e-12)


def test_pump_width_conversion():
    p = PumpSpec.from_fwhm(170e-6)
    assert p.sigma == pytest.approx(170e-6 / (2 * math.sqrt(math.log(2))), rel=1e-15)
    assert p.sigma == pytest.approx(1.0209540e-4, rel=1e-7)
    assert p.fwhm == pytest.approx(170e-6, rel=1e-15)


@pytest.mark.parametrize("kwargs", [
    dict(length=0.0), dict(length=-1e-3), dict(pump_wavelength=0.0), dict(n_signal=0.0),
    dict(delta_k=float("inf")), dict(signal_wavelength=800e-9),
])
def test_crystal_validation(kwargs):
    base = dict(length=2e-3, delta_k=0.0, pump_wavelength=354.7e-9, n_pump=1.6, n_signal=1.6)
    base.update(kwargs)
    with pytest.raises(ValueError):
        CrystalSpec(**base)


def test_gap_and_pump_validation():
    with pytest.raises(ValueError):
        GapSpec(-1e-3, 1.0, 1.0)
    with pytest.raises(ValueError):
        PumpSpec(0.0)


def test_wavenumber():
    assert wavenumber(1e-6, 1.5) == pytest.approx(3 * math.pi * 1e6)
