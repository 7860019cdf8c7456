import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bsvkernels import CrystalSpec, PumpSpec, make_grid
from bsvkernels.reference_models import (pair_coupling, perturbative_beta, plane_wave_intensity,
                                         plane_wave_occupation, sinhc2)


def test_sinhc2_values():
    assert sinhc2(0.0) == 1.0
    assert sinhc2(4.0) == pytest.approx(math.sinh(2.0) ** 2 / 4.0, rel=1e-15)
    assert sinhc2(-math.pi**2) == pytest.approx(0.0, abs=1e-30)
    assert sinhc2(-1.0) == pytest.approx(math.sin(1.0) ** 2, rel=1e-15)


@given(st.floats(-50, 50))
def test_sinhc2_continuous_near_zero(x):
    eps = 1e-9
    assert sinhc2(eps) == pytest.approx(sinhc2(-eps), rel=1e-8)
    assert sinhc2(x) >= 0


def test_plane_wave_occupation_limits():
    assert plane_wave_occupation(2.0, 0.0) == pytest.approx(math.sinh(2.0) ** 2, rel=1e-14)
    # low gain: G^2 sinc^2(x)
    G, x = 1e-4, 1.3
    assert plane_wave_occupation(G, x) == pytest.approx(G**2 * (math.sin(x) / x) ** 2, rel=1e-7)


def test_plane_wave_intensity_matched_center():
    spec = CrystalSpec(length=2e-3, delta_k=0.0, pump_wavelength=354.7e-9, n_pump=1.6, n_signal=1.6)
    g = make_grid(1e5, 16)
    y = plane_wave_intensity(spec, 3.0, g)
    assert np.allclose(y, y[::-1])
    assert y.max() <= math.sinh(3.0) ** 2


def test_perturbative_beta_hand_entry():
    spec = CrystalSpec(length=1e-3, delta_k=1000.0, pump_wavelength=400e-9, n_pump=1.5, n_signal=1.5)
    pump = PumpSpec(sigma=5e-5)
    g = make_grid(1e5, 8)
    b = perturbative_beta(spec, pump, g, 7.0)
    q, w = g.nodes, g.weights
    k_s = 2 * math.pi * 1.5 / 800e-9
    j, k = 1, 4
    x = 0.5 * (1000.0 + (q[j] ** 2 + q[k] ** 2) / (2 * k_s)) * 1e-3
    F = math.exp(-((q[j] + q[k]) * 5e-5) ** 2 / 2)
    want = 7.0 * F * 1e-3 * np.exp(1j * x) * math.sin(x) / x * math.sqrt(w[j] * w[k])
    assert b[j, k] == pytest.approx(want, rel=1e-13)


def test_pair_coupling_limits():
    g = make_grid(1e5, 64)
    wide = pair_coupling(g, PumpSpec(sigma=1.0), 2.0)
    assert np.allclose(wide, 2.0 * g.weights, rtol=1e-12)
    narrow = pair_coupling(g, PumpSpec(sigma=2e-4), 1.0)
    assert narrow[32] == pytest.approx(math.sqrt(2 * math.pi) / 2e-4, rel=1e-3)
