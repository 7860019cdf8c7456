from dataclasses import replace

import numpy as np
import pytest

from bsvkernels import (CrystalSpec, GapSpec, IntegratorOptions, PumpSpec, apply_gap, compose,
                        make_grid, propagate_single_crystal, propagate_two_crystal,
                        symplectic_defect)
from bsvkernels.errors import ConvergenceError
from bsvkernels.propagator import identity_state, required_steps
from bsvkernels.reference_models import exact_transfer, perturbative_beta

OPTS = IntegratorOptions(step_count=400)


@pytest.fixture(scope="module")
def setup():
    spec = CrystalSpec(length=2e-3, delta_k=4530.0, pump_wavelength=354.7e-9,
                       n_pump=1.66451, n_signal=1.66451)
    pump = PumpSpec.from_fwhm(170e-6)
    grid = make_grid(2.5e5, 32)
    gamma = 3.0 * pump.sigma / (spec.length * np.sqrt(2 * np.pi))
    return spec, pump, grid, gamma


@pytest.fixture(scope="module")
def rk4_state(setup):
    spec, pump, grid, gamma = setup
    return propagate_single_crystal(spec, pump, grid, gamma, OPTS)


def _rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_rk4_matches_matrix_exponential(setup, rk4_state):
    ref = exact_transfer(*setup)
    for name in ("eta_s", "beta_s", "eta_i", "beta_i"):
        assert _rel(getattr(rk4_state, name), getattr(ref, name)) < 1e-8, name
    assert np.allclose(rk4_state.frame_phase, ref.frame_phase, rtol=1e-14)


def test_parity_split_is_exact(setup, rk4_state):
    full = propagate_single_crystal(*setup, replace(OPTS, use_parity=False))
    assert _rel(full.beta_s, rk4_state.beta_s) < 1e-12
    assert _rel(full.eta_s, rk4_state.eta_s) < 1e-12


def test_symplectic_and_bogoliubov_relations(rk4_state):
    assert symplectic_defect(rk4_state) < 1e-9
    U, V, Q, P = rk4_state.blocks()
    n = rk4_state.n
    # canonical commutators: U V^T = V U^T and U U^dag - V V^dag = I
    assert np.allclose(U @ V.T, V @ U.T, atol=1e-9 * np.abs(V).max())
    T = rk4_state.transfer_matrix()
    J = np.diag(np.r_[np.ones(n), -np.ones(n)])
    assert np.allclose(T @ J @ T.conj().T, J, atol=1e-8)


def test_signal_idler_kernels_coincide_in_interaction_frame(rk4_state):
    # degenerate, symmetric pump: the idler kernels equal the signal kernels
    assert _rel(rk4_state.beta_i, rk4_state.beta_s) < 1e-10
    assert _rel(rk4_state.eta_i, rk4_state.eta_s) < 1e-10


def test_mirror_symmetry(rk4_state):
    b = rk4_state.beta_s
    assert np.allclose(b[::-1, ::-1], b, atol=1e-12 * np.abs(b).max())


def test_zero_coupling_is_identity(setup):
    spec, pump, grid, _ = setup
    st = propagate_single_crystal(spec, pump, grid, 0.0, OPTS)
    assert np.abs(st.beta_s).max() == 0.0
    assert np.abs(st.eta_s).max() == 0.0


def test_weak_coupling_matches_first_order(setup):
    spec, pump, grid, gamma = setup
    g = gamma * 1e-3 / 3
    st = propagate_single_crystal(spec, pump, grid, g, OPTS)
    assert _rel(st.beta_s, perturbative_beta(spec, pump, grid, g)) < 1e-5


def test_kernel_unweights(rk4_state):
    sw = rk4_state.grid.sqrt_weights
    assert np.allclose(rk4_state.kernel("beta_s") * sw[:, None] * sw[None, :], rk4_state.beta_s)


def test_required_steps_grows_with_mismatch(setup):
    spec, _, grid, _ = setup
    big = replace(spec, delta_k=5e5)
    assert required_steps(big, grid, 100) >= 5e5 * spec.length / 0.1


def test_split_crystal_composes_to_whole(setup):
    spec, pump, grid, gamma = setup
    half = exact_transfer(spec, pump, grid, gamma, length=spec.length / 2)
    whole = exact_transfer(spec, pump, grid, gamma)
    both = compose(half, half)
    assert _rel(both.beta_s, whole.beta_s) < 1e-10
    assert _rel(both.eta_s, whole.eta_s) < 1e-10
    assert np.allclose(both.frame_phase, whole.frame_phase)


def test_compose_with_identity(rk4_state):
    ident = identity_state(rk4_state.grid)
    for st in (compose(ident, rk4_state), compose(rk4_state, ident)):
        assert _rel(st.beta_s, rk4_state.beta_s) < 1e-14


def test_compose_rejects_mismatched_grids(rk4_state):
    other = identity_state(make_grid(1e5, 32))
    with pytest.raises(ValueError):
        compose(other, rk4_state)


def test_gap_only_moves_frame_phase(setup, rk4_state):
    spec = setup[0]
    gap = GapSpec(5e-3, 1.00028574, 1.00027572)
    st = apply_gap(rk4_state, gap, spec)
    assert st.beta_s is rk4_state.beta_s
    assert not np.allclose(st.frame_phase, rk4_state.frame_phase)


def test_two_crystal_zero_gap_equals_double_length(setup):
    spec, pump, grid, gamma = setup
    single = exact_transfer(spec, pump, grid, gamma)
    two = propagate_two_crystal(spec, pump, GapSpec(0.0, 1.0003, 1.0003), grid, gamma, single=single)
    ref = exact_transfer(spec, pump, grid, gamma, length=2 * spec.length)
    assert _rel(two.beta_s, ref.beta_s) < 1e-10
    assert symplectic_defect(two) < 1e-9


def test_convergence_check_raises_when_too_coarse(setup, monkeypatch):
    import bsvkernels.propagator as prop
    monkeypatch.setattr(prop, "CONVERGENCE_TOL", 1e-30)
    monkeypatch.setattr(prop, "required_steps", lambda spec, grid, n: n)
    spec, pump, grid, gamma = setup
    with pytest.raises(ConvergenceError):
        propagate_single_crystal(spec, pump, grid, gamma,
                                 IntegratorOptions(step_count=100, check_convergence=True))


def test_convergence_check_passes(setup):
    st = propagate_single_crystal(*setup, IntegratorOptions(step_count=400, check_convergence=True))
    assert st.steps >= 400


@pytest.mark.parametrize("kw", [dict(step_count=50), dict(step_count=100.5), dict(scheme="euler")])
def test_options_validation(kw):
    with pytest.raises(ValueError):
        IntegratorOptions(**kw)


def test_negative_coupling_rejected(setup):
    spec, pump, grid, _ = setup
    with pytest.raises(ValueError):
        propagate_single_crystal(spec, pump, grid, -1.0, OPTS)
