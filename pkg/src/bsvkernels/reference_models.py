"""Closed-form and independent reference solutions used to validate the solver."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .dispersion import CrystalSpec, PumpSpec, crystal_frame_phase, delta_k_crystal
from .grid import QGrid, pump_kernel
from .propagator import TransferState, _from_blocks, coupling_matrix


def sinhc2(x):
    """``sinh(sqrt(x))**2 / x``, continued analytically through ``x <= 0``.

    Equals 1 at ``x = 0`` and ``sin(sqrt(-x))**2 / (-x)`` for negative ``x``.
    """
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    pos = x > 1e-12
    neg = x < -1e-12
    small = ~(pos | neg)
    r = np.sqrt(x[pos])
    out[pos] = np.sinh(r) ** 2 / x[pos]
    r = np.sqrt(-x[neg])
    out[neg] = np.sin(r) ** 2 / (-x[neg])
    out[small] = 1.0 + x[small] / 3.0
    return out


def plane_wave_occupation(gain, mismatch_phase):
    """Photons per mode for a monochromatic pump.

    Args:
        gain: ``G``, coupling rate times length.
        mismatch_phase: ``Delta_k L / 2`` of the mirror pair.
    """
    gain = np.asarray(gain, dtype=float)
    x = np.asarray(mismatch_phase, dtype=float)
    return gain**2 * sinhc2(gain**2 - x**2)


def plane_wave_intensity(spec: CrystalSpec, gain: float, grid: QGrid | np.ndarray):
    """Plane-wave angular profile on the grid nodes.

    Each node pairs only with its mirror image ``-q``. The returned occupation
    per mode is ``G**2 sinh(g)**2 / g**2`` with
    ``g**2 = G**2 - (Delta_k(q, -q) L / 2)**2``, which reduces to
    ``sinh(G)**2`` at perfect phase matching.
    """
    q = grid.nodes if isinstance(grid, QGrid) else np.asarray(grid, dtype=float)
    x = 0.5 * delta_k_crystal(spec, q, -q) * spec.length
    return plane_wave_occupation(gain, x)


def pair_coupling(grid: QGrid, pump: PumpSpec, gamma: float) -> np.ndarray:
    """Local coupling rate ``Gamma * sum_k w_k F(q_j, q_k)`` seen by each node.

    For a pump much wider than the grid spacing only the mirror node
    contributes and this is ``Gamma * w``; for a well resolved pump it tends
    to ``Gamma * sqrt(2 pi) / sigma``.
    """
    return gamma * pump_kernel(grid, pump) @ grid.weights


def perturbative_beta(spec: CrystalSpec, pump: PumpSpec, grid: QGrid, gamma: float) -> np.ndarray:
    """First-order kernel ``Gamma F L exp(i Delta_k L / 2) sinc(Delta_k L / 2)``.

    Returned weight-symmetrized, in the same frame as ``TransferState.beta_s``.
    """
    q = grid.nodes
    x = 0.5 * delta_k_crystal(spec, q[:, None], q[None, :]) * spec.length
    beta = gamma * pump_kernel(grid, pump) * spec.length * np.exp(1j * x) * np.sinc(x / np.pi)
    sw = grid.sqrt_weights
    return sw[:, None] * beta * sw[None, :]


def exact_transfer(spec: CrystalSpec, pump: PumpSpec, grid: QGrid, gamma: float,
                   length: float | None = None) -> TransferState:
    """Transfer state from one matrix exponential instead of ODE integration.

    Because the mismatch separates as ``phase(q_s) + phase(q_i)``, the kernel
    equations have a constant generator once the free phase is restored. The
    exponential is taken there and the result is rotated back to the
    interaction frame.
    """
    L = spec.length if length is None else float(length)
    q = grid.nodes
    rate = crystal_frame_phase(spec, q, length=1.0)
    M0 = coupling_matrix(grid, pump, gamma)
    K = np.diag(rate)
    X = expm(L * np.block([[-1j * K, M0], [M0, 1j * K]]))
    n = q.size
    back = np.exp(1j * rate * L)[:, None]
    U = back * X[:n, :n]
    V = back * X[:n, n:]
    Q = back.conj() * X[n:, :n]
    P = back.conj() * X[n:, n:]
    return _from_blocks(grid, U, V, Q, P, rate * L, gamma=float(gamma), length=L,
                        meta={"k_ref": spec.k_signal_vacuum})
