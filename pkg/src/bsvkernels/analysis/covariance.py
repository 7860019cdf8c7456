"""Intensity covariance: analytic, Schmidt-mode form, and phase-space sampling.

Covariances here are of the normally ordered intensities,
``<:I(q) I(q'):> - <I(q)><I(q')>``, in density units (per unit q squared).
The shot-noise term ``delta(q - q') <I(q)>`` is not included.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalDiagnosticError
from ..grid import QGrid
from ..propagator import TransferState
from .schmidt import SchmidtDecomposition


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Intensity covariance ``Cov(q, q')`` on the grid."""

    grid: QGrid
    values: np.ndarray
    k_ref: float | None = None

    @property
    def q(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def theta(self) -> np.ndarray:
        if not self.k_ref:
            raise ValueError("covariance has no reference wavenumber for the angle map")
        return self.grid.nodes / self.k_ref

    def discrete(self) -> np.ndarray:
        """Covariance of the per-mode photon numbers, ``Cov w_j w_k``."""
        w = self.grid.weights
        return self.values * w[:, None] * w[None, :]

    def normalized(self) -> np.ndarray:
        return self.values / np.max(np.abs(self.values))


def _density(grid, disc):
    w = grid.weights
    return disc / (w[:, None] * w[None, :])


def covariance_analytic(state: TransferState, signal: bool = True, idler: bool = True,
                        cross: bool = True) -> CovarianceMatrix:
    """Wick-theorem covariance of ``I_s + I_i`` built from the transfer matrix.

    The flags select the signal-signal, idler-idler and signal-idler terms.
    """
    U, V, Q, _ = state.blocks()
    out = np.zeros((state.n, state.n))
    if signal:
        # <b_s^dag(j) b_s(k)> = (V* V^T)_jk
        out += np.abs(V.conj() @ V.T) ** 2
    if idler:
        # <b_i^dag(j) b_i(k)> = (Q Q^dag)_jk
        out += np.abs(Q @ Q.conj().T) ** 2
    if cross:
        # <b_s(j) b_i(k)> = (U Q^dag)_jk
        c = np.abs(U @ Q.conj().T) ** 2
        out += c + c.T
    return CovarianceMatrix(state.grid, _density(state.grid, out), state.meta.get("k_ref"))


def covariance_schmidt_form(decomp: SchmidtDecomposition, signal: bool = True, idler: bool = True,
                            cross: bool = True) -> CovarianceMatrix:
    """Covariance written as sums over Schmidt modes.

    Uses ``Lambda_n`` for every mode amplitude, which is the high-gain form:
    the exact signal-idler amplitude is ``sqrt(Lambda_n (1 + Lambda_n))``.
    Signal and idler share the modes ``u_n`` in the degenerate case.
    """
    grid = decomp.grid
    u = decomp.unit_modes("u")
    lam = decomp.weights
    out = np.zeros((grid.size, grid.size))
    auto = np.abs((u * lam) @ u.conj().T) ** 2
    if signal:
        out += auto
    if idler:
        out += auto
    if cross:
        ph = np.exp(1j * (decomp.phases_phi + decomp.phases_varphi))
        out += 2.0 * np.abs((u * (lam * ph)) @ u.T) ** 2
    return CovarianceMatrix(grid, _density(grid, out), decomp.k_ref)


@dataclass(frozen=True, eq=False)
class IntensitySamples:
    """Per-shot photon-number densities, shape (shots, n)."""

    grid: QGrid
    signal: np.ndarray
    idler: np.ndarray
    k_ref: float | None = None

    @property
    def shots(self) -> int:
        return self.signal.shape[0]

    def total(self) -> np.ndarray:
        return self.signal + self.idler


def sample_intensity_profiles(state: TransferState, shots: int, seed: int | None = None,
                              chunk: int = 500) -> IntensitySamples:
    """Draw single-shot intensity profiles from the Wigner distribution.

    Input vacuum amplitudes are complex Gaussian with ``<|alpha|**2> = 1/2``,
    propagated through the transfer matrix. The symmetric-ordering offset of
    1/2 per mode is subtracted, so the ensemble mean equals the photon number.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    rng = np.random.default_rng(seed)
    U, V, Q, P = state.blocks()
    n = state.n
    w = state.grid.weights
    sig = np.empty((shots, n))
    idl = np.empty((shots, n))
    for start in range(0, shots, chunk):
        m = min(chunk, shots - start)
        a = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) * 0.5
        b = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) * 0.5
        a_s = U @ a + V @ b.conj()
        a_i_conj = Q @ a + P @ b.conj()
        sig[start:start + m] = ((np.abs(a_s) ** 2 - 0.5) / w[:, None]).T
        idl[start:start + m] = ((np.abs(a_i_conj) ** 2 - 0.5) / w[:, None]).T
    return IntensitySamples(state.grid, sig, idl, state.meta.get("k_ref"))


def empirical_covariance(samples: IntensitySamples, signal: bool = True, idler: bool = True,
                         cross: bool = True, ordering_correction: bool = True) -> CovarianceMatrix:
    """Sample covariance of the selected intensity terms.

    Same-mode Wigner moments exceed the normally ordered ones by
    ``n + 1/4`` per mode; ``ordering_correction`` removes that from the
    diagonal using the sample mean ``n``.
    """
    w = samples.grid.weights
    s = samples.signal * w
    i = samples.idler * w
    m = samples.shots

    def cov(x, y):
        xc = x - x.mean(axis=0)
        yc = y - y.mean(axis=0)
        return xc.T @ yc / (m - 1)

    out = np.zeros((w.size, w.size))
    diag = np.diag_indices(w.size)
    if signal:
        c = cov(s, s)
        if ordering_correction:
            c[diag] -= s.mean(axis=0) + 0.25
        out += c
    if idler:
        c = cov(i, i)
        if ordering_correction:
            c[diag] -= i.mean(axis=0) + 0.25
        out += c
    if cross:
        c = cov(s, i)
        out += c + c.T
    return CovarianceMatrix(samples.grid, _density(samples.grid, out), samples.k_ref)


@dataclass(frozen=True, eq=False)
class ReconstructedModes:
    """Mode weights and ``|u_n|`` recovered from an intensity covariance."""

    grid: QGrid
    weights: np.ndarray
    modes: np.ndarray

    def unit_modes(self) -> np.ndarray:
        return self.grid.sqrt_weights[:, None] * self.modes


def reconstruct_modes_from_covariance(cov: CovarianceMatrix, n_modes: int | None = None,
                                      root: str = "elementwise", psd_tol: float = 1e-8) -> ReconstructedModes:
    """Recover Schmidt weights and mode magnitudes from a signal covariance.

    The signal auto-covariance is ``|K(q, q')|**2`` with
    ``K = sum_n Lambda_n u_n(q) u_n*(q')``. Taking the elementwise root gives
    ``|K|``, whose singular vectors are ``|u_n|`` when ``K`` has no sign
    changes. ``root="matrix"`` uses the matrix square root instead.

    Raises:
        NumericalDiagnosticError: if the covariance has an eigenvalue below
            ``-psd_tol`` times its largest eigenvalue.
    """
    C = cov.discrete()
    C = 0.5 * (C + C.T)
    ev, evec = np.linalg.eigh(C)
    top = max(abs(ev[-1]), abs(ev[0]), np.finfo(float).tiny)
    if ev[0] < -psd_tol * top:
        raise NumericalDiagnosticError(
            f"covariance is not positive semidefinite (eigenvalue {ev[0]:.3e}, largest {ev[-1]:.3e})")
    if root == "elementwise":
        R = np.sqrt(np.clip(C, 0.0, None))
    elif root == "matrix":
        R = (evec * np.sqrt(np.clip(ev, 0.0, None))) @ evec.T
    else:
        raise ValueError(f"unknown root {root!r}")
    _, s, Vt = np.linalg.svd(R)
    modes = np.abs(Vt.T)
    if n_modes is not None:
        s = s[:n_modes]
        modes = modes[:, :n_modes]
    modes = modes / cov.grid.sqrt_weights[:, None]
    return ReconstructedModes(cov.grid, s, modes)
