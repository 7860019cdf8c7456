"""Schmidt (singular value) decomposition of the Bogoliubov kernels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalDiagnosticError
from ..grid import QGrid
from ..propagator import TransferState
from .intensity import half_max_width

# Tolerance on max | |psi_n| - |u_n| | for unit-norm discrete vectors.
MODE_RELATION_TOL = 1e-4


def _gauge(vecs):
    """Rotate each column so its largest-magnitude entry is real and positive."""
    idx = np.argmax(np.abs(vecs), axis=0)
    ph = vecs[idx, np.arange(vecs.shape[1])]
    ph = ph / np.abs(ph)
    return vecs / ph[None, :], ph


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Schmidt modes of the output field.

    ``beta_s = sum_n sqrt(weights[n]) exp(i phases_phi[n]) u_n(q_s) psi_n(q_i)``.
    ``weights_tilde`` are the squared singular values of ``eta_s``. Modes are
    columns, normalized so that ``sum_j w_j |u_n(q_j)|**2 = 1``.

    ``phases_varphi[n]`` is the phase of ``(I + eta_s)`` between the same
    pair of modes; together with ``phases_phi`` it fixes the phase of the
    signal-idler correlation of mode ``n``.
    """

    grid: QGrid
    weights: np.ndarray
    weights_tilde: np.ndarray
    modes_u: np.ndarray
    modes_psi: np.ndarray
    phases_phi: np.ndarray
    phases_varphi: np.ndarray
    cosh_weights: np.ndarray
    relation_defect: np.ndarray
    k_ref: float | None = None

    @property
    def total_photons(self) -> float:
        return float(np.sum(self.weights))

    @property
    def normalized_weights(self) -> np.ndarray:
        return self.weights / np.sum(self.weights)

    @property
    def schmidt_number(self) -> float:
        lam = self.normalized_weights
        return float(1.0 / np.sum(lam**2))

    def unit_modes(self, which: str = "u") -> np.ndarray:
        """Modes as unit-norm vectors of the discrete basis."""
        m = self.modes_u if which == "u" else self.modes_psi
        return self.grid.sqrt_weights[:, None] * m

    def significant(self, fraction: float = 0.5) -> np.ndarray:
        """Indices of modes with weight at least ``fraction`` of the largest."""
        return np.nonzero(self.weights >= fraction * self.weights[0])[0]


def schmidt_from_state(state: TransferState, check: bool = True) -> SchmidtDecomposition:
    """Schmidt decomposition of ``beta_s`` and singular values of ``eta_s``.

    With ``check`` set, the paired relation ``|psi_n| = |u_n|`` is verified for
    every mode whose singular value is non-degenerate and not negligible;
    a violation raises :class:`NumericalDiagnosticError`.
    """
    V = state.beta_s
    U = np.eye(state.n) + state.eta_s
    Us, s, Wh = np.linalg.svd(V)
    u, _ = _gauge(Us)
    psi, _ = _gauge(Wh.T)
    # beta = sum s_n e^{i phi_n} u_n psi_n^T
    proj_b = np.sum(u.conj() * (V @ psi.conj()), axis=0)
    phi = np.angle(proj_b)
    proj_e = np.sum(u.conj() * (U @ psi), axis=0)
    varphi = np.angle(proj_e)
    s_eta = np.linalg.svd(state.eta_s, compute_uv=False)
    s_u = np.linalg.svd(U, compute_uv=False)

    defect = np.max(np.abs(np.abs(u) - np.abs(psi)), axis=0)
    if check:
        lam = s**2
        scale = lam[0] if lam[0] > 0 else 1.0
        gaps = np.minimum(np.abs(np.diff(s, prepend=np.inf)), np.abs(np.diff(s, append=-np.inf)))
        resolved = (lam > 1e-12 * scale) & (gaps > 1e-6 * s[0])
        bad = np.nonzero(resolved & (defect > MODE_RELATION_TOL))[0]
        if bad.size:
            raise NumericalDiagnosticError(
                f"|psi_n| != |u_n| for modes {bad[:5].tolist()} "
                f"(max defect {defect[bad].max():.3e})")

    isw = 1.0 / state.grid.sqrt_weights
    return SchmidtDecomposition(
        grid=state.grid, weights=s**2, weights_tilde=s_eta**2,
        modes_u=isw[:, None] * u, modes_psi=isw[:, None] * psi,
        phases_phi=phi, phases_varphi=varphi, cosh_weights=s_u**2,
        relation_defect=defect, k_ref=state.meta.get("k_ref"))


def mode_fwhm(decomp: SchmidtDecomposition, n: int, angle: bool = False) -> float:
    """Envelope FWHM of ``|u_n(q)|**2`` in 1/m, or rad with ``angle``."""
    x = decomp.grid.nodes
    if angle:
        if not decomp.k_ref:
            raise ValueError("decomposition has no reference wavenumber for the angle map")
        x = x / decomp.k_ref
    return half_max_width(x, np.abs(decomp.modes_u[:, n]) ** 2)
