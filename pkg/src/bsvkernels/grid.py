"""Transverse wavevector grid and the Gaussian pump kernel on it."""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .dispersion import CrystalSpec, PumpSpec

RULES = ("trapezoid", "gauss_legendre")


@dataclass(frozen=True, eq=False)
class QGrid:
    """Symmetric quadrature grid on ``[-q_max, q_max]``.

    ``nodes`` are sorted ascending and satisfy ``nodes[::-1] == -nodes``
    exactly, so ``q`` and ``-q`` are both grid points.
    """

    nodes: np.ndarray
    weights: np.ndarray
    rule: str
    q_max: float

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    @property
    def spacing(self) -> np.ndarray:
        """Local node spacing, used as the grid-cell size."""
        return np.gradient(self.nodes)

    def integrate(self, values, axis=-1):
        return np.tensordot(np.asarray(values), self.weights, axes=([axis], [0]))


def make_grid(q_max: float, n: int, rule: str = "trapezoid") -> QGrid:
    """Build a symmetric grid of ``n`` nodes on ``[-q_max, q_max]``.

    ``n`` must be even and at least 8, so that no node sits exactly on q = 0
    for Gauss-Legendre and the trapezoid grid has a central pair.
    """
    if rule not in RULES:
        raise ValueError(f"unknown quadrature rule {rule!r}; expected one of {RULES}")
    if not (isinstance(n, (int, np.integer)) and n >= 8 and n % 2 == 0):
        raise ValueError(f"grid size must be an even integer >= 8, got {n!r}")
    if not (math.isfinite(q_max) and q_max > 0):
        raise ValueError(f"q_max must be positive and finite, got {q_max!r}")

    if rule == "trapezoid":
        x = np.linspace(-1.0, 1.0, n)
        w = np.full(n, 2.0 / (n - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
    else:
        x, w = np.polynomial.legendre.leggauss(n)
    # enforce exact mirror symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    nodes = q_max * x
    weights = q_max * w
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QGrid(nodes=nodes, weights=weights, rule=rule, q_max=float(q_max))


def pump_kernel(grid: QGrid, pump: PumpSpec) -> np.ndarray:
    """Real symmetric matrix ``F[j, k] = exp(-(q_j + q_k)**2 sigma**2 / 2)``."""
    q = grid.nodes
    s = q[:, None] + q[None, :]
    return np.exp(-0.5 * (s * pump.sigma) ** 2)


def default_q_max(crystal: CrystalSpec, pump: PumpSpec, envelope_phase: float = 20.0,
                  pump_widths: float = 6.0) -> float:
    """Grid half-width that covers both the pump and the phase-matching envelope.

    The pump kernel is resolved out to ``pump_widths / sigma``. The
    phase-matching envelope is cut where the mirror-pair mismatch phase
    ``|Delta_k(q, -q)| L / 2`` reaches ``envelope_phase``; beyond that point
    emission is suppressed by the squared-sinc envelope.
    """
    L = crystal.length
    k_s = crystal.k_signal
    q_pump = pump_widths / pump.sigma
    q_env_sq = (2.0 * envelope_phase / L - crystal.delta_k) * k_s
    q_env = math.sqrt(q_env_sq) if q_env_sq > 0 else 0.0
    return max(q_pump, q_env)
