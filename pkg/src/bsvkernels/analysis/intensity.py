"""Angular intensity profiles and their widths."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..propagator import TransferState


@dataclass(frozen=True, eq=False)
class IntensityProfile:
    """Photon-number density ``N(q)`` (photons per unit q) on the grid nodes.

    ``k_ref`` converts wavevector to external emission angle,
    ``theta = q / k_ref``; it is the vacuum signal wavenumber when the state
    came from the propagator.
    """

    q: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    k_ref: float | None = None

    @property
    def theta(self) -> np.ndarray:
        if not self.k_ref:
            raise ValueError("profile has no reference wavenumber for the angle map")
        return self.q / self.k_ref

    @property
    def occupation(self) -> np.ndarray:
        """Photons per grid mode, ``N(q_j) w_j``."""
        return self.values * self.weights

    @property
    def total(self) -> float:
        return float(np.sum(self.occupation))

    def collinear(self) -> float:
        """Density at q = 0, from the central node pair of the symmetric grid."""
        n = self.q.size
        if n % 2:
            return float(self.values[n // 2])
        return float(0.5 * (self.values[n // 2 - 1] + self.values[n // 2]))

    def normalized(self) -> np.ndarray:
        return self.values / np.max(self.values)


def intensity(state: TransferState, channel: str = "signal", k_ref: float | None = None) -> IntensityProfile:
    """Mean photon-number density of the output field.

    ``N(q_j) = sum_k |beta_jk|**2 / w_j`` for the weight-symmetrized kernel.
    ``channel`` is ``"signal"``, ``"idler"`` or ``"sum"``.
    """
    occ_s = np.sum(np.abs(state.beta_s) ** 2, axis=1)
    occ_i = np.sum(np.abs(state.beta_i) ** 2, axis=1)
    occ = {"signal": occ_s, "idler": occ_i, "sum": occ_s + occ_i}.get(channel)
    if occ is None:
        raise ValueError(f"unknown channel {channel!r}")
    w = state.grid.weights
    if k_ref is None:
        k_ref = state.meta.get("k_ref")
    return IntensityProfile(q=state.grid.nodes, values=occ / w, weights=w, k_ref=k_ref)


def half_max_width(x, y) -> float:
    """Width between the outermost half-maximum crossings of ``y(x)``.

    Crossings are located by linear interpolation between the bracketing
    nodes. For fringed or ring-shaped profiles this is the envelope width.

    Raises:
        ValueError: if the maximum sits on the first or last node, or the
            profile does not drop below half maximum inside the grid.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 3:
        raise ValueError("x and y must be 1-D arrays of equal length >= 3")
    imax = int(np.argmax(y))
    if imax == 0 or imax == y.size - 1:
        raise ValueError("profile maximum lies on the grid edge; widen the grid")
    half = 0.5 * y[imax]
    above = np.nonzero(y >= half)[0]
    lo, hi = above[0], above[-1]
    if lo == 0 or hi == y.size - 1:
        raise ValueError("profile does not fall below half maximum inside the grid; widen the grid")

    def cross(i, j):
        return x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i])

    return float(cross(hi, hi + 1) - cross(lo, lo - 1))


def fwhm(profile: IntensityProfile, angle: bool = False) -> float:
    """FWHM of a profile in 1/m, or in rad when ``angle`` is set."""
    x = profile.theta if angle else profile.q
    return half_max_width(x, profile.values)
