"""Gain calibration and the closed-form covariance fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from ..errors import CalibrationError
from ..reference_models import sinhc2


@dataclass(frozen=True)
class GainCalibration:
    """Fit ``y = B sinh(A Gamma)**2`` of the collinear signal.

    ``gain(Gamma) = A Gamma`` is the parametric gain G.
    """

    A: float
    B: float
    residual: float
    relative_residual: float

    def gain(self, gamma):
        return self.A * np.asarray(gamma, dtype=float)

    def coupling(self, gain):
        """Coupling Gamma that produces parametric gain ``gain``."""
        return np.asarray(gain, dtype=float) / self.A

    def gain_from_signal(self, y):
        """Invert the fitted curve: G such that ``B sinh(G)**2 = y``."""
        return np.arcsinh(np.sqrt(np.asarray(y, dtype=float) / self.B))


def _best_B(s, y):
    ss = float(np.dot(s, s))
    return float(np.dot(s, y)) / ss if ss > 0 else 0.0


def calibrate_gain(gammas, signal, a_bounds: tuple[float, float] | None = None,
                   scan_points: int = 400) -> GainCalibration:
    """Least-squares fit of ``B sinh(A Gamma)**2`` to a collinear signal curve.

    ``B`` enters linearly and is solved in closed form for every trial ``A``;
    ``A`` is found by a logarithmic scan followed by bounded Brent refinement.
    """
    g = np.asarray(gammas, dtype=float)
    y = np.asarray(signal, dtype=float)
    if g.shape != y.shape or g.size < 3:
        raise ValueError("need at least three (gamma, signal) pairs of equal length")
    if np.any(g <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("gammas and signal values must be positive and finite")
    if a_bounds is None:
        # sinh(x)^2 spans from quadratic to exponential between x ~ 0.01 and ~ 30
        a_bounds = (1e-3 / g.max(), 40.0 / g.max())
    lo, hi = a_bounds

    def resid(a):
        s = np.sinh(a * g) ** 2
        B = _best_B(s, y)
        return float(np.sum((B * s - y) ** 2)), B

    grid = np.geomspace(lo, hi, scan_points)
    vals = np.array([resid(a)[0] for a in grid])
    i = int(np.argmin(vals))
    if i == 0 or i == grid.size - 1:
        raise CalibrationError(f"gain scan optimum at the bound A = {grid[i]:.4g}; "
                               f"residual {vals[i]:.3e}")
    res = minimize_scalar(lambda a: resid(a)[0], bounds=(grid[i - 1], grid[i + 1]),
                          method="bounded", options={"xatol": 1e-14 * grid[i], "maxiter": 500})
    if not res.success:
        raise CalibrationError(f"gain refinement failed: {res.message}")
    A = float(res.x)
    r, B = resid(A)
    if not (B > 0 and np.isfinite(B)):
        raise CalibrationError(f"unphysical amplitude B = {B}")
    return GainCalibration(A=A, B=B, residual=float(np.sqrt(r)),
                           relative_residual=float(np.sqrt(r / np.dot(y, y))))


def covariance_formula(theta, theta2, A, B, C, D, gain, E):
    """Closed-form covariance of bright squeezed vacuum in emission angles.

    ``A + B exp(-C (t - t')**2) [sinh(g)**2 / g**2]**2`` with
    ``g**2 = G**2 - (D (t + t')**2 + E)**2``.
    """
    d = np.asarray(theta) - np.asarray(theta2)
    s = np.asarray(theta) + np.asarray(theta2)
    x = gain**2 - (D * s**2 + E) ** 2
    return A + B * np.exp(-C * d**2) * sinhc2(x) ** 2


@dataclass(frozen=True)
class CovarianceFit:
    A: float
    B: float
    C: float
    D: float
    gain: float
    E: float
    residual: float
    relative_residual: float

    def evaluate(self, theta, theta2):
        return covariance_formula(theta, theta2, self.A, self.B, self.C, self.D, self.gain, self.E)


def fit_covariance_formula(theta, cov, gain: float, E: float, C0: float | None = None,
                           D0: float | None = None, scan_points: int = 25) -> CovarianceFit:
    """Fit the closed-form covariance to a sampled map ``cov[j, k]`` on ``theta``.

    ``A`` and ``B`` enter linearly and are solved for every trial ``(C, D)``.
    ``(log C, log D)`` are first scanned on a coarse grid, then refined with
    Nelder-Mead.

    Raises:
        CalibrationError: if the optimum has ``B <= 0`` or ``C <= 0``, or the
            residual surface is flat around it.
    """
    th = np.asarray(theta, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (th.size, th.size):
        raise ValueError("covariance must be square and match the angle grid")
    t1, t2 = np.meshgrid(th, th, indexing="ij")
    d2 = ((t1 - t2) ** 2).ravel()
    s2 = ((t1 + t2) ** 2).ravel()
    y = cov.ravel()
    span = th.max() - th.min()
    C0 = C0 if C0 is not None else 1.0 / (0.05 * span) ** 2
    D0 = D0 if D0 is not None else max(abs(E), 1.0) / (0.5 * span) ** 2

    def linear(p):
        C, D = np.exp(p)
        shape = np.exp(-C * d2) * sinhc2(gain**2 - (D * s2 + E) ** 2) ** 2
        X = np.column_stack([np.ones_like(shape), shape])
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        r = X @ coef - y
        return float(r @ r), coef

    logs = np.linspace(-4.0, 4.0, scan_points) * np.log(10.0)
    best = None
    for lc in logs:
        for ld in logs:
            p = np.array([np.log(C0) + lc, np.log(D0) + ld])
            v = linear(p)[0]
            if best is None or v < best[0]:
                best = (v, p)
    res = minimize(lambda p: linear(p)[0], best[1], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14 * max(best[0], 1e-300), "maxiter": 4000})
    p = res.x
    r, (A, B) = linear(p)
    C, D = np.exp(p)
    if not (B > 0 and C > 0):
        raise CalibrationError(f"covariance fit gave B = {B:.3e}, C = {C:.3e}; both must be positive")
    # flatness: residual must change when C or D move by 10 percent
    probe = [linear(p + dp)[0] for dp in ([0.1, 0], [-0.1, 0], [0, 0.1], [0, -0.1])]
    if max(probe) - r <= 1e-12 * max(r, float(y @ y)):
        raise CalibrationError("covariance fit is degenerate: residual is flat around the optimum")
    return CovarianceFit(A=float(A), B=float(B), C=float(C), D=float(D), gain=float(gain), E=float(E),
                         residual=float(np.sqrt(r)),
                         relative_residual=float(np.sqrt(r / max(float(y @ y), 1e-300))))
