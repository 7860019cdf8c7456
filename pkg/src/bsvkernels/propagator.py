"""Bogoliubov transfer of the signal and idler fields through one or two crystals.

Field operators are represented on the quadrature grid by the discrete modes
``b_j = sqrt(w_j) a(q_j)``. In that basis the output fields read

    b_s(L)  = (I + eta_s) b_s(0) + beta_s b_i(0)^dagger
    b_i(L)  = (I + eta_i) b_i(0) + beta_i b_s(0)^dagger

so every stored matrix is the continuous kernel conjugated by ``W**0.5``
(``W = diag(w)``). Use :meth:`TransferState.kernel` for the continuous kernels.

The matrices are kept in the interaction frame, where the free propagation
phase is divided out and the generator is ``Gamma * F * exp(i Delta_k z)``.
The accumulated free phase is stored per mode in ``frame_phase``; it matters
only when stages are chained.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .dispersion import (CrystalSpec, GapSpec, PumpSpec, crystal_frame_phase,
                         delta_k_crystal, gap_frame_phase)
from .errors import ConvergenceError
from .grid import QGrid, pump_kernel

# Largest mismatch phase Delta_k * h allowed in one RK4 step.
MAX_PHASE_PER_STEP = 0.1
# Relative change of ||beta||_F on step doubling that triggers ConvergenceError.
CONVERGENCE_TOL = 1e-4
# Kernel entries below this fraction of the peak are dropped. They lie far
# beneath double precision of every row sum, and subnormal values in the tails
# of the Gaussian slow the matrix products down by about a factor of two.
KERNEL_FLOOR = 1e-30


@dataclass(frozen=True)
class IntegratorOptions:
    """Settings for the fixed-step RK4 integrator.

    Attributes:
        step_count: minimum number of RK4 steps across the crystal. More are
            used if needed to keep ``Delta_k * h`` below 0.1 rad on the grid.
        scheme: only ``"rk4"``.
        check_convergence: repeat the run with twice the steps and raise
            :class:`ConvergenceError` if ``||beta||_F`` moves by more than 1e-4.
        use_parity: integrate the mirror-even and mirror-odd sectors
            separately. Exact for the Gaussian pump kernel on a symmetric grid
            and four times cheaper.
    """

    step_count: int = 1000
    scheme: str = "rk4"
    check_convergence: bool = False
    use_parity: bool = True

    def __post_init__(self):
        if self.scheme != "rk4":
            raise ValueError(f"unsupported integration scheme {self.scheme!r}")
        if int(self.step_count) != self.step_count or self.step_count < 100:
            raise ValueError(f"step_count must be an integer >= 100, got {self.step_count!r}")


@dataclass(frozen=True, eq=False)
class TransferState:
    """Bogoliubov kernels of a propagation stage, weight-symmetrized.

    ``eta_s``, ``beta_s`` act on the signal output; ``eta_i``, ``beta_i`` on
    the idler output. Rows index the output mode, columns the input mode.
    """

    grid: QGrid
    eta_s: np.ndarray
    beta_s: np.ndarray
    eta_i: np.ndarray
    beta_i: np.ndarray
    frame_phase: np.ndarray
    gamma: float = 0.0
    length: float = 0.0
    steps: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.grid.size

    @property
    def gain_parameter(self) -> float:
        """Coupling times total interaction length, ``Gamma * L``."""
        return self.gamma * self.length

    def blocks(self):
        """Return ``(U, V, Q, P)`` with ``b_s -> U b_s + V b_i^dag`` and
        ``b_i^dag -> Q b_s + P b_i^dag``."""
        eye = np.eye(self.n)
        return (eye + self.eta_s, self.beta_s,
                np.conj(self.beta_i), np.conj(eye + self.eta_i))

    def transfer_matrix(self) -> np.ndarray:
        U, V, Q, P = self.blocks()
        return np.block([[U, V], [Q, P]])

    def exit_blocks(self):
        """Blocks with the free propagation phase restored."""
        U, V, Q, P = self.blocks()
        ph = np.exp(-1j * self.frame_phase)[:, None]
        return ph * U, ph * V, np.conj(ph) * Q, np.conj(ph) * P

    def kernel(self, name: str) -> np.ndarray:
        """Continuous kernel ``W**-0.5 @ M @ W**-0.5`` of ``eta_s``, ``beta_s``, ..."""
        m = getattr(self, name)
        isw = 1.0 / self.grid.sqrt_weights
        return isw[:, None] * m * isw[None, :]


def _from_blocks(grid, U, V, Q, P, frame_phase, **kw) -> TransferState:
    eye = np.eye(grid.size)
    return TransferState(grid=grid, eta_s=U - eye, beta_s=V,
                         eta_i=np.conj(P) - eye, beta_i=np.conj(Q),
                         frame_phase=np.asarray(frame_phase, dtype=float), **kw)


def identity_state(grid: QGrid) -> TransferState:
    n = grid.size
    z = np.zeros((n, n), dtype=complex)
    return TransferState(grid=grid, eta_s=z, beta_s=z.copy(), eta_i=z.copy(),
                         beta_i=z.copy(), frame_phase=np.zeros(n))


def symplectic_defect(state: TransferState) -> float:
    """Frobenius norm of ``S S^dag - B B^dag - I`` for the signal transfer."""
    S = np.eye(state.n) + state.eta_s
    B = state.beta_s
    return float(np.linalg.norm(S @ S.conj().T - B @ B.conj().T - np.eye(state.n)))


def coupling_matrix(grid: QGrid, pump: PumpSpec, gamma: float) -> np.ndarray:
    """Weight-symmetrized coupling ``Gamma * W**0.5 F W**0.5`` (real symmetric)."""
    sw = grid.sqrt_weights
    F = pump_kernel(grid, pump)
    F[F < KERNEL_FLOOR] = 0.0
    return gamma * sw[:, None] * F * sw[None, :]


def required_steps(spec: CrystalSpec, grid: QGrid, step_count: int) -> int:
    """Step count honouring both the request and the per-step phase limit."""
    q = grid.nodes
    dk_max = float(np.max(np.abs(delta_k_crystal(spec, q[:, None], q[None, :]))))
    return max(int(step_count), int(math.ceil(dk_max * spec.length / MAX_PHASE_PER_STEP)))


def _rk4(M0, rate, length, steps):
    """Integrate ``dX/dz = A(z) X`` from the identity.

    ``M0`` is a stack of real symmetric couplings with shape (s, n, n) and
    ``rate`` the matching per-mode phase rates (s, n). The state has shape
    (s, n, 2, 2n): axis 2 selects signal rows [U V] or idler-conjugate rows
    [Q P]. The signal rows are driven by ``D M0 D`` acting on the idler rows and
    the idler rows by the complex conjugate, with ``D = diag(exp(i rate z))``.
    """
    s, n, _ = M0.shape
    h = length / steps
    Mh = np.ascontiguousarray(M0 * h)
    X = np.zeros((s, n, 2, 2 * n), dtype=complex)
    idx = np.arange(n)
    X[:, idx, 0, idx] = 1.0
    X[:, idx, 1, n + idx] = 1.0

    Y = np.empty_like(X)
    R = np.empty((s, n, 4 * n * 2))
    k = np.empty_like(X)
    acc = np.empty_like(X)
    tmp = np.empty_like(X)
    D = np.empty((s, n, 2, 1), dtype=complex)
    Rc = R.view(complex).reshape(X.shape)

    def rhs(z, state, out):
        ph = np.exp(1j * rate * z)
        D[:, :, 0, 0] = ph
        D[:, :, 1, 0] = ph.conj()
        np.multiply(D, state[:, :, ::-1, :], out=Y)
        np.matmul(Mh, Y.view(float).reshape(s, n, -1), out=R)
        np.multiply(D, Rc, out=out)

    for step in range(steps):
        z = step * h
        rhs(z, X, k)
        np.copyto(acc, k)
        np.multiply(k, 0.5, out=tmp)
        tmp += X
        rhs(z + 0.5 * h, tmp, k)
        acc += 2.0 * k
        np.multiply(k, 0.5, out=tmp)
        tmp += X
        rhs(z + 0.5 * h, tmp, k)
        acc += 2.0 * k
        np.add(X, k, out=tmp)
        rhs(z + h, tmp, k)
        acc += k
        acc *= 1.0 / 6.0
        X += acc
    return X


def _integrate(M0, rate, length, steps, use_parity):
    n = M0.shape[0]
    if not use_parity:
        X = _rk4(M0[None], rate[None], length, steps)[0]
        return X[:, 0, :n], X[:, 0, n:], X[:, 1, :n], X[:, 1, n:]

    # mirror-even / mirror-odd split: pair node j with n-1-j
    h = n // 2
    a = np.arange(h)
    m = n - 1 - a
    even = 0.5 * (M0[np.ix_(a, a)] + M0[np.ix_(a, m)] + M0[np.ix_(m, a)] + M0[np.ix_(m, m)])
    odd = 0.5 * (M0[np.ix_(a, a)] - M0[np.ix_(a, m)] - M0[np.ix_(m, a)] + M0[np.ix_(m, m)])
    r = rate[:h]
    X = _rk4(np.stack([even, odd]), np.stack([r, r]), length, steps)

    def unfold(Ee, Eo):
        out = np.empty((n, n), dtype=complex)
        out[np.ix_(a, a)] = 0.5 * (Ee + Eo)
        out[np.ix_(m, m)] = 0.5 * (Ee + Eo)
        out[np.ix_(a, m)] = 0.5 * (Ee - Eo)
        out[np.ix_(m, a)] = 0.5 * (Ee - Eo)
        return out

    blocks = []
    for row in (0, 1):
        for col in (slice(0, h), slice(h, 2 * h)):
            blocks.append(unfold(X[0, :, row, col], X[1, :, row, col]))
    return tuple(blocks)


def propagate_single_crystal(spec: CrystalSpec, pump: PumpSpec, grid: QGrid,
                             gamma: float | None = None,
                             opts: IntegratorOptions | None = None,
                             length: float | None = None) -> TransferState:
    """Integrate the kernel equations across one crystal.

    Args:
        spec: crystal parameters.
        pump: Gaussian pump.
        grid: transverse wavevector grid.
        gamma: coupling Gamma; defaults to ``spec.interaction_strength``.
        opts: integrator settings.
        length: override the crystal length (m).

    Returns:
        TransferState in the interaction frame.
    """
    opts = opts or IntegratorOptions()
    gamma = spec.interaction_strength if gamma is None else float(gamma)
    if gamma < 0 or not math.isfinite(gamma):
        raise ValueError(f"coupling must be finite and non-negative, got {gamma}")
    if length is not None:
        spec = replace(spec, length=float(length))
    L = spec.length
    q = grid.nodes
    rate = crystal_frame_phase(spec, q, length=1.0)
    M0 = coupling_matrix(grid, pump, gamma)
    steps = required_steps(spec, grid, opts.step_count)

    def run(nsteps):
        return _integrate(M0, rate, L, nsteps, opts.use_parity)

    U, V, Q, P = run(steps)
    if opts.check_convergence:
        V2 = run(2 * steps)[1]
        nb = np.linalg.norm(V2)
        change = np.linalg.norm(V) - nb
        if nb > 0 and abs(change) / nb > CONVERGENCE_TOL:
            raise ConvergenceError(
                f"||beta|| changed by {abs(change) / nb:.3e} (relative) when doubling "
                f"the RK4 steps from {steps} to {2 * steps}")
    return _from_blocks(grid, U, V, Q, P, rate * L, gamma=gamma, length=L, steps=steps,
                        meta={"k_ref": spec.k_signal_vacuum})


def _conjugate_by_phase(state: TransferState, phase):
    """Blocks of ``R(phase)^-1 X R(phase)`` with ``R = diag(e^{-i phase}, e^{+i phase})``."""
    U, V, Q, P = state.blocks()
    e = np.exp(1j * phase)
    ec = e.conj()
    return (e[:, None] * U * ec[None, :], e[:, None] * V * e[None, :],
            ec[:, None] * Q * ec[None, :], ec[:, None] * P * e[None, :])


def compose(second: TransferState, first: TransferState) -> TransferState:
    """Chain two stages: ``first`` acts on the input, ``second`` on its output.

    In the exit frame this is the plain block product
    ``S = S2 S1 + B2 B1*``, ``B = S2 B1 + B2 S1*``; in the stored interaction
    frame the second stage is first shifted by the phase accumulated in the
    first.
    """
    if second.grid is not first.grid and not (
            np.array_equal(second.grid.nodes, first.grid.nodes)
            and np.array_equal(second.grid.weights, first.grid.weights)):
        raise ValueError("cannot compose transfer states defined on different grids")
    U2, V2, Q2, P2 = _conjugate_by_phase(second, first.frame_phase)
    U1, V1, Q1, P1 = first.blocks()
    U = U2 @ U1 + V2 @ Q1
    V = U2 @ V1 + V2 @ P1
    Q = Q2 @ U1 + P2 @ Q1
    P = Q2 @ V1 + P2 @ P1
    return _from_blocks(first.grid, U, V, Q, P, first.frame_phase + second.frame_phase,
                        gamma=first.gamma, length=first.length + second.length,
                        steps=first.steps + second.steps, meta=dict(first.meta))


def apply_gap(state: TransferState, gap: GapSpec, spec: CrystalSpec) -> TransferState:
    """Free propagation of the output through an air gap.

    Signal and idler pick up ``exp(i Delta_k' d)`` relative to the pump. In the
    interaction frame the kernels are unchanged and only the frame phase moves.
    """
    return replace(state, frame_phase=state.frame_phase + gap_frame_phase(gap, spec, state.grid.nodes))


def propagate_two_crystal(spec: CrystalSpec, pump: PumpSpec, gap: GapSpec, grid: QGrid,
                          gamma: float | None = None,
                          opts: IntegratorOptions | None = None,
                          single: TransferState | None = None) -> TransferState:
    """Two identical crystals separated by an air gap.

    ``single`` may carry a precomputed single-crystal state on the same grid
    and coupling, which avoids repeating the integration for a distance scan.
    """
    first = single if single is not None else propagate_single_crystal(spec, pump, grid, gamma, opts)
    return compose(first, apply_gap(first, gap, spec))
