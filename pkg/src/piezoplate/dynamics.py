"""Time and frequency response of the truncated modal system.

For ``n`` plate modes ``v`` and ``n`` network modes ``phi``:

    v''   = -alpha lam v + gamma C phi'
    phi'' = -beta nu phi - delta phi' - gamma C^T (delta v + v')

where ``C[h, k] = <m_h, lap e_k>``. The first-order state is
``[v, v', phi, phi']``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .coupling import CouplingMatrix
from .integrator import DenseSolution, IntegratorStats, dopri5
from .modal_basis import ModalBasis
from .params import DimensionlessParams
from .tuning import modulation

DEFAULT_REL_TOL = 1e-9


class DimensionError(ValueError):
    pass


class SingularResponseError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ModalSystem:
    alpha: float
    beta: float
    gamma: float
    delta: float
    lam: np.ndarray
    nu: np.ndarray
    coupling: np.ndarray

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def A(self) -> np.ndarray:
        return self.alpha * self.lam

    @property
    def B(self) -> np.ndarray:
        return self.beta * self.nu

    @property
    def C(self) -> np.ndarray:
        """Scaled coupling ``gamma * C``."""
        return self.gamma * self.coupling

    def matrix(self) -> np.ndarray:
        n = self.n
        eye, zero = np.eye(n), np.zeros((n, n))
        gc = self.gamma * self.coupling
        return np.block(
            [
                [zero, eye, zero, zero],
                [-np.diag(self.A), zero, zero, gc],
                [zero, zero, zero, eye],
                [-self.delta * gc.T, -gc.T, -np.diag(self.B), -self.delta * eye],
            ]
        )

    def modal_abcd(self, h: int) -> tuple[float, float, float, float]:
        """``(A, B, C, D)`` of the diagonal pair ``h`` (1-based)."""
        i = h - 1
        return float(self.A[i]), float(self.B[i]), float(self.gamma * self.coupling[i, i]), float(self.delta)


def assemble(
    params: DimensionlessParams,
    mech_eigenvalues,
    elec_eigenvalues,
    coupling: CouplingMatrix | np.ndarray,
) -> ModalSystem:
    lam = np.asarray(mech_eigenvalues, dtype=float)
    nu = np.asarray(elec_eigenvalues, dtype=float)
    c = np.asarray(coupling.entries if isinstance(coupling, CouplingMatrix) else coupling, dtype=float)
    if lam.ndim != 1 or nu.shape != lam.shape or c.shape != (lam.size, lam.size):
        raise DimensionError(
            f"inconsistent sizes: {lam.size} plate modes, {nu.size} network modes, coupling {c.shape}"
        )
    return ModalSystem(params.alpha, params.beta, params.gamma, params.delta, lam, nu, c)


# --- states and energies --------------------------------------------------------


@dataclass(frozen=True)
class ModalState:
    v: np.ndarray
    vdot: np.ndarray
    phi: np.ndarray
    phidot: np.ndarray

    def __post_init__(self):
        n = np.shape(self.v)[-1]
        for name in ("vdot", "phi", "phidot"):
            if np.shape(getattr(self, name))[-1] != n:
                raise DimensionError(f"{name} length differs from v")
        if not all(np.all(np.isfinite(getattr(self, f))) for f in ("v", "vdot", "phi", "phidot")):
            raise ValueError("state entries must be finite")

    @property
    def n(self) -> int:
        return np.shape(self.v)[-1]

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.v, self.vdot, self.phi, self.phidot], axis=-1)

    @classmethod
    def from_vector(cls, y) -> "ModalState":
        y = np.asarray(y, dtype=float)
        n = y.shape[-1] // 4
        return cls(y[..., :n], y[..., n : 2 * n], y[..., 2 * n : 3 * n], y[..., 3 * n :])

    @classmethod
    def zeros(cls, n: int) -> "ModalState":
        z = np.zeros(n)
        return cls(z, z.copy(), z.copy(), z.copy())


@dataclass(frozen=True)
class EnergyBreakdown:
    mech_elastic: np.ndarray
    mech_kinetic: np.ndarray
    elec_inductive: np.ndarray
    elec_capacitive: np.ndarray

    @property
    def mechanical(self):
        return self.mech_elastic + self.mech_kinetic

    @property
    def electrical(self):
        return self.elec_inductive + self.elec_capacitive

    @property
    def total(self):
        return self.mechanical + self.electrical


def energies(state: ModalState, sys: ModalSystem) -> EnergyBreakdown:
    """The four modal energies; works on a single state or a stacked history."""
    if state.n != sys.n:
        raise DimensionError(f"state has {state.n} modes, system {sys.n}")
    return EnergyBreakdown(
        mech_elastic=0.5 * np.sum(sys.A * state.v**2, axis=-1),
        mech_kinetic=0.5 * np.sum(state.vdot**2, axis=-1),
        elec_inductive=0.5 * np.sum(sys.B * state.phi**2, axis=-1),
        elec_capacitive=0.5 * np.sum(state.phidot**2, axis=-1),
    )


def modal_mech_energy(state: ModalState, sys: ModalSystem) -> np.ndarray:
    """Per-mode plate energy ``A_h v_h^2 / 2 + v_h'^2 / 2``."""
    return 0.5 * (sys.A * state.v**2 + state.vdot**2)


def dissipation_rate(state: ModalState, sys: ModalSystem) -> np.ndarray:
    """``-dE/dt = delta * sum_h phi'_h (phi'_h + gamma sum_k C[k, h] v_k)``."""
    drive = state.phidot + sys.gamma * state.v @ sys.coupling
    return sys.delta * np.sum(state.phidot * drive, axis=-1)


# --- closed form ----------------------------------------------------------------


def closed_form_undamped(A: float, B: float, C: float, v0: float, t) -> tuple[np.ndarray, np.ndarray]:
    """Undamped single-pair response to an initial displacement ``v0``."""
    t = np.asarray(t, dtype=float)
    m = modulation(A, B, C, v0)
    v = m.V1 * np.cos(m.alpha1 * t) + m.V2 * np.cos(m.alpha2 * t)
    phi = m.Phi1 * np.sin(m.alpha1 * t) + m.Phi2 * np.sin(m.alpha2 * t)
    return v, phi


def envelopes(A: float, B: float, C: float, v0: float, t) -> tuple[np.ndarray, np.ndarray]:
    """Slow envelopes of the maxima and minima of the modulated displacement."""
    if C**2 >= 0.1 * A:
        warnings.warn("envelopes assume C^2 << A; got C^2 >= 0.1 A", stacklevel=2)
    t = np.asarray(t, dtype=float)
    m = modulation(A, B, C, v0)
    half = 0.5 * (m.alpha1 - m.alpha2) * t
    return (m.V1 + m.V2) * np.cos(half), (m.V1 - m.V2) * np.sin(half)


def beat_period(A: float, B: float, C: float) -> float:
    """Period ``2 pi / |a2 - a1|`` of the energy exchange."""
    m = modulation(A, B, C)
    gap = abs(m.alpha2 - m.alpha1)
    if gap == 0:
        raise ValueError("no beating without coupling or detuning")
    return 2.0 * np.pi / gap


# --- time integration --------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    y: np.ndarray  # (len(t), 4n)
    energy: EnergyBreakdown
    stats: IntegratorStats
    dense: DenseSolution | None = None

    @property
    def states(self) -> ModalState:
        return ModalState.from_vector(self.y)

    @property
    def n(self) -> int:
        return self.y.shape[1] // 4

    def at(self, times) -> ModalState:
        if self.dense is None:
            raise ValueError("trajectory was recorded without dense output")
        return ModalState.from_vector(self.dense(times))


def integrate(
    sys: ModalSystem,
    init: ModalState,
    t_end: float,
    rel_tol: float = DEFAULT_REL_TOL,
    samples: int | np.ndarray = 2001,
    abs_tol: float | None = None,
    keep_dense: bool = True,
) -> Trajectory:
    """Integrate the modal system with adaptive DOPRI5.

    ``samples`` is either the number of equally spaced output times on
    ``[0, t_end]`` or an explicit increasing array of times.
    """
    if not 1e-12 <= rel_tol <= 1e-3:
        raise ValueError(f"rel_tol must lie in [1e-12, 1e-3], got {rel_tol}")
    if init.n != sys.n:
        raise DimensionError(f"initial state has {init.n} modes, system {sys.n}")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if np.ndim(samples) == 0:
        times = np.linspace(0.0, t_end, int(samples))
    else:
        times = np.asarray(samples, dtype=float)
        if np.any(np.diff(times) <= 0):
            raise ValueError("sample times must be strictly increasing")
    m = sys.matrix()
    y0 = init.to_vector()
    if abs_tol is None:
        abs_tol = 1e-3 * rel_tol * max(np.max(np.abs(y0)), 1e-300)
    dense, stats = dopri5(m.dot, y0, t_end, rel_tol=rel_tol, abs_tol=abs_tol)
    y = dense(times)
    return Trajectory(times, y, energies(ModalState.from_vector(y), sys), stats, dense if keep_dense else None)


# --- frequency response ------------------------------------------------------------


def dynamic_stiffness(sys: ModalSystem, omega: float) -> np.ndarray:
    """Complex ``2n x 2n`` matrix ``Z`` with ``Z [V; Phi] = [F_mech; F_elec]``."""
    n = sys.n
    s = 1j * omega
    gc = sys.gamma * sys.coupling
    return np.block(
        [
            [np.diag(sys.A + s * s), -s * gc],
            [(sys.delta + s) * gc.T, np.diag(sys.B + s * s + s * sys.delta)],
        ]
    )


def transfer_matrix(sys: ModalSystem, omega: float) -> np.ndarray:
    z = dynamic_stiffness(sys, omega)
    # compare against the stiffness scale, not the entries of z, which may all vanish together
    scale = max(np.max(sys.A), np.max(sys.B), omega * omega, 1.0)
    if np.linalg.svd(z, compute_uv=False)[-1] < 1e-12 * scale:
        raise SingularResponseError(f"singular response at omega = {omega!r} (undamped resonance)")
    return np.linalg.inv(z)


@dataclass(frozen=True)
class FRF:
    omega: np.ndarray
    mech_norm: np.ndarray
    elec_norm: np.ndarray
    coupling_norm: np.ndarray


def frf(sys: ModalSystem, omegas, forcing=None) -> FRF:
    """Frobenius norms of the blocks of the harmonic transfer matrix.

    ``mech_norm``: plate response to plate forcing; ``elec_norm``: network
    response to network forcing; ``coupling_norm``: network response to plate
    forcing. ``forcing`` weights the plate inputs (default: unit force on
    every plate mode).
    """
    n = sys.n
    w = np.ones(n) if forcing is None else np.asarray(forcing, dtype=float)
    if w.shape != (n,):
        raise DimensionError(f"forcing must have {n} entries")
    omegas = np.asarray(omegas, dtype=float)
    mech, elec, coup = (np.empty(omegas.size) for _ in range(3))
    for i, om in enumerate(omegas):
        h = transfer_matrix(sys, om)
        mech[i] = np.linalg.norm(h[:n, :n] * w[None, :])
        elec[i] = np.linalg.norm(h[n:, n:])
        coup[i] = np.linalg.norm(h[n:, :n] * w[None, :])
    return FRF(omegas, mech, elec, coup)


# --- impulses and fields ------------------------------------------------------------


def impulse_initial_state(point, basis: ModalBasis, n: int = 4, magnitude: float | None = None) -> ModalState:
    """Velocity impulse concentrated at ``point``, projected on the first ``n``
    plate modes. The default magnitude gives unit initial energy."""
    x1, x2 = (float(c) for c in point)
    if not (0.0 < x1 < 1.0 and 0.0 < x2 < 1.0):
        raise ValueError(f"impulse point {point} must lie in the open unit square")
    if n > len(basis):
        raise DimensionError(f"basis holds {len(basis)} modes, {n} requested")
    proj = np.array([m.shape(x1, x2) for m in basis.modes[:n]], dtype=float)
    if magnitude is None:
        norm2 = float(proj @ proj)
        if norm2 == 0.0:
            raise ValueError("impulse point lies on nodal lines of every retained mode")
        magnitude = np.sqrt(2.0 / norm2)
    z = np.zeros(n)
    return ModalState(z, magnitude * proj, z.copy(), z.copy())


@dataclass(frozen=True)
class FieldSnapshot:
    t: float
    x1: np.ndarray
    x2: np.ndarray
    w: np.ndarray
    phi: np.ndarray


def reconstruct_fields(traj: Trajectory, mech: ModalBasis, elec: ModalBasis, grid, times) -> list[FieldSnapshot]:
    """Plate displacement and network e-state on ``grid`` (a pair of 1-D
    coordinate arrays) at the requested times."""
    n = traj.n
    if len(mech) < n or len(elec) < n:
        raise DimensionError("bases hold fewer modes than the trajectory")
    g1, g2 = (np.asarray(g, dtype=float) for g in grid)
    x1, x2 = np.meshgrid(g1, g2, indexing="ij")
    m_vals = np.stack([m.shape(x1, x2) for m in mech.modes[:n]])
    e_vals = np.stack([e.shape(x1, x2) for e in elec.modes[:n]])
    times = np.atleast_1d(np.asarray(times, dtype=float))
    states = traj.at(times)
    out = []
    for i, t in enumerate(times):
        w = np.tensordot(states.v[i], m_vals, axes=1)
        phi = np.tensordot(states.phi[i], e_vals, axes=1)
        out.append(FieldSnapshot(float(t), x1, x2, w, phi))
    return out
