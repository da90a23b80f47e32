"""Network tuning for a single plate/network mode pair.

A tuned pair obeys

    v'' + A v - C phi' = 0
    phi'' + B phi + C v' + D phi' + C D v = 0

with ``A`` the modal plate stiffness, ``B`` the modal network stiffness,
``C`` the modal coupling and ``D`` the network dissipation. This module
holds the self-resonance band, energy-transfer time, optimal impedances and
the root locus of the characteristic quartic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .modal_basis import ModeIndex, mode_index, stiffening_ratio
from .params import PhysicalParams, derive_physical

RESIDUAL_TOL = 1e-9


class TuningError(ValueError):
    pass


class RootSolverError(RuntimeError):
    pass


class BranchTrackingError(RuntimeError):
    def __init__(self, message: str, location: float):
        super().__init__(f"{message} (at D = {location!r})")
        self.location = location


@dataclass(frozen=True)
class ModalABCD:
    A: float
    B: float
    C: float
    D: float = 0.0

    def __post_init__(self):
        if not (self.A > 0 and self.B > 0):
            raise TuningError(f"A and B must be positive, got A={self.A}, B={self.B}")
        if self.D < 0:
            raise TuningError(f"D must be non-negative, got {self.D}")
        if not all(math.isfinite(x) for x in (self.A, self.B, self.C, self.D)):
            raise TuningError("modal parameters must be finite")


# --- undamped exchange --------------------------------------------------------


def self_resonance_band(A: float, C: float) -> tuple[float, float]:
    """Interval of network stiffness giving self-resonance, ``(A - C^2, A + C^2)``."""
    if not A > 0:
        raise TuningError(f"A must be positive, got {A}")
    b1, b2 = A - C**2, A + C**2
    if b1 <= 0:
        raise TuningError(f"coupling too strong for a valid band: A - C^2 = {b1}")
    return b1, b2


def transfer_time(k: float) -> float:
    """Time (in periods of the first plate mode) to move the modal energy
    into the network at ``B = A``, as a function of ``k = C^2 / A``."""
    if not 0 < k <= 1:
        raise TuningError(f"coupling ratio must lie in (0, 1], got {k}")
    r = math.sqrt(k)
    return 1.0 / (2.0 * (math.sqrt(1.0 + r) - math.sqrt(1.0 - r)))


@dataclass(frozen=True)
class Modulation:
    """Two-frequency undamped response to an initial displacement ``v0``.

    ``v = V1 cos(a1 t) + V2 cos(a2 t)``, ``phi = P1 sin(a1 t) + P2 sin(a2 t)``.
    """

    alpha1: float
    alpha2: float
    V1: float
    V2: float
    Phi1: float
    Phi2: float


def modulation(A: float, B: float, C: float, v0: float = 1.0) -> Modulation:
    if not (A > 0 and B > 0):
        raise TuningError("A and B must be positive")
    s = C**2 + A + B
    disc = math.sqrt(max(s * s - 4.0 * A * B, 0.0))
    if disc == 0.0:
        # A == B and C == 0: a single undisturbed oscillator
        a = math.sqrt(A)
        return Modulation(a, a, v0, 0.0, 0.0, 0.0)
    a1 = math.sqrt(0.5 * (s - disc))
    a2 = math.sqrt(0.5 * (s + disc))
    asym = (C**2 - A + B) / disc
    v1 = 0.5 * v0 * (1.0 + asym)
    v2 = 0.5 * v0 * (1.0 - asym)
    if C == 0.0:
        return Modulation(a1, a2, v1, v2, 0.0, 0.0)
    # sign fixed by the first equation: (A - a^2) V = a C Phi
    p1 = (A - a1**2) / (a1 * C) * v1
    p2 = (A - a2**2) / (a2 * C) * v2
    return Modulation(a1, a2, v1, v2, p1, p2)


# --- optimal impedances -------------------------------------------------------


def _index(h) -> ModeIndex:
    return h if isinstance(h, ModeIndex) else mode_index(int(h))


def optimal_inductance_ss(h, p: PhysicalParams) -> float:
    """Net-inductance [H] putting network mode ``h`` in resonance with plate mode ``h``."""
    idx = _index(h)
    w = derive_physical(p).char_pulsation
    ktot = p.piezo_capacitance + p.ground_capacitance
    return 1.0 / (idx.wavenumber_sq * ktot * p.actuator_count * w**2)


def optimal_resistance_ss(p: PhysicalParams) -> float:
    """Net-resistance [Ohm] from ``D = 2|C|``; the same for every mode."""
    d = derive_physical(p)
    ktot = p.piezo_capacitance + p.ground_capacitance
    w = d.char_pulsation
    return (
        2.0 * math.pi**2 * p.piezo_coupling
        / (ktot * p.actuator_count**1.5 * w**2)
        * math.sqrt(1.0 / (d.total_mass * ktot))
    )


def optimal_impedance_clamped(h, p: PhysicalParams, c_h: float | None = None) -> tuple[float, float]:
    """``(L*, R*)`` for mode ``h`` of the clamped plate.

    ``c_h`` defaults to the Rayleigh stiffening ratio of the beam-product mode.
    """
    idx = _index(h)
    c = stiffening_ratio(idx) if c_h is None else c_h
    d = derive_physical(p)
    mp, cn, dp = d.total_mass, d.area_capacitance, d.bending_stiffness
    inductance = mp / (c * idx.wavenumber_sq * cn * math.pi**2 * dp)
    resistance = 2.0 * p.piezo_coupling / (c * cn * p.side_length * dp) * math.sqrt(mp / cn)
    return inductance, resistance


# --- characteristic polynomials -----------------------------------------------


def poly_P(m: ModalABCD) -> np.ndarray:
    """Coefficients (highest first) of ``s^2 C^2 + s D C^2 + (s^2 + A)(s^2 + s D + B)``."""
    A, B, C, D = m.A, m.B, m.C, m.D
    return np.array([1.0, D, A + B + C * C, D * (A + C * C), A * B])


def poly_Q(A: float, C: float, D: float) -> np.ndarray:
    """Coefficients of ``s^2 C^2 + (s^2 + A)(s^2 + s D + A)``."""
    return np.array([1.0, D, 2.0 * A + C * C, A * D, A * A])


def _polish(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    dcoeffs = np.polyder(coeffs)
    out = roots.astype(complex)
    for i, r in enumerate(out):
        for _ in range(3):
            f, df = np.polyval(coeffs, r), np.polyval(dcoeffs, r)
            if df == 0:
                break
            nxt = r - f / df
            if abs(np.polyval(coeffs, nxt)) < abs(f):
                r = nxt
            else:
                break
        out[i] = r
    return out


def quartic_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots via companion-matrix eigenvalues, Newton-polished and residual-checked."""
    roots = _polish(coeffs, np.roots(coeffs))
    if len(roots) != len(coeffs) - 1:
        raise RootSolverError("leading coefficient vanished")
    powers = np.arange(len(coeffs) - 1, -1, -1)
    scale = np.array([np.abs(coeffs) @ np.abs(r) ** powers for r in roots])
    resid = np.abs(np.polyval(coeffs, roots))
    if np.any(resid > RESIDUAL_TOL * np.maximum(scale, 1.0)):
        raise RootSolverError(f"root residual {resid.max():.3g} exceeds tolerance")
    return roots


def _match(prev: np.ndarray, new: np.ndarray) -> tuple[np.ndarray, float]:
    """Reorder ``new`` to follow ``prev``; return it and an ambiguity ratio
    (second-best over best assignment cost, large means unambiguous)."""
    cost = np.abs(prev[:, None] - new[None, :])
    rows, cols = linear_sum_assignment(cost)
    best = cost[rows, cols].sum()
    second = np.inf
    n = len(prev)
    for a in range(n):
        for b in range(a + 1, n):
            alt = cols.copy()
            alt[a], alt[b] = alt[b], alt[a]
            second = min(second, cost[rows, alt].sum())
    ratio = second / best if best > 0 else np.inf
    return new[cols], ratio


def _continue(coeff_fn, t0: float, t1: float, roots0: np.ndarray, depth: int = 0) -> np.ndarray:
    """Carry an ordered root vector from parameter ``t0`` to ``t1``, bisecting
    the step while the matching is ambiguous."""
    new, ratio = _match(roots0, quartic_roots(coeff_fn(t1)))
    if ratio > 2.0 or depth >= 40:
        return new
    tm = 0.5 * (t0 + t1)
    mid = _continue(coeff_fn, t0, tm, roots0, depth + 1)
    return _continue(coeff_fn, tm, t1, mid, depth + 1)


@dataclass(frozen=True)
class RootSet:
    """Four roots split into a mechanical and an electrical conjugate pair.

    ``mechanical[0]`` and ``electrical[0]`` are the members with non-negative
    imaginary part.
    """

    mechanical: tuple
    electrical: tuple
    coupling_weight: tuple = field(default=(0.0, 0.0))

    @property
    def roots(self) -> np.ndarray:
        return np.array(self.mechanical + self.electrical)

    @property
    def damping(self) -> tuple[float, float]:
        """``-Re`` of the mechanical and electrical branches."""
        return -self.mechanical[0].real, -self.electrical[0].real

    @property
    def pulsation(self) -> tuple[float, float]:
        return abs(self.mechanical[0].imag), abs(self.electrical[0].imag)


def _upper_first(pair) -> tuple:
    a, b = pair
    return (a, b) if a.imag >= b.imag else (b, a)


def _pair_from_uncoupled(coeff_fn, A: float, C: float, n_steps: int = 32) -> tuple[np.ndarray, np.ndarray]:
    # at C = 0 the mechanical pair is exactly +-i sqrt(A)
    start = quartic_roots(coeff_fn(0.0))
    ordered = start[np.argsort(np.abs(start - 1j * math.sqrt(A)))]
    mech_up = ordered[0]
    rest = np.delete(start, 0)
    mech_down_i = np.argmin(np.abs(rest + 1j * math.sqrt(A)))
    mech = np.array([mech_up, rest[mech_down_i]])
    elec = np.delete(rest, mech_down_i)
    roots = np.concatenate([mech, elec])
    ts = np.linspace(0.0, C, n_steps + 1)
    for t0, t1 in zip(ts[:-1], ts[1:]):
        roots = _continue(coeff_fn, t0, t1, roots)
    return roots[:2], roots[2:]


def energy_weight(s: complex, A: float, B: float, C: float) -> float:
    """Mechanical share of the modal energy carried by root ``s``'s eigenvector."""
    if C == 0:
        return 1.0 if abs(s * s + A) <= abs(s * s + B) else 0.0
    phi = (s * s + A) / (C * s)
    em = abs(s) ** 2 + A
    ee = (abs(s) ** 2 + B) * abs(phi) ** 2
    return em / (em + ee)


def _weight(s: complex, A: float, B: float, C: float) -> float:
    w = energy_weight(s, A, B, C)
    return 4.0 * w * (1.0 - w)


def char_roots_P(m: ModalABCD) -> RootSet:
    """Roots of the characteristic quartic of the damped pair, branch-labelled
    by continuation from the uncoupled limit ``C -> 0``."""
    A, B, D = m.A, m.B, m.D

    def coeffs(c):
        return poly_P(ModalABCD(A, B, c, D))

    mech, elec = _pair_from_uncoupled(coeffs, A, abs(m.C))
    mech, elec = _upper_first(mech), _upper_first(elec)
    weight = (_weight(mech[0], A, B, m.C), _weight(elec[0], A, B, m.C))
    return RootSet(mech, elec, weight)


def char_roots_Q(A: float, C: float, D: float) -> RootSet:
    """Roots of the comparison quartic ``s^2 C^2 + (s^2 + A)(s^2 + s D + A)``."""
    if not A > 0:
        raise TuningError(f"A must be positive, got {A}")
    if D < 0:
        raise TuningError(f"D must be non-negative, got {D}")

    def coeffs(c):
        return poly_Q(A, c, D)

    mech, elec = _pair_from_uncoupled(coeffs, A, abs(C))
    mech, elec = _upper_first(mech), _upper_first(elec)
    return RootSet(mech, elec, (_weight(mech[0], A, A, C), _weight(elec[0], A, A, C)))


def routh_hurwitz_stable(m: ModalABCD) -> bool:
    """Routh-Hurwitz test for the quartic; reduces to ``B C^2 D^2 > 0``."""
    a1, a2, a3, a4 = poly_P(m)[1:]
    return a1 > 0 and a3 > 0 and a4 > 0 and a1 * a2 - a3 > 0 and a1 * a2 * a3 - a3**2 - a1**2 * a4 > 0


# --- damping sweep --------------------------------------------------------------


@dataclass(frozen=True)
class DampingSweep:
    D: np.ndarray
    mechanical: np.ndarray  # upper-half-plane root per grid point
    electrical: np.ndarray
    mech_weight: np.ndarray
    elec_weight: np.ndarray
    D_opt: float
    max_mech_damping: float


def damping_sweep(A: float, B: float, C: float, D_grid) -> DampingSweep:
    """Track the roots of the damped pair along a grid of ``D``.

    Branches are identified at the largest ``D`` (where the network is
    nearly decoupled and the uncoupled-limit continuation is unambiguous) and
    carried across the grid by continuity. ``D_opt`` maximises the damping of
    the mechanical branch, refined between grid points.
    """
    grid = np.asarray(D_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("D grid needs at least two points")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("D grid must be positive and strictly increasing")

    def coeffs_at(d):
        return poly_P(ModalABCD(A, B, C, d))

    anchor = char_roots_P(ModalABCD(A, B, C, grid[-1]))
    roots = np.array(list(anchor.mechanical) + list(anchor.electrical))
    track = np.empty((grid.size, 4), dtype=complex)
    track[-1] = roots
    for i in range(grid.size - 1, 0, -1):
        roots = _continue(coeffs_at, grid[i], grid[i - 1], roots)
        track[i - 1] = roots

    mech = np.where(track[:, 0].imag >= track[:, 1].imag, track[:, 0], track[:, 1])
    elec = np.where(track[:, 2].imag >= track[:, 3].imag, track[:, 2], track[:, 3])
    gap = np.abs(mech - elec)
    scale = math.sqrt(A) + math.sqrt(B)
    hit = np.flatnonzero(gap < 1e-10 * scale)
    if hit.size:
        raise BranchTrackingError("mechanical and electrical roots collide", float(grid[hit[0]]))

    mw = np.array([energy_weight(s, A, B, C) for s in mech])
    ew = np.array([energy_weight(s, A, B, C) for s in elec])
    damping = -mech.real
    i = int(np.argmax(damping))
    d_opt, best = float(grid[i]), float(damping[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if hi > lo and C != 0:

        def neg_damping(d):
            r = quartic_roots(coeffs_at(d))
            guess = np.interp(d, grid, mech.real) + 1j * np.interp(d, grid, mech.imag)
            return r[np.argmin(np.abs(r - guess))].real

        res = minimize_scalar(neg_damping, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * hi})
        if -res.fun > best:
            d_opt, best = float(res.x), float(-res.fun)
    return DampingSweep(grid, mech, elec, mw, ew, d_opt, best)
