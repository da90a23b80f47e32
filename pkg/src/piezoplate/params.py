"""Physical parameters of the piezo-electromechanical plate and their
dimensionless reduction.

All dimensional bookkeeping lives here; every other module works with the
four dimensionless numbers ``alpha, beta, gamma, delta``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, replace

THIN_PLATE_LIMIT = 0.1
WEAK_COUPLING_LIMIT = 0.05


class ParameterError(ValueError):
    """Raised when a parameter set violates its physical invariants."""


@dataclass(frozen=True)
class PhysicalParams:
    """Plate, actuator and network constants in SI units.

    Defaults are the aluminium plate with 7 x 7 QP20W actuators. The plate
    occupies ``[-h, h]`` through the thickness, so ``half_thickness`` is
    ``h`` and the plate is ``2h`` thick.
    """

    side_length: float = 1.0  # [m]
    half_thickness: float = 1.0e-3  # [m]
    mass_density: float = 2700.0  # [kg/m^3]
    young_modulus: float = 70.0e9  # [Pa]
    poisson_ratio: float = 0.3
    actuator_count: int = 49
    piezo_coupling: float = 28.0e-5  # [N/V]
    piezo_capacitance: float = 0.6e-6  # [F]
    ground_capacitance: float = 1.0e-6  # [F]
    net_inductance: float = 1.0  # [H]
    net_resistance: float = 0.0  # [Ohm]

    def __post_init__(self):
        validate(self)

    def with_network(self, inductance: float, resistance: float) -> "PhysicalParams":
        return replace(self, net_inductance=inductance, net_resistance=resistance)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DerivedPhysical:
    bending_stiffness: float  # D_P [N m]
    total_mass: float  # M_P [kg]
    area_capacitance: float  # C_N [F/m^2]
    actuator_cell_area: float  # d^2 [m^2]
    char_pulsation: float  # omega [rad/s]
    char_estate: float  # V-bar, bookkeeping constant only

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DimensionlessParams:
    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ParameterError(f"beta must be positive, got {self.beta}")
        if self.gamma < 0 or self.delta < 0:
            raise ParameterError("gamma and delta must be non-negative")

    def as_dict(self) -> dict:
        return asdict(self)


def validate(p: PhysicalParams) -> None:
    positive = (
        "side_length",
        "half_thickness",
        "mass_density",
        "young_modulus",
        "actuator_count",
        "piezo_capacitance",
        "ground_capacitance",
        "net_inductance",
    )
    for name in positive:
        value = getattr(p, name)
        if not (math.isfinite(value) and value > 0):
            raise ParameterError(f"{name} must be strictly positive, got {value}")
    # zero coupling is the uncoupled limit and is allowed
    if not (math.isfinite(p.piezo_coupling) and p.piezo_coupling >= 0):
        raise ParameterError(f"piezo_coupling must be non-negative, got {p.piezo_coupling}")
    if not (math.isfinite(p.net_resistance) and p.net_resistance >= 0):
        raise ParameterError(f"net_resistance must be non-negative, got {p.net_resistance}")
    if not 0 <= p.poisson_ratio < 0.5:
        raise ParameterError(f"poisson_ratio must lie in [0, 0.5), got {p.poisson_ratio}")
    n = int(p.actuator_count)
    if n != p.actuator_count or math.isqrt(n) ** 2 != n:
        raise ParameterError(f"actuator_count must be a perfect square, got {p.actuator_count}")
    if 2 * p.half_thickness / p.side_length >= THIN_PLATE_LIMIT:
        warnings.warn(
            f"plate is not thin: 2h/l = {2 * p.half_thickness / p.side_length:.3g}",
            stacklevel=3,
        )


def lame_moduli(young_modulus: float, poisson_ratio: float) -> tuple[float, float]:
    """Return ``(mu, lambda)`` for an isotropic material."""
    mu = young_modulus / (2.0 * (1.0 + poisson_ratio))
    lam = young_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio))
    return mu, lam


def derive_physical(p: PhysicalParams) -> DerivedPhysical:
    validate(p)
    mu, lam = lame_moduli(p.young_modulus, p.poisson_ratio)
    h, ell = p.half_thickness, p.side_length
    bending = (2.0 * h**3 / 3.0) * (2.0 * mu + lam)
    mass = 2.0 * p.mass_density * ell**2 * h
    cell = ell**2 / p.actuator_count
    cap = (p.piezo_capacitance + p.ground_capacitance) / cell
    omega = (math.pi / ell) * math.sqrt(bending / mass)
    return DerivedPhysical(
        bending_stiffness=bending,
        total_mass=mass,
        area_capacitance=cap,
        actuator_cell_area=cell,
        char_pulsation=omega,
        char_estate=math.sqrt(mass / cap),
    )


def dimensionless_from_physical(p: PhysicalParams) -> DimensionlessParams:
    """Reduce a physical parameter set to ``(alpha, beta, gamma, delta)``."""
    if not p.net_inductance > 0:
        raise ParameterError("resistive-only network unsupported in dimensionless form")
    d = derive_physical(p)
    ell, w = p.side_length, d.char_pulsation
    return DimensionlessParams(
        alpha=d.bending_stiffness / (d.total_mass * ell**2 * w**2),
        beta=1.0 / (p.net_inductance * d.area_capacitance * ell**2 * w**2),
        gamma=(p.piezo_coupling / (ell * w)) * math.sqrt(1.0 / (d.total_mass * d.area_capacitance)),
        delta=p.net_resistance / (p.net_inductance * w),
    )


def coupling_ratio(stiffness: float, coupling: float) -> float:
    """``k = C**2 / A`` for a single mode pair."""
    if not stiffness > 0:
        raise ParameterError(f"modal stiffness must be positive, got {stiffness}")
    return coupling**2 / stiffness


def physical_coupling_ratio(p: PhysicalParams) -> float:
    """Coupling ratio from physical inputs, ``g_me**2 / (D_P C_N)``."""
    d = derive_physical(p)
    return p.piezo_coupling**2 / (d.bending_stiffness * d.area_capacitance)


def is_weak_coupling(k: float) -> bool:
    return k < WEAK_COUPLING_LIMIT


def derived_report(p: PhysicalParams) -> dict:
    """Flat report of inputs, derived and dimensionless values."""
    k = physical_coupling_ratio(p)
    out = {f"input.{key}": value for key, value in p.as_dict().items()}
    out.update({f"derived.{key}": value for key, value in derive_physical(p).as_dict().items()})
    out.update({f"dimensionless.{key}": value for key, value in dimensionless_from_physical(p).as_dict().items()})
    out["coupling_ratio"] = k
    out["weak_coupling"] = is_weak_coupling(k)
    return out
