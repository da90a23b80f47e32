"""Modal simulation and impedance tuning of plates damped by a piezoelectric
actuator network."""

from .coupling import CouplingMatrix, coupling_analytic_ss, coupling_quadrature, is_coupled
from .dynamics import ModalState, ModalSystem, assemble, energies, frf, integrate
from .modal_basis import CLAMPED, MEMBRANE, SS, build_basis
from .params import DimensionlessParams, PhysicalParams, dimensionless_from_physical
from .tuning import ModalABCD, char_roots_P, damping_sweep, modulation, transfer_time

__version__ = "0.1.0"

__all__ = [
    "CLAMPED",
    "MEMBRANE",
    "SS",
    "CouplingMatrix",
    "DimensionlessParams",
    "ModalABCD",
    "ModalState",
    "ModalSystem",
    "PhysicalParams",
    "assemble",
    "build_basis",
    "char_roots_P",
    "coupling_analytic_ss",
    "coupling_quadrature",
    "damping_sweep",
    "dimensionless_from_physical",
    "energies",
    "frf",
    "integrate",
    "is_coupled",
    "modulation",
    "transfer_time",
]
