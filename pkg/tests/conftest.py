import numpy as np
import pytest

from piezoplate.coupling import coupling_quadrature
from piezoplate.dynamics import assemble, impulse_initial_state, integrate
from piezoplate.modal_basis import CLAMPED, MEMBRANE, build_basis
from piezoplate.params import PhysicalParams, dimensionless_from_physical
from piezoplate.tuning import ModalABCD, char_roots_P, optimal_impedance_clamped

P1 = (0.6, 0.55)
P2 = (0.75, 0.5)


def exact_solution(sys, y0, times):
    """Independent reference: the system is linear, so diagonalise it."""
    w, V = np.linalg.eig(sys.matrix())
    c = np.linalg.solve(V, y0.astype(complex))
    return (V @ (c[:, None] * np.exp(np.outer(w, times)))).real.T


def clamped_system(n=4, tune=1, gamma=None):
    p = PhysicalParams()
    L, R = optimal_impedance_clamped(tune, p)
    dim = dimensionless_from_physical(p.with_network(L, R))
    if gamma is not None:
        dim = type(dim)(dim.alpha, dim.beta, gamma, dim.delta)
    mech, elec = build_basis(CLAMPED, n), build_basis(MEMBRANE, n)
    return assemble(dim, mech.eigenvalues, elec.eigenvalues, coupling_quadrature(mech, elec)), mech, elec


class ImpulseRun:
    def __init__(self, point):
        self.sys, self.mech, self.elec = clamped_system()
        slowest = min(char_roots_P(ModalABCD(*self.sys.modal_abcd(1))).damping)
        self.t_end = 5.0 / slowest  # five decay constants of the tuned pair
        self.init = impulse_initial_state(point, self.mech, 4)
        self.traj = integrate(self.sys, self.init, self.t_end, rel_tol=1e-11, samples=20001)
        self.exact = exact_solution(self.sys, self.init.to_vector(), self.traj.t)


@pytest.fixture(scope="session")
def impulse_p1():
    return ImpulseRun(P1)


@pytest.fixture(scope="session")
def impulse_p2():
    return ImpulseRun(P2)
