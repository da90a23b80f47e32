"""Eigenbases of the plate operator and the membrane network on the unit square.

Mechanical modes are eigenfunctions of the biharmonic operator (simply
supported, or the clamped beam-product approximation); electrical modes are
eigenfunctions of the Dirichlet Laplacian. Every shape is unit-normalised in
L2 on ``[0, 1]^2`` and is a product of two 1-D factors, which lets us provide
analytic first and second derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

DEFAULT_QUAD_ORDER = 32

SS = "mechanical-ss"
CLAMPED = "mechanical-clamped"
MEMBRANE = "electrical-membrane"
BASIS_KINDS = (SS, CLAMPED, MEMBRANE)

TABLE_I = ((1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1), (2, 3), (3, 2), (3, 3))


@dataclass(frozen=True)
class ModeIndex:
    k: int
    i: int
    j: int

    @property
    def wavenumber_sq(self) -> int:
        """``i**2 + j**2``."""
        return self.i**2 + self.j**2


def mode_index(k: int) -> ModeIndex:
    """Return the ``k``-th mode label (1-based).

    The first nine follow the usual 3 x 3 labelling; later modes are the
    remaining pairs sorted by ``i**2 + j**2``, ties by ascending ``i``.
    """
    if k < 1:
        raise ValueError(f"mode ordinal must be >= 1, got {k}")
    if k <= len(TABLE_I):
        return ModeIndex(k, *TABLE_I[k - 1])
    return ModeIndex(k, *_extended_pairs(k)[k - 1])


@lru_cache(maxsize=None)
def _extended_pairs(count: int) -> tuple:
    bound = 3
    while True:
        seen = set(TABLE_I)
        rest = sorted(
            ((i, j) for i in range(1, bound + 1) for j in range(1, bound + 1) if (i, j) not in seen),
            key=lambda ij: (ij[0] ** 2 + ij[1] ** 2, ij[0]),
        )
        # any pair with i or j > bound has i^2 + j^2 > bound^2
        safe = [ij for ij in rest if ij[0] ** 2 + ij[1] ** 2 <= bound**2]
        if len(TABLE_I) + len(safe) >= count:
            return TABLE_I + tuple(safe)
        bound *= 2


def mode_indices(n: int) -> list[ModeIndex]:
    return [mode_index(k) for k in range(1, n + 1)]


# --- quadrature -------------------------------------------------------------


@lru_cache(maxsize=16)
def gauss_legendre_unit(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to ``[0, 1]``."""
    x, w = leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


class TensorQuadrature:
    """Tensorised Gauss-Legendre rule on the unit square."""

    def __init__(self, order: int = DEFAULT_QUAD_ORDER):
        if order < 1:
            raise ValueError("quadrature order must be positive")
        self.order = order
        self.nodes, self.weights = gauss_legendre_unit(order)

    def integrate(self, values_1: np.ndarray, values_2: np.ndarray | None = None) -> float:
        """Integrate a product-form or full-grid integrand.

        With two arguments each is a 1-D array of samples at the nodes and the
        integrand is their tensor product. With one argument it is the full
        ``order x order`` grid (first axis ``x1``).
        """
        if values_2 is not None:
            return float((self.weights @ values_1) * (self.weights @ values_2))
        return float(self.weights @ values_1 @ self.weights)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.nodes, self.nodes, indexing="ij")


# --- 1-D factors ------------------------------------------------------------


class SineFactor:
    """``sqrt(2) sin(n pi x)``: unit-norm on ``[0, 1]``, zero at both ends."""

    def __init__(self, n: int):
        self.n = n
        self._k = n * math.pi

    def __call__(self, x, deriv: int = 0):
        x = np.asarray(x, dtype=float)
        k = self._k
        s2 = math.sqrt(2.0)
        if deriv == 0:
            return s2 * np.sin(k * x)
        if deriv == 1:
            return s2 * k * np.cos(k * x)
        if deriv == 2:
            return -s2 * k**2 * np.sin(k * x)
        raise ValueError("derivatives above second order are not provided")

    @property
    def parity(self) -> int:
        """+1 if symmetric about ``x = 1/2``, -1 if antisymmetric."""
        return 1 if self.n % 2 else -1


def clamped_beam_root(n: int) -> float:
    """n-th positive root of ``cos(b) cosh(b) = 1``."""
    if n < 1:
        raise ValueError(f"beam mode ordinal must be >= 1, got {n}")
    centre = (n + 0.5) * math.pi
    # cos(b) - sech(b) has the same roots and stays O(1)
    return brentq(
        lambda b: math.cos(b) - 1.0 / math.cosh(b),
        centre - math.pi / 4,
        centre + math.pi / 4,
        xtol=1e-15,
        rtol=4 * np.finfo(float).eps,
        maxiter=200,
    )


@dataclass(frozen=True)
class BeamMode:
    n: int
    root: float
    sigma: float
    one_minus_sigma: float


def beam_mode(n: int) -> BeamMode:
    b = clamped_beam_root(n)
    denom = math.sinh(b) - math.sin(b)
    sigma = (math.cosh(b) - math.cos(b)) / denom
    # 1 - sigma without cancellation: (sinh - cosh) = -exp(-b)
    one_minus = (-math.exp(-b) - math.sin(b) + math.cos(b)) / denom
    return BeamMode(n=n, root=b, sigma=sigma, one_minus_sigma=one_minus)


class ClampedBeamFactor:
    """Clamped-clamped beam shape

        cosh(bx) - cos(bx) - s (sinh(bx) - sin(bx)),

    evaluated through decaying exponentials so large ``bx`` does not cancel,
    then scaled to unit L2 norm on ``[0, 1]``.
    """

    def __init__(self, n: int, norm_order: int = 64):
        self.n = n
        self.mode = beam_mode(n)
        # (1 - sigma) e^b stays O(1), so the growing term is bounded on [0, 1]
        self._grow = 0.5 * self.mode.one_minus_sigma * math.exp(self.mode.root)
        x, w = gauss_legendre_unit(norm_order)
        self._scale = 1.0
        self._scale = 1.0 / math.sqrt(float(w @ self(x) ** 2))

    def __call__(self, x, deriv: int = 0):
        x = np.asarray(x, dtype=float)
        b, s = self.mode.root, self.mode.sigma
        grow = self._grow * np.exp(b * (x - 1.0))
        decay = 0.5 * (1.0 + s) * np.exp(-b * x)
        c, sn = np.cos(b * x), np.sin(b * x)
        if deriv == 0:
            out = grow + decay - c + s * sn
        elif deriv == 1:
            out = b * (grow - decay + sn + s * c)
        elif deriv == 2:
            out = b**2 * (grow + decay + c - s * sn)
        else:
            raise ValueError("derivatives above second order are not provided")
        return self._scale * out

    @property
    def parity(self) -> int:
        return 1 if self.n % 2 else -1


# --- 2-D shapes ---------------------------------------------------------------


class ProductShape:
    """Separable mode shape ``f1(x1) * f2(x2)``."""

    def __init__(self, f1, f2):
        self.f1 = f1
        self.f2 = f2

    def __call__(self, x1, x2):
        return self.f1(x1) * self.f2(x2)

    def gradient(self, x1, x2):
        return self.f1(x1, 1) * self.f2(x2), self.f1(x1) * self.f2(x2, 1)

    def laplacian(self, x1, x2):
        return self.f1(x1, 2) * self.f2(x2) + self.f1(x1) * self.f2(x2, 2)

    @property
    def parity(self) -> tuple[int, int]:
        return self.f1.parity, self.f2.parity


@dataclass(frozen=True)
class Mode:
    index: ModeIndex
    eigenvalue: float
    shape: ProductShape


@dataclass(frozen=True)
class ModalBasis:
    kind: str
    modes: tuple

    def __len__(self):
        return len(self.modes)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([m.eigenvalue for m in self.modes])

    @property
    def shapes(self) -> list:
        return [m.shape for m in self.modes]

    @property
    def indices(self) -> list:
        return [m.index for m in self.modes]

    def evaluate(self, x1, x2) -> np.ndarray:
        """Stack of all shapes at the given points, mode axis first."""
        return np.stack([m.shape(x1, x2) for m in self.modes])

    def truncated(self, n: int) -> "ModalBasis":
        return ModalBasis(self.kind, self.modes[:n])


def _as_index(k) -> ModeIndex:
    return k if isinstance(k, ModeIndex) else mode_index(int(k))


def ss_mech_eigenpair(k) -> tuple[float, ProductShape]:
    idx = _as_index(k)
    lam = math.pi**4 * idx.wavenumber_sq**2
    return lam, ProductShape(SineFactor(idx.i), SineFactor(idx.j))


def membrane_eigenpair(k) -> tuple[float, ProductShape]:
    idx = _as_index(k)
    nu = math.pi**2 * idx.wavenumber_sq
    return nu, ProductShape(SineFactor(idx.i), SineFactor(idx.j))


@lru_cache(maxsize=64)
def _beam_factor(n: int) -> ClampedBeamFactor:
    return ClampedBeamFactor(n)


def clamped_mech_mode(k) -> ProductShape:
    idx = _as_index(k)
    return ProductShape(_beam_factor(idx.i), _beam_factor(idx.j))


def rayleigh_quotient(shape, order: int = DEFAULT_QUAD_ORDER) -> float:
    """``int (lap f)^2 / int f^2`` by tensor Gauss-Legendre quadrature."""
    quad = TensorQuadrature(order)
    x1, x2 = quad.grid()
    norm = quad.integrate(shape(x1, x2) ** 2)
    if not norm > np.finfo(float).tiny:
        raise FloatingPointError("trial function has vanishing L2 norm")
    return quad.integrate(shape.laplacian(x1, x2) ** 2) / norm


@lru_cache(maxsize=128)
def _clamped_eigenvalue(k: int, order: int) -> float:
    return rayleigh_quotient(clamped_mech_mode(k), order)


def clamped_eigenvalue(k, order: int = DEFAULT_QUAD_ORDER) -> float:
    """Rayleigh estimate of the clamped-plate eigenvalue for mode ``k``."""
    return _clamped_eigenvalue(_as_index(k).k, order)


def stiffening_ratio(k, order: int = DEFAULT_QUAD_ORDER) -> float:
    """``c_k``: clamped over simply-supported eigenvalue."""
    lam_ss, _ = ss_mech_eigenpair(k)
    return clamped_eigenvalue(k, order) / lam_ss


def build_basis(kind: str, n: int, quad_order: int = DEFAULT_QUAD_ORDER) -> ModalBasis:
    if kind not in BASIS_KINDS:
        raise ValueError(f"unknown basis kind {kind!r}; expected one of {BASIS_KINDS}")
    modes = []
    for idx in mode_indices(n):
        if kind == SS:
            lam, shape = ss_mech_eigenpair(idx)
        elif kind == MEMBRANE:
            lam, shape = membrane_eigenpair(idx)
        else:
            shape = clamped_mech_mode(idx)
            lam = clamped_eigenvalue(idx, quad_order)
        modes.append(Mode(idx, lam, shape))
    return ModalBasis(kind, tuple(modes))


def gram_matrix(shapes: Sequence, order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    quad = TensorQuadrature(order)
    x1, x2 = quad.grid()
    vals = np.stack([s(x1, x2) for s in shapes])
    w2 = np.outer(quad.weights, quad.weights)
    return np.einsum("aij,bij,ij->ab", vals, vals, w2)
