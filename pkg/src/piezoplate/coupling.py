"""Modal coupling matrix between plate modes and network modes.

Entry ``(h, k)`` is ``<m_h, lap e_k>``. Since network modes satisfy
``lap e_k = -nu_k e_k`` we only ever integrate ``m_h e_k``; no derivatives of
the mechanical shapes are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modal_basis import DEFAULT_QUAD_ORDER, SS, ModalBasis, TensorQuadrature, mode_indices

DEFAULT_TOL = 1e-6
CONVERGENCE_TOL = 1e-6


class QuadratureConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class CouplingMatrix:
    entries: np.ndarray  # rows: mechanical modes, columns: electrical modes
    mech_basis_kind: str
    elec_basis_kind: str

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, hk):
        h, k = hk
        return self.entries[h - 1, k - 1]

    def truncated(self, n: int) -> "CouplingMatrix":
        return CouplingMatrix(self.entries[:n, :n].copy(), self.mech_basis_kind, self.elec_basis_kind)


def coupling_analytic_ss(n: int) -> CouplingMatrix:
    """Diagonal coupling of the simply supported plate, ``-pi^2 (i^2 + j^2)``."""
    diag = [-(math.pi**2) * idx.wavenumber_sq for idx in mode_indices(n)]
    return CouplingMatrix(np.diag(diag), SS, "electrical-membrane")


def _overlap(mech: ModalBasis, elec: ModalBasis, n: int, order: int) -> np.ndarray:
    # all shapes are separable, so each overlap is a product of two 1-D rules
    quad = TensorQuadrature(order)
    x, w = quad.nodes, quad.weights
    m1 = np.stack([m.shape.f1(x) for m in mech.modes[:n]])
    m2 = np.stack([m.shape.f2(x) for m in mech.modes[:n]])
    e1 = np.stack([e.shape.f1(x) for e in elec.modes[:n]])
    e2 = np.stack([e.shape.f2(x) for e in elec.modes[:n]])
    return ((m1 * w) @ e1.T) * ((m2 * w) @ e2.T)


def coupling_quadrature(
    mech: ModalBasis,
    elec: ModalBasis,
    n: int | None = None,
    order: int = DEFAULT_QUAD_ORDER,
    check: bool = True,
) -> CouplingMatrix:
    """``C[h, k] = -nu_k <m_h, e_k>`` by tensor Gauss-Legendre quadrature.

    With ``check`` the rule is re-run at twice the order and a
    :class:`QuadratureConvergenceError` is raised if any entry moves by more
    than ``1e-6``.
    """
    n = min(len(mech), len(elec)) if n is None else n
    if n > len(mech) or n > len(elec):
        raise ValueError(f"requested {n} modes but bases hold {len(mech)} and {len(elec)}")
    nu = elec.eigenvalues[:n]
    entries = -_overlap(mech, elec, n, order) * nu[None, :]
    if check:
        finer = -_overlap(mech, elec, n, 2 * order) * nu[None, :]
        change = np.max(np.abs(finer - entries)) if n else 0.0
        if change > CONVERGENCE_TOL:
            raise QuadratureConvergenceError(
                f"coupling entries changed by {change:.3g} when quadrature order doubled from {order}"
            )
    return CouplingMatrix(entries, mech.kind, elec.kind)


def parity_forbidden(mech: ModalBasis, elec: ModalBasis, h: int, k: int) -> bool:
    """True when mode ``h`` and network mode ``k`` differ in parity about ``x = 1/2``
    along some axis, which makes their overlap vanish identically."""
    pm = mech.modes[h - 1].shape.parity
    pe = elec.modes[k - 1].shape.parity
    return pm[0] != pe[0] or pm[1] != pe[1]


def is_coupled(h: int, k: int, c: CouplingMatrix, tol: float = DEFAULT_TOL) -> bool:
    """Necessary condition for energy exchange between plate mode ``h`` and
    network mode ``k`` (1-based)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not (1 <= h <= c.n and 1 <= k <= c.entries.shape[1]):
        raise IndexError(f"mode pair ({h}, {k}) outside a {c.entries.shape} coupling matrix")
    return bool(abs(c[h, k]) > tol)


def coupled_pairs(c: CouplingMatrix, tol: float = DEFAULT_TOL) -> list[tuple[int, int, float]]:
    rows, cols = c.entries.shape
    return [
        (h, k, float(c[h, k]))
        for h in range(1, rows + 1)
        for k in range(1, cols + 1)
        if is_coupled(h, k, c, tol)
    ]


def coupling_report(c: CouplingMatrix, tol: float = DEFAULT_TOL) -> str:
    """Plain-text listing of coupled pairs, with a shaded grid for a quick look."""
    lines = [
        f"coupling matrix {c.mech_basis_kind} x {c.elec_basis_kind}, {c.n} modes, tol {tol:g}",
        "mech  elec  C_hk  relative_to_row_diagonal",
    ]
    for h, k, value in coupled_pairs(c, tol):
        diag = abs(c[h, h]) if h <= c.entries.shape[1] else float("nan")
        lines.append(f"{h:4d}  {k:4d}  {value!r}  {abs(value) / diag:.6g}")
    lines.append("")
    lines.append("pattern (# >= 10% of row max, + coupled, . vanishing):")
    for h in range(1, c.n + 1):
        row = np.abs(c.entries[h - 1])
        top = row.max() if row.size else 0.0
        cells = []
        for k in range(1, c.entries.shape[1] + 1):
            if not is_coupled(h, k, c, tol):
                cells.append(".")
            elif row[k - 1] >= 0.1 * top:
                cells.append("#")
            else:
                cells.append("+")
        lines.append(f"{h:4d}  " + " ".join(cells))
    return "\n".join(lines) + "\n"
