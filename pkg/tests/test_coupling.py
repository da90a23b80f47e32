import math

import numpy as np
import pytest

from anchors import ANCHORS
from piezoplate.coupling import (
    CouplingMatrix,
    QuadratureConvergenceError,
    coupled_pairs,
    coupling_analytic_ss,
    coupling_quadrature,
    coupling_report,
    is_coupled,
    parity_forbidden,
)
from piezoplate.modal_basis import CLAMPED, MEMBRANE, SS, ModalBasis, build_basis


@pytest.fixture(scope="module")
def clamped9():
    mech, elec = build_basis(CLAMPED, 9), build_basis(MEMBRANE, 9)
    return mech, elec, coupling_quadrature(mech, elec)


def test_analytic_ss_examples():
    c = coupling_analytic_ss(9)
    assert c[1, 1] == pytest.approx(-2 * math.pi**2, rel=1e-15)
    assert c[1, 1] == pytest.approx(-19.7392, abs=1e-4)
    assert c[1, 2] == 0.0
    assert c[4, 4] == pytest.approx(-8 * math.pi**2, rel=1e-15)
    assert np.all(np.diag(c.entries) < 0)


def test_ss_quadrature_matches_closed_form():
    c = coupling_quadrature(build_basis(SS, 9), build_basis(MEMBRANE, 9))
    ref = coupling_analytic_ss(9).entries
    assert np.max(np.abs(c.entries - ref)) < 1e-8


def test_clamped_parity_zeros(clamped9):
    mech, elec, c = clamped9
    for h in range(1, 10):
        for k in range(1, 10):
            if parity_forbidden(mech, elec, h, k):
                assert abs(c[h, k]) < 1e-10


def test_clamped_quasi_diagonal(clamped9):
    _, _, c = clamped9
    a = np.abs(c.entries)
    for h in range(9):
        assert a[h, h] == a[h].max()
    assert is_coupled(1, 5, c) and is_coupled(1, 6, c)
    assert not is_coupled(1, 2, c)
    assert not is_coupled(1, 4, c)


def test_clamped_entries_match_oracle(clamped9):
    _, _, c = clamped9
    for key, (h, k) in {
        "clamped_C_1_1": (1, 1),
        "clamped_C_1_5": (1, 5),
        "clamped_C_1_9": (1, 9),
        "clamped_C_2_2": (2, 2),
        "clamped_C_5_1": (5, 1),
    }.items():
        assert c[h, k] == pytest.approx(ANCHORS[key], rel=1e-12)


def test_quadrature_converged(clamped9):
    mech, elec, c = clamped9
    finer = coupling_quadrature(mech, elec, order=64, check=False)
    assert np.max(np.abs(finer.entries - c.entries)) < 1e-8


def test_low_order_flagged():
    mech, elec = build_basis(CLAMPED, 9), build_basis(MEMBRANE, 9)
    with pytest.raises(QuadratureConvergenceError):
        coupling_quadrature(mech, elec, order=4)


def test_permutation_reproducibility(clamped9):
    mech, elec, c = clamped9
    perm = [3, 0, 8, 5, 1, 7, 2, 6, 4]
    pm = ModalBasis(mech.kind, tuple(mech.modes[i] for i in perm))
    pe = ModalBasis(elec.kind, tuple(elec.modes[i] for i in perm))
    cp = coupling_quadrature(pm, pe)
    assert np.array_equal(cp.entries, c.entries[np.ix_(perm, perm)])


def test_is_coupled_contract():
    c = coupling_analytic_ss(4)
    assert is_coupled(1, 1, c, 1e-6)
    assert not is_coupled(1, 2, c, 1e-6)
    with pytest.raises(ValueError):
        is_coupled(1, 1, c, 0.0)
    with pytest.raises(IndexError):
        is_coupled(5, 1, c)


def test_report_lists_pairs(clamped9):
    _, _, c = clamped9
    text = coupling_report(c)
    pairs = coupled_pairs(c)
    assert len(text.splitlines()) > len(pairs)
    assert "   1     5" in text
    assert all(abs(v) > 1e-6 for _, _, v in pairs)


def test_size_mismatch_rejected():
    with pytest.raises(ValueError):
        coupling_quadrature(build_basis(SS, 2), build_basis(MEMBRANE, 3), n=3)


def test_truncation():
    c = coupling_analytic_ss(9).truncated(3)
    assert isinstance(c, CouplingMatrix) and c.n == 3
