import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anchors import ANCHORS
from piezoplate.modal_basis import stiffening_ratio
from piezoplate.params import PhysicalParams
from piezoplate.tuning import (
    BranchTrackingError,
    ModalABCD,
    TuningError,
    char_roots_P,
    char_roots_Q,
    damping_sweep,
    energy_weight,
    modulation,
    optimal_impedance_clamped,
    optimal_inductance_ss,
    optimal_resistance_ss,
    poly_P,
    poly_Q,
    quartic_roots,
    routh_hurwitz_stable,
    self_resonance_band,
    transfer_time,
)


def rel(a, b):
    return abs(a - b) / abs(b)


# --- band and transfer time ----------------------------------------------------


def test_band_examples():
    b1, b2 = self_resonance_band(1.0, 0.1)
    assert b1 == pytest.approx(0.99, abs=1e-15) and b2 == pytest.approx(1.01, abs=1e-15)
    assert self_resonance_band(2.0, 0.0) == (2.0, 2.0)
    with pytest.raises(TuningError):
        self_resonance_band(1.0, 1.1)


def test_transfer_time_values():
    assert transfer_time(1.0) == pytest.approx(1 / (2 * math.sqrt(2)), rel=1e-15)
    assert rel(transfer_time(0.01), ANCHORS["transfer_time_0_01"]) < 1e-13
    assert transfer_time(0.01) == pytest.approx(4.9938, abs=1e-4)
    k = np.linspace(1e-4, 1.0, 100)
    t = np.array([transfer_time(x) for x in k])
    assert np.all(np.diff(t) < 0)
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(TuningError):
            transfer_time(bad)


# --- closed-form modulation ---------------------------------------------------------


def test_modulation_anchor():
    m = modulation(1.0, 1.0, 0.1)
    assert rel(m.alpha1, ANCHORS["unit_pair_alpha1"]) < 1e-14
    assert rel(m.alpha2, ANCHORS["unit_pair_alpha2"]) < 1e-14
    assert rel(m.V1, ANCHORS["unit_pair_V1"]) < 1e-14
    assert rel(m.V2, ANCHORS["unit_pair_V2"]) < 1e-14
    # at B = A the asymmetry is C / sqrt(C^2 + 4A)
    assert m.V1 - m.V2 == pytest.approx(0.1 / math.sqrt(0.01 + 4), rel=1e-14)


def test_modulation_degenerate():
    m = modulation(2.0, 2.0, 0.0, 3.0)
    assert m.alpha1 == m.alpha2 == math.sqrt(2.0)
    assert (m.V1, m.V2, m.Phi1, m.Phi2) == (3.0, 0.0, 0.0, 0.0)
    with pytest.raises(TuningError):
        modulation(0.0, 1.0, 0.1)


def test_band_edge_minimises_asymmetry():
    A, C = 1.0, 0.1
    b1, _ = self_resonance_band(A, C)
    m = modulation(A, b1, C)
    assert abs(m.V1 - m.V2) < 1e-10
    grid = np.linspace(A - 5 * C**2, A + 5 * C**2, 2001)
    gaps = np.array([modulation(A, b, C).alpha2 - modulation(A, b, C).alpha1 for b in grid])
    # the frequency gap is smallest at B = A, not largest
    assert abs(grid[np.argmin(gaps)] - A) <= grid[1] - grid[0]


# --- optimal impedances ----------------------------------------------------------------


def test_ss_impedance_anchors():
    p = PhysicalParams()
    assert rel(optimal_inductance_ss(1, p), ANCHORS["L_opt_ss_1"]) < 1e-12
    assert rel(optimal_inductance_ss(2, p), ANCHORS["L_opt_ss_2"]) < 1e-12
    assert rel(optimal_resistance_ss(p), ANCHORS["R_opt_ss"]) < 1e-12
    assert optimal_inductance_ss(2, p) / optimal_inductance_ss(1, p) == pytest.approx(0.4, rel=1e-15)


def test_ss_impedance_scaling():
    p, q = PhysicalParams(), PhysicalParams(actuator_count=196)
    assert optimal_inductance_ss(1, q) / optimal_inductance_ss(1, p) == pytest.approx(0.25, rel=1e-14)
    assert optimal_resistance_ss(q) / optimal_resistance_ss(p) == pytest.approx(4**-1.5, rel=1e-14)
    assert optimal_resistance_ss(PhysicalParams(piezo_coupling=0.0)) == 0.0


def test_clamped_impedance():
    p = PhysicalParams()
    L1, R1 = optimal_impedance_clamped(1, p)
    assert rel(L1, ANCHORS["L_opt_clamped_1"]) < 1e-12
    assert rel(R1, ANCHORS["R_opt_clamped_1"]) < 1e-12
    assert L1 / optimal_inductance_ss(1, p) == pytest.approx(1 / stiffening_ratio(1), rel=1e-13)
    # c = 1 recovers the simply supported values
    L, R = optimal_impedance_clamped(1, p, c_h=1.0)
    assert rel(L, optimal_inductance_ss(1, p)) < 1e-13
    assert rel(R, optimal_resistance_ss(p)) < 1e-13
    products = [optimal_impedance_clamped(h, p)[1] * stiffening_ratio(h) for h in range(1, 10)]
    assert max(products) / min(products) - 1 < 1e-13


# --- characteristic roots -----------------------------------------------------------------


def test_uncoupled_undamped_roots():
    r = char_roots_P(ModalABCD(2.0, 3.0, 0.0, 0.0))
    assert r.mechanical[0] == pytest.approx(1j * math.sqrt(2.0), abs=1e-14)
    assert r.mechanical[1] == pytest.approx(-1j * math.sqrt(2.0), abs=1e-14)
    assert r.electrical[0] == pytest.approx(1j * math.sqrt(3.0), abs=1e-14)


def test_unit_pair_roots():
    r = char_roots_P(ModalABCD(1.0, 1.0, 0.1, 0.0))
    im = sorted(r.pulsation)
    assert im[0] == pytest.approx(ANCHORS["unit_pair_alpha1"], abs=1e-12)
    assert im[1] == pytest.approx(ANCHORS["unit_pair_alpha2"], abs=1e-12)
    assert max(abs(s.real) for s in r.roots) < 1e-12


def test_residuals():
    m = ModalABCD(1.3, 0.8, -0.2, 0.4)
    r = char_roots_P(m)
    assert np.max(np.abs(np.polyval(poly_P(m), r.roots))) < 1e-9


def test_large_damping_limit():
    A, C = 1.0, 0.05
    r = char_roots_P(ModalABCD(A, A, C, 1e6))
    assert r.pulsation[0] == pytest.approx(math.sqrt(A + C**2), rel=1e-9)
    assert r.pulsation[1] < 1e-6
    assert rel(math.sqrt(A + C**2), math.sqrt(A)) < 2e-3


def test_sign_of_C_irrelevant():
    a = char_roots_P(ModalABCD(1.1, 0.9, 0.07, 0.3))
    b = char_roots_P(ModalABCD(1.1, 0.9, -0.07, 0.3))
    assert np.array_equal(a.roots, b.roots)


@pytest.mark.parametrize("C", [1e-2, 5e-3, 1e-3])
def test_gap_tends_to_C(C):
    r = char_roots_P(ModalABCD(1.0, 1.0, C, 0.0))
    gap = abs(r.pulsation[1] - r.pulsation[0])
    assert gap / C == pytest.approx(1.0, rel=0.01)


@settings(max_examples=200, deadline=None)
@given(
    A=st.floats(0.05, 20),
    B=st.floats(0.05, 20),
    C=st.floats(1e-3, 1.0),
    D=st.floats(1e-3, 10),
)
def test_hurwitz_property(A, B, C, D):
    m = ModalABCD(A, B, C, D)
    assert routh_hurwitz_stable(m)
    assert np.all(char_roots_P(m).roots.real < 0)


def test_hurwitz_needs_coupling():
    assert not routh_hurwitz_stable(ModalABCD(1.0, 1.0, 0.0, 1.0))


def test_energy_weight_limits():
    assert energy_weight(1j, 1.0, 2.0, 0.0) == 1.0
    assert energy_weight(1j * math.sqrt(2), 1.0, 2.0, 0.0) == 0.0
    r = char_roots_P(ModalABCD(1.0, 1.0, 0.1, 0.0))
    # at exact resonance both roots carry half the energy in each form
    assert r.coupling_weight[0] == pytest.approx(1.0, abs=1e-2)


def test_Q_roots():
    r = char_roots_Q(1.0, 0.0, 0.0)
    assert r.mechanical[0] == pytest.approx(1j, abs=1e-7)
    assert r.electrical[0] == pytest.approx(1j, abs=1e-7)
    # at D = 2C the quartic is a perfect square (s^2 + C s + A)^2
    C = 0.05
    r = char_roots_Q(1.0, C, 2 * C)
    assert r.damping[0] == pytest.approx(C / 2, rel=1e-6)
    assert r.damping[1] == pytest.approx(C / 2, rel=1e-6)


def test_Q_damping_maximal_at_2C():
    A, C = 1.0, 0.05
    Ds = C * np.linspace(0.5, 4.0, 351)
    # the least damped root bounds the decay; no branch labels needed
    least = [np.min(-quartic_roots(poly_Q(A, C, d)).real) for d in Ds]
    assert Ds[int(np.argmax(least))] == pytest.approx(2 * C, abs=Ds[1] - Ds[0])
    assert max(least) == pytest.approx(C / 2, rel=1e-4)


def test_Q_input_checks():
    with pytest.raises(TuningError):
        char_roots_Q(0.0, 0.1, 0.1)
    with pytest.raises(TuningError):
        char_roots_Q(1.0, 0.1, -0.1)


def test_modal_abcd_validation():
    with pytest.raises(TuningError):
        ModalABCD(-1.0, 1.0, 0.1, 0.0)
    with pytest.raises(TuningError):
        ModalABCD(1.0, 1.0, 0.1, -1.0)


# --- damping sweep ------------------------------------------------------------------------


@pytest.mark.parametrize("C", [0.01, 0.05, 0.1])
def test_sweep_optimum_near_2C(C):
    sweep = damping_sweep(1.0, 1.0, C, C * np.geomspace(0.05, 50, 600))
    assert sweep.D_opt / C == pytest.approx(2.0, rel=0.1)
    i = int(np.argmin(np.abs(sweep.D - sweep.D_opt)))
    tail = -sweep.mechanical.real[i + 1 :]
    assert np.all(np.diff(tail) < 0)


def test_sweep_uncoupled():
    sweep = damping_sweep(1.0, 1.5, 0.0, np.linspace(0.01, 3, 50))
    assert np.max(np.abs(sweep.mechanical.real)) < 1e-12
    assert np.allclose(sweep.mechanical.imag, 1.0, atol=1e-12)


def test_sweep_grid_checks():
    with pytest.raises(ValueError):
        damping_sweep(1.0, 1.0, 0.1, [0.1])
    with pytest.raises(ValueError):
        damping_sweep(1.0, 1.0, 0.1, [0.2, 0.1])


def test_branch_tracking_error_location():
    err = BranchTrackingError("collide", 0.25)
    assert err.location == 0.25 and "0.25" in str(err)
