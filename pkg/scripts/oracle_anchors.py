"""Independent high-precision reference values for the regression tests.

Shares no code with the package: everything is recomputed with mpmath at
30 significant digits straight from the closed-form relations. Run

    python scripts/oracle_anchors.py

and paste the printed dictionary into ``tests/anchors.py``.
"""

import mpmath as mp

mp.mp.dps = 30

# nominal plate: aluminium, 7 x 7 actuators, h taken as half-thickness
ELL = mp.mpf(1)
H = mp.mpf("1e-3")
RHO = mp.mpf(2700)
E_Y = mp.mpf("70e9")
NU = mp.mpf("0.3")
N_A = 49
G_ME = mp.mpf("28e-5")
K_EE = mp.mpf("0.6e-6")
K_C = mp.mpf("1e-6")

TABLE_I = [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1), (2, 3), (3, 2), (3, 3)]


def plate():
    mu = E_Y / (2 * (1 + NU))
    lam = E_Y * NU / ((1 + NU) * (1 - 2 * NU))
    dp = 2 * H**3 / 3 * (2 * mu + lam)
    mp_ = 2 * RHO * ELL**2 * H
    cn = (K_EE + K_C) * N_A / ELL**2
    w = mp.pi / ELL * mp.sqrt(dp / mp_)
    return dp, mp_, cn, w


def beam_root(n):
    return mp.findroot(lambda b: mp.cos(b) * mp.cosh(b) - 1, (n + mp.mpf(1) / 2) * mp.pi)


def beam(n):
    b = beam_root(n)
    s = (mp.cosh(b) - mp.cos(b)) / (mp.sinh(b) - mp.sin(b))

    def raw(x, d=0):
        if d == 0:
            return mp.cosh(b * x) - mp.cos(b * x) - s * (mp.sinh(b * x) - mp.sin(b * x))
        if d == 1:
            return b * (mp.sinh(b * x) + mp.sin(b * x) - s * (mp.cosh(b * x) - mp.cos(b * x)))
        return b**2 * (mp.cosh(b * x) + mp.cos(b * x) - s * (mp.sinh(b * x) + mp.sin(b * x)))

    norm = mp.sqrt(mp.quad(lambda x: raw(x) ** 2, [0, mp.mpf(1) / 2, 1]))
    return b, (lambda x, d=0: raw(x, d) / norm)


def clamped_tables():
    beams = {n: beam(n) for n in (1, 2, 3)}
    # int phi'^2 for the unit-norm beam; int phi''^2 = b^4
    slope = {n: mp.quad(lambda x: f(x, 1) ** 2, [0, mp.mpf(1) / 2, 1]) for n, (_, f) in beams.items()}
    lam_c, c = [], []
    for i, j in TABLE_I:
        bi, bj = beams[i][0], beams[j][0]
        value = bi**4 + bj**4 + 2 * slope[i] * slope[j]
        lam_c.append(value)
        c.append(value / (mp.pi**4 * (i * i + j * j) ** 2))
    overlap = {
        (n, m): mp.quad(lambda x: beams[n][1](x) * mp.sqrt(2) * mp.sin(m * mp.pi * x), [0, mp.mpf(1) / 2, 1])
        for n in (1, 2, 3)
        for m in (1, 2, 3)
    }
    return [b for b, _ in beams.values()], lam_c, c, overlap


def clamped_coupling(overlap, h, k):
    (i, j), (p, q) = TABLE_I[h - 1], TABLE_I[k - 1]
    return -(mp.pi**2) * (p * p + q * q) * overlap[(i, p)] * overlap[(j, q)]


def two_mode(A, B, C):
    s = C**2 + A + B
    disc = mp.sqrt(s**2 - 4 * A * B)
    a1, a2 = mp.sqrt((s - disc) / 2), mp.sqrt((s + disc) / 2)
    asym = (C**2 - A + B) / disc
    return a1, a2, (1 + asym) / 2, (1 - asym) / 2


def transfer_time(k):
    r = mp.sqrt(k)
    return 1 / (2 * (mp.sqrt(1 + r) - mp.sqrt(1 - r)))


def main():
    dp, mp_, cn, w = plate()
    alpha = dp / (mp_ * ELL**2 * w**2)
    gamma = G_ME / (ELL * w) * mp.sqrt(1 / (mp_ * cn))
    k_phys = G_ME**2 / (dp * cn)

    def l_opt(idx, c=1):
        i, j = TABLE_I[idx - 1]
        return mp_ / (c * (i * i + j * j) * cn * mp.pi**2 * dp)

    def r_opt(c=1):
        return 2 * G_ME / (c * cn * ELL * dp) * mp.sqrt(mp_ / cn)

    # the resistance must also equal the D = 2|C| condition of the simply supported mode 1
    l1 = l_opt(1)
    r_from_damping = 2 * gamma * 2 * mp.pi**2 * l1 * w
    assert abs(r_from_damping / r_opt() - 1) < mp.mpf("1e-25")

    roots, lam_c, c, overlap = clamped_tables()
    lc1, rc1 = l_opt(1, c[0]), r_opt(c[0])
    a1, a2, v1, v2 = two_mode(mp.mpf(1), mp.mpf(1), mp.mpf("0.1"))

    out = {
        "bending_stiffness": dp,
        "total_mass": mp_,
        "area_capacitance": cn,
        "char_pulsation": w,
        "alpha": alpha,
        "gamma": gamma,
        "coupling_ratio_physical": k_phys,
        "L_opt_ss_1": l1,
        "L_opt_ss_2": l_opt(2),
        "R_opt_ss": r_opt(),
        "L_opt_clamped_1": lc1,
        "R_opt_clamped_1": rc1,
        "delta_clamped_1": rc1 / (lc1 * w),
        "beta_ss_1": 1 / (l1 * cn * ELL**2 * w**2),
        "beam_roots": roots,
        "clamped_lambda_over_pi4": [v / mp.pi**4 for v in lam_c],
        "stiffening_ratio": c,
        "clamped_C_1_1": clamped_coupling(overlap, 1, 1),
        "clamped_C_1_5": clamped_coupling(overlap, 1, 5),
        "clamped_C_1_9": clamped_coupling(overlap, 1, 9),
        "clamped_C_2_2": clamped_coupling(overlap, 2, 2),
        "clamped_C_5_1": clamped_coupling(overlap, 5, 1),
        "transfer_time_0_01": transfer_time(mp.mpf("0.01")),
        "unit_pair_alpha1": a1,
        "unit_pair_alpha2": a2,
        "unit_pair_V1": v1,
        "unit_pair_V2": v2,
    }

    def show(v):
        if isinstance(v, list):
            return "[" + ", ".join(show(x) for x in v) + "]"
        return mp.nstr(v, 20, strip_zeros=False)

    print("ANCHORS = {")
    for key, value in out.items():
        print(f"    {key!r}: {show(value)},")
    print("}")


if __name__ == "__main__":
    main()
