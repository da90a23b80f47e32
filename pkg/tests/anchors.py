"""Reference values frozen from scripts/oracle_anchors.py (mpmath, 30 digits)."""

ANCHORS = {
    'bending_stiffness': 62.820512820512820513,
    'total_mass': 5.4000000000000000000,
    'area_capacitance': 0.000078400000000000000000,
    'char_pulsation': 10.715285117549358973,
    'alpha': 0.10132118364233777144,
    'gamma': 0.0012699873311357782084,
    'coupling_ratio_physical': 0.000015918367346938775510,
    'L_opt_ss_1': 55.545192823501495903,
    'L_opt_ss_2': 22.218077129400598361,
    'R_opt_ss': 29.840722605750920188,
    'L_opt_clamped_1': 16.599032493676488415,
    'R_opt_clamped_1': 8.9175516185816579462,
    'delta_clamped_1': 0.050137090210821620991,
    'beta_ss_1': 2.0000000000000000000,
    'beam_roots': [4.7300407448627040260, 7.8532046240958375565, 10.995607838001670907],
    'clamped_lambda_over_pi4': [13.385163947275072984, 55.817943231552187839, 55.817943231552187839, 121.63445080627401121, 180.18616075583466331, 180.18616075583466331, 282.62580929657184862, 282.62580929657184862, 500.97561967944959359],
    'stiffening_ratio': [3.3462909868187682461, 2.2327177292620875135, 2.2327177292620875135, 1.9005382938480314252, 1.8018616075583466331, 1.8018616075583466331, 1.6723420668436204060, 1.6723420668436204060, 1.5462210483933629432],
    'clamped_C_1_1': -19.199737853124932989,
    'clamped_C_1_5': 15.712275728612501687,
    'clamped_C_1_9': -4.6289808624358447931,
    'clamped_C_2_2': -47.521100386526939038,
    'clamped_C_5_1': -2.8807305521250157185,
    'transfer_time_0_01': 4.9937303655516633665,
    'unit_pair_alpha1': 0.95124921972503928638,
    'unit_pair_alpha2': 1.0512492197250392864,
    'unit_pair_V1': 0.52496880847194611687,
    'unit_pair_V2': 0.47503119152805388313,
}
