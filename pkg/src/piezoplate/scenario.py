"""Scenario description, system assembly and the experiment runners."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import config_io
from .coupling import coupling_analytic_ss, coupling_quadrature
from .dynamics import (
    ModalState,
    ModalSystem,
    assemble,
    beat_period,
    frf,
    impulse_initial_state,
    integrate,
    reconstruct_fields,
)
from .modal_basis import CLAMPED, DEFAULT_QUAD_ORDER, MEMBRANE, SS, build_basis, stiffening_ratio
from .params import PhysicalParams, coupling_ratio, derive_physical, dimensionless_from_physical
from .tuning import (
    ModalABCD,
    char_roots_P,
    optimal_impedance_clamped,
    optimal_inductance_ss,
    optimal_resistance_ss,
    transfer_time,
)

BOUNDARIES = {"simply-supported": SS, "clamped": CLAMPED}
EXPERIMENTS = ("beat", "damped-decay", "frf", "impulse")
OPTIMAL = "optimal"

_PHYSICAL_KEYS = tuple(f.name for f in fields(PhysicalParams) if f.name not in ("net_inductance", "net_resistance"))


class ScenarioError(ValueError):
    """Scenario keys are present but violate a precondition."""


@dataclass(frozen=True)
class Scenario:
    """One experiment on one plate.

    ``inductance`` and ``resistance`` are either numbers in SI units or the
    string ``"optimal"``, meaning the optimum for ``tune_mode``.
    """

    name: str = "scenario"
    boundary: str = "simply-supported"
    modes: int = 1
    tune_mode: int = 1
    inductance: float | str = OPTIMAL
    resistance: float | str = OPTIMAL
    experiment: str = "beat"
    point: tuple[float, float] | None = None
    t_end: float | None = None
    samples: int = 2001
    rel_tol: float = 1e-9
    quad_order: int = DEFAULT_QUAD_ORDER
    omega_min: float | None = None
    omega_max: float | None = None
    omega_points: int = 2001
    snapshot_times: tuple[float, ...] = ()
    grid: int = 21
    output_dir: str | None = None
    physical: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.boundary not in BOUNDARIES:
            raise ScenarioError(f"boundary must be one of {sorted(BOUNDARIES)}, got {self.boundary!r}")
        if self.experiment not in EXPERIMENTS:
            raise ScenarioError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.modes < 0:
            raise ScenarioError("modes must be non-negative")
        if self.modes and not 1 <= self.tune_mode <= self.modes:
            raise ScenarioError(f"tune_mode {self.tune_mode} must lie in 1..{self.modes}")
        if self.experiment == "impulse" and self.point is None:
            raise ScenarioError("impulse experiments need a point")
        for key in ("inductance", "resistance"):
            value = getattr(self, key)
            if isinstance(value, str) and value != OPTIMAL:
                raise ScenarioError(f"{key} must be a number or {OPTIMAL!r}")
        if self.t_end is not None and not self.t_end > 0:
            raise ScenarioError("t_end must be positive")
        if self.samples < 2 or self.omega_points < 2 or self.grid < 2:
            raise ScenarioError("samples, omega_points and grid need at least two points")
        unknown = set(self.physical) - set(_PHYSICAL_KEYS)
        if unknown:
            raise ScenarioError(f"unknown physical keys {sorted(unknown)}")

    @property
    def mech_kind(self) -> str:
        return BOUNDARIES[self.boundary]

    def base_params(self) -> PhysicalParams:
        return PhysicalParams(**self.physical)

    def as_config(self) -> dict:
        out = {
            "name": self.name,
            "boundary": self.boundary,
            "modes": self.modes,
            "tune_mode": self.tune_mode,
            "inductance": _cfg_value(self.inductance),
            "resistance": _cfg_value(self.resistance),
            "experiment": self.experiment,
            "samples": self.samples,
            "rel_tol": _cfg_value(self.rel_tol),
            "quad_order": self.quad_order,
            "omega_points": self.omega_points,
            "grid": self.grid,
        }
        for key in ("t_end", "omega_min", "omega_max", "output_dir"):
            if getattr(self, key) is not None:
                out[key] = _cfg_value(getattr(self, key))
        if self.point is not None:
            out["point"] = ", ".join(config_io.fmt(c) for c in self.point)
        if self.snapshot_times:
            out["snapshot_times"] = ", ".join(config_io.fmt(c) for c in self.snapshot_times)
        for key, value in sorted(self.physical.items()):
            out[key] = _cfg_value(value)
        return out


def _cfg_value(v) -> str:
    return v if isinstance(v, str) else config_io.fmt(v)


# --- config -> scenario ---------------------------------------------------------------


_INT_KEYS = ("modes", "tune_mode", "samples", "quad_order", "omega_points", "grid")
_FLOAT_KEYS = ("t_end", "rel_tol", "omega_min", "omega_max")


def _number(key, text, kind):
    try:
        return kind(text)
    except ValueError as exc:
        raise config_io.ConfigError(f"{key}: cannot read {text!r} as {kind.__name__}") from exc


def _floats(key, text) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    return tuple(_number(key, p, float) for p in parts)


def scenario_from_config(values: dict[str, str], **overrides) -> Scenario:
    """Build a :class:`Scenario` from parsed ``key = value`` pairs.

    Unknown keys raise :class:`config_io.ConfigError`; values that parse but
    violate a precondition raise :class:`ScenarioError`.
    """
    kwargs: dict = {}
    physical: dict = {}
    for key, text in values.items():
        if key in ("name", "boundary", "experiment", "output_dir"):
            kwargs[key] = text
        elif key in _INT_KEYS:
            kwargs[key] = _number(key, text, int)
        elif key in _FLOAT_KEYS:
            kwargs[key] = _number(key, text, float)
        elif key in ("inductance", "resistance"):
            kwargs[key] = OPTIMAL if text == OPTIMAL else _number(key, text, float)
        elif key == "point":
            point = _floats(key, text)
            if len(point) != 2:
                raise config_io.ConfigError("point needs two coordinates 'x1, x2'")
            kwargs[key] = point
        elif key == "snapshot_times":
            kwargs[key] = _floats(key, text)
        elif key == "actuator_count":
            physical[key] = _number(key, text, int)
        elif key in _PHYSICAL_KEYS:
            physical[key] = _number(key, text, float)
        else:
            raise config_io.ConfigError(f"unknown config key {key!r}")
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return Scenario(physical=physical, **kwargs)


def load_scenario(path, **overrides) -> Scenario:
    return scenario_from_config(config_io.read_config(path), **overrides)


# --- assembly ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Assembled:
    scenario: Scenario
    params: PhysicalParams  # with the network impedance actually used
    mech: object
    elec: object
    coupling: object
    system: ModalSystem


def stiffening(scenario: Scenario, h: int) -> float:
    return stiffening_ratio(h, scenario.quad_order) if scenario.mech_kind == CLAMPED else 1.0


def optimal_impedance(scenario: Scenario, h: int, p: PhysicalParams | None = None) -> tuple[float, float]:
    p = scenario.base_params() if p is None else p
    if scenario.mech_kind == SS:
        return optimal_inductance_ss(h, p), optimal_resistance_ss(p)
    return optimal_impedance_clamped(h, p, stiffening(scenario, h))


def network_impedance(scenario: Scenario) -> tuple[float, float]:
    L_opt, R_opt = optimal_impedance(scenario, scenario.tune_mode)
    L = L_opt if scenario.inductance == OPTIMAL else float(scenario.inductance)
    R = R_opt if scenario.resistance == OPTIMAL else float(scenario.resistance)
    return L, R


def build_system(scenario: Scenario) -> Assembled:
    if scenario.modes < 1:
        raise ScenarioError("simulations need at least one mode")
    L, R = network_impedance(scenario)
    p = scenario.base_params().with_network(L, R)
    n = scenario.modes
    mech = build_basis(scenario.mech_kind, n, scenario.quad_order)
    elec = build_basis(MEMBRANE, n, scenario.quad_order)
    if scenario.mech_kind == SS:
        c = coupling_analytic_ss(n)
    else:
        c = coupling_quadrature(mech, elec, n, scenario.quad_order)
    system = assemble(dimensionless_from_physical(p), mech.eigenvalues, elec.eigenvalues, c)
    return Assembled(scenario, p, mech, elec, c, system)


# --- reports ------------------------------------------------------------------------------

TUNE_COLUMNS = ["h", "i", "j", "lambda", "nu", "C_hh", "L_opt", "R_opt", "c_h", "T_tr"]


def tune_report(scenario: Scenario) -> list[list]:
    """Per-mode table of eigenvalues, diagonal coupling, optimal impedance and
    transfer time (in periods of the mode)."""
    n = scenario.modes
    if n == 0:
        return []
    p = scenario.base_params()
    dim = dimensionless_from_physical(p)  # alpha and gamma do not depend on the network
    mech = build_basis(scenario.mech_kind, n, scenario.quad_order)
    elec = build_basis(MEMBRANE, n, scenario.quad_order)
    if scenario.mech_kind == SS:
        c = coupling_analytic_ss(n).entries
    else:
        c = coupling_quadrature(mech, elec, n, scenario.quad_order).entries
    rows = []
    for h, (m, e) in enumerate(zip(mech.modes, elec.modes), start=1):
        L, R = optimal_impedance(scenario, h, p)
        k = coupling_ratio(dim.alpha * m.eigenvalue, dim.gamma * c[h - 1, h - 1])
        rows.append([h, m.index.i, m.index.j, m.eigenvalue, e.eigenvalue, c[h - 1, h - 1], L, R, stiffening(scenario, h), transfer_time(k)])
    return rows


def manifest(asm: Assembled) -> dict:
    """Everything needed to audit or replay a run."""
    s, sys = asm.scenario, asm.system
    dim = dimensionless_from_physical(asm.params)
    per_mode = []
    for h in range(1, sys.n + 1):
        A, B, C, D = sys.modal_abcd(h)
        L_opt, R_opt = optimal_impedance(s, h)
        per_mode.append(
            {"h": h, "A": A, "B": B, "C": C, "D": D, "L_opt": L_opt, "R_opt": R_opt, "c_h": stiffening(s, h)}
        )
    return {
        "scenario": s.as_config(),
        "inductance": asm.params.net_inductance,
        "resistance": asm.params.net_resistance,
        "physical": asm.params.as_dict(),
        "derived": derive_physical(asm.params).as_dict(),
        "dimensionless": dim.as_dict(),
        "modes": per_mode,
        "coupling": asm.coupling.entries,
    }


# --- experiments ----------------------------------------------------------------------------


def _pair_roots(sys: ModalSystem, h: int):
    return char_roots_P(ModalABCD(*sys.modal_abcd(h)))


def default_t_end(asm: Assembled) -> float:
    s, sys = asm.scenario, asm.system
    A, B, C, D = sys.modal_abcd(s.tune_mode)
    if s.experiment == "beat" or D == 0:
        if C == 0 and A == B:
            raise ScenarioError("tuned pair has no coupling; set t_end explicitly")
        return 10.0 * beat_period(A, B, C)
    # five time constants of the slower root of the tuned pair
    return 5.0 / min(_pair_roots(sys, s.tune_mode).damping)


def initial_state(asm: Assembled) -> ModalState:
    s, n = asm.scenario, asm.system.n
    if s.experiment == "impulse":
        return impulse_initial_state(s.point, asm.mech, n)
    state = ModalState.zeros(n)
    state.v[s.tune_mode - 1] = 1.0
    return state


@dataclass(frozen=True)
class RunResult:
    directory: Path
    files: list
    manifest: dict
    trajectory: object = None
    frf: object = None


def run(scenario: Scenario, output_root=None) -> RunResult:
    """Run the scenario and write its artifacts atomically under
    ``output_root / scenario.name``."""
    asm = build_system(scenario)
    man = manifest(asm)
    traj = curves = None
    snapshots = []
    if scenario.experiment == "frf":
        sys = asm.system
        lo = scenario.omega_min if scenario.omega_min is not None else 0.5 * math.sqrt(sys.A.min())
        hi = scenario.omega_max if scenario.omega_max is not None else 1.2 * math.sqrt(sys.A.max())
        curves = frf(sys, np.linspace(lo, hi, scenario.omega_points))
    else:
        t_end = scenario.t_end if scenario.t_end is not None else default_t_end(asm)
        traj = integrate(asm.system, initial_state(asm), t_end, scenario.rel_tol, scenario.samples)
        st = traj.stats
        man["integrator"] = {
            "t_end": t_end,
            "steps": st.steps,
            "rejected": st.rejected,
            "rhs_evals": st.rhs_evals,
            "rel_tol": st.rel_tol,
            "abs_tol": st.abs_tol,
        }
        if scenario.snapshot_times:
            g = np.linspace(0.0, 1.0, scenario.grid)
            snapshots = reconstruct_fields(traj, asm.mech, asm.elec, (g, g), scenario.snapshot_times)

    root = config_io.resolve_output_root(output_root, scenario.output_dir)
    directory = root / scenario.name
    with config_io.staged_output(directory) as out:
        if curves is not None:
            out.csv("frf.csv", *config_io.frf_table(curves))
        if traj is not None:
            out.csv("trajectory.csv", *config_io.trajectory_table(traj))
        for i, snap in enumerate(snapshots):
            out.csv(f"field_{i:04d}.csv", *config_io.field_table(snap))
        man["files"] = sorted(out.names + ["manifest.json"])
        out.json("manifest.json", man)
    return RunResult(directory, man["files"], man, traj, curves)


def replay_overrides(man: dict) -> dict:
    """Scenario overrides that pin the network impedance recorded in a manifest."""
    return {"inductance": man["inductance"], "resistance": man["resistance"]}


def with_overrides(scenario: Scenario, **kw) -> Scenario:
    return replace(scenario, **{k: v for k, v in kw.items() if v is not None})
