"""Config parsing and file exporters.

Config files are flat ``key = value`` text, one scenario per file, ``#``
comments allowed. CSV numbers use the shortest decimal string that round-trips
to the same double, so identical runs give byte-identical files.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import os
import shutil
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

OUTPUT_ROOT_ENV = "PIEZOPLATE_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "output"
_SECTION = "scenario"


class ConfigError(ValueError):
    """Unreadable or malformed configuration."""


def parse_config_text(text: str) -> dict[str, str]:
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None
    )
    parser.optionxform = str  # keep key case
    try:
        parser.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if len(parser.sections()) != 1:
        raise ConfigError("config files are flat: section headers are not allowed")
    return dict(parser[_SECTION])


def read_config(path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def format_config(values: dict) -> str:
    return "".join(f"{k} = {v}\n" for k, v in values.items())


def resolve_output_root(flag: str | None = None, configured: str | None = None) -> Path:
    """Command-line flag, then environment override, then config, then default."""
    for candidate in (flag, os.environ.get(OUTPUT_ROOT_ENV), configured):
        if candidate:
            return Path(candidate)
    return Path(DEFAULT_OUTPUT_ROOT)


# --- number formatting ----------------------------------------------------------


def fmt(x) -> str:
    """Shortest round-trip decimal form of a real number."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def json_text(data: dict) -> str:
    # json serialises floats with repr, which already round-trips
    return json.dumps(_plain(data), indent=2, sort_keys=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


# --- table builders ----------------------------------------------------------------


def trajectory_table(traj) -> tuple[list[str], np.ndarray]:
    n = traj.n
    header = ["t"]
    for name in ("v", "vdot", "phi", "phidot"):
        header += [f"{name}_{h}" for h in range(1, n + 1)]
    header += ["mech_elastic", "mech_kinetic", "elec_inductive", "elec_capacitive", "total"]
    e = traj.energy
    cols = [e.mech_elastic, e.mech_kinetic, e.elec_inductive, e.elec_capacitive, e.total]
    return header, np.column_stack([traj.t, traj.y, *cols])


def frf_table(f) -> tuple[list[str], np.ndarray]:
    return ["omega", "mech_norm", "elec_norm", "coupling_norm"], np.column_stack(
        [f.omega, f.mech_norm, f.elec_norm, f.coupling_norm]
    )


def field_table(snapshot) -> tuple[list[str], np.ndarray]:
    return ["x1", "x2", "w", "phi_field"], np.column_stack(
        [snapshot.x1.ravel(), snapshot.x2.ravel(), snapshot.w.ravel(), snapshot.phi.ravel()]
    )


def shape_table(shape, resolution: int) -> tuple[list[str], np.ndarray]:
    g = np.linspace(0.0, 1.0, resolution)
    x1, x2 = np.meshgrid(g, g, indexing="ij")
    return ["x1", "x2", "value"], np.column_stack([x1.ravel(), x2.ravel(), shape(x1, x2).ravel()])


def matrix_table(m: np.ndarray) -> tuple[list[str], np.ndarray]:
    header = ["h"] + [f"k{k}" for k in range(1, m.shape[1] + 1)]
    return header, np.column_stack([np.arange(1, m.shape[0] + 1), m])


def root_locus_table(sweep, C: float) -> tuple[list[str], list]:
    rows = []
    for branch, roots, weights in (
        ("mechanical", sweep.mechanical, sweep.mech_weight),
        ("electrical", sweep.electrical, sweep.elec_weight),
    ):
        for d, s, w in zip(sweep.D, roots, weights):
            # 1 for an evenly shared root, 0 for a purely mechanical or electrical one
            rows.append([d / C, branch, s.real, s.imag, 4.0 * w * (1.0 - w)])
    return ["D_over_C", "branch", "re", "im", "coupling_weight"], rows


# --- atomic output -------------------------------------------------------------------


class OutputWriter:
    """Collects files in a private staging directory; :func:`staged_output`
    moves them into place only when the whole run succeeded."""

    def __init__(self, staging: Path):
        self.staging = staging
        self.names: list[str] = []

    def text(self, name: str, content: str) -> None:
        (self.staging / name).write_text(content, encoding="utf-8")
        self.names.append(name)

    def csv(self, name: str, header, rows) -> None:
        self.text(name, csv_text(list(header), rows))

    def json(self, name: str, data: dict) -> None:
        self.text(name, json_text(data))


@contextmanager
def staged_output(directory):
    directory = Path(directory)
    directory.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=directory.parent))
    try:
        writer = OutputWriter(staging)
        yield writer
        directory.mkdir(parents=True, exist_ok=True)
        for name in writer.names:
            os.replace(staging / name, directory / name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
