"""Configuration parsing, scan driving and bit-stable result emission.

Config files are plain ``key = value`` text with one entry per line; ``#``
starts a comment. Every dimensional quantity must carry an explicit unit
suffix (``w = 10 um``, ``Delta_do = 1.1e15 rad/s``); detunings, Rabi
amplitudes and decay rates are angular (rad/s). Dimensionless numerics knobs
(grid size, time steps in oscillator units, seeds) are bare numbers.

Outputs are CSV with the fixed header
``ratio,mode,fraction,epsilon,phi_V,budget,norm_drift`` and 12 significant
digits per float, plus one two-column ``.dat`` file per mode for direct
plotting of the signal curve. Identical config + seed reproduce identical
bytes.
"""

from __future__ import annotations

import dataclasses
import importlib.resources
import math
import os
import sys
from dataclasses import dataclass, field

import click
import numpy as np

from .analytics import tf_ground_state
from .dipole_kernel import kernel_table
from .gpe_solver import SolverError, SolverSettings
from .physical_params import (DOUGHNUT, AtomSpecies, BeamConfig,
                              ProtocolConfig, derive_trap,
                              scale_to_dimensionless)
from .protocol import (MODE_INTEGRAL, MODE_NUMERIC, MODE_TF, MODES,
                       compute_ground_state, default_grid, run_interferometer)


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


DEFAULT_RATIOS = (0.0, 0.0005, 0.001, 0.0015, 0.002, 0.0025)

_MODE_ALIASES = {
    "tf": MODE_TF, MODE_TF: MODE_TF,
    "integral": MODE_INTEGRAL, MODE_INTEGRAL: MODE_INTEGRAL,
    "numeric": MODE_NUMERIC, MODE_NUMERIC: MODE_NUMERIC,
}
_MODE_SHORT = {MODE_TF: "tf", MODE_INTEGRAL: "integral",
               MODE_NUMERIC: "numeric"}

_UNITS = {
    "mass": {"kg": 1.0},
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "rate": {"rad/s": 1.0, "1/s": 1.0},
    "angle": {"rad": 1.0},
}

# key -> (kind, default); kind "quantity:<dim>" demands a unit suffix,
# everything else is a bare value. Required keys have default=_REQUIRED.
_REQUIRED = object()
_KEYS = {
    "mass": ("quantity:mass", _REQUIRED),
    "a_s": ("quantity:length", _REQUIRED),
    "a_a": ("quantity:length", _REQUIRED),
    "lambda0": ("quantity:length", _REQUIRED),
    "gamma": ("quantity:rate", _REQUIRED),
    "Omega_do": ("quantity:rate", _REQUIRED),
    "Delta_do": ("quantity:rate", _REQUIRED),
    "w": ("quantity:length", _REQUIRED),
    "N": ("number", _REQUIRED),
    "L_z": ("quantity:length", _REQUIRED),
    "T": ("quantity:time", _REQUIRED),
    "T_pi2": ("quantity:time", 0.0),
    "phi_s": ("phi", None),          # None = auto-compensate
    "ratios": ("ratios", DEFAULT_RATIOS),
    "modes": ("modes", MODES),
    "grid": ("int", 256),
    "box": ("number", 24.0),         # oscillator lengths per side
    "dt_real": ("number", 1e-3),
    "dt_imag": ("number", 1e-3),
    "tol_mu": ("number", 1e-9),
    "max_iter": ("int", 200_000),
    "check_every": ("int", 25),
    "seed": ("int", 0),
    "integral_beam_profile": ("choice:uniform,full", "uniform"),
    "budget_warn": ("number", 0.5),
    "out": ("str", None),
}


@dataclass(frozen=True)
class ScanSpec:
    """What to run: abscissa values, modes, numerics and reproducibility."""

    ratios: tuple
    modes: tuple
    grid_size: int = 256
    box: float = 24.0
    settings: SolverSettings = field(default_factory=SolverSettings)
    seed: int = 0
    integral_profile: str = "uniform"
    budget_warn: float = 0.5
    out_dir: str | None = None

    def __post_init__(self):
        if any(r < 0 for r in self.ratios):
            raise ConfigError("intensity ratios must be nonnegative")
        if not self.modes:
            raise ConfigError("at least one mode is required")


@dataclass(frozen=True)
class RunConfig:
    species: AtomSpecies
    doughnut: BeamConfig
    protocol: ProtocolConfig
    scan: ScanSpec


@dataclass
class ScanRow:
    ratio: float
    mode: str
    fraction: float
    epsilon: float
    phi_v: float
    budget: float
    norm_drift: float
    error: str | None = None
    diagnostics: dict = field(default_factory=dict)


@dataclass
class ScanTable:
    rows: list

    def for_mode(self, mode: str) -> list:
        return [r for r in self.rows if r.mode == mode]


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

def _parse_number(raw: str, lineno: int, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: key {key!r}: {raw!r} is not a number")


def _parse_quantity(raw: str, dim: str, lineno: int, key: str) -> float:
    parts = raw.split()
    units = _UNITS[dim]
    if len(parts) != 2:
        raise ConfigError(
            f"line {lineno}: key {key!r} needs '<value> <unit>' with unit in "
            f"{sorted(units)} (got {raw!r})")
    value = _parse_number(parts[0], lineno, key)
    if parts[1] not in units:
        expected = ", ".join(sorted(units))
        raise ConfigError(
            f"line {lineno}: key {key!r}: unit {parts[1]!r} is not a "
            f"{dim} unit (expected one of: {expected})")
    return value * units[parts[1]]


def _parse_ratios(raw: str, lineno: int) -> tuple:
    if raw.startswith("linspace:"):
        parts = raw.split(":")
        if len(parts) != 4:
            raise ConfigError(f"line {lineno}: ratios linspace form is "
                              "'linspace:<start>:<stop>:<num>'")
        start = _parse_number(parts[1], lineno, "ratios")
        stop = _parse_number(parts[2], lineno, "ratios")
        num = int(_parse_number(parts[3], lineno, "ratios"))
        return tuple(float(x) for x in np.linspace(start, stop, num))
    values = tuple(_parse_number(tok.strip(), lineno, "ratios")
                   for tok in raw.split(",") if tok.strip())
    if not values:
        raise ConfigError(f"line {lineno}: ratios list is empty")
    return values


def _parse_modes(raw: str, lineno: int) -> tuple:
    if raw.strip() == "all":
        return MODES
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if tok not in _MODE_ALIASES:
            raise ConfigError(f"line {lineno}: unknown mode {tok!r} "
                              f"(expected tf, integral, numeric or all)")
        out.append(_MODE_ALIASES[tok])
    return tuple(dict.fromkeys(out))


def _parse_value(kind: str, raw: str, lineno: int, key: str):
    if kind.startswith("quantity:"):
        return _parse_quantity(raw, kind.split(":", 1)[1], lineno, key)
    if kind == "number":
        return _parse_number(raw, lineno, key)
    if kind == "int":
        value = _parse_number(raw, lineno, key)
        if value != int(value):
            raise ConfigError(f"line {lineno}: key {key!r} must be an integer")
        return int(value)
    if kind == "phi":
        if raw.strip() == "auto":
            return None
        return _parse_quantity(raw, "angle", lineno, key)
    if kind == "ratios":
        return _parse_ratios(raw, lineno)
    if kind == "modes":
        return _parse_modes(raw, lineno)
    if kind == "str":
        return raw.strip()
    if kind.startswith("choice:"):
        choices = kind.split(":", 1)[1].split(",")
        if raw.strip() not in choices:
            raise ConfigError(f"line {lineno}: key {key!r} must be one of "
                              f"{choices}")
        return raw.strip()
    raise AssertionError(f"unhandled kind {kind}")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    seen: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        kind, _ = _KEYS[key]
        seen[key] = _parse_value(kind, raw, lineno, key)

    missing = [k for k, (_, default) in _KEYS.items()
               if default is _REQUIRED and k not in seen]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    values = {k: seen.get(k, default) for k, (_, default) in _KEYS.items()}

    try:
        species = AtomSpecies(mass=values["mass"], a_s=values["a_s"],
                              a_a=values["a_a"], wavelength0=values["lambda0"],
                              gamma=values["gamma"])
        doughnut = BeamConfig(DOUGHNUT, values["Omega_do"], values["Delta_do"],
                              values["w"],
                              k_laser=2 * math.pi / values["lambda0"])
        protocol_cfg = ProtocolConfig(n_atoms=values["N"], l_z=values["L_z"],
                                      t_imprint=values["T"],
                                      t_pulse=values["T_pi2"],
                                      phi_s=values["phi_s"])
        settings = SolverSettings(dt_real=values["dt_real"],
                                  dt_imag=values["dt_imag"],
                                  tol_mu=values["tol_mu"],
                                  max_iter=values["max_iter"],
                                  check_every=values["check_every"])
        scan = ScanSpec(ratios=values["ratios"], modes=values["modes"],
                        grid_size=values["grid"], box=values["box"],
                        settings=settings, seed=values["seed"],
                        integral_profile=values["integral_beam_profile"],
                        budget_warn=values["budget_warn"],
                        out_dir=values["out"])
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    return RunConfig(species=species, doughnut=doughnut,
                     protocol=protocol_cfg, scan=scan)


def bundled_config_text() -> str:
    """The shipped reference configuration (10^5 87Rb atoms, 10 us imprint)."""
    return (importlib.resources.files("oinlsim") / "data" / "paper.cfg"
            ).read_text()


# --------------------------------------------------------------------------
# scan driving
# --------------------------------------------------------------------------

def run_scan(config: RunConfig) -> ScanTable:
    """Run every (ratio, mode) point; failures are recorded per row.

    Grid ground states are computed once per mode and shared across ratios
    (the initial condensate does not depend on the imprint beam).
    """
    scan = config.scan
    scaled = scale_to_dimensionless(config.species, config.doughnut,
                                    config.protocol)
    grid = None
    ground_states: dict = {}
    for mode in scan.modes:
        if mode in (MODE_INTEGRAL, MODE_NUMERIC):
            if grid is None:
                grid = default_grid(scan.grid_size, scan.box)
            ground_states[mode] = compute_ground_state(
                scaled, mode, grid, scan.settings, rng_seed=scan.seed)

    rows = []
    for mode in scan.modes:
        for ratio in scan.ratios:
            try:
                result = run_interferometer(
                    scaled, ratio, mode, grid=grid, settings=scan.settings,
                    ground_state=ground_states.get(mode),
                    full_beam_profile=(scan.integral_profile == "full"),
                    rng_seed=scan.seed)
                rows.append(ScanRow(
                    ratio=ratio, mode=mode, fraction=result.fraction,
                    epsilon=result.epsilon, phi_v=result.phi_v,
                    budget=result.budget,
                    norm_drift=result.diagnostics.get("norm_drift", 0.0),
                    diagnostics=dict(result.diagnostics)))
            except Exception as exc:  # keep scanning, record the failure
                rows.append(ScanRow(
                    ratio=ratio, mode=mode, fraction=math.nan,
                    epsilon=math.nan, phi_v=math.nan, budget=math.nan,
                    norm_drift=math.nan, error=f"{type(exc).__name__}: {exc}"))
    rows.sort(key=lambda r: (r.mode, r.ratio))
    return ScanTable(rows=rows)


CSV_HEADER = "ratio,mode,fraction,epsilon,phi_V,budget,norm_drift"


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_outputs(table: ScanTable, out_dir: str) -> list:
    """Write ``scan.csv`` plus one plottable two-column file per mode.

    Returns the list of written paths. Floats are rendered with 12
    significant digits, so reading the CSV back recovers them to that
    precision.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    csv_path = os.path.join(out_dir, "scan.csv")
    try:
        with open(csv_path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for r in table.rows:
                fh.write(",".join([
                    _fmt(r.ratio), r.mode, _fmt(r.fraction), _fmt(r.epsilon),
                    _fmt(r.phi_v), _fmt(r.budget), _fmt(r.norm_drift),
                ]) + "\n")
        paths.append(csv_path)
        for mode in dict.fromkeys(r.mode for r in table.rows):
            dat_path = os.path.join(out_dir,
                                    f"fig2_{_MODE_SHORT.get(mode, mode)}.dat")
            with open(dat_path, "w") as fh:
                fh.write(f"# {mode}: intensity ratio vs trapped fraction\n")
                for r in table.for_mode(mode):
                    fh.write(f"{_fmt(r.ratio)} {_fmt(r.fraction)}\n")
            paths.append(dat_path)
    except OSError as exc:
        raise OSError(f"cannot write outputs under {out_dir!r}: {exc}") from exc
    return paths


def read_scan_csv(path: str) -> list:
    """Parse a scan.csv back into ScanRow values (round-trip helper)."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            ratio, mode, fraction, eps, phi_v, budget, drift = \
                line.strip().split(",")
            rows.append(ScanRow(ratio=float(ratio), mode=mode,
                                fraction=float(fraction), epsilon=float(eps),
                                phi_v=float(phi_v), budget=float(budget),
                                norm_drift=float(drift)))
    return rows


# --------------------------------------------------------------------------
# command line
# --------------------------------------------------------------------------

@click.group()
def cli():
    """Trapped-atom interference signal of light-induced nonlinearities."""


@cli.command()
@click.option("--config", "config_path",
              type=click.Path(exists=True, dir_okay=False), default=None,
              help="Configuration file; defaults to the bundled reference run.")
@click.option("--mode", "mode",
              type=click.Choice(["tf", "integral", "numeric", "all"]),
              default=None, help="Override the configured mode list.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default=None, help="Directory for scan.csv and .dat curves.")
@click.option("--grid", "grid_size", type=int, default=None,
              help="Override the grid size (power of two).")
@click.option("--dt", "dt_real", type=float, default=None,
              help="Override the real-time step (oscillator units).")
@click.option("--seed", type=int, default=None,
              help="Override the random seed.")
def simulate(config_path, mode, out_dir, grid_size, dt_real, seed):
    """Run the interferometer scan and print/emit the signal table."""
    text = (open(config_path).read() if config_path
            else bundled_config_text())
    config = parse_config(text)
    scan = config.scan
    if mode is not None:
        scan = dataclasses.replace(
            scan, modes=MODES if mode == "all" else (_MODE_ALIASES[mode],))
    if grid_size is not None:
        scan = dataclasses.replace(scan, grid_size=grid_size)
    if dt_real is not None:
        scan = dataclasses.replace(
            scan, settings=dataclasses.replace(scan.settings, dt_real=dt_real))
    if seed is not None:
        scan = dataclasses.replace(scan, seed=seed)
    config = dataclasses.replace(config, scan=scan)

    trap = derive_trap(config.species, config.doughnut)
    tf = tf_ground_state(config.species, trap.omega_perp,
                         config.protocol.n_atoms, config.protocol.l_z)
    trap.mu = tf.mu
    click.echo(f"trap: omega_perp/2pi = {trap.omega_perp / (2 * np.pi):.2f} Hz,"
               f" delta_V = {trap.delta_v:.4g} J, R_TF = {tf.r_tf * 1e6:.3f} um,"
               f" mu_TF = {trap.mu:.4g} J", err=True)

    table = run_scan(config)

    click.echo(CSV_HEADER)
    for r in table.rows:
        click.echo(",".join([
            _fmt(r.ratio), r.mode, _fmt(r.fraction), _fmt(r.epsilon),
            _fmt(r.phi_v), _fmt(r.budget), _fmt(r.norm_drift)]))
        if r.error:
            click.echo(f"# failed at ratio={r.ratio:g} mode={r.mode}: "
                       f"{r.error}", err=True)

    for r in table.rows:
        if r.budget > scan.budget_warn:
            click.echo(f"warning: ratio={r.ratio:g}: decoherence budget "
                       f"gamma_dec*T = {r.budget:.3g} exceeds "
                       f"{scan.budget_warn:g}", err=True)
        if r.diagnostics.get("ratio_above_limit"):
            click.echo(f"warning: ratio={r.ratio:g} is above the 0.001 "
                       "operating limit for a tolerable spontaneous-emission "
                       "budget", err=True)

    out_dir = out_dir if out_dir is not None else scan.out_dir
    if out_dir is not None:
        for path in write_outputs(table, out_dir):
            click.echo(f"wrote {path}", err=True)

    if any(r.error for r in table.rows):
        raise SolverError("one or more scan points failed")


@cli.command("kernel-table")
@click.option("--klr", default="0.1,0.5,1,2,5,10",
              help="Comma list of k_L*R values.")
@click.option("--theta", default="0,0.3927,0.7854,1.1781,1.5708",
              help="Comma list of angles (rad).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              default=None, help="CSV output path (default: stdout).")
def kernel_table_cmd(klr, theta, out_path):
    """Dump dipole-kernel term magnitudes (lengths in units of 1/k_L)."""
    try:
        klr_values = [float(tok) for tok in klr.split(",") if tok.strip()]
        theta_values = [float(tok) for tok in theta.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list: {exc}") from exc
    lines = ["klr,theta,near,intermediate,far"]
    for row in kernel_table(klr_values, theta_values):
        lines.append(",".join(_fmt(row[k]) for k in
                              ("klr", "theta", "near", "intermediate", "far")))
    text = "\n".join(lines) + "\n"
    if out_path is None:
        click.echo(text, nl=False)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {out_path}", err=True)


def main(argv=None) -> int:
    """Console entry point with categorized exit codes."""
    try:
        cli.main(args=argv, prog_name="oinlsim", standalone_mode=False)
    except ValueError as exc:  # ConfigError and invalid parameter values
        click.echo(f"config error: {exc}", err=True)
        return 2
    except SolverError as exc:
        click.echo(f"solver error: {exc}", err=True)
        return 3
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return 4
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.Abort:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
