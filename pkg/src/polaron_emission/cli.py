"""Command-line front end: flat key = value configuration, dispatch and CSV output.

Usage::

    polaron-emission spectrum --config run.cfg --out spectrum.csv
    polaron-emission sweep-dip --s-min 0.05 --s-max 20 --s-points 30
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .dynamics import DriveConfig, build_liouvillian, steady_state
from .emission import coherent_fraction, incoherent_spectrum, power_budget
from .errors import ConfigurationError, PolaronEmissionError
from .hom import DetectorModel, dip_depth_sweep, hom_pipeline
from .phonon import PhononEnvironment, phonon_correlations, polaron_rates, uniform_grid

log = logging.getLogger(__name__)

DEFAULT_TEMPERATURES = (0.0, 4.0, 15.0)


@dataclass(frozen=True)
class GridConfig:
    phonon_tau_max: float = 20.0  # ps
    phonon_tau_step: float = 0.005  # ps
    optical_tau_max: Optional[float] = None  # ps; None means 10/gamma
    freq_min: float = -30.0  # 1/ps
    freq_max: float = 30.0  # 1/ps
    freq_points: int = 12001

    def __post_init__(self):
        if not (self.phonon_tau_max > 0 and self.phonon_tau_step > 0):
            raise ConfigurationError("phonon grid parameters must be positive")
        if self.optical_tau_max is not None and not self.optical_tau_max > 0:
            raise ConfigurationError("optical_tau_max must be positive")
        if not self.freq_max > self.freq_min:
            raise ConfigurationError("freq_max must exceed freq_min")
        if self.freq_points < 3:
            raise ConfigurationError("freq_points must be >= 3")

    def phonon_tau(self):
        return uniform_grid(self.phonon_tau_step, self.phonon_tau_max)

    def delta_omega(self):
        return np.linspace(self.freq_min, self.freq_max, self.freq_points)


@dataclass(frozen=True)
class SimConfig:
    phonon: PhononEnvironment = field(default_factory=PhononEnvironment)
    drive: DriveConfig = field(default_factory=DriveConfig)
    detector: DetectorModel = field(default_factory=DetectorModel)
    grids: GridConfig = field(default_factory=GridConfig)
    markovian: bool = False
    output_path: str = "."


# config key -> (section, attribute, parser)
def _bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_float(text):
    return None if text.strip().lower() in ("auto", "none") else float(text)


def _int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


_KEYS = {
    "alpha_ps2": ("phonon", "alpha", float),
    "nu_c_psinv": ("phonon", "nu_c", float),
    "temperature_K": ("phonon", "temperature", float),
    "omega_psinv": ("drive", "omega", float),
    "gamma_psinv": ("drive", "gamma", float),
    "detuning_psinv": ("drive", "detuning_tilde", float),
    "detector_fwhm_ps": ("detector", "fwhm", float),
    "markovian": (None, "markovian", _bool),
    "phonon_tau_max_ps": ("grids", "phonon_tau_max", float),
    "phonon_tau_step_ps": ("grids", "phonon_tau_step", float),
    "optical_tau_max_ps": ("grids", "optical_tau_max", _optional_float),
    "freq_min_psinv": ("grids", "freq_min", float),
    "freq_max_psinv": ("grids", "freq_max", float),
    "freq_points": ("grids", "freq_points", _int),
}


def parse_config(text):
    """Parse a flat ``key = value`` document into a validated ``SimConfig``.

    Blank lines and ``#`` comments are ignored; omitted keys keep their defaults.
    """
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        try:
            parsed = _KEYS[key][2](value)
        except ValueError:
            raise ConfigurationError(f"line {lineno}: cannot parse {key} = {value!r}") from None
        if isinstance(parsed, float) and not math.isfinite(parsed):
            raise ConfigurationError(f"line {lineno}: {key} must be finite")
        values[key] = parsed
        lines[key] = lineno

    sections = {"phonon": {}, "drive": {}, "detector": {}, "grids": {}}
    top = {}
    for key, value in values.items():
        section, attr, _ = _KEYS[key]
        (top if section is None else sections[section])[attr] = value

    defaults = SimConfig()
    built = {}
    for name, overrides in sections.items():
        try:
            built[name] = dataclasses.replace(getattr(defaults, name), **overrides)
        except (ConfigurationError, ValueError) as exc:
            keys = [k for k in values if _KEYS[k][0] == name]
            where = ", ".join(f"{k} (line {lines[k]})" for k in keys)
            raise ConfigurationError(f"{where}: {exc}") from None
    return SimConfig(**built, markovian=top.get("markovian", False))


def config_to_text(cfg):
    """Fully resolved configuration in the ``parse_config`` format."""
    out = []
    for key, (section, attr, _) in _KEYS.items():
        value = getattr(cfg if section is None else getattr(cfg, section), attr)
        if value is None:
            text = "auto"
        elif isinstance(value, bool):
            text = "true" if value else "false"
        else:
            text = repr(value)
        out.append(f"{key} = {text}")
    return "\n".join(out) + "\n"


def format_number(x):
    """Scientific notation with a 12-digit fraction and a bare exponent: ``1.000000000000e0``."""
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    mantissa, exponent = f"{x:.12e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def write_csv(header, rows, path):
    """Write ``rows`` (an iterable of equal-length numeric sequences) under ``header``."""
    header = list(header)
    lines = [",".join(header)]
    for row in rows:
        row = list(row)
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
        lines.append(",".join(format_number(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(data, path):
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _sidecar(out, suffix):
    out = Path(out)
    return out.with_name(out.stem + suffix)


def _complex_dict(name, z):
    return {f"{name}_re_psinv": float(np.real(z)), f"{name}_im_psinv": float(np.imag(z))}


def _temps(args):
    return list(args.temps) if args.temps is not None else list(DEFAULT_TEMPERATURES)


def _s_values(args, default_min, default_max, default_points):
    lo = default_min if args.s_min is None else args.s_min
    hi = default_max if args.s_max is None else args.s_max
    n = default_points if args.s_points is None else args.s_points
    if not (0 < lo < hi) or n < 2:
        raise _UsageError("need 0 < s-min < s-max and s-points >= 2")
    return np.geomspace(lo, hi, n)


class _UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _cmd_spectrum(cfg, args, out):
    env, drive = cfg.phonon, cfg.drive
    pc = phonon_correlations(env, cfg.grids.phonon_tau())
    L = build_liouvillian(drive, polaron_rates(env, drive.omega))
    rho = steady_state(L)
    spec = incoherent_spectrum(L, rho, pc, cfg.grids.delta_omega(), markovian=args.markovian)
    write_csv(
        ["delta_omega_psinv", "S_total", "S_zpl", "S_sideband"],
        zip(spec.delta_omega, spec.total, spec.zpl, spec.sideband),
        out,
    )
    budget = power_budget(spec, L, rho)
    summary = {
        "coherent_weight": spec.coherent_weight,
        "sideband_fraction": budget["sideband_fraction"],
        "sideband_integral": budget["sideband_integral"],
        "expected_sideband_integral": budget["expected_sideband_integral"],
        "B": spec.B,
        "markovian": bool(args.markovian),
    }
    _write_json(summary, _sidecar(out, ".summary.json"))
    return [out]


def _cmd_coherent_fraction(cfg, args, out):
    s_values = _s_values(args, 0.01, 10.0, 40)
    written = []
    out = Path(out)
    for T in _temps(args):
        env = dataclasses.replace(cfg.phonon, temperature=T)
        pc = phonon_correlations(env, cfg.grids.phonon_tau())
        rows = []
        for s in s_values:
            drive = DriveConfig.from_saturation(s, cfg.drive.gamma, cfg.drive.detuning_tilde)
            L = build_liouvillian(drive, polaron_rates(env, drive.omega))
            rows.append((drive.omega, s, coherent_fraction(L, steady_state(L), pc, args.markovian)))
        path = out.with_name(f"{out.stem}_T{T:g}K{out.suffix or '.csv'}")
        write_csv(["omega_psinv", "s", "fraction"], rows, path)
        written.append(path)
    return written


def _cmd_hom(cfg, args, out):
    drive = cfg.drive if args.s is None else DriveConfig.from_saturation(
        args.s, cfg.drive.gamma, cfg.drive.detuning_tilde
    )
    pc = phonon_correlations(cfg.phonon, cfg.grids.phonon_tau())
    res = hom_pipeline(
        cfg.phonon, drive, cfg.detector, markovian=args.markovian, pc=pc,
        optical_span=cfg.grids.optical_tau_max,
    )
    tau = res.raw.tau
    conv = np.interp(tau, res.convolved.tau, res.convolved.values.real)
    write_csv(["tau_ps", "g2_raw", "g2_convolved"], zip(tau, res.raw.values.real, conv), out)
    _write_json(
        {
            "s": float(drive.saturation),
            "omega_psinv": float(drive.omega),
            "dip_depth": res.dip_depth,
            "asymptote_before_rescale": res.asymptote,
            "markovian": bool(args.markovian),
        },
        _sidecar(out, ".summary.json"),
    )
    return [out]


def _cmd_sweep_dip(cfg, args, out):
    s_values = _s_values(args, 0.05, 20.0, 30)
    pc = phonon_correlations(cfg.phonon, cfg.grids.phonon_tau())
    points = dip_depth_sweep(
        cfg.phonon, cfg.drive, cfg.detector, s_values, markovian=args.markovian, pc=pc,
        optical_span=cfg.grids.optical_tau_max,
    )
    write_csv(["s", "dip_depth"], ((p.s, p.dip_depth) for p in points), out)
    failures = {format_number(p.s): p.error for p in points if p.error}
    _write_json(
        {"points": len(points), "failures": failures, "markovian": bool(args.markovian)},
        _sidecar(out, ".summary.json"),
    )
    if failures:
        raise PolaronEmissionError(f"{len(failures)} sweep point(s) failed; see summary")
    return [out]


def _cmd_phonon_info(cfg, args, out):
    temps = [cfg.phonon.temperature] if args.temps is None else list(args.temps)
    report = []
    for T in temps:
        env = dataclasses.replace(cfg.phonon, temperature=T)
        pq = polaron_rates(env, cfg.drive.omega)
        entry = {
            "temperature_K": T,
            "B": pq.B,
            "B2": pq.B**2,
            "one_minus_B2": 1.0 - pq.B**2,
            "omega_r_psinv": pq.omega_r,
        }
        entry.update(_complex_dict("gamma_x", pq.gamma_x))
        entry.update(_complex_dict("chi_y", pq.chi_y))
        entry.update(_complex_dict("chi_z", pq.chi_z))
        report.append(entry)
    _write_json(report, out)
    print(json.dumps(report, indent=2, sort_keys=True))
    return [out]


_COMMANDS = {
    "spectrum": (_cmd_spectrum, "spectrum.csv"),
    "coherent-fraction": (_cmd_coherent_fraction, "coherent_fraction.csv"),
    "hom": (_cmd_hom, "hom.csv"),
    "sweep-dip": (_cmd_sweep_dip, "sweep_dip.csv"),
    "phonon-info": (_cmd_phonon_info, "phonon_info.json"),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polaron-emission",
        description="Emission spectra, coherent fraction and HOM correlations of a driven emitter.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="key = value configuration file")
        p.add_argument("--out", type=Path, help="output file (default: ./<command>.csv)")
        p.add_argument("--markovian", action="store_true", help="Markovian phonon treatment")
        p.add_argument("--temps", type=_float_list, help="comma-separated temperatures in K")
        p.add_argument("--s", type=float, help="saturation parameter for a single run")
        p.add_argument("--s-min", type=float)
        p.add_argument("--s-max", type=float)
        p.add_argument("--s-points", type=int)
    return parser


def run_command(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand. Returns 0 on success, 2 on usage or configuration
    errors and 1 on numerical failure."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text)
        if args.s is not None and not args.s > 0:
            raise _UsageError("--s must be positive")
        if args.temps is not None and (not args.temps or min(args.temps) < 0):
            raise _UsageError("--temps must list temperatures >= 0")
        args.markovian = args.markovian or cfg.markovian
        handler, default_name = _COMMANDS[args.command]
        out = args.out if args.out is not None else Path(cfg.output_path) / default_name
        out.parent.mkdir(parents=True, exist_ok=True)
        if args.markovian != cfg.markovian:
            cfg = dataclasses.replace(cfg, markovian=args.markovian)
        _sidecar(out, ".config.txt").write_text(config_to_text(cfg), encoding="utf-8")
    except (_UsageError, ConfigurationError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1

    try:
        written = handler(cfg, args, out)
    except (_UsageError, ConfigurationError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (PolaronEmissionError, ArithmeticError, ValueError, OSError) as exc:
        print(f"{parser.prog}: {args.command} failed: {exc}", file=sys.stderr)
        return 1
    for path in written:
        log.info("wrote %s", path)
    return 0


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
