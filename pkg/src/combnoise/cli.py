"""Command-line front end: ``combnoise {simulate, analyze, cavity, calibrate, demo}``.

Exit codes: 0 success, 2 config/input error, 3 incomplete measurement set,
4 numerical failure.
"""

from __future__ import annotations

import functools
import json
import sys
import time
import warnings
from pathlib import Path

import click
import numpy as np

import combnoise
from combnoise import io as cio
from combnoise.calibration import PsdTrace, SqlParams, Units, correct_and_calibrate, sql_db
from combnoise.cavity import (
    CavityParams,
    decoupling_factor,
    f3db,
    phase_transfer,
    transmission_exact,
    transmission_highfinesse,
    transmission_lowfreq,
)
from combnoise.comb import collective_modes, comb_from_dict, comb_to_dict
from combnoise.config import Experiment, load_config, load_demo
from combnoise.errors import ConvergenceError, DomainError, InputError, ProtocolError
from combnoise.noise import Quadrature
from combnoise.pipeline import analyze, simulate

EXIT_INPUT = 2
EXIT_PROTOCOL = 3
EXIT_NUMERICAL = 4
OUT_DIR_ENV = "COMBNOISE_OUT_DIR"


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ProtocolError as exc:
            click.echo(f"error: incomplete or inconsistent measurement set: {exc}", err=True)
            for band in getattr(exc, "missing", []):
                click.echo(f"  missing band {'+'.join(map(str, band))}", err=True)
            sys.exit(EXIT_PROTOCOL)
        except ConvergenceError as exc:
            click.echo(f"error: numerical failure: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)
        except (InputError, DomainError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


def _parse_rf_list(ctx, param, value):
    if value is None:
        return None
    try:
        out = [float(v) for v in value.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter("expected comma-separated frequencies in Hz") from None
    if not out:
        raise click.BadParameter("no frequencies given")
    return out


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _record(out: Path, command: str, config: str | None, seed: int | None, outputs: list[Path], timings: dict):
    """Merge this command's entry into ``out/manifest.json``."""
    path = out / "manifest.json"
    manifest = {"artifact_version": combnoise.__version__, "commands": {}}
    if path.exists():
        try:
            manifest = json.loads(path.read_text())
        except json.JSONDecodeError:
            pass
    manifest["artifact_version"] = combnoise.__version__
    manifest.setdefault("commands", {})[command] = {
        "config": config,
        "seed": seed,
        "outputs": sorted(p.name for p in outputs),
        "timings_s": {k: round(v, 6) for k, v in timings.items()},
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n")


def _cavity_from_options(finesse, f_rep, t_max, r1, r2, t1, t2) -> CavityParams:
    mirrors = (r1, r2, t1, t2)
    if any(v is not None for v in mirrors):
        if any(v is None for v in mirrors):
            raise DomainError("--r1, --r2, --t1 and --t2 must be given together")
        return CavityParams(r1, r2, t1, t2, f_rep)
    return CavityParams.from_finesse(finesse, f_rep, t_max)


def cavity_options(fn):
    for opt in reversed(
        [
            click.option("--finesse", type=float, default=420.0, show_default=True),
            click.option("--f-rep", type=float, default=76e6, show_default=True, help="Repetition rate / FSR (Hz)."),
            click.option("--t-max", type=float, default=1.0, show_default=True, help="Peak intensity transmission."),
            click.option("--r1", type=float),
            click.option("--r2", type=float),
            click.option("--t1", type=float),
            click.option("--t2", type=float),
        ]
    ):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(combnoise.__version__, prog_name="combnoise")
def main():
    """Spectral noise-correlation toolkit for optical frequency combs."""


def _load_experiment(config, seed, rf_list, zones, samples) -> Experiment:
    overrides = dict(seed=seed, rf_frequencies=rf_list, n_zones=zones, n_samples=samples)
    if config is None:
        return load_demo(**overrides)
    if not Path(config).is_file():
        raise InputError("config file not found", config)
    return load_config(config, **overrides)


@main.command("simulate")
@click.option("--config", type=click.Path(dir_okay=False), help="YAML run config (default: bundled demo).")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Override the master seed.")
@click.option("--out-dir", envvar=OUT_DIR_ENV, default="out", show_default=True)
@click.option("--rf-list", callback=_parse_rf_list, help="Comma-separated RF frequencies (Hz).")
@click.option("--zones", type=click.IntRange(2), help="Number of spectral zones.")
@click.option("--samples", type=click.IntRange(2), help="Samples per measurement.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--quadrature", type=click.Choice(["both", "amplitude", "phase"]), default="both", show_default=True)
@click.option("--workers", type=click.IntRange(1), default=1, show_default=True)
@_guard
def cmd_simulate(config, seed, out_dir, rf_list, zones, samples, fmt, quadrature, workers):
    """Run the single/pair-band measurement protocol at every RF frequency."""
    t0 = time.perf_counter()
    exp = _load_experiment(config, seed, rf_list, zones, samples)
    quads = [Quadrature.AMPLITUDE, Quadrature.PHASE] if quadrature == "both" else [Quadrature(quadrature)]
    t1 = time.perf_counter()
    measurements = simulate(exp.sim, quads, workers=workers)
    t2 = time.perf_counter()
    out = _out_dir(out_dir)
    meas_path = out / f"measurements.{fmt}"
    comb_path = out / "comb.json"
    cio.write_measurements(meas_path, measurements, fmt)
    comb_path.write_text(json.dumps(comb_to_dict(exp.envelope, exp.partition)) + "\n")
    t3 = time.perf_counter()
    _record(out, "simulate", exp.source, exp.sim.seed, [meas_path, comb_path],
            {"load": t1 - t0, "simulate": t2 - t1, "write": t3 - t2})
    click.echo(f"wrote {len(measurements)} measurements to {meas_path}")


def _load_modes(comb_path: Path):
    try:
        data = json.loads(comb_path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, str(comb_path), exc.lineno) from None
    envelope, zones = comb_from_dict(data)
    return collective_modes(envelope, zones)


@main.command("analyze")
@click.argument("measurements", type=click.Path(dir_okay=False))
@click.option("--comb", "comb_path", type=click.Path(dir_okay=False),
              help="Comb description JSON (default: comb.json next to MEASUREMENTS).")
@click.option("--out-dir", envvar=OUT_DIR_ENV, default="out", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--units", type=click.Choice(["rel_shot_linear", "rel_shot_db"]), default="rel_shot_db",
              show_default=True, help="Units of the collective-noise traces.")
@_guard
def cmd_analyze(measurements, comb_path, out_dir, fmt, units):
    """Assemble noise matrices, diagonalize them and extract CEO / timing traces."""
    t0 = time.perf_counter()
    meas_path = Path(measurements)
    if not meas_path.is_file():
        raise InputError("measurement file not found", str(meas_path))
    data = cio.read_measurements(meas_path)
    comb_path = Path(comb_path) if comb_path else meas_path.with_name("comb.json")
    w_ceo = w_rep = None
    if comb_path.is_file():
        w_ceo, w_rep = _load_modes(comb_path)
    else:
        click.echo(f"note: no comb description at {comb_path}; skipping collective traces", err=True)
    t1 = time.perf_counter()
    result = analyze(data, w_ceo, w_rep)
    t2 = time.perf_counter()
    out = _out_dir(out_dir)
    paths = [out / f"matrices.{fmt}", out / f"eigen.{fmt}"]
    cio.write_matrices(paths[0], result.matrices, fmt)
    cio.write_eigen(paths[1], zip(result.matrices, result.eigen), fmt)
    if result.traces:
        paths.append(out / f"collective.{fmt}")
        cio.write_traces(paths[2], [tr.to_units(Units(units)) for tr in result.traces], fmt)
    t3 = time.perf_counter()
    _record(out, "analyze", str(meas_path), None, paths, {"load": t1 - t0, "analyze": t2 - t1, "write": t3 - t2})
    for m, e in zip(result.matrices, result.eigen):
        click.echo(f"{m.quadrature.value:9s} {m.rf_frequency:12.6g} Hz  leading eigenvalue {e.eigenvalues[0]:.4g}")


@main.command("cavity")
@cavity_options
@click.option("--f-max", type=float, help="Sweep end (Hz, default 10 f_c).")
@click.option("--points", type=click.IntRange(2), default=101, show_default=True)
@click.option("--out", "out_file", type=click.Path(dir_okay=False), help="Output CSV (default stdout).")
@_guard
def cmd_cavity(finesse, f_rep, t_max, r1, r2, t1, t2, f_max, points, out_file):
    """Tabulate the cavity transfer functions over a linear sweep starting at f = 0."""
    p = _cavity_from_options(finesse, f_rep, t_max, r1, r2, t1, t2)
    f_max = 10.0 * p.f_c if f_max is None else f_max
    if not f_max > 0:
        raise DomainError("--f-max must be positive")
    f = np.linspace(0.0, f_max, points)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        t_ex = transmission_exact(f, p)
        t_lf = transmission_lowfreq(f, p)
        t_hf = transmission_highfinesse(f, p)
    h = phase_transfer(f, p)
    with np.errstate(divide="ignore"):
        f_db = 10.0 * np.log10(decoupling_factor(f, p))
    lines = [
        f"# finesse={cio.fmt(p.finesse)}",
        f"# f_rep_hz={cio.fmt(p.f_rep)}",
        f"# t_max={cio.fmt(p.t_max)}",
        f"# f_c_hz={cio.fmt(p.f_c)}",
        f"# f_3db_hz={cio.fmt(f3db(p))}",
        f"# f_3db_over_f_c={cio.fmt(f3db(p) / p.f_c)}",
    ]
    lines += sorted({f"# warning: {w.message}" for w in caught})
    lines.append("f_hz,abs_t_exact,arg_t_exact,abs_t_lowfreq,abs_t_highfinesse,H,F_dB")
    for row in zip(f, np.abs(t_ex), np.angle(t_ex), np.abs(t_lf), np.abs(t_hf), h, f_db):
        lines.append(",".join(cio.fmt(x) for x in row))
    text = "\n".join(lines) + "\n"
    if out_file:
        Path(out_file).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command("calibrate")
@click.argument("trace_path", type=click.Path(dir_okay=False))
@cavity_options
@click.option("--power-w", type=float, default=1e-3, show_default=True, help="Detected optical power (W).")
@click.option("--wavelength-nm", type=float, default=795.0, show_default=True)
@click.option("--units", type=click.Choice(["dbc_per_hz", "rel_shot_db"]), default="dbc_per_hz", show_default=True)
@click.option("--out-dir", envvar=OUT_DIR_ENV, default="out", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@_guard
def cmd_calibrate(trace_path, finesse, f_rep, t_max, r1, r2, t1, t2, power_w, wavelength_nm, units, out_dir, fmt):
    """Correct shot-relative traces for the cavity and reference them to the carrier."""
    t0 = time.perf_counter()
    path = Path(trace_path)
    if not path.is_file():
        raise InputError("trace file not found", str(path))
    traces = cio.read_traces(path)
    cavity = _cavity_from_options(finesse, f_rep, t_max, r1, r2, t1, t2)
    offset = sql_db(SqlParams.from_wavelength(power_w, wavelength_nm * 1e-9)) if units == "dbc_per_hz" else 0.0
    out_traces = []
    for tr in traces:
        if tr.units is Units.DBC_PER_HZ:
            raise InputError(f"trace {tr.label.value!r} is already calibrated", str(path))
        calibrated = correct_and_calibrate(tr.to_units(Units.REL_SHOT_DB), cavity, offset)
        if units == "rel_shot_db":
            calibrated = PsdTrace(calibrated.label, calibrated.frequencies, calibrated.values,
                                  Units.REL_SHOT_DB, calibrated.flags, calibrated.rbw)
        out_traces.append(calibrated)
    out = _out_dir(out_dir)
    out_path = out / f"calibrated.{fmt}"
    cio.write_traces(out_path, out_traces, fmt)
    _record(out, "calibrate", str(path), None, [out_path], {"total": time.perf_counter() - t0})
    n_flag = sum(int(np.sum(tr.flags)) for tr in out_traces)
    click.echo(f"wrote {out_path} (sql offset {offset:.3f} dB, {n_flag} point(s) below f_3dB flagged)")


@main.command("demo")
@click.option("--out-dir", envvar=OUT_DIR_ENV, default="out", show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1))
@click.pass_context
def cmd_demo(ctx, out_dir, seed):
    """Run simulate -> analyze -> calibrate on the bundled demo config."""
    ctx.invoke(cmd_simulate, config=None, seed=seed, out_dir=out_dir, rf_list=None, zones=None, samples=None,
               fmt="csv", quadrature="both", workers=1)
    out = Path(out_dir)
    ctx.invoke(cmd_analyze, measurements=str(out / "measurements.csv"), comb_path=None, out_dir=out_dir,
               fmt="csv", units="rel_shot_db")
    exp = load_demo()
    cav = exp.sim.cavity
    ctx.invoke(cmd_calibrate, trace_path=str(out / "collective.csv"), finesse=cav.finesse, f_rep=cav.f_rep,
               t_max=cav.t_max, r1=None, r2=None, t1=None, t2=None, power_w=exp.calibration.power,
               wavelength_nm=795.0, units="dbc_per_hz", out_dir=out_dir, fmt="csv")
    traces = {tr.label.value: tr for tr in cio.read_traces(out / "collective.csv")}
    click.echo("f_hz          CEO(dB/shot)  REP(dB/shot)  separation")
    for f, c, r in zip(traces["ceo"].frequencies, traces["ceo"].values, traces["rep"].values):
        click.echo(f"{f:<13.6g} {c:12.3f}  {r:12.3f}  {c - r:10.3f}")


if __name__ == "__main__":
    main()
