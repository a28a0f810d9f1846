"""The bundled demo through the library API instead of the CLI.

Simulates, analyzes and calibrates, then prints the eigenvalue spectrum at
each RF frequency and the calibrated CEO / timing traces in dBc/Hz.

    python scripts/demo_pipeline.py [--samples 1e5]
"""

import sys

import click

from combnoise import load_demo
from combnoise.calibration import Units, correct_and_calibrate, sql_db
from combnoise.covariance import excess_fraction
from combnoise.errors import UndefinedFractionError
from combnoise.pipeline import analyze, simulate


@click.command()
@click.option("--samples", type=float, default=None, help="Override samples per measurement.")
def main(samples):
    exp = load_demo(n_samples=int(samples) if samples else None)
    w_ceo, w_rep = exp.collective_modes()
    result = analyze(simulate(exp.sim), w_ceo, w_rep, rbw=exp.calibration.rbw)
    for m, e in zip(result.matrices, result.eigen):
        try:
            frac = f"{excess_fraction(e, 0):.2f}"
        except UndefinedFractionError:
            frac = "-"
        top = " ".join(f"{v:8.2f}" for v in e.eigenvalues[:3])
        click.echo(f"{m.quadrature.value:9s} {m.rf_frequency:9.3g} Hz  top eigenvalues {top}  share(k=0) {frac}")
    offset = sql_db(exp.calibration)
    click.echo(f"\nSQL at {exp.calibration.power * 1e3:g} mW: {offset:.2f} dBc/Hz")
    for tr in result.traces:
        cal = correct_and_calibrate(tr.to_units(Units.REL_SHOT_DB), exp.sim.cavity, offset)
        pts = ", ".join(f"{f:.3g} Hz: {v:.1f}{'*' if flag else ''}" for f, v, flag in zip(cal.frequencies, cal.values, cal.flags))
        click.echo(f"{tr.label.value:>4}: {pts}")
    click.echo("(* below the cavity 3 dB frequency)")


if __name__ == "__main__":
    sys.exit(main())
