"""Approximation error of the cavity transfer functions versus finesse.

For each finesse, reports f_c, f_3dB and the worst relative error of the
low-frequency and high-finesse forms over (0, 10 f_c].

    python scripts/cavity_sweep.py [--f-rep 76e6]
"""

import sys
import warnings

import click
import numpy as np

from combnoise.cavity import (
    ApproximationWarning,
    CavityParams,
    f3db,
    transmission_exact,
    transmission_highfinesse,
    transmission_lowfreq,
)


@click.command()
@click.option("--f-rep", type=float, default=76e6, show_default=True)
def main(f_rep):
    click.echo(f"{'finesse':>8} {'f_c [Hz]':>12} {'f_3dB [Hz]':>12} {'err low-f':>10} {'err hi-F':>10}")
    for finesse in (20, 50, 100, 200, 420, 1000, 5000):
        p = CavityParams.from_finesse(finesse, f_rep)
        f = np.linspace(0, 10 * p.f_c, 4001)[1:]
        exact = np.abs(transmission_exact(f, p))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ApproximationWarning)
            low = np.max(np.abs(np.abs(transmission_lowfreq(f, p)) / exact - 1))
            high = np.max(np.abs(np.abs(transmission_highfinesse(f, p)) / exact - 1))
        click.echo(f"{finesse:8d} {p.f_c:12.5g} {f3db(p):12.5g} {low:10.2e} {high:10.2e}")


if __name__ == "__main__":
    sys.exit(main())
