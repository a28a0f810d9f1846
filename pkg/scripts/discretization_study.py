"""How orthogonal do the discretized CEO and timing modes stay?

Sweeps the number of zones and a carrier offset that breaks the envelope
symmetry, printing |<w_ceo, w_rep>| and the outer-zone power share.

    python scripts/discretization_study.py [--out study.csv]
"""

import csv
import sys

import click
import numpy as np

from combnoise import FrequencyGrid, collective_modes, gaussian_envelope, partition

CENTER, FWHM, SPAN = 795e-9, 6e-9, 15e-9


@click.command()
@click.option("--out", type=click.Path(dir_okay=False))
def main(out):
    rows = []
    for offset_nm in (0.0, 0.25, 1.0):
        grid = FrequencyGrid.around(CENTER, SPAN, 512)
        env = gaussian_envelope(CENTER + offset_nm * 1e-9, FWHM, grid)
        for n_zones in (2, 4, 6, 8, 10, 16, 32, 64):
            zones = partition(env, n_zones)
            w_ceo, w_rep = collective_modes(env, zones)
            share = zones.powers.min() / zones.powers.sum()
            rows.append((offset_nm, n_zones, abs(w_ceo.dot(w_rep)), share))
    click.echo(f"{'offset_nm':>9} {'zones':>5} {'|<ceo,rep>|':>12} {'min power share':>16}")
    for r in rows:
        click.echo(f"{r[0]:9.2f} {r[1]:5d} {r[2]:12.3e} {r[3]:16.3e}")
    if out:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["offset_nm", "n_zones", "overlap", "min_power_share"])
            writer.writerows(rows)


if __name__ == "__main__":
    sys.exit(main())
