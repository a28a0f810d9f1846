"""Sampling error of the assembled shot-limited matrix.

Compares equal-power bands with the Gaussian-envelope bands. Unequal powers
amplify the pair-estimator error by P_t / (2 sqrt(P_i P_j)), so the outer
zones dominate the worst entry.

    python scripts/estimator_error_study.py [--samples 1e5] [--seeds 5]
"""

import math
import sys

import click
import numpy as np

from combnoise import FrequencyGrid, Quadrature, SimConfig, assemble, eig_sym, gaussian_envelope, partition, run_protocol

CENTER = 795e-9


@click.command()
@click.option("--samples", type=float, default=1e5, show_default=True)
@click.option("--seeds", type=int, default=5, show_default=True)
def main(samples, seeds):
    n = int(samples)
    layouts = {
        "equal": partition(gaussian_envelope(CENTER, math.inf, FrequencyGrid.around(CENTER, 15e-9, 500)), 10),
        "gaussian": partition(gaussian_envelope(CENTER, 6e-9, FrequencyGrid.around(CENTER, 15e-9, 512)), 10),
    }
    click.echo(f"n = {n}, 3 sqrt(2/n) = {3 * math.sqrt(2 / n):.4f}")
    click.echo(f"{'layout':>9} {'seed':>4} {'max|M-I|':>9} {'lambda_min-1':>13}")
    for name, zones in layouts.items():
        for seed in range(seeds):
            m = assemble(run_protocol(SimConfig(zones, (), (3e6,), n, seed), Quadrature.PHASE, 3e6))
            dev = np.max(np.abs(m.entries - np.eye(10)))
            low = eig_sym(m).eigenvalues[-1] - 1
            click.echo(f"{name:>9} {seed:4d} {dev:9.4f} {low:13.4f}")


if __name__ == "__main__":
    sys.exit(main())
