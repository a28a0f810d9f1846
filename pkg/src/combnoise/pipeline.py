"""Simulate -> assemble -> diagonalize -> project, as plain functions."""

from __future__ import annotations

from dataclasses import dataclass

from combnoise.calibration import PsdTrace, TraceLabel
from combnoise.comb import ModeVector
from combnoise.covariance import EigenDecomposition, NoiseMatrix, assemble, eig_sym, project_variance
from combnoise.io import group_measurements
from combnoise.noise import MeasuredVariance, Quadrature, SimConfig, run_protocol


def simulate(
    config: SimConfig,
    quadratures=(Quadrature.AMPLITUDE, Quadrature.PHASE),
    workers: int = 1,
) -> list[MeasuredVariance]:
    out = []
    for quad in quadratures:
        for f in config.rf_frequencies:
            out.extend(run_protocol(config, quad, f, workers=workers))
    return out


@dataclass
class Analysis:
    matrices: list[NoiseMatrix]
    eigen: list[EigenDecomposition]
    traces: list[PsdTrace]


def analyze(
    measurements: list[MeasuredVariance],
    w_ceo: ModeVector | None = None,
    w_rep: ModeVector | None = None,
    rbw: float = 1.0,
) -> Analysis:
    """Assemble and diagonalize every (quadrature, f) group.

    With both collective modes given, the phase matrices also yield CEO and
    repetition-rate traces (shot-relative, linear).
    """
    matrices, eigs = [], []
    ceo, rep, freqs = [], [], []
    for (quad, f), group in group_measurements(measurements).items():
        m = assemble(group)
        e = eig_sym(m)
        matrices.append(m)
        eigs.append(e)
        if quad is Quadrature.PHASE and w_ceo is not None and w_rep is not None:
            freqs.append(f)
            ceo.append(project_variance(e, w_ceo))
            rep.append(project_variance(e, w_rep))
    traces = []
    if freqs:
        traces = [
            PsdTrace.from_variances(TraceLabel.CEO, freqs, ceo, rbw),
            PsdTrace.from_variances(TraceLabel.REP, freqs, rep, rbw),
        ]
    return Analysis(matrices, eigs, traces)
