"""Spectrally resolved noise-correlation analysis for optical frequency combs.

Synthesizes band-resolved quadrature noise of a comb, assembles
shot-normalized covariance matrices from single- and pair-band variance
measurements, diagonalizes them, and projects collective modes (carrier
envelope offset, timing jitter) with filtering-cavity calibration.
"""

from combnoise.cavity import CavityParams
from combnoise.comb import (
    FrequencyGrid,
    ModeLabel,
    ModeVector,
    SpectralEnvelope,
    SpectralPartition,
    collective_modes,
    discretize_mode,
    gaussian_envelope,
    partition,
    timing_modes,
)
from combnoise.config import Experiment, load_config, load_demo, parse_config
from combnoise.covariance import (
    EigenDecomposition,
    NoiseMatrix,
    assemble,
    eig_sym,
    excess_fraction,
    extract_collective,
    project_variance,
)
from combnoise.noise import MeasuredVariance, NoiseModeSpec, Quadrature, SimConfig, measure_variance, run_protocol

__version__ = "0.1.0"

__all__ = [
    "CavityParams",
    "EigenDecomposition",
    "Experiment",
    "FrequencyGrid",
    "MeasuredVariance",
    "ModeLabel",
    "ModeVector",
    "NoiseMatrix",
    "NoiseModeSpec",
    "Quadrature",
    "SimConfig",
    "SpectralEnvelope",
    "SpectralPartition",
    "assemble",
    "collective_modes",
    "discretize_mode",
    "eig_sym",
    "excess_fraction",
    "extract_collective",
    "gaussian_envelope",
    "load_config",
    "load_demo",
    "measure_variance",
    "parse_config",
    "partition",
    "project_variance",
    "run_protocol",
    "timing_modes",
]
