"""Synthetic band-resolved quadrature noise and the single/pair measurement protocol.

Every value is normalized to shot noise: a shot-limited band measurement has
variance 1.0 regardless of its optical power. Classical noise modes are fully
correlated across zones (one standard normal gain per mode per sample); shot
noise is an independent unit normal per zone per sample.
"""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from combnoise.cavity import CavityParams, phase_transfer
from combnoise.comb import ModeVector, SpectralPartition
from combnoise.errors import DomainError


class Quadrature(enum.Enum):
    AMPLITUDE = "amplitude"
    PHASE = "phase"

    @property
    def code(self) -> int:
        return 0 if self is Quadrature.AMPLITUDE else 1


@dataclass(frozen=True)
class ConstantPsd:
    level: float

    def __call__(self, f):
        return self.level * np.ones_like(np.asarray(f, dtype=float))


@dataclass(frozen=True)
class PowerLawPsd:
    """``level * (f / f_ref) ** exponent``."""

    level: float
    f_ref: float
    exponent: float

    def __call__(self, f):
        return self.level * (np.asarray(f, dtype=float) / self.f_ref) ** self.exponent


@dataclass(frozen=True)
class LorentzianPsd:
    """``level / (1 + (f / corner) ** order)``; order 2 is a first-order low-pass."""

    level: float
    corner: float
    order: float = 2.0

    def __call__(self, f):
        return self.level / (1.0 + (np.asarray(f, dtype=float) / self.corner) ** self.order)


@dataclass(frozen=True)
class NoiseModeSpec:
    """A classical noise source: a spectral mode, its quadrature and its excess PSD.

    ``psd(f)`` is the excess variance along ``mode`` in units of shot noise.
    """

    quadrature: Quadrature
    mode: ModeVector
    psd: Callable[[float], float]

    def level(self, f: float) -> float:
        value = float(self.psd(f))
        if not value >= 0:
            raise DomainError(f"psd must be non-negative, got {value!r} at f = {f!r} Hz")
        return value


@dataclass(frozen=True)
class SimConfig:
    partition: SpectralPartition
    modes: tuple[NoiseModeSpec, ...]
    rf_frequencies: tuple[float, ...]
    n_samples: int
    seed: int
    cavity: CavityParams | None = None
    # <dA dphi> coupling is not modelled; any value other than None is rejected
    intra_quadrature_coupling: Any = None

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "rf_frequencies", tuple(float(f) for f in self.rf_frequencies))
        if self.intra_quadrature_coupling is not None:
            raise DomainError("intra-quadrature <dA dphi> coupling is not supported")
        if self.n_samples < 2:
            raise DomainError("n_samples must be >= 2")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if any(not f > 0 for f in self.rf_frequencies):
            raise DomainError("rf frequencies must be positive")
        for m in self.modes:
            if len(m.mode) != self.n_zones:
                raise DomainError(f"mode has {len(m.mode)} components, partition has {self.n_zones} zones")

    @property
    def n_zones(self) -> int:
        return self.partition.n_zones


@dataclass(frozen=True)
class MeasuredVariance:
    """Shot-normalized variance of one band (one zone or a union of zones)."""

    zones: tuple[int, ...]
    quadrature: Quadrature
    rf_frequency: float
    value: float
    power: float

    def __post_init__(self):
        zones = tuple(sorted(set(int(z) for z in self.zones)))
        if not zones:
            raise DomainError("a measurement needs at least one zone")
        object.__setattr__(self, "zones", zones)
        if not self.value >= 0:
            raise DomainError(f"variance must be non-negative, got {self.value!r}")
        if not self.power > 0:
            raise DomainError(f"band power must be positive, got {self.power!r}")


def protocol_bands(n_zones: int) -> list[tuple[int, ...]]:
    """Bands measured by the protocol: every single zone, then every pair (i < j)."""
    singles = [(i,) for i in range(n_zones)]
    pairs = list(itertools.combinations(range(n_zones), 2))
    return singles + pairs


def measurement_rng(seed: int, quadrature: Quadrature, rf_frequency: float, index: int) -> np.random.Generator:
    """Independent generator for measurement ``index`` at (quadrature, rf_frequency).

    Keyed on values, not call order, so results do not depend on scheduling.
    """
    rf_key = int(round(rf_frequency * 1000.0))
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(quadrature.code, rf_key, index))
    return np.random.Generator(np.random.PCG64(seq))


def classical_scale(config: SimConfig, quadrature: Quadrature, rf_frequency: float) -> float:
    """Amplitude factor applied to classical contributions before they are sampled.

    The filtering cavity only decouples phase noise: 1 - H(f) for the phase
    quadrature, 1 otherwise.
    """
    if config.cavity is not None and quadrature is Quadrature.PHASE:
        return float(1.0 - phase_transfer(rf_frequency, config.cavity))
    return 1.0


def _draw(config, quadrature, rf_frequency, rng, columns) -> np.ndarray:
    columns = np.asarray(columns, dtype=int)
    x = rng.standard_normal((config.n_samples, columns.size))
    scale = classical_scale(config, quadrature, rf_frequency)
    for m in config.modes:
        if m.quadrature is not quadrature:
            continue
        amp = scale * math.sqrt(m.level(rf_frequency))
        g = rng.standard_normal(config.n_samples)
        x += g[:, None] * (amp * m.mode.components[columns])[None, :]
    return x


def sample_quadratures(
    config: SimConfig,
    quadrature: Quadrature,
    rf_frequency: float,
    stream: int = 0,
    zones: Sequence[int] | None = None,
) -> np.ndarray:
    """Sample matrix of shape (n_samples, n_zones), or (n_samples, len(zones)) if given."""
    columns = range(config.n_zones) if zones is None else zones
    rng = measurement_rng(config.seed, quadrature, rf_frequency, stream)
    return _draw(config, quadrature, rf_frequency, rng, list(columns))


def _band_weights(partition: SpectralPartition, zones: tuple[int, ...]) -> tuple[np.ndarray, float]:
    powers = partition.powers[list(zones)]
    if np.any(powers <= 0):
        raise DomainError(f"zones {zones} include a zone with no optical power")
    total = float(np.sum(powers))
    return np.sqrt(powers / total), total


def _check_zones(config: SimConfig, zones) -> tuple[int, ...]:
    zones = tuple(sorted(set(int(z) for z in zones)))
    if not zones:
        raise DomainError("zone set is empty")
    if zones[0] < 0 or zones[-1] >= config.n_zones:
        raise DomainError(f"zone index out of range 0..{config.n_zones - 1}: {zones}")
    return zones


def band_variance(samples: np.ndarray, weights: np.ndarray) -> float:
    return float(np.var(samples @ weights, ddof=1))


def measure_variance(
    config: SimConfig,
    zones: Sequence[int],
    quadrature: Quadrature,
    rf_frequency: float,
    stream: int = 0,
) -> MeasuredVariance:
    """Variance of the power-weighted sum of the selected zones.

    Each zone enters with weight sqrt(P_i / P_t), so the shot noise of the
    combined band is again 1.0.
    """
    zones = _check_zones(config, zones)
    weights, total = _band_weights(config.partition, zones)
    x = sample_quadratures(config, quadrature, rf_frequency, stream, zones)
    return MeasuredVariance(zones, quadrature, rf_frequency, band_variance(x, weights), total)


def run_protocol(
    config: SimConfig,
    quadrature: Quadrature,
    rf_frequency: float,
    shared: bool = False,
    workers: int = 1,
) -> list[MeasuredVariance]:
    """All single-zone and pair-band variances at one RF frequency.

    Each band uses its own sample batch (stream = its index in
    ``protocol_bands``). With ``shared=True`` a single batch over all zones
    feeds every band instead, which makes the pair estimator agree exactly
    with the direct sample covariance.
    """
    bands = protocol_bands(config.n_zones)
    if shared:
        x = sample_quadratures(config, quadrature, rf_frequency, stream=len(bands))
        out = []
        for zones in bands:
            weights, total = _band_weights(config.partition, zones)
            value = band_variance(x[:, list(zones)], weights)
            out.append(MeasuredVariance(zones, quadrature, rf_frequency, value, total))
        return out

    def one(k):
        return measure_variance(config, bands[k], quadrature, rf_frequency, stream=k)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(len(bands))))
    return [one(k) for k in range(len(bands))]


def expected_matrix(config: SimConfig, quadrature: Quadrature, rf_frequency: float) -> np.ndarray:
    """Closed-form noise matrix: identity shot floor plus the scaled mode outer products."""
    scale = classical_scale(config, quadrature, rf_frequency)
    out = np.eye(config.n_zones)
    for m in config.modes:
        if m.quadrature is quadrature:
            w = m.mode.components
            out += scale**2 * m.level(rf_frequency) * np.outer(w, w)
    return out
