"""Mean field of the comb, its partition into analysis zones, and collective modes.

The grid is uniform in angular frequency offset from the carrier; a zone is a
contiguous run of grid points. Amplitudes are real because the mean phases of
all teeth are taken to be zero (transform-limited pulse).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from combnoise.constants import SPEED_OF_LIGHT
from combnoise.errors import DegenerateModeError, DomainError

_FWHM_TO_AMPLITUDE = 2.0 * math.log(2.0)


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def wavelength_to_omega(wavelength: float) -> float:
    return 2.0 * math.pi * SPEED_OF_LIGHT / wavelength


@dataclass(frozen=True)
class FrequencyGrid:
    """Optical angular-frequency grid, stored as offsets from the carrier ``omega0``."""

    omega0: float
    offsets: np.ndarray

    def __post_init__(self):
        offsets = _frozen(self.offsets)
        if offsets.ndim != 1 or offsets.size < 2:
            raise DomainError("grid needs at least two points")
        if not np.all(np.diff(offsets) > 0):
            raise DomainError("grid offsets must be strictly increasing")
        if not self.omega0 > 0:
            raise DomainError("carrier frequency must be positive")
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def around(cls, center_wavelength: float, span: float, n_points: int = 512) -> FrequencyGrid:
        """Symmetric grid covering ``span`` (in wavelength) around ``center_wavelength``.

        The optical-frequency extent of the wavelength window sets the grid
        width; points are then spaced uniformly in frequency.
        """
        if n_points < 2:
            raise DomainError("n_points must be >= 2")
        if not 0 < span < 2 * center_wavelength:
            raise DomainError("span must be positive and smaller than twice the center wavelength")
        nu_hi = SPEED_OF_LIGHT / (center_wavelength - span / 2)
        nu_lo = SPEED_OF_LIGHT / (center_wavelength + span / 2)
        step = 2.0 * math.pi * (nu_hi - nu_lo) / (n_points - 1)
        # half-integer multiples keep the grid exactly antisymmetric
        offsets = (np.arange(n_points) - (n_points - 1) / 2.0) * step
        return cls(wavelength_to_omega(center_wavelength), offsets)

    @classmethod
    def default(cls, center_wavelength: float, fwhm: float, n_points: int = 512) -> FrequencyGrid:
        """Grid spanning +/-3 FWHM around the center."""
        return cls.around(center_wavelength, 6.0 * fwhm, n_points)

    @property
    def n_points(self) -> int:
        return int(self.offsets.size)

    @property
    def omega(self) -> np.ndarray:
        return self.omega0 + self.offsets

    @property
    def wavelength(self) -> np.ndarray:
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.omega

    @property
    def width(self) -> float:
        return float(self.offsets[-1] - self.offsets[0])

    def to_dict(self) -> dict[str, Any]:
        return {"omega0": self.omega0, "offsets": self.offsets.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FrequencyGrid:
        return cls(float(data["omega0"]), np.asarray(data["offsets"], dtype=float))


@dataclass(frozen=True)
class SpectralEnvelope:
    grid: FrequencyGrid
    amplitude: np.ndarray

    def __post_init__(self):
        amp = _frozen(self.amplitude)
        if amp.shape != self.grid.offsets.shape:
            raise DomainError("amplitude and grid lengths differ")
        if not np.all(np.isfinite(amp)) or np.any(amp < 0):
            raise DomainError("amplitude must be finite and non-negative")
        if not np.any(amp > 0):
            raise DomainError("amplitude must have at least one positive entry")
        object.__setattr__(self, "amplitude", amp)

    @property
    def intensity(self) -> np.ndarray:
        return self.amplitude**2

    @property
    def total_power(self) -> float:
        return float(np.sum(self.intensity))

    def reversed(self) -> SpectralEnvelope:
        """Mirror image of the envelope about the grid center."""
        return SpectralEnvelope(self.grid, self.amplitude[::-1])

    def to_dict(self) -> dict[str, Any]:
        return {"grid": self.grid.to_dict(), "amplitude": self.amplitude.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SpectralEnvelope:
        return cls(FrequencyGrid.from_dict(data["grid"]), np.asarray(data["amplitude"], dtype=float))


def gaussian_envelope(center_wavelength: float, fwhm: float, grid: FrequencyGrid) -> SpectralEnvelope:
    """Gaussian spectrum whose intensity FWHM is ``fwhm`` in wavelength.

    The profile is Gaussian in optical frequency with width
    ``2 pi c fwhm / center_wavelength**2``; for a few-nm bandwidth in the
    near infrared the wavelength FWHM matches ``fwhm`` to ~1e-4 relative.
    ``fwhm=math.inf`` gives the flat-spectrum limit.
    """
    if not fwhm > 0:
        raise DomainError("fwhm must be positive")
    if math.isinf(fwhm):
        return SpectralEnvelope(grid, np.ones(grid.n_points))
    d_omega = 2.0 * math.pi * SPEED_OF_LIGHT * fwhm / center_wavelength**2
    if grid.width < 2.0 * d_omega * (1.0 - 1e-9):
        raise DomainError(
            f"grid spans {grid.width:.6g} rad/s, needs at least 2 x FWHM = {2 * d_omega:.6g} rad/s"
        )
    center = wavelength_to_omega(center_wavelength) - grid.omega0
    x = (grid.offsets - center) / d_omega
    return SpectralEnvelope(grid, np.exp(-_FWHM_TO_AMPLITUDE * x * x))


@dataclass(frozen=True)
class SpectralPartition:
    """Contiguous, non-overlapping zones over the grid and their optical powers.

    ``bounds[i] = (start, stop)`` is a half-open index range.
    """

    bounds: tuple[tuple[int, int], ...]
    powers: np.ndarray

    def __post_init__(self):
        bounds = tuple((int(a), int(b)) for a, b in self.bounds)
        powers = _frozen(self.powers)
        if len(bounds) < 2:
            raise DomainError("a partition needs at least two zones")
        if len(bounds) != powers.size:
            raise DomainError("one power per zone required")
        if bounds[0][0] != 0 or any(b[0] != a[1] for a, b in zip(bounds, bounds[1:])):
            raise DomainError("zones must be contiguous from index 0")
        if any(b <= a for a, b in bounds):
            raise DomainError("zones must be non-empty")
        if np.any(powers < 0):
            raise DomainError("zone powers must be non-negative")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "powers", powers)

    @property
    def n_zones(self) -> int:
        return len(self.bounds)

    def slices(self) -> list[slice]:
        return [slice(a, b) for a, b in self.bounds]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_zones": self.n_zones,
            "bounds": [list(b) for b in self.bounds],
            "powers": self.powers.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SpectralPartition:
        out = cls(tuple(tuple(b) for b in data["bounds"]), np.asarray(data["powers"], dtype=float))
        if "n_zones" in data and int(data["n_zones"]) != out.n_zones:
            raise DomainError("n_zones does not match the number of bounds")
        return out


def partition(envelope: SpectralEnvelope, n_zones: int = 10) -> SpectralPartition:
    """Split the grid into ``n_zones`` equal index spans; leftover points join the last zone."""
    n = envelope.grid.n_points
    if n_zones < 2:
        raise DomainError("n_zones must be >= 2")
    if n_zones > n:
        raise DomainError(f"cannot split {n} grid points into {n_zones} zones")
    size = n // n_zones
    starts = [k * size for k in range(n_zones)]
    stops = starts[1:] + [n]
    intensity = envelope.intensity
    powers = [float(np.sum(intensity[a:b])) for a, b in zip(starts, stops)]
    return SpectralPartition(tuple(zip(starts, stops)), np.array(powers))


class ModeLabel(enum.Enum):
    CEO = "ceo"
    REP = "rep"
    EIGEN = "eigen"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ModeVector:
    """Unit-norm spectral mode sampled on the analysis zones.

    ``index`` carries k for ``ModeLabel.EIGEN`` modes.
    """

    components: np.ndarray
    label: ModeLabel = ModeLabel.CUSTOM
    index: int | None = field(default=None)

    def __post_init__(self):
        comps = _frozen(self.components)
        if comps.ndim != 1:
            raise DomainError("mode components must be one-dimensional")
        if abs(np.linalg.norm(comps) - 1.0) > 1e-12:
            raise DomainError(f"mode vector is not unit norm (|w| = {np.linalg.norm(comps)!r})")
        object.__setattr__(self, "components", comps)

    @classmethod
    def normalized(cls, values, label: ModeLabel = ModeLabel.CUSTOM, index: int | None = None) -> ModeVector:
        values = np.asarray(values, dtype=float)
        norm = np.linalg.norm(values)
        if not norm > 0 or not np.isfinite(norm):
            raise DegenerateModeError("mode vector has zero or non-finite norm")
        return cls(values / norm, label, index)

    def __len__(self) -> int:
        return int(self.components.size)

    def dot(self, other: ModeVector) -> float:
        return float(self.components @ other.components)


def timing_modes(envelope: SpectralEnvelope) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized CEO and repetition-rate mode profiles on the optical grid.

    A small arrival-time shift moves the field by ``omega0 E`` (carrier part,
    CEO noise) plus ``Omega E`` (envelope part, timing jitter), both in the
    phase quadrature.
    """
    grid = envelope.grid
    return grid.omega0 * envelope.amplitude, grid.offsets * envelope.amplitude


def discretize_mode(
    raw: np.ndarray,
    envelope: SpectralEnvelope,
    zones: SpectralPartition,
    label: ModeLabel = ModeLabel.CUSTOM,
) -> ModeVector:
    """Project a phase-quadrature profile onto the zone operators.

    Zone component ``i`` is ``sum(raw * A) / sqrt(P_i)`` over the zone's grid
    points; zones with zero power contribute zero.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.shape != envelope.amplitude.shape:
        raise DomainError("raw profile and envelope lengths differ")
    weighted = raw * envelope.amplitude
    comps = np.zeros(zones.n_zones)
    for i, (sl, p) in enumerate(zip(zones.slices(), zones.powers)):
        if p > 0:
            comps[i] = np.sum(weighted[sl]) / math.sqrt(p)
    if not np.any(comps):
        raise DegenerateModeError("mode profile projects to zero on every zone")
    return ModeVector.normalized(comps, label)


def collective_modes(envelope: SpectralEnvelope, zones: SpectralPartition) -> tuple[ModeVector, ModeVector]:
    """Discretized (w_ceo, w_rep) pair for ``envelope`` on ``zones``."""
    ceo_raw, rep_raw = timing_modes(envelope)
    return (
        discretize_mode(ceo_raw, envelope, zones, ModeLabel.CEO),
        discretize_mode(rep_raw, envelope, zones, ModeLabel.REP),
    )


def comb_to_dict(envelope: SpectralEnvelope, zones: SpectralPartition) -> dict[str, Any]:
    return {"schema": "combnoise.comb/1", "envelope": envelope.to_dict(), "partition": zones.to_dict()}


def comb_from_dict(data: dict[str, Any]) -> tuple[SpectralEnvelope, SpectralPartition]:
    if data.get("schema") != "combnoise.comb/1":
        raise DomainError(f"unsupported comb schema {data.get('schema')!r}")
    envelope = SpectralEnvelope.from_dict(data["envelope"])
    zones = SpectralPartition.from_dict(data["partition"])
    if zones.bounds[-1][1] != envelope.grid.n_points:
        raise DomainError("partition does not cover the envelope grid")
    return envelope, zones
