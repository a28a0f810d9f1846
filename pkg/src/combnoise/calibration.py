"""Shot-noise-relative traces to absolute single-sideband noise densities (dBc/Hz).

Single-sideband convention throughout: the standard quantum limit of a beam
of power P at carrier frequency nu0 is S_SQL = 2 h nu0 / P.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from combnoise.cavity import CavityParams, decoupling_factor, f3db
from combnoise.constants import PLANCK, SPEED_OF_LIGHT
from combnoise.errors import DomainError, SingularCorrectionError


class TraceLabel(enum.Enum):
    CEO = "ceo"
    REP = "rep"
    CUSTOM = "custom"


class Units(enum.Enum):
    REL_SHOT_LINEAR = "rel_shot_linear"
    REL_SHOT_DB = "rel_shot_db"
    DBC_PER_HZ = "dbc_per_hz"


def to_db(x):
    return 10.0 * np.log10(x)


def from_db(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SqlParams:
    power: float
    carrier_frequency: float
    rbw: float = 1.0

    def __post_init__(self):
        for name in ("power", "carrier_frequency", "rbw"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    @classmethod
    def from_wavelength(cls, power: float, wavelength: float, rbw: float = 1.0) -> SqlParams:
        return cls(power, SPEED_OF_LIGHT / wavelength, rbw)


def sql_psd(p: SqlParams) -> float:
    """Shot-noise floor relative to the carrier, in 1/Hz."""
    return 2.0 * PLANCK * p.carrier_frequency / p.power


def sql_db(p: SqlParams) -> float:
    return float(to_db(sql_psd(p)))


def variance_to_rel_psd(variance_rel_shot: float, rbw: float) -> float:
    """Shot-relative PSD from a shot-relative variance.

    Both the signal and the shot variance scale with the same RBW, so the
    ratio passes through unchanged; ``rbw`` is only checked.
    """
    if not rbw > 0:
        raise DomainError("rbw must be positive")
    if not variance_rel_shot >= 0:
        raise DomainError("variance must be non-negative")
    return float(variance_rel_shot)


@dataclass(frozen=True)
class PsdTrace:
    """Noise density versus RF frequency.

    ``flags`` marks points below the cavity 3 dB convergence frequency, where
    the cavity correction is large.
    """

    label: TraceLabel
    frequencies: np.ndarray
    values: np.ndarray
    units: Units
    flags: np.ndarray | None = None
    rbw: float | None = None

    def __post_init__(self):
        f = np.array(self.frequencies, dtype=float)
        v = np.array(self.values, dtype=float)
        if f.ndim != 1 or f.shape != v.shape:
            raise DomainError("frequencies and values must be 1-d arrays of equal length")
        if np.any(np.diff(f) <= 0):
            raise DomainError("trace frequencies must be strictly increasing")
        if self.units is Units.REL_SHOT_LINEAR and np.any(v < 0):
            raise DomainError("linear shot-relative values must be non-negative")
        flags = np.zeros(f.shape, dtype=bool) if self.flags is None else np.array(self.flags, dtype=bool)
        if flags.shape != f.shape:
            raise DomainError("one flag per point required")
        for arr in (f, v, flags):
            arr.setflags(write=False)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "flags", flags)

    @classmethod
    def from_variances(cls, label, frequencies, variances, rbw: float = 1.0) -> PsdTrace:
        values = [variance_to_rel_psd(v, rbw) for v in variances]
        return cls(label, frequencies, values, Units.REL_SHOT_LINEAR, rbw=rbw)

    def __len__(self) -> int:
        return int(self.frequencies.size)

    def to_units(self, units: Units) -> PsdTrace:
        """Convert between the two shot-relative representations."""
        if units is self.units:
            return self
        if {units, self.units} != {Units.REL_SHOT_LINEAR, Units.REL_SHOT_DB}:
            raise DomainError(f"cannot convert {self.units.value} to {units.value}")
        values = to_db(self.values) if units is Units.REL_SHOT_DB else from_db(self.values)
        return replace(self, values=values, units=units)


def correct_and_calibrate(trace: PsdTrace, cavity: CavityParams, sql_db_value: float) -> PsdTrace:
    """Undo the cavity decoupling and reference the trace to the carrier.

    Pointwise ``S = S_meas - 10 log10 F(f) + sql_db`` for a trace given in dB
    relative to shot noise.
    """
    if trace.units is not Units.REL_SHOT_DB:
        raise DomainError(f"expected a {Units.REL_SHOT_DB.value} trace, got {trace.units.value}")
    f = trace.frequencies
    factor = decoupling_factor(f, cavity)
    if np.any(factor <= 0):
        bad = f[factor <= 0]
        raise SingularCorrectionError(f"decoupling factor vanishes at f = {bad.tolist()} Hz")
    values = trace.values - to_db(factor) + sql_db_value
    flags = f < f3db(cavity)
    return replace(trace, values=values, units=Units.DBC_PER_HZ, flags=flags)


def correction_db(f, cavity: CavityParams):
    """Magnitude of the cavity correction, 10 log10(1 / F(f))."""
    return -to_db(decoupling_factor(f, cavity))
