"""Fabry-Perot filtering cavity: sideband transmission and phase-noise transfer.

Frequencies are sideband (RF) offsets from a resonant comb tooth, in Hz. All
transfer functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from combnoise.errors import DomainError

F3DB_RATIO = math.sqrt(1.0 / (math.sqrt(2.0) - 1.0))


class ApproximationWarning(UserWarning):
    """An approximate transfer function was evaluated outside its validity range."""


@dataclass(frozen=True)
class CavityParams:
    """Two-mirror cavity with field coefficients ``r1, r2, t1, t2`` and FSR ``f_rep``."""

    r1: float
    r2: float
    t1: float
    t2: float
    f_rep: float

    def __post_init__(self):
        for name in ("r1", "r2"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise DomainError(f"{name} must lie in [0, 1), got {v!r}")
        for name in ("t1", "t2"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1], got {v!r}")
        if self.r1 * self.r2 == 0.0:
            raise DomainError("at least a partially reflecting pair of mirrors is required")
        if not self.f_rep > 0:
            raise DomainError("f_rep must be positive")

    @classmethod
    def from_finesse(cls, finesse: float, f_rep: float, t_max: float = 1.0) -> CavityParams:
        """Symmetric cavity (r1 = r2) with the given finesse and peak intensity transmission.

        ``t_max = 1`` gives lossless mirrors, r**2 + t**2 = 1.
        """
        if not finesse > 1.0:
            raise DomainError("finesse must exceed 1")
        if not 0.0 < t_max <= 1.0 + 1e-12:
            raise DomainError("t_max must lie in (0, 1]")
        t_max = min(t_max, 1.0)  # absorbs round-off from t_max of a mirror-built cavity
        s = math.sin(math.pi / (2.0 * finesse))
        rho = (math.sqrt(1.0 + s * s) - s) ** 2
        r = math.sqrt(rho)
        t = math.sqrt(math.sqrt(t_max) * (1.0 - rho))
        return cls(r, r, t, t, f_rep)

    @property
    def rho(self) -> float:
        return self.r1 * self.r2

    @property
    def t_max(self) -> float:
        return (self.t1 * self.t2 / (1.0 - self.rho)) ** 2

    @property
    def f_coeff(self) -> float:
        return 4.0 * self.rho / (1.0 - self.rho) ** 2

    @property
    def finesse(self) -> float:
        return math.pi / (2.0 * math.asin(1.0 / math.sqrt(self.f_coeff)))

    @property
    def f_c(self) -> float:
        return self.f_rep / (2.0 * self.finesse)


def transmission_exact(f, p: CavityParams):
    x = np.asarray(f, dtype=float) / p.f_rep
    return p.t1 * p.t2 * np.exp(1j * np.pi * x) / (1.0 - p.rho * np.exp(2j * np.pi * x))


def transmission_lowfreq(f, p: CavityParams):
    """First-order expansion in ``f / f_rep``; warns when ``f >= f_rep / 10``."""
    f = np.asarray(f, dtype=float)
    if np.any(np.abs(f) >= p.f_rep / 10.0):
        warnings.warn("low-frequency form used at f >= f_rep/10", ApproximationWarning, stacklevel=2)
    x = f / p.f_rep
    num = 1.0 + 1j * np.pi * (1.0 + p.rho) / (1.0 - p.rho) * x
    return math.sqrt(p.t_max) * num / (1.0 + np.pi**2 * p.f_coeff * x * x)


def transmission_highfinesse(f, p: CavityParams):
    """Lorentzian form; warns when finesse <= 50."""
    if p.finesse <= 50.0:
        warnings.warn(
            f"high-finesse form used at finesse {p.finesse:.4g} <= 50", ApproximationWarning, stacklevel=2
        )
    u = np.asarray(f, dtype=float) / p.f_c
    return math.sqrt(p.t_max) * (1.0 + 1j * u) / (1.0 + u * u)


def phase_transfer(f, p: CavityParams):
    """Lorentzian attenuation H(f) of phase sidebands through the cavity."""
    u = np.asarray(f, dtype=float) / p.f_c
    return 1.0 / (1.0 + u * u)


def decoupling_factor(f, p: CavityParams):
    """Fraction [1 - H(f)]**2 of source phase-noise power seen in the relative phase."""
    return (1.0 - phase_transfer(f, p)) ** 2


def f3db(p: CavityParams) -> float:
    """Sideband frequency where the decoupling factor reaches 1/2."""
    return p.f_c * F3DB_RATIO


def interconvert_quadratures(x0, p0, t):
    """Quadratures (x, p) of a field after multiplication by the complex factor ``t``."""
    re, im = np.real(t), np.imag(t)
    return re * x0 - im * p0, im * x0 + re * p0
