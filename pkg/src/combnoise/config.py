"""YAML run configuration.

Layout (all sections but ``modes`` optional except where noted)::

    seed: 20140912            # required, 64-bit unsigned
    n_samples: 100000         # required
    rf_frequencies: [1.0e+5, 5.0e+5]   # Hz, required
    comb:
      center_wavelength_nm: 795
      fwhm_nm: 6
      span_nm: 15             # analysed window (default 6 x fwhm)
      n_points: 512
      n_zones: 10
    cavity:                   # omit for no filtering cavity
      finesse: 420            # either finesse (+ t_max) ...
      f_rep_hz: 7.6e+7
      # r1/r2/t1/t2: ...      # ... or all four mirror coefficients
    calibration:
      power_w: 1.0e-3
      rbw_hz: 1.0e+3
    modes:
      - quadrature: phase     # phase | amplitude
        shape: ceo            # ceo | rep | envelope | custom (+ components)
        psd: {type: lorentzian, level_db: 30, corner_hz: 2.0e+5, order: 4}

``psd.type`` is ``constant`` (level), ``power_law`` (level, f_ref_hz,
exponent) or ``lorentzian`` (level, corner_hz, order=2). ``level_db`` may
replace ``level``; both are excess noise relative to shot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from combnoise.calibration import SqlParams
from combnoise.cavity import CavityParams
from combnoise.comb import (
    FrequencyGrid,
    ModeLabel,
    ModeVector,
    SpectralEnvelope,
    SpectralPartition,
    collective_modes,
    gaussian_envelope,
    partition,
)
from combnoise.errors import DomainError, InputError
from combnoise.noise import ConstantPsd, LorentzianPsd, NoiseModeSpec, PowerLawPsd, Quadrature, SimConfig

NM = 1e-9
_TOP_KEYS = {"seed", "n_samples", "rf_frequencies", "comb", "cavity", "calibration", "modes", "intra_quadrature_coupling"}


@dataclass(frozen=True)
class Experiment:
    """Everything a run needs: the simulator config plus the comb it was built on."""

    sim: SimConfig
    envelope: SpectralEnvelope
    calibration: SqlParams | None
    source: str

    @property
    def partition(self) -> SpectralPartition:
        return self.sim.partition

    def collective_modes(self) -> tuple[ModeVector, ModeVector]:
        return collective_modes(self.envelope, self.sim.partition)


def _line_index(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = k.value
            out[path + (key,)] = k.start_mark.line + 1
            _line_index(v, path + (key,), out)
        out[path] = node.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_index(v, path + (i,), out)
    return out


class _Reader:
    def __init__(self, data, lines: dict, source: str):
        self.data = data
        self.lines = lines
        self.source = source

    def fail(self, path: tuple, message: str):
        line = None
        for cut in range(len(path), -1, -1):
            if path[:cut] in self.lines:
                line = self.lines[path[:cut]]
                break
        where = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path).lstrip(".")
        raise InputError(f"{where or '<root>'}: {message}", self.source, line)

    def get(self, path: tuple, default: Any = ..., kind=None):
        node = self.data
        for p in path:
            if isinstance(node, dict) and p in node:
                node = node[p]
            elif isinstance(node, list) and isinstance(p, int) and p < len(node):
                node = node[p]
            else:
                if default is ...:
                    self.fail(path, "required key is missing")
                return default
        if kind is None:
            return node
        return self.convert(path, node, kind)

    def convert(self, path, value, kind):
        try:
            if kind is float:
                if isinstance(value, bool):
                    raise ValueError
                out = float(value)
                if not math.isfinite(out):
                    raise ValueError
                return out
            if kind is int:
                if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                    raise ValueError
                return int(value)
            if kind is str:
                if not isinstance(value, str):
                    raise ValueError
                return value
        except (TypeError, ValueError):
            self.fail(path, f"expected {kind.__name__}, got {value!r}")
        raise TypeError(kind)


def _level(r: _Reader, path) -> float:
    if r.get(path + ("level_db",), None) is not None:
        return 10.0 ** (r.get(path + ("level_db",), kind=float) / 10.0)
    return r.get(path + ("level",), kind=float)


def _psd(r: _Reader, path):
    kind = r.get(path + ("type",), kind=str)
    if kind == "constant":
        return ConstantPsd(_level(r, path))
    if kind == "power_law":
        return PowerLawPsd(_level(r, path), r.get(path + ("f_ref_hz",), kind=float), r.get(path + ("exponent",), kind=float))
    if kind == "lorentzian":
        return LorentzianPsd(_level(r, path), r.get(path + ("corner_hz",), kind=float), r.get(path + ("order",), 2.0, float))
    r.fail(path + ("type",), f"unknown psd type {kind!r} (constant | power_law | lorentzian)")


def _cavity(r: _Reader) -> CavityParams | None:
    if r.get(("cavity",), None) is None:
        return None
    f_rep = r.get(("cavity", "f_rep_hz"), kind=float)
    try:
        if r.get(("cavity", "finesse"), None) is not None:
            return CavityParams.from_finesse(
                r.get(("cavity", "finesse"), kind=float), f_rep, r.get(("cavity", "t_max"), 1.0, float)
            )
        return CavityParams(*(r.get(("cavity", k), kind=float) for k in ("r1", "r2", "t1", "t2")), f_rep)
    except DomainError as exc:
        if isinstance(exc, InputError):
            raise
        r.fail(("cavity",), str(exc))


def _experiment_from(data: dict, lines: dict, source: str, overrides: dict) -> Experiment:
    r = _Reader(data, lines, source)
    if not isinstance(data, dict):
        r.fail((), "top level must be a mapping")
    for key in data:
        if key not in _TOP_KEYS:
            r.fail((key,), f"unknown key (expected one of {sorted(_TOP_KEYS)})")
    if data.get("intra_quadrature_coupling") is not None:
        r.fail(("intra_quadrature_coupling",), "intra-quadrature <dA dphi> coupling is not supported")

    seed = overrides.get("seed")
    seed = r.get(("seed",), kind=int) if seed is None else int(seed)
    n_samples = overrides.get("n_samples") or r.get(("n_samples",), kind=int)
    rf = overrides.get("rf_frequencies")
    if rf is None:
        raw_rf = r.get(("rf_frequencies",))
        if not isinstance(raw_rf, list) or not raw_rf:
            r.fail(("rf_frequencies",), "expected a non-empty list of frequencies in Hz")
        rf = [r.convert(("rf_frequencies", i), v, float) for i, v in enumerate(raw_rf)]

    center = r.get(("comb", "center_wavelength_nm"), 795.0, float) * NM
    fwhm = r.get(("comb", "fwhm_nm"), 6.0, float) * NM
    span = r.get(("comb", "span_nm"), 6.0 * fwhm / NM, float) * NM
    n_points = r.get(("comb", "n_points"), 512, int)
    n_zones = overrides.get("n_zones") or r.get(("comb", "n_zones"), 10, int)
    try:
        grid = FrequencyGrid.around(center, span, n_points)
        envelope = gaussian_envelope(center, fwhm, grid)
        zones = partition(envelope, n_zones)
    except DomainError as exc:
        r.fail(("comb",), str(exc))
    w_ceo, w_rep = collective_modes(envelope, zones)

    raw_modes = r.get(("modes",), [])
    if not isinstance(raw_modes, list):
        r.fail(("modes",), "expected a list")
    modes = []
    for i in range(len(raw_modes)):
        path = ("modes", i)
        try:
            quad = Quadrature(r.get(path + ("quadrature",), kind=str))
        except ValueError:
            r.fail(path + ("quadrature",), "expected 'phase' or 'amplitude'")
        shape = r.get(path + ("shape",), kind=str)
        if shape == "ceo":
            mode = w_ceo
        elif shape == "rep":
            mode = w_rep
        elif shape == "envelope":
            mode = ModeVector(w_ceo.components, ModeLabel.CUSTOM)
        elif shape == "custom":
            comps = r.get(path + ("components",))
            if not isinstance(comps, list) or len(comps) != n_zones:
                r.fail(path + ("components",), f"expected a list of {n_zones} numbers")
            comps = [r.convert(path + ("components", j), c, float) for j, c in enumerate(comps)]
            try:
                mode = ModeVector.normalized(np.array(comps))
            except DomainError as exc:
                r.fail(path + ("components",), str(exc))
        else:
            r.fail(path + ("shape",), f"unknown shape {shape!r} (ceo | rep | envelope | custom)")
        psd = _psd(r, path + ("psd",))
        modes.append(NoiseModeSpec(quad, mode, psd))

    calibration = None
    if r.get(("calibration",), None) is not None:
        try:
            calibration = SqlParams.from_wavelength(
                r.get(("calibration", "power_w"), kind=float), center, r.get(("calibration", "rbw_hz"), 1.0, float)
            )
        except DomainError as exc:
            r.fail(("calibration",), str(exc))

    try:
        sim = SimConfig(zones, tuple(modes), tuple(rf), n_samples, seed, _cavity(r))
    except InputError:
        raise
    except DomainError as exc:
        r.fail((), str(exc))
    return Experiment(sim, envelope, calibration, source)


def parse_config(text: str, source: str = "<config>", **overrides) -> Experiment:
    """Build an :class:`Experiment` from YAML text.

    ``overrides`` may set ``seed``, ``n_samples``, ``rf_frequencies`` and
    ``n_zones`` ahead of the file's values.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise InputError(f"YAML syntax error: {exc.problem}", source, line) from None
    if node is None:
        raise InputError("config is empty", source, 1)
    return _experiment_from(data, _line_index(node), source, overrides)


def load_config(path, **overrides) -> Experiment:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read config: {exc.strerror}", str(path)) from None
    return parse_config(text, str(path), **overrides)


def demo_config_text() -> str:
    return resources.files("combnoise.data").joinpath("demo.yaml").read_text()


def load_demo(**overrides) -> Experiment:
    return parse_config(demo_config_text(), "<bundled demo.yaml>", **overrides)
