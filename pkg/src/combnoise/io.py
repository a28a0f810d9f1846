"""CSV / JSON readers and writers for measurements, matrices, eigensystems and traces.

Numbers are written with 12 significant digits in a fixed column order so
that repeated runs produce byte-identical files.

Measurement CSV columns: ``quadrature, rf_hz, zones, power, variance`` with
``zones`` as 0-based indices joined by ``+`` (``"3"`` or ``"3+7"``).
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from combnoise.calibration import PsdTrace, TraceLabel, Units
from combnoise.covariance import EigenDecomposition, NoiseMatrix, excess_fraction
from combnoise.errors import DomainError, InputError, UndefinedFractionError
from combnoise.noise import MeasuredVariance, Quadrature

MEASUREMENT_COLUMNS = ("quadrature", "rf_hz", "zones", "power", "variance")
TRACE_COLUMNS = ("label", "f_hz", "value", "units", "quality_flag")

_QUAD_ORDER = {Quadrature.AMPLITUDE: 0, Quadrature.PHASE: 1}


def fmt(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "INF" if x > 0 else "-INF"
    if x == 0.0:
        return "0"  # folds -0.0
    return f"{x:.12g}"


def _write_csv(path: Path, header: Iterable[str], rows: Iterable[Iterable[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue())


def _write_json(path: Path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n")


def _band_key(m: MeasuredVariance):
    return (_QUAD_ORDER[m.quadrature], m.rf_frequency, len(m.zones), m.zones)


def sort_measurements(measurements: Iterable[MeasuredVariance]) -> list[MeasuredVariance]:
    return sorted(measurements, key=_band_key)


def _measurement_record(m: MeasuredVariance) -> dict:
    return {
        "quadrature": m.quadrature.value,
        "rf_hz": fmt(m.rf_frequency),
        "zones": "+".join(str(z) for z in m.zones),
        "power": fmt(m.power),
        "variance": fmt(m.value),
    }


def write_measurements(path, measurements: Iterable[MeasuredVariance], format: str = "csv") -> None:
    records = [_measurement_record(m) for m in sort_measurements(measurements)]
    if format == "json":
        _write_json(path, {"schema": "combnoise.measurements/1", "measurements": records})
    else:
        _write_csv(path, MEASUREMENT_COLUMNS, ([r[c] for c in MEASUREMENT_COLUMNS] for r in records))


def _parse_measurement(rec: dict, source: str, line: int | None) -> MeasuredVariance:
    try:
        quad = Quadrature(str(rec["quadrature"]).strip().lower())
        zones = tuple(int(z) for z in str(rec["zones"]).split("+"))
        return MeasuredVariance(zones, quad, float(rec["rf_hz"]), float(rec["variance"]), float(rec["power"]))
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r}", source, line) from None
    except (ValueError, DomainError) as exc:
        raise InputError(str(exc), source, line) from None


def read_measurements(path) -> list[MeasuredVariance]:
    """Read a measurement file written by :func:`write_measurements` (or by hand from lab data)."""
    path = Path(path)
    source = str(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(exc.msg, source, exc.lineno) from None
        if not isinstance(data, dict) or data.get("schema") != "combnoise.measurements/1":
            raise InputError("not a combnoise.measurements/1 document", source)
        return [_parse_measurement(r, source, None) for r in data["measurements"]]
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in MEASUREMENT_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise InputError(f"missing column(s) {missing}", source, 1)
    return [_parse_measurement(row, source, reader.line_num) for row in reader]


def group_measurements(measurements: Iterable[MeasuredVariance]) -> dict[tuple[Quadrature, float], list[MeasuredVariance]]:
    groups: dict[tuple[Quadrature, float], list[MeasuredVariance]] = {}
    for m in sort_measurements(measurements):
        groups.setdefault((m.quadrature, m.rf_frequency), []).append(m)
    return groups


def _matrix_key(m):
    return (_QUAD_ORDER[m.quadrature], m.rf_frequency)


def write_matrices(path, matrices: Iterable[NoiseMatrix], format: str = "csv") -> None:
    """One row per matrix row: ``quadrature, rf_hz, row, c0 .. c{n-1}``."""
    matrices = sorted(matrices, key=_matrix_key)
    if format == "json":
        _write_json(
            path,
            {
                "schema": "combnoise.matrices/1",
                "matrices": [
                    {
                        "quadrature": m.quadrature.value,
                        "rf_hz": fmt(m.rf_frequency),
                        "entries": [[fmt(x) for x in row] for row in m.entries],
                    }
                    for m in matrices
                ],
            },
        )
        return
    n = max((m.n for m in matrices), default=0)
    header = ["quadrature", "rf_hz", "row"] + [f"c{j}" for j in range(n)]
    rows = []
    for m in matrices:
        for i, row in enumerate(m.entries):
            rows.append([m.quadrature.value, fmt(m.rf_frequency), str(i)] + [fmt(x) for x in row])
    _write_csv(path, header, rows)


def read_matrices(path) -> list[NoiseMatrix]:
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text())
        return [
            NoiseMatrix(Quadrature(d["quadrature"]), float(d["rf_hz"]), np.array(d["entries"], dtype=float))
            for d in data["matrices"]
        ]
    rows: dict[tuple[str, str], list[list[float]]] = {}
    with path.open(newline="") as fh:
        for rec in csv.DictReader(fh):
            cols = sorted((k for k in rec if k.startswith("c")), key=lambda k: int(k[1:]))
            rows.setdefault((rec["quadrature"], rec["rf_hz"]), []).append([float(rec[c]) for c in cols])
    return [NoiseMatrix(Quadrature(q), float(f), np.array(r)) for (q, f), r in rows.items()]


def write_eigen(path, items: Iterable[tuple[NoiseMatrix, EigenDecomposition]], format: str = "csv") -> None:
    """Eigenvalues, excess fractions (blank when undefined) and eigenvector components."""
    items = sorted(items, key=lambda it: _matrix_key(it[0]))
    records = []
    for matrix, eig in items:
        for k, (val, vec) in enumerate(zip(eig.eigenvalues, eig.eigenvectors)):
            try:
                frac = fmt(excess_fraction(eig, k))
            except UndefinedFractionError:
                frac = ""
            records.append((matrix, k, val, frac, vec))
    if format == "json":
        _write_json(
            path,
            {
                "schema": "combnoise.eigen/1",
                "modes": [
                    {
                        "quadrature": m.quadrature.value,
                        "rf_hz": fmt(m.rf_frequency),
                        "k": k,
                        "eigenvalue": fmt(val),
                        "excess_fraction": frac or None,
                        "vector": [fmt(x) for x in vec.components],
                    }
                    for m, k, val, frac, vec in records
                ],
            },
        )
        return
    n = max((m.n for m, *_ in records), default=0)
    header = ["quadrature", "rf_hz", "k", "eigenvalue", "excess_fraction"] + [f"c{j}" for j in range(n)]
    rows = [
        [m.quadrature.value, fmt(m.rf_frequency), str(k), fmt(val), frac] + [fmt(x) for x in vec.components]
        for m, k, val, frac, vec in records
    ]
    _write_csv(path, header, rows)


def write_traces(path, traces: Iterable[PsdTrace], format: str = "csv") -> None:
    records = []
    for tr in traces:
        for f, v, flag in zip(tr.frequencies, tr.values, tr.flags):
            records.append([tr.label.value, fmt(f), fmt(v), tr.units.value, "1" if flag else "0"])
    if format == "json":
        _write_json(
            path,
            {"schema": "combnoise.traces/1", "points": [dict(zip(TRACE_COLUMNS, r)) for r in records]},
        )
    else:
        _write_csv(path, TRACE_COLUMNS, records)


def _parse_float(text: str) -> float:
    text = text.strip().upper()
    if text in ("INF", "+INF"):
        return math.inf
    if text == "-INF":
        return -math.inf
    return float(text)


def read_traces(path) -> list[PsdTrace]:
    """Read traces; points are grouped by label in file order."""
    path = Path(path)
    source = str(path)
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text())
        rows = [(r, None) for r in data["points"]]
    else:
        reader = csv.DictReader(io.StringIO(path.read_text()))
        missing = [c for c in TRACE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise InputError(f"missing column(s) {missing}", source, 1)
        rows = [(r, reader.line_num) for r in reader]
    grouped: dict[tuple[str, str], list] = {}
    for rec, line in rows:
        try:
            key = (rec["label"], rec["units"])
            point = (_parse_float(rec["f_hz"]), _parse_float(rec["value"]), str(rec["quality_flag"]) == "1")
        except (KeyError, ValueError) as exc:
            raise InputError(f"bad trace row: {exc}", source, line) from None
        grouped.setdefault(key, []).append(point)
    out = []
    for (label, units), pts in grouped.items():
        f, v, flags = zip(*pts)
        try:
            out.append(PsdTrace(TraceLabel(label), f, v, Units(units), flags))
        except (ValueError, DomainError) as exc:
            raise InputError(f"trace {label!r}: {exc}", source) from None
    return out
