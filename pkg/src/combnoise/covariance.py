"""Noise matrices from band-variance measurements, their eigenmodes and projections."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from combnoise.comb import ModeLabel, ModeVector
from combnoise.errors import ConvergenceError, DomainError, ProtocolError, UndefinedFractionError
from combnoise.noise import MeasuredVariance, Quadrature, protocol_bands

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class NoiseMatrix:
    quadrature: Quadrature
    rf_frequency: float
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("noise matrix must be square")
        if not np.all(np.isfinite(a)):
            raise DomainError("noise matrix has non-finite entries")
        if not np.array_equal(a, a.T):
            raise DomainError("noise matrix must be exactly symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order with matching unit eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: tuple[ModeVector, ...]

    @property
    def vectors(self) -> np.ndarray:
        """Eigenvectors as the columns of an (n, n) array."""
        return np.column_stack([v.components for v in self.eigenvectors])

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.eigenvalues) @ v.T


def _pair_metadata_ok(a: MeasuredVariance, b: MeasuredVariance) -> bool:
    return a.quadrature is b.quadrature and math.isclose(a.rf_frequency, b.rf_frequency, rel_tol=1e-12)


def covariance_pair(v_i: MeasuredVariance, v_j: MeasuredVariance, v_ij: MeasuredVariance) -> float:
    """Shot-normalized covariance of zones i and j from their single and summed-band variances.

    ``P_t`` is taken as ``P_i + P_j``; the power recorded on ``v_ij`` is not used.
    """
    if len(v_i.zones) != 1 or len(v_j.zones) != 1:
        raise DomainError("v_i and v_j must be single-zone measurements")
    if v_i.zones == v_j.zones:
        raise DomainError("v_i and v_j must refer to different zones")
    if v_ij.zones != tuple(sorted(v_i.zones + v_j.zones)):
        raise DomainError(f"pair measurement covers {v_ij.zones}, expected {v_i.zones + v_j.zones}")
    if not (_pair_metadata_ok(v_i, v_j) and _pair_metadata_ok(v_i, v_ij)):
        raise DomainError("measurements differ in quadrature or RF frequency")
    p_i, p_j = v_i.power, v_j.power
    if not (p_i > 0 and p_j > 0):
        raise DomainError("zone powers must be positive")
    p_t = p_i + p_j
    # grouped so that shot-limited inputs cancel exactly
    excess = v_ij.value - (p_i * v_i.value + p_j * v_j.value) / p_t
    return excess * p_t / (2.0 * math.sqrt(p_i * p_j))


def missing_bands(measurements: Iterable[MeasuredVariance], n_zones: int) -> list[tuple[int, ...]]:
    have = {m.zones for m in measurements}
    return [b for b in protocol_bands(n_zones) if b not in have]


def assemble(measurements: Iterable[MeasuredVariance]) -> NoiseMatrix:
    """Build the n x n noise matrix from n single-zone and n(n-1)/2 pair measurements."""
    measurements = list(measurements)
    if not measurements:
        raise ProtocolError("no measurements given")
    first = measurements[0]
    by_band: dict[tuple[int, ...], MeasuredVariance] = {}
    for m in measurements:
        if not _pair_metadata_ok(first, m):
            raise ProtocolError("measurements mix quadratures or RF frequencies")
        if len(m.zones) > 2:
            raise ProtocolError(f"band {m.zones} spans more than two zones")
        if m.zones in by_band:
            raise ProtocolError(f"duplicate measurement for band {m.zones}")
        by_band[m.zones] = m
    n = 1 + max(z for band in by_band for z in band)
    missing = missing_bands(by_band.values(), n)
    if missing:
        err = ProtocolError(f"{len(missing)} band(s) missing: {missing}")
        err.missing = missing
        raise err
    a = np.empty((n, n))
    for i in range(n):
        a[i, i] = by_band[(i,)].value
        for j in range(i + 1, n):
            c = covariance_pair(by_band[(i,)], by_band[(j,)], by_band[(i, j)])
            a[i, j] = a[j, i] = c
    return NoiseMatrix(first.quadrature, first.rf_frequency, a)


def _offdiag_norm(a: np.ndarray) -> float:
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.linalg.norm(off))


def jacobi_eigh(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns ``(eigenvalues, V)`` unsorted, with ``a ~= V diag(eigenvalues) V.T``.
    Sweeps until the off-diagonal Frobenius norm drops below ``tol * |a|_F``.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * float(np.linalg.norm(a))
    for _ in range(max_sweeps + 1):
        off = _offdiag_norm(a)
        if off <= target:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    # rotation angle below representable; element is numerically zero
                    a[p, q] = a[q, p] = 0.0
                    continue
                tau = diff / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")


def eig_sym(matrix: NoiseMatrix | np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition, eigenvalues descending.

    Each eigenvector is signed so that its largest-magnitude component is
    positive. Within a degenerate cluster the basis is arbitrary.
    """
    a = matrix.entries if isinstance(matrix, NoiseMatrix) else np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("matrix must be square")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * scale:
        raise DomainError("matrix is not symmetric")
    vals, vecs = jacobi_eigh(0.5 * (a + a.T))
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    modes = []
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            col = -col
        modes.append(ModeVector.normalized(col, ModeLabel.EIGEN, k))
    vals.setflags(write=False)
    return EigenDecomposition(vals, tuple(modes))


def project_variance(eig: EigenDecomposition, w: ModeVector) -> float:
    """Variance along ``w``: the eigenvalue-weighted sum of squared overlaps with each eigenmode."""
    if len(w) != len(eig.eigenvalues):
        raise DomainError(f"mode has {len(w)} components, matrix is {len(eig.eigenvalues)} x {len(eig.eigenvalues)}")
    overlaps = eig.vectors.T @ w.components
    return float(np.sum(eig.eigenvalues * overlaps**2))


def excess_fraction(eig: EigenDecomposition, k: int) -> float:
    """Share of the above-shot noise carried by mode k; negative excesses count as zero."""
    if not 0 <= k < len(eig.eigenvalues):
        raise DomainError(f"mode index {k} out of range")
    excess = np.clip(eig.eigenvalues - 1.0, 0.0, None)
    total = float(np.sum(excess))
    if total <= 0:
        raise UndefinedFractionError("no eigenvalue exceeds the shot-noise level")
    return float(excess[k]) / total


def extract_collective(matrix: NoiseMatrix, w_ceo: ModeVector, w_rep: ModeVector) -> tuple[float, float]:
    """Projected (CEO, repetition-rate) variances of a phase-quadrature noise matrix."""
    if matrix.quadrature is not Quadrature.PHASE:
        raise DomainError("collective timing modes live in the phase quadrature")
    eig = eig_sym(matrix)
    return project_variance(eig, w_ceo), project_variance(eig, w_rep)
