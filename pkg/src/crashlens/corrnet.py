"""Correlation machinery: Pearson matrices, first-order partial correlations,
Kronecker tensor correlation, hyperbolic maps, distances, and the determinant
equilibrium indicator.

Constant series are correlated as 0 against everything (flagged, never NaN) so
graph construction downstream always receives defined weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .marketdata import WindowView, ReturnTable

__all__ = [
    "CorrelationMatrix",
    "DistanceMatrix",
    "correlation_matrix",
    "partial_correlation",
    "partial_correlation_matrix",
    "average_correlation",
    "tensor_correlation",
    "tensor_average_correlation",
    "hyperbolic_map",
    "correlation_distance",
    "hyperbolic_distance",
    "equilibrium_indicator",
]

_SLACK = 1e-12
_PSD_TOL = -1e-8
COSH1 = math.cosh(1.0)


def _csv_block(labels: tuple[str, ...], values: np.ndarray) -> str:
    lines = ["," + ",".join(labels)]
    for name, row in zip(labels, values):
        lines.append(name + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric unit-diagonal matrix of Pearson correlations.

    degenerate lists column indices whose input series were constant; their
    off-diagonal entries are defined as 0.
    """

    labels: tuple[str, ...]
    values: np.ndarray
    degenerate: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        # Copy before freezing so the caller's array is never locked.
        arr = np.array(self.values, dtype=float)
        m = len(self.labels)
        if arr.shape != (m, m):
            raise DataError(f"correlation matrix shape {arr.shape} vs {m} labels")
        if not np.all(np.isfinite(arr)):
            raise DataError("correlation entries must be finite")
        if np.abs(arr - arr.T).max(initial=0.0) > _SLACK:
            raise DataError("correlation matrix not symmetric")
        if m and np.any(np.diag(arr) != 1.0):
            raise DataError("correlation diagonal must be exactly 1")
        if np.abs(arr).max(initial=0.0) > 1.0 + _SLACK:
            raise DataError("correlation entries outside [-1, 1]")
        if m > 1 and np.linalg.eigvalsh(arr)[0] < _PSD_TOL:
            raise DataError("correlation matrix not positive semidefinite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def m(self) -> int:
        return len(self.labels)

    def to_csv(self) -> str:
        return _csv_block(self.labels, self.values)


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric zero-diagonal matrix of nonnegative distances.

    Correlation-derived instances stay within [0, 2] by construction; the
    type itself admits any nonnegative metric.
    """

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        m = len(self.labels)
        if arr.shape != (m, m):
            raise DataError(f"distance matrix shape {arr.shape} vs {m} labels")
        if not np.all(np.isfinite(arr)):
            raise DataError("distance entries must be finite")
        if np.abs(arr - arr.T).max(initial=0.0) > _SLACK:
            raise DataError("distance matrix not symmetric")
        if m and np.any(np.diag(arr) != 0.0):
            raise DataError("distance diagonal must be zero")
        if arr.size and arr.min() < 0.0:
            raise DataError("distances must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def to_csv(self) -> str:
        return _csv_block(self.labels, self.values)


def _as_matrix(data) -> np.ndarray:
    if isinstance(data, WindowView):
        return np.asarray(data.returns, dtype=float)
    if isinstance(data, ReturnTable):
        return np.asarray(data.returns, dtype=float)
    return np.asarray(data, dtype=float)


def correlation_matrix(data, labels: tuple[str, ...] | None = None) -> CorrelationMatrix:
    """Pearson correlations of the columns of a (T, m) block.

    Accepts a WindowView, a ReturnTable, or a plain array.  Constant columns
    get 0 off-diagonal and are listed in the degenerate field.
    """
    x = _as_matrix(data)
    if x.ndim != 2:
        raise DataError(f"expected (T, m) series block, got ndim={x.ndim}")
    t, m = x.shape
    if m < 2:
        raise DataError(f"need at least 2 series, got {m}")
    if t < 2:
        raise DataError(f"need at least 2 observations, got {t}")
    if not np.all(np.isfinite(x)):
        raise DataError("series values must be finite")
    if labels is None:
        if isinstance(data, ReturnTable):
            labels = data.symbols
        else:
            labels = tuple(f"s{i}" for i in range(m))
    if len(labels) != m:
        raise DataError(f"{len(labels)} labels for {m} series")

    centered = x - x.mean(axis=0)
    norms = np.sqrt(np.einsum("ti,ti->i", centered, centered))
    degenerate = tuple(int(i) for i in np.nonzero(norms == 0.0)[0])
    if len(degenerate) == m:
        raise DataError("all series constant; correlation undefined")
    safe = np.where(norms == 0.0, 1.0, norms)
    c = (centered.T @ centered) / np.outer(safe, safe)
    for i in degenerate:
        c[i, :] = 0.0
        c[:, i] = 0.0
    c = np.clip((c + c.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    return CorrelationMatrix(tuple(labels), c, degenerate)


def partial_correlation(c: CorrelationMatrix, i: int, j: int, k: int) -> float:
    """First-order partial correlation of i and j given conditioning asset k."""
    if len({i, j, k}) != 3:
        raise DataError(f"indices must be distinct, got ({i}, {j}, {k})")
    v = c.values
    r_ij, r_ik, r_jk = v[i, j], v[i, k], v[j, k]
    denom_sq = (1.0 - r_ik * r_ik) * (1.0 - r_jk * r_jk)
    if denom_sq <= 0.0:
        raise DataError(
            f"conditioning on {c.labels[k]} degenerate: |corr| = 1 with "
            f"{c.labels[i] if abs(r_ik) >= 1.0 else c.labels[j]}"
        )
    return float((r_ij - r_ik * r_jk) / math.sqrt(denom_sq))


def partial_correlation_matrix(c: CorrelationMatrix, k: int) -> CorrelationMatrix:
    """Entrywise first-order partials given asset k, over the remaining labels."""
    m = c.m
    if not 0 <= k < m:
        raise DataError(f"conditioning index {k} out of range for m={m}")
    keep = [i for i in range(m) if i != k]
    out = np.eye(len(keep))
    for a, i in enumerate(keep):
        for b in range(a + 1, len(keep)):
            rho = partial_correlation(c, i, keep[b], k)
            out[a, b] = out[b, a] = rho
    labels = tuple(c.labels[i] for i in keep)
    return CorrelationMatrix(labels, out)


def average_correlation(c: CorrelationMatrix | np.ndarray) -> float:
    """Mean of the strictly-upper-triangle entries."""
    v = c.values if isinstance(c, CorrelationMatrix) else np.asarray(c, dtype=float)
    m = v.shape[0]
    if m < 2:
        raise DataError("average correlation needs at least 2 series")
    iu = np.triu_indices(m, k=1)
    return float(v[iu].mean())


def tensor_correlation(a: CorrelationMatrix, b: CorrelationMatrix) -> np.ndarray:
    """Materialized Kronecker product A (x) B, shape (ma*mb, ma*mb)."""
    return np.kron(a.values, b.values)


def tensor_average_correlation(a: CorrelationMatrix, b: CorrelationMatrix) -> float:
    """Average correlation of A (x) B without materializing it.

    For symmetric unit-diagonal factors the strict-upper-triangle mean of the
    Kronecker product reduces to (sum(A)*sum(B) - n) / (n*(n-1)) with
    n = ma*mb, because the product's total is the product of totals and its
    trace is n.
    """
    n = a.m * b.m
    total = float(a.values.sum()) * float(b.values.sum())
    return (total - n) / (n * (n - 1))


def hyperbolic_map(c: CorrelationMatrix) -> np.ndarray:
    """Elementwise cosh of the correlations; entries land in [1, cosh(1)]."""
    return np.cosh(c.values)


def correlation_distance(c: CorrelationMatrix) -> DistanceMatrix:
    """d_ij = sqrt(2 * (1 - rho_ij)); 0 at rho=1, 2 at rho=-1."""
    d = np.sqrt(np.maximum(2.0 * (1.0 - c.values), 0.0))
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(c.labels, d)


def hyperbolic_distance(h: np.ndarray, labels: tuple[str, ...] | None = None) -> DistanceMatrix:
    """d_ij = sqrt(2 * (cosh(1) - h_ij)) for a cosh-mapped matrix."""
    arr = np.asarray(h, dtype=float)
    if arr.size and (arr.min() < 1.0 - _SLACK or arr.max() > COSH1 + _SLACK):
        raise DataError(
            f"hyperbolic entries must lie in [1, cosh(1)], got "
            f"[{arr.min()}, {arr.max()}]"
        )
    if labels is None:
        labels = tuple(f"s{i}" for i in range(arr.shape[0]))
    d = np.sqrt(np.maximum(2.0 * (COSH1 - arr), 0.0))
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(labels, d)


def equilibrium_indicator(c: CorrelationMatrix) -> float:
    """det(C): near 0 when co-movement saturates, near 1 at independence."""
    return float(np.linalg.det(c.values))
