"""Fidelity lower bound on the PSD-rank of nonnegative matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import ZERO_THRESHOLD, dimension_lower_bound, guarded_ceil
from .correlation import Correlation
from .exceptions import NegativeEntry, ShapeMismatch, ZeroMatrix


@dataclass(frozen=True, eq=False)
class NonnegMatrix:
    entries: np.ndarray

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "m": [float(v) for v in self.entries.reshape(-1)]}


def nonneg_matrix(entries, rows: int | None = None, cols: int | None = None) -> NonnegMatrix:
    m = np.array(entries, dtype=np.float64)
    if rows is not None or cols is not None:
        if m.size != rows * cols:
            raise ShapeMismatch("%d entries for a %dx%d matrix" % (m.size, rows, cols))
        m = m.reshape(rows, cols)
    if m.ndim != 2 or m.size == 0:
        raise ShapeMismatch("expected a nonempty 2-d array, got shape %r" % (m.shape,))
    if np.any(m < 0) or not np.all(np.isfinite(m)):
        raise NegativeEntry("matrix entries must be finite and nonnegative")
    if not np.any(m > 0):
        raise ZeroMatrix("matrix has no positive entry")
    return NonnegMatrix(m)


def from_dict(doc: dict) -> NonnegMatrix:
    return nonneg_matrix(doc["m"], doc["rows"], doc["cols"])


def flatten(p: Correlation) -> NonnegMatrix:
    """Matrix with rows ``x*na + a``, columns ``y*nb + b`` and entries p(ab|xy)."""
    nx, ny, na, nb = p.sizes
    m = p.probs.transpose(0, 2, 1, 3).reshape(nx * na, ny * nb)
    return NonnegMatrix(np.ascontiguousarray(m))


def _normalized(m: NonnegMatrix | np.ndarray) -> np.ndarray:
    if not isinstance(m, NonnegMatrix):
        m = nonneg_matrix(m)
    total = m.entries.sum()
    if not total > 0:
        raise ZeroMatrix("matrix has no positive entry")
    return m.entries / total


def _column_overlaps(q: np.ndarray) -> np.ndarray:
    """Matrix of sum_i sqrt(q_ij1 q_ij2) over column pairs (j1, j2)."""
    root = np.sqrt(q)
    return root.T @ root


def _weighted_fidelity_side(q: np.ndarray, zero_threshold: float) -> float:
    # sum_{j1,j2} w_j1 w_j2 F(col_j1, col_j2) with w = column masses and F
    # the Bhattacharyya coefficient of the normalized columns
    w = np.sqrt(q.sum(axis=0))
    total = float((_column_overlaps(q) * np.outer(w, w)).sum())
    return np.inf if total < zero_threshold else 1.0 / total


def _squared_side(q: np.ndarray, zero_threshold: float) -> float:
    g = _column_overlaps(q)
    total = float((g * g).sum())
    return np.inf if total < zero_threshold else 1.0 / total


def psd_rank_fidelity_bound(m: NonnegMatrix | np.ndarray, zero_threshold: float = ZERO_THRESHOLD) -> float:
    """Fidelity lower bound on the PSD-rank of ``m``.

    ``m`` is scaled to unit total and read as a joint distribution q(i, j).
    With column masses w_j and normalized columns c_j the bound is

        1 / sum_{j1,j2} w_j1 w_j2 F(c_j1, c_j2),

    F being the Bhattacharyya coefficient. Rows are handled the same way
    and the larger value is returned. Since F <= 1 this never exceeds
    :func:`psd_rank_f1_bound`.
    """
    q = _normalized(m)
    return max(_weighted_fidelity_side(q, zero_threshold), _weighted_fidelity_side(q.T, zero_threshold))


def psd_rank_f1_bound(m: NonnegMatrix | np.ndarray, zero_threshold: float = ZERO_THRESHOLD) -> float:
    """The single-setting case of ``f1``/``f2`` applied to a nonnegative matrix.

    Same normalization as :func:`psd_rank_fidelity_bound` but with squared
    overlaps: ``1 / sum_{j1,j2} (sum_i sqrt(q_ij1 q_ij2))^2``, maximized over
    both orientations. For a one-setting correlation this is exactly
    ``max(f1, f2)``.
    """
    q = _normalized(m)
    return max(_squared_side(q, zero_threshold), _squared_side(q.T, zero_threshold))


@dataclass(frozen=True)
class ComparisonReport:
    flattened_psd_bound: float
    flattened_psd_ceiling: float | int
    flattened_f1_bound: float
    f1: float
    f2: float
    dimension_lower_bound: float | int

    def to_dict(self) -> dict:
        enc = lambda v: "infinity" if v == np.inf else v  # noqa: E731
        return {k: enc(v) for k, v in self.__dict__.items()}


def compare_bounds(p: Correlation) -> ComparisonReport:
    """Fidelity PSD-rank bound of the flattened table next to f1/f2.

    The two families are incomparable in general, so no ordering is asserted.
    """
    m = flatten(p)
    flat = psd_rank_fidelity_bound(m)
    rep = dimension_lower_bound(p)
    return ComparisonReport(
        flattened_psd_bound=flat,
        flattened_psd_ceiling=guarded_ceil(flat),
        flattened_f1_bound=psd_rank_f1_bound(m),
        f1=rep.f1,
        f2=rep.f2,
        dimension_lower_bound=rep.dimension_lower_bound,
    )
