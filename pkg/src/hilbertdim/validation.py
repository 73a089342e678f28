"""Input coercion helpers used by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from .correlation import DEFAULT_TOL, Correlation, from_dict, from_json, validate


def check_tol(tol, name: str = "tol") -> float:
    if not isinstance(tol, numbers.Real) or isinstance(tol, bool) or not tol > 0:
        raise ValueError("%s must be a positive real, got %r" % (name, tol))
    return float(tol)


def check_correlation(obj, tol: float = DEFAULT_TOL) -> Correlation:
    """Coerce ``obj`` into a validated :class:`Correlation`.

    Accepts a Correlation (returned unchanged), a 4-d array shaped
    ``(nx, ny, na, nb)``, a parsed JSON document, or JSON text.
    """
    if isinstance(obj, Correlation):
        return obj
    if isinstance(obj, str):
        return from_json(obj, tol=tol)
    if isinstance(obj, dict):
        return from_dict(obj, tol=tol)
    arr = np.asarray(obj, dtype=np.float64)
    if arr.ndim != 4:
        raise ValueError("expected a 4-d (nx, ny, na, nb) table, got shape %r" % (arr.shape,))
    return validate(arr, arr.shape, tol=tol)


def check_correlations(X, tol: float = DEFAULT_TOL) -> list[Correlation]:
    """Coerce a batch of correlations.

    A single Correlation or a 4-d array is treated as a batch of one; a 5-d
    array is split along its first axis.
    """
    if isinstance(X, (Correlation, str, dict)):
        return [check_correlation(X, tol)]
    if isinstance(X, np.ndarray):
        if X.ndim == 4:
            return [check_correlation(X, tol)]
        if X.ndim == 5:
            return [check_correlation(x, tol) for x in X]
        raise ValueError("expected a 4-d table or a 5-d stack of tables, got shape %r" % (X.shape,))
    return [check_correlation(x, tol) for x in X]
