"""Two-party correlations p(ab|xy): validation, marginals, signaling and JSON I/O.

A correlation is stored as a dense float64 array of shape ``(nx, ny, na, nb)``.
Flattening it in C order gives the on-disk index order
``((x*ny + y)*na + a)*nb + b``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import (
    IndexOutOfRange,
    NegativeEntry,
    NotNormalized,
    ParseError,
    ShapeMismatch,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Correlation:
    """Validated conditional distribution p(ab|xy).

    Build instances with :func:`validate` (or the generators); the
    constructor itself performs no checks.
    """

    probs: np.ndarray

    def __post_init__(self):
        self.probs.setflags(write=False)

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return tuple(int(n) for n in self.probs.shape)

    @property
    def nx(self) -> int:
        return self.probs.shape[0]

    @property
    def ny(self) -> int:
        return self.probs.shape[1]

    @property
    def na(self) -> int:
        return self.probs.shape[2]

    @property
    def nb(self) -> int:
        return self.probs.shape[3]

    def flat(self) -> np.ndarray:
        return self.probs.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, Correlation):
            return NotImplemented
        return self.probs.shape == other.probs.shape and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.probs.shape, self.probs.tobytes()))

    def __repr__(self):
        return "Correlation(sizes={})".format(self.sizes)


def _check_sizes(sizes) -> tuple[int, int, int, int]:
    sizes = tuple(sizes)
    if len(sizes) != 4:
        raise ShapeMismatch("expected four alphabet sizes (nx, ny, na, nb), got %r" % (sizes,))
    out = []
    for n in sizes:
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise ShapeMismatch("alphabet sizes must be positive integers, got %r" % (sizes,))
        out.append(int(n))
    return tuple(out)


def validate(raw_table, sizes: Sequence[int], tol: float = DEFAULT_TOL) -> Correlation:
    """Check a flat (or already 4-d) table and wrap it as a :class:`Correlation`.

    Entries in ``[-tol, 0)`` are clamped to exactly zero; everything else is
    kept bit-for-bit.

    Raises
    ------
    ShapeMismatch
        Table length differs from ``nx*ny*na*nb``.
    NegativeEntry
        Some entry is below ``-tol``.
    NotNormalized
        Some block p(.,.|xy) sums to 1 +/- more than ``tol``.
    """
    sizes = _check_sizes(sizes)
    table = np.array(raw_table, dtype=np.float64)
    expected = int(np.prod(sizes))
    if table.size != expected:
        raise ShapeMismatch("table has %d entries, sizes %r need %d" % (table.size, sizes, expected))
    if table.ndim not in (1, 4) or (table.ndim == 4 and table.shape != sizes):
        raise ShapeMismatch("table shape %r does not match sizes %r" % (table.shape, sizes))
    table = table.reshape(sizes)
    if not np.all(np.isfinite(table)):
        raise NotNormalized("table contains non-finite entries")

    worst = table.min()
    if worst < -tol:
        idx = np.unravel_index(int(np.argmin(table)), sizes)
        raise NegativeEntry("entry %r = %r is below -tol" % (tuple(int(i) for i in idx), float(worst)))
    table[table < 0] = 0.0

    sums = table.sum(axis=(2, 3))
    dev = np.abs(sums - 1.0)
    if dev.max() > tol:
        x, y = np.unravel_index(int(np.argmax(dev)), sums.shape)
        raise NotNormalized("block (x=%d, y=%d) sums to %r" % (x, y, float(sums[x, y])))
    return Correlation(table)


def _check_index(name, value, size):
    if isinstance(value, bool) or not (0 <= value < size):
        raise IndexOutOfRange("%s=%r out of range [0, %d)" % (name, value, size))


def probability(p: Correlation, x: int, y: int, a: int, b: int) -> float:
    for name, v, n in zip("xyab", (x, y, a, b), p.sizes):
        _check_index(name, v, n)
    return float(p.probs[x, y, a, b])


def marginal_b(p: Correlation, x: int, y: int) -> np.ndarray:
    """Bob's outcome distribution for settings (x, y)."""
    _check_index("x", x, p.nx)
    _check_index("y", y, p.ny)
    return p.probs[x, y].sum(axis=0)


def marginal_a(p: Correlation, x: int, y: int) -> np.ndarray:
    """Alice's outcome distribution for settings (x, y)."""
    _check_index("x", x, p.nx)
    _check_index("y", y, p.ny)
    return p.probs[x, y].sum(axis=1)


@dataclass(frozen=True)
class SignalingReport:
    is_nonsignaling: bool
    max_violation: float


def check_nonsignaling(p: Correlation, tol: float = DEFAULT_TOL) -> SignalingReport:
    """Compare each party's marginals across the other party's settings."""
    alice = p.probs.sum(axis=3)  # (x, y, a)
    bob = p.probs.sum(axis=2)  # (x, y, b)
    viol_a = np.ptp(alice, axis=1).max() if p.ny > 1 else 0.0
    viol_b = np.ptp(bob, axis=0).max() if p.nx > 1 else 0.0
    worst = float(max(viol_a, viol_b))
    return SignalingReport(is_nonsignaling=worst <= tol, max_violation=worst)


def to_dict(p: Correlation) -> dict:
    nx, ny, na, nb = p.sizes
    return {"sizes": {"x": nx, "y": ny, "a": na, "b": nb}, "p": [float(v) for v in p.flat()]}


def to_json(p: Correlation) -> str:
    # 17 significant digits round-trip every double exactly
    nx, ny, na, nb = p.sizes
    values = ", ".join(format(float(v), ".17g") for v in p.flat())
    return '{"sizes": {"x": %d, "y": %d, "a": %d, "b": %d}, "p": [%s]}\n' % (nx, ny, na, nb, values)


def from_dict(doc, tol: float = DEFAULT_TOL) -> Correlation:
    try:
        sizes_doc = doc["sizes"]
        sizes = [sizes_doc[k] for k in ("x", "y", "a", "b")]
        values = doc["p"]
    except (KeyError, TypeError) as exc:
        raise ParseError("correlation document is missing field %s" % exc) from exc
    if not all(isinstance(n, int) and not isinstance(n, bool) for n in sizes):
        raise ParseError("sizes must be integers")
    if not isinstance(values, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
    ):
        raise ParseError('"p" must be a flat array of numbers')
    return validate(values, sizes, tol=tol)


def from_json(text: str, tol: float = DEFAULT_TOL) -> Correlation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON: %s" % exc) from exc
    return from_dict(doc, tol=tol)
