"""Closed-form lower bounds on the local Hilbert-space dimension of a correlation.

``f1`` compares Bob's conditional outcome vectors through Bhattacharyya
overlaps minimized over Alice's settings; ``f2`` is the same quantity with
the parties exchanged. Both are lower bounds on the smallest local dimension
of any quantum model of the correlation, and ``+inf`` certifies that no
finite-dimensional model exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlation import Correlation, _check_index
from .exceptions import InfeasiblePerturbation

ZERO_THRESHOLD = 1e-12
CEIL_GUARD = 1e-9


def overlap(p: Correlation, x: int, y1: int, b1: int, y2: int, b2: int) -> float:
    """Sum over a of sqrt(p(a b1|x y1) * p(a b2|x y2))."""
    _check_index("x", x, p.nx)
    for name, v, n in (("y1", y1, p.ny), ("y2", y2, p.ny), ("b1", b1, p.nb), ("b2", b2, p.nb)):
        _check_index(name, v, n)
    root = np.sqrt(p.probs[x])
    return float(np.dot(root[y1, :, b1], root[y2, :, b2]))


def _overlap_table(probs: np.ndarray) -> np.ndarray:
    """All overlaps at once, indexed (x, y1, b1, y2, b2)."""
    root = np.sqrt(np.maximum(probs, 0.0))
    return np.einsum("xiaj,xkal->xijkl", root, root)


def brackets(p: Correlation) -> np.ndarray:
    """The bracketed sums of the f1 formula, one per (y1, y2) pair.

    ``brackets(p)[y1, y2]`` is ``sum_{b1,b2} (min_x overlap)^2``. The bound
    for that pair is its reciprocal.
    """
    table = _overlap_table(p.probs)
    worst = table.min(axis=0)  # (y1, b1, y2, b2)
    return np.einsum("ijkl->ik", worst * worst)


def _bound_from_brackets(values: np.ndarray, zero_threshold: float) -> float:
    smallest = float(values.min())
    if smallest < zero_threshold:
        return math.inf
    return float(1.0 / smallest)


def f1(p: Correlation, zero_threshold: float = ZERO_THRESHOLD) -> float:
    """Lower bound from Bob's side; ``math.inf`` when some bracket vanishes."""
    return _bound_from_brackets(brackets(p), zero_threshold)


def swap_parties(p: Correlation) -> Correlation:
    """Exchange Alice and Bob: q(ba|yx) = p(ab|xy)."""
    return Correlation(np.ascontiguousarray(p.probs.transpose(1, 0, 3, 2)))


def f2(p: Correlation, zero_threshold: float = ZERO_THRESHOLD) -> float:
    """Lower bound from Alice's side, i.e. ``f1`` of the party-swapped table."""
    return f1(swap_parties(p), zero_threshold)


def guarded_ceil(value: float, guard: float = CEIL_GUARD):
    """Ceiling that ignores overshoot below ``guard``; ``inf`` passes through.

    The result is never below 1.
    """
    if math.isinf(value):
        return math.inf
    return max(1, math.ceil(value - guard))


@dataclass(frozen=True)
class BoundReport:
    f1: float
    f2: float
    dimension_lower_bound: float | int

    def to_dict(self) -> dict:
        return {
            "f1": _encode(self.f1),
            "f2": _encode(self.f2),
            "dimension_lower_bound": _encode(self.dimension_lower_bound),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BoundReport":
        return cls(
            f1=_decode(doc["f1"]),
            f2=_decode(doc["f2"]),
            dimension_lower_bound=_decode(doc["dimension_lower_bound"]),
        )


def _encode(value):
    if isinstance(value, float) and math.isinf(value):
        return "infinity"
    return value


def _decode(value):
    if value == "infinity":
        return math.inf
    return value


def dimension_lower_bound(p: Correlation, zero_threshold: float = ZERO_THRESHOLD) -> BoundReport:
    lo1 = f1(p, zero_threshold)
    lo2 = f2(p, zero_threshold)
    return BoundReport(f1=lo1, f2=lo2, dimension_lower_bound=guarded_ceil(max(lo1, lo2)))


def perturb(p: Correlation, offsets: np.ndarray) -> Correlation:
    """Add ``offsets`` entrywise, clamp at zero and rescale each (x, y) block."""
    table = np.maximum(p.probs + offsets, 0.0)
    sums = table.sum(axis=(2, 3), keepdims=True)
    if np.any(sums <= 0.0):
        raise InfeasiblePerturbation("a perturbed (x, y) block has no probability mass left")
    return Correlation(table / sums)


def _stats(values: np.ndarray) -> dict:
    return {"min": float(values.min()), "max": float(values.max()), "mean": float(values.mean())}


def robustness_scan(p: Correlation, eps: float, samples: int, seed: int = 0) -> dict:
    """Spread of f1 and f2 over randomly perturbed copies of ``p``.

    Sample ``i`` uses offsets ``eps * u_i`` with ``u_i`` uniform on [-1, 1]
    drawn from ``numpy.random.default_rng(seed)`` in table order, so runs
    with the same seed and different ``eps`` perturb along the same
    directions. Each perturbed table goes through :func:`perturb`.
    """
    if not eps >= 0:
        raise ValueError("eps must be nonnegative, got %r" % (eps,))
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    v1 = np.empty(samples)
    v2 = np.empty(samples)
    for i in range(samples):
        u = rng.uniform(-1.0, 1.0, size=p.probs.shape)
        q = p if eps == 0 else perturb(p, eps * u)
        v1[i] = f1(q)
        v2[i] = f2(q)
    return {
        "eps": float(eps),
        "samples": int(samples),
        "seed": int(seed),
        "f1": _stats(v1),
        "f2": _stats(v2),
        "f1_values": v1,
        "f2_values": v2,
    }
