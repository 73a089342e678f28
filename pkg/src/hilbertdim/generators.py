"""Canonical correlations and combinators for building new ones."""

from __future__ import annotations

import math
from typing import Callable, Mapping, Sequence

import numpy as np

from .correlation import Correlation, validate
from .exceptions import BadDimension, BadWeights, ShapeMismatch


def chsh_optimal() -> Correlation:
    """Tsirelson-optimal CHSH statistics on a maximally entangled qubit pair."""
    hi = (2 + math.sqrt(2)) / 8
    lo = (2 - math.sqrt(2)) / 8
    t = np.empty((2, 2, 2, 2))
    for x, y, a, b in np.ndindex(t.shape):
        t[x, y, a, b] = hi if (a ^ b) == x * y else lo
    return validate(t.reshape(-1), t.shape)


def bit(s: int, k: int, width: int = 3) -> int:
    """Bit ``k`` of the ``width``-bit string encoded by ``s``, most significant first.

    ``bit(0b100, 0) == 1``, i.e. the string "100" has first bit 1.
    """
    return (s >> (width - 1 - k)) & 1


def magic_square() -> Correlation:
    """Perfect Mermin-Peres magic square strategy.

    Outputs range over all eight 3-bit strings; Alice's must have even parity,
    Bob's odd parity, and the shared cell must agree (``a_y == b_x``).
    """
    t = np.zeros((3, 3, 8, 8))
    for x, y, a, b in np.ndindex(t.shape):
        even_a = bin(a).count("1") % 2 == 0
        odd_b = bin(b).count("1") % 2 == 1
        if even_a and odd_b and bit(a, y) == bit(b, x):
            t[x, y, a, b] = 1 / 8
    return validate(t.reshape(-1), t.shape)


def pr_box(d: int = 2) -> Correlation:
    """d-outcome Popescu-Rohrlich box: uniform on (b - a) mod d == x*y."""
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise BadDimension("pr_box needs d >= 2, got %r" % (d,))
    d = int(d)
    t = np.zeros((2, 2, d, d))
    for x, y, a, b in np.ndindex(t.shape):
        if (b - a) % d == x * y:
            t[x, y, a, b] = 1 / d
    return validate(t.reshape(-1), t.shape)


def ffl_uniform() -> Correlation:
    """Uniform completion of the FFL zero pattern.

    For (x, y) != (1, 1) the pairs with ``x|a == y|b`` get probability zero and
    the two remaining pairs share the mass; (1, 1) is uniform. The result is
    signaling.
    """
    t = np.zeros((2, 2, 2, 2))
    for x, y in np.ndindex(2, 2):
        if (x, y) == (1, 1):
            t[x, y] = 0.25
            continue
        allowed = [(a, b) for a in range(2) for b in range(2) if (x | a) != (y | b)]
        for a, b in allowed:
            t[x, y, a, b] = 1 / len(allowed)
    return validate(t.reshape(-1), t.shape)


def uniform(nx: int = 2, ny: int = 2, na: int = 2, nb: int = 2) -> Correlation:
    t = np.full((nx, ny, na, nb), 1.0 / (na * nb))
    return validate(t.reshape(-1), t.shape)


def _as_table(f, n: int) -> list[int]:
    if callable(f):
        return [int(f(i)) for i in range(n)]
    if isinstance(f, Mapping):
        return [int(f[i]) for i in range(n)]
    return [int(v) for v in f]


def deterministic(
    fa: Callable[[int], int] | Sequence[int] | Mapping[int, int],
    fb: Callable[[int], int] | Sequence[int] | Mapping[int, int],
    nx: int = 2,
    ny: int = 2,
    na: int = 2,
    nb: int = 2,
) -> Correlation:
    """Local deterministic strategy a = fa(x), b = fb(y).

    ``fa``/``fb`` may be callables (evaluated on ``range(nx)``/``range(ny)``),
    sequences or mappings. When a sequence is given its length sets the
    number of inputs.
    """
    if not callable(fa) and not isinstance(fa, Mapping):
        nx = len(fa)
    if not callable(fb) and not isinstance(fb, Mapping):
        ny = len(fb)
    ta = _as_table(fa, nx)
    tb = _as_table(fb, ny)
    if any(not 0 <= v < na for v in ta) or any(not 0 <= v < nb for v in tb):
        raise ShapeMismatch("deterministic outputs fall outside the output alphabets")
    t = np.zeros((nx, ny, na, nb))
    for x in range(nx):
        for y in range(ny):
            t[x, y, ta[x], tb[y]] = 1.0
    return validate(t.reshape(-1), t.shape)


def nonconvex_trio() -> tuple[Correlation, Correlation, Correlation]:
    """Three local deterministic boxes whose even mixture needs a qutrit."""
    p1 = deterministic(lambda x: 1, lambda y: 1)
    p2 = deterministic(lambda x: 0, lambda y: 0)
    p3 = deterministic(lambda x: 1 - x, lambda y: 1 - y)
    return p1, p2, p3


def nonconvex_mixture() -> Correlation:
    return mixture(list(nonconvex_trio()), [1 / 3, 1 / 3, 1 / 3])


def mixture(ps: Sequence[Correlation], weights: Sequence[float]) -> Correlation:
    if len(ps) == 0 or len(ps) != len(weights):
        raise BadWeights("need one weight per correlation")
    shape = ps[0].sizes
    if any(p.sizes != shape for p in ps):
        raise ShapeMismatch("mixture components have different alphabet sizes")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise BadWeights("weights must be nonnegative and sum to 1, got %r" % (list(weights),))
    t = sum(wi * p.probs for wi, p in zip(w, ps))
    return validate(t.reshape(-1), shape)


def product(ps: Sequence[Correlation]) -> Correlation:
    """Tensor product of correlations.

    Composite labels are packed mixed-radix with the first factor as the
    most significant digit, e.g. for two factors ``x = x1 * nx2 + x2``.
    """
    if len(ps) == 0:
        raise ValueError("product of an empty list")
    t = ps[0].probs
    for q in ps[1:]:
        nx, ny, na, nb = t.shape
        mx, my, ma, mb = q.probs.shape
        t = np.einsum("xyab,XYAB->xXyYaAbB", t, q.probs).reshape(nx * mx, ny * my, na * ma, nb * mb)
    return Correlation(np.ascontiguousarray(t, dtype=np.float64))
