"""Quantum models of correlations.

Two kinds of model are handled:

* :class:`PairRepresentation` -- a state on C^d (x) C^d with local POVMs,
  giving p(ab|xy) = Tr((M_xa (x) N_yb) rho);
* :class:`OperatorRepresentation` -- PSD families E_xa, F_yb on C^d with
  p(ab|xy) = Tr(E_xa F_yb) and a common sum
  sum_a E_xa = sum_b F_yb for every x, y.

All matrix functions go through :func:`numpy.linalg.eigh`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import brackets
from .correlation import DEFAULT_TOL, Correlation, validate
from .exceptions import DimMismatch, InvalidRepresentation, NotHermitian, ParseError, ShapeMismatch

HERMITIAN_TOL = 1e-12
PSD_FLOOR = 1e-12
SUPPORT_CUTOFF = 1e-10
WEIGHT_FLOOR = 1e-14


# --------------------------------------------------------------------------
# Hermitian kernel


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch("expected a square matrix, got shape %r" % (m.shape,))
    return m


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = _as_matrix(m)
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    return bool(np.abs(m - m.conj().T).max(initial=0.0) <= tol * scale)


def eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of the Hermitian part of ``m``."""
    m = _as_matrix(m)
    return np.linalg.eigh((m + m.conj().T) / 2)


def matrix_function(m, fn) -> np.ndarray:
    w, v = eigh(m)
    return (v * fn(w)) @ v.conj().T


def psd_sqrt(m) -> np.ndarray:
    return matrix_function(m, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def psd_factor(m, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Thin factor ``A`` with ``A @ A^dagger == m`` on the numerical support."""
    w, v = eigh(m)
    keep = w > cutoff * max(1.0, float(np.abs(w).max(initial=0.0)))
    return v[:, keep] * np.sqrt(w[keep])


def spectral_norm(m) -> float:
    w, _ = eigh(m)
    return float(np.abs(w).max(initial=0.0))


def psd_check(m, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """PSD test relative to the spectral norm.

    Returns ``(ok, min_eigenvalue)`` where ``ok`` means
    ``min_eigenvalue >= -tol * max(1, ||m||)``.

    Raises
    ------
    NotHermitian
        ``m`` is not Hermitian within 1e-12 (relative).
    """
    m = _as_matrix(m)
    if not is_hermitian(m):
        raise NotHermitian("matrix is not Hermitian")
    w, _ = eigh(m)
    lo = float(w[0])
    scale = max(1.0, float(np.abs(w).max()))
    return lo >= -tol * scale, lo


def _psd_ok(m, tol) -> bool:
    return is_hermitian(m) and psd_check(m, tol)[0]


# --------------------------------------------------------------------------
# States


def check_state(rho, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array after checking it is a density matrix."""
    rho = _as_matrix(rho)
    if not is_hermitian(rho):
        raise InvalidRepresentation("state is not Hermitian")
    w, _ = eigh(rho)
    if w[0] < -tol * max(PSD_FLOOR, float(np.abs(w).max())):
        raise InvalidRepresentation("state has eigenvalue %r" % float(w[0]))
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise InvalidRepresentation("state has trace %r" % tr)
    return rho


def fidelity(rho, sigma) -> float:
    """Fidelity ``|| sqrt(rho) sqrt(sigma) ||_1`` (not squared).

    Both arguments are factored as ``A A^dagger`` on their support, and the
    trace norm of ``A^dagger B`` is taken; this equals the trace norm of
    ``sqrt(rho) sqrt(sigma)`` and avoids square roots of rounding noise.
    """
    rho = _as_matrix(rho)
    sigma = _as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimMismatch("states have shapes %r and %r" % (rho.shape, sigma.shape))
    a = psd_factor(rho)
    b = psd_factor(sigma)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return 0.0
    return float(np.linalg.svd(a.conj().T @ b, compute_uv=False).sum())


def purity(rho) -> float:
    rho = _as_matrix(rho)
    return float(np.real(np.einsum("ij,ji->", rho, rho)))


def trace_product(m1, m2) -> float:
    """Real part of Tr(m1 m2) without forming the product."""
    return float(np.real(np.einsum("ij,ji->", m1, m2)))


# --------------------------------------------------------------------------
# Random sampling


def random_psd(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """G G^dagger for a complex Gaussian ``d x rank`` matrix G."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    return g @ g.conj().T


def random_state(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    m = random_psd(d, rng, rank)
    return m / np.trace(m).real


def random_povm(d: int, n: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``n`` random PSD effects on C^d summing to the identity.

    Draw ``n`` Gaussian PSD matrices P_k, then conjugate each by the inverse
    square root of their sum.
    """
    parts = [random_psd(d, rng) for _ in range(n)]
    inv_root = matrix_function(sum(parts), lambda w: 1.0 / np.sqrt(w))
    return [_hermitize(inv_root @ p @ inv_root) for p in parts]


def _hermitize(m):
    return (m + m.conj().T) / 2


# --------------------------------------------------------------------------
# Pair representations


def _check_povm_family(family, d: int, tol: float, who: str):
    for x, effects in enumerate(family):
        if len(effects) == 0:
            raise InvalidRepresentation("%s setting %d has no outcomes" % (who, x))
        for a, m in enumerate(effects):
            if m.shape != (d, d):
                raise InvalidRepresentation("%s effect (%d, %d) has shape %r" % (who, x, a, m.shape))
            if not _psd_ok(m, tol):
                raise InvalidRepresentation("%s effect (%d, %d) is not PSD" % (who, x, a))
        total = sum(effects)
        if np.abs(total - np.eye(d)).max() > tol:
            raise InvalidRepresentation("%s effects for setting %d do not sum to identity" % (who, x))
    if len({len(e) for e in family}) != 1:
        raise InvalidRepresentation("%s settings have different numbers of outcomes" % who)


@dataclass(frozen=True, eq=False)
class PairRepresentation:
    """Shared state on C^d (x) C^d and one POVM per setting for each party."""

    d: int
    state: np.ndarray
    alice: list = field(default_factory=list)
    bob: list = field(default_factory=list)

    def check(self, tol: float = DEFAULT_TOL) -> None:
        """Raise :class:`InvalidRepresentation` if any invariant is broken."""
        d = self.d
        if self.state.shape != (d * d, d * d):
            raise InvalidRepresentation("state must be %dx%d" % (d * d, d * d))
        check_state(self.state, tol)
        if not self.alice or not self.bob:
            raise InvalidRepresentation("both parties need at least one setting")
        _check_povm_family(self.alice, d, tol, "alice")
        _check_povm_family(self.bob, d, tol, "bob")


def pair_representation(d, state, alice, bob) -> PairRepresentation:
    return PairRepresentation(
        d=int(d),
        state=_as_matrix(state),
        alice=[[_as_matrix(m) for m in effects] for effects in alice],
        bob=[[_as_matrix(m) for m in effects] for effects in bob],
    )


def evaluate_pair_representation(rep: PairRepresentation, tol: float = DEFAULT_TOL) -> Correlation:
    """Born-rule statistics Tr((M_xa (x) N_yb) rho)."""
    rep.check(tol)
    d = rep.d
    nx, ny = len(rep.alice), len(rep.bob)
    na, nb = len(rep.alice[0]), len(rep.bob[0])
    rho = rep.state.reshape(d, d, d, d)  # (i, j, k, l) for <ij|rho|kl>
    M = np.array(rep.alice)  # (x, a, i, k)
    N = np.array(rep.bob)  # (y, b, j, l)
    # Tr((M (x) N) rho) = sum M[k,i] N[l,j] rho[i,j,k,l]
    t = np.einsum("xaki,yblj,ijkl->xyab", M, N, rho, optimize=True)
    return validate(t.real.reshape(-1), (nx, ny, na, nb), tol=tol)


def random_pair_representation(
    d: int, sizes, seed: int | np.random.Generator = 0, rank: int | None = None
) -> PairRepresentation:
    """Random state (Gaussian, given rank) and random local POVMs.

    Draw order: state, Alice's POVMs by setting, Bob's POVMs by setting.
    """
    rng = np.random.default_rng(seed)
    nx, ny, na, nb = sizes
    state = random_state(d * d, rng, rank)
    alice = [random_povm(d, na, rng) for _ in range(nx)]
    bob = [random_povm(d, nb, rng) for _ in range(ny)]
    return PairRepresentation(d=d, state=state, alice=alice, bob=bob)


def chsh_pair_representation() -> PairRepresentation:
    """Textbook CHSH model: |Phi+> with Z, X for Alice and (Z +/- X)/sqrt2 for Bob."""
    z = np.diag([1.0, -1.0]).astype(np.complex128)
    xm = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    eye = np.eye(2, dtype=np.complex128)

    def projectors(obs):
        return [(eye + obs) / 2, (eye - obs) / 2]

    phi = np.zeros(4, dtype=np.complex128)
    phi[0] = phi[3] = 1 / math.sqrt(2)
    return PairRepresentation(
        d=2,
        state=np.outer(phi, phi.conj()),
        alice=[projectors(z), projectors(xm)],
        bob=[projectors((z + xm) / math.sqrt(2)), projectors((z - xm) / math.sqrt(2))],
    )


# --------------------------------------------------------------------------
# Operator representations


@dataclass(frozen=True, eq=False)
class OperatorRepresentation:
    """PSD families ``E[x][a]`` and ``F[y][b]`` on C^d."""

    d: int
    E: list
    F: list

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return len(self.E), len(self.F), len(self.E[0]), len(self.F[0])

    def common_sum(self) -> np.ndarray:
        return sum(self.E[0])


def operator_representation(d, E, F) -> OperatorRepresentation:
    orep = OperatorRepresentation(
        d=int(d),
        E=[[_as_matrix(m) for m in row] for row in E],
        F=[[_as_matrix(m) for m in row] for row in F],
    )
    _check_operator_shapes(orep)
    return orep


def _check_operator_shapes(orep: OperatorRepresentation):
    if not orep.E or not orep.F or not orep.E[0] or not orep.F[0]:
        raise ShapeMismatch("operator families must be nonempty")
    if len({len(r) for r in orep.E}) != 1 or len({len(r) for r in orep.F}) != 1:
        raise ShapeMismatch("ragged operator families")
    for row in list(orep.E) + list(orep.F):
        for m in row:
            if m.shape != (orep.d, orep.d):
                raise ShapeMismatch("operator of shape %r in a d=%d representation" % (m.shape, orep.d))


def _trace_table(orep: OperatorRepresentation) -> np.ndarray:
    E = np.array(orep.E)  # (x, a, i, j)
    F = np.array(orep.F)  # (y, b, j, i)
    return np.einsum("xaij,ybji->xyab", E, F, optimize=True).real


def induced_correlation(orep: OperatorRepresentation, tol: float = DEFAULT_TOL) -> Correlation:
    """Correlation Tr(E_xa F_yb), validated at ``tol``."""
    _check_operator_shapes(orep)
    t = _trace_table(orep)
    return validate(t.reshape(-1), t.shape, tol=tol)


def condition3_error(orep: OperatorRepresentation) -> float:
    """Largest entrywise gap between any sum_a E_xa or sum_b F_yb and sum_a E_0a."""
    ref = sum(orep.E[0])
    sums = [sum(row) for row in orep.E] + [sum(row) for row in orep.F]
    return float(max(np.abs(s - ref).max() for s in sums))


@dataclass(frozen=True)
class VerificationReport:
    condition1_max_err: float
    condition3_max_err: float
    psd_ok: bool
    verdict: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_operator_representation(
    orep: OperatorRepresentation, p: Correlation, tol: float = DEFAULT_TOL
) -> VerificationReport:
    _check_operator_shapes(orep)
    if orep.sizes != p.sizes:
        raise ShapeMismatch("representation sizes %r vs correlation sizes %r" % (orep.sizes, p.sizes))
    err1 = float(np.abs(_trace_table(orep) - p.probs).max())
    err3 = condition3_error(orep)
    psd_ok = all(_psd_ok(m, tol) for row in list(orep.E) + list(orep.F) for m in row)
    return VerificationReport(
        condition1_max_err=err1,
        condition3_max_err=err3,
        psd_ok=psd_ok,
        verdict=bool(err1 <= tol and err3 <= tol and psd_ok),
    )


def random_operator_representation(d: int, sizes, seed: int | np.random.Generator = 0) -> OperatorRepresentation:
    """Random representation satisfying both conditions by construction.

    Draw order: Alice's POVMs by setting, Bob's POVMs by setting, then a
    Gaussian PSD ``sigma`` scaled to Tr(sigma^2) = 1. Returns
    ``E_xa = s A_xa s`` and ``F_yb = s B_yb s`` with ``s = sqrt(sigma)``,
    so both families sum to ``sigma`` and Tr(sigma^2) = 1 makes the induced
    table normalized.
    """
    if d < 1 or min(sizes) < 1:
        raise ValueError("d and all sizes must be positive")
    rng = np.random.default_rng(seed)
    nx, ny, na, nb = sizes
    alice = [random_povm(d, na, rng) for _ in range(nx)]
    bob = [random_povm(d, nb, rng) for _ in range(ny)]
    sigma = random_psd(d, rng)
    sigma /= math.sqrt(purity(sigma))
    s = psd_sqrt(sigma)
    E = [[_hermitize(s @ m @ s) for m in row] for row in alice]
    F = [[_hermitize(s @ m @ s) for m in row] for row in bob]
    return OperatorRepresentation(d=d, E=E, F=F)


def operator_representation_from_maximally_entangled(rep: PairRepresentation) -> OperatorRepresentation:
    """Operator form of a model whose state is the maximally entangled |Phi+>.

    For ``rho = |Phi+><Phi+|`` one has Tr((M (x) N) rho) = Tr(M N^T) / d, so
    ``E = M / sqrt(d)`` and ``F = N^T / sqrt(d)`` work. Other states are
    rejected.
    """
    d = rep.d
    phi = np.eye(d).reshape(-1) / math.sqrt(d)
    if np.abs(rep.state - np.outer(phi, phi)).max() > 1e-12:
        raise InvalidRepresentation("state is not the maximally entangled state")
    c = 1 / math.sqrt(d)
    E = [[c * m for m in row] for row in rep.alice]
    F = [[c * m.T for m in row] for row in rep.bob]
    return OperatorRepresentation(d=d, E=E, F=F)


# --------------------------------------------------------------------------
# Replaying the dimension bound derivation


@dataclass
class AuditReport:
    """Diagnostics from :func:`audit_derivation`.

    Slack values are ``rhs - lhs`` of the inequality in question; negative
    slack means the inequality failed.
    """

    d: int
    common_sum_rank: int
    f_weights: np.ndarray
    povm_max_err: float
    weight_sum_max_err: float
    fidelity_slack: float
    trace_fidelity_slack: float
    rho_y_max_discrepancy: float
    purity_values: np.ndarray
    purity_slack: float
    implied_f1_upper: float
    f1: float
    chain_holds: bool

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            if isinstance(v, np.ndarray):
                v = v.tolist()
            elif isinstance(v, float) and math.isinf(v):
                v = "infinity"
            out[k] = v
        return out


def _restrict_to_support(orep: OperatorRepresentation, cutoff: float = SUPPORT_CUTOFF):
    """Compress every operator onto the range of the common sum."""
    S = orep.common_sum()
    w, v = eigh(S)
    keep = w > cutoff * max(1.0, float(np.abs(w).max()))
    basis = v[:, keep]
    if basis.shape[1] == orep.d:
        return orep
    squeeze = lambda m: basis.conj().T @ m @ basis  # noqa: E731
    return OperatorRepresentation(
        d=int(basis.shape[1]),
        E=[[squeeze(m) for m in row] for row in orep.E],
        F=[[squeeze(m) for m in row] for row in orep.F],
    )


def audit_derivation(orep: OperatorRepresentation, tol: float = 1e-8) -> AuditReport:
    """Numerically replay every step from an operator model to ``f1 <= d``.

    With ``S = sum_a E_xa`` (taken at x = 0) and ``U = S^(-1/2)``:

    * ``E'_xa = U E_xa U`` must form a POVM for every x;
    * ``f_yb = Tr(S F_yb)`` must sum to one over b;
    * ``F'_yb = S^(1/2) F_yb S^(1/2) / f_yb`` are states, and for every x
      the fidelity of two of them is at most the classical overlap of the
      distributions obtained by measuring them with ``E'_x``;
    * ``Tr(F' F'') <= fidelity^2``;
    * ``rho_y = sum_b f_yb F'_yb`` does not depend on y (compared against
      ``S^2``) and has purity at least ``1/d``.

    Chaining these gives ``1/bracket(y1, y2) <= 1/Tr(rho_y1 rho_y2) <= d``;
    ``implied_f1_upper`` is the max over (y1, y2) of the middle term.
    If S is singular every operator is first compressed onto its support,
    and ``d`` in the report is the compressed dimension.
    """
    _check_operator_shapes(orep)
    rank = int(np.linalg.matrix_rank(orep.common_sum(), tol=SUPPORT_CUTOFF))
    orep = _restrict_to_support(orep)
    d = orep.d
    nx, ny, na, nb = orep.sizes
    p = _trace_table(orep)
    S = orep.common_sum()
    w, v = eigh(S)
    U = (v / np.sqrt(w)) @ v.conj().T
    root_S = (v * np.sqrt(w)) @ v.conj().T

    povm_err = 0.0
    for row in orep.E:
        total = sum(U @ m @ U for m in row)
        povm_err = max(povm_err, float(np.abs(total - np.eye(d)).max()))

    f = np.array([[trace_product(S, m) for m in row] for row in orep.F])  # (y, b)
    weight_err = float(np.abs(f.sum(axis=1) - 1.0).max())

    states = {}
    for y in range(ny):
        for b in range(nb):
            if f[y, b] > WEIGHT_FLOOR:
                states[y, b] = _hermitize(root_S @ orep.F[y][b] @ root_S) / f[y, b]

    root_p = np.sqrt(np.clip(p, 0.0, None))
    fid_slack = math.inf
    tf_slack = math.inf
    keys = sorted(states)
    for i, (y1, b1) in enumerate(keys):
        for y2, b2 in keys[i:]:
            s1, s2 = states[y1, b1], states[y2, b2]
            fid = fidelity(s1, s2)
            classical = root_p[:, y1, :, b1] * root_p[:, y2, :, b2]  # (x, a)
            classical = classical.sum(axis=1) / math.sqrt(f[y1, b1] * f[y2, b2])
            fid_slack = min(fid_slack, float(classical.min() - fid))
            tf_slack = min(tf_slack, fid * fid - trace_product(s1, s2))

    reference = S @ S
    rhos = []
    for y in range(ny):
        rho_y = sum(f[y, b] * states[y, b] for b in range(nb) if (y, b) in states)
        rhos.append(rho_y)
    discrepancy = float(max(np.abs(r - reference).max() for r in rhos))
    purities = np.array([purity(r) for r in rhos])
    purity_slack = float((purities - 1.0 / d).min())

    overlaps = np.array([[trace_product(r1, r2) for r2 in rhos] for r1 in rhos])
    implied = float(1.0 / overlaps.min()) if overlaps.min() > 0 else math.inf
    corr = Correlation(np.clip(p, 0.0, None))
    bracket = brackets(corr)
    f1_value = float(1.0 / bracket.min()) if bracket.min() >= 1e-12 else math.inf

    holds = (
        povm_err <= tol
        and weight_err <= tol
        and fid_slack >= -tol
        and tf_slack >= -tol
        and discrepancy <= tol
        and purity_slack >= -tol
        and f1_value <= implied * (1 + tol)
        and implied <= d + 1e-6
    )
    return AuditReport(
        d=d,
        common_sum_rank=rank,
        f_weights=f,
        povm_max_err=povm_err,
        weight_sum_max_err=weight_err,
        fidelity_slack=fid_slack,
        trace_fidelity_slack=tf_slack,
        rho_y_max_discrepancy=discrepancy,
        purity_values=purities,
        purity_slack=purity_slack,
        implied_f1_upper=implied,
        f1=f1_value,
        chain_holds=bool(holds),
    )


# --------------------------------------------------------------------------
# JSON


def _matrix_to_json(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _matrix_from_json(doc) -> np.ndarray:
    try:
        m = np.array(doc, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError("matrix is not a nested array of [re, im] pairs") from exc
    if m.ndim != 3 or m.shape[2] != 2 or m.shape[0] != m.shape[1]:
        raise ParseError("matrix must be a square array of [re, im] pairs, got shape %r" % (m.shape,))
    return m[..., 0] + 1j * m[..., 1]


def operator_representation_to_json(orep: OperatorRepresentation) -> str:
    doc = {
        "d": orep.d,
        "E": [[_matrix_to_json(m) for m in row] for row in orep.E],
        "F": [[_matrix_to_json(m) for m in row] for row in orep.F],
    }
    return json.dumps(doc)


def operator_representation_from_json(text: str) -> OperatorRepresentation:
    try:
        doc = json.loads(text)
        d, E, F = doc["d"], doc["E"], doc["F"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError("not an operator representation document: %s" % exc) from exc
    if not isinstance(d, int) or not isinstance(E, list) or not isinstance(F, list):
        raise ParseError("malformed operator representation document")
    return operator_representation(
        d,
        [[_matrix_from_json(m) for m in row] for row in E],
        [[_matrix_from_json(m) for m in row] for row in F],
    )


def pair_representation_to_json(rep: PairRepresentation) -> str:
    doc = {
        "d": rep.d,
        "state": _matrix_to_json(rep.state),
        "alice": [[_matrix_to_json(m) for m in row] for row in rep.alice],
        "bob": [[_matrix_to_json(m) for m in row] for row in rep.bob],
    }
    return json.dumps(doc)


def pair_representation_from_json(text: str) -> PairRepresentation:
    try:
        doc = json.loads(text)
        d, state, alice, bob = doc["d"], doc["state"], doc["alice"], doc["bob"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError("not a pair representation document: %s" % exc) from exc
    if not isinstance(d, int):
        raise ParseError('"d" must be an integer')
    return PairRepresentation(
        d=d,
        state=_matrix_from_json(state),
        alice=[[_matrix_from_json(m) for m in row] for row in alice],
        bob=[[_matrix_from_json(m) for m in row] for row in bob],
    )
