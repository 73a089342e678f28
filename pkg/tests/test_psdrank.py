import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hilbertdim import generators
from hilbertdim.bounds import f1, f2, guarded_ceil
from hilbertdim.correlation import validate
from hilbertdim.exceptions import NegativeEntry, ZeroMatrix
from hilbertdim.psdrank import (
    compare_bounds,
    flatten,
    from_dict,
    nonneg_matrix,
    psd_rank_f1_bound,
    psd_rank_fidelity_bound,
)

nonneg = arrays(
    np.float64,
    st.tuples(st.integers(1, 5), st.integers(1, 5)),
    elements=st.floats(0, 10, allow_subnormal=False),
).filter(lambda m: m.sum() > 1e-3)


def brute_weighted(m):
    """Row/column-wise fidelity bound from normalized columns and their masses."""
    q = m / m.sum()
    best = 0.0
    for mat in (q, q.T):
        w = mat.sum(axis=0)
        cols = [mat[:, j] / w[j] if w[j] > 0 else None for j in range(mat.shape[1])]
        s = 0.0
        for j1, j2 in itertools.product(range(mat.shape[1]), repeat=2):
            if cols[j1] is None or cols[j2] is None:
                continue
            bc = sum(math.sqrt(u * v) for u, v in zip(cols[j1], cols[j2]))
            s += w[j1] * w[j2] * bc
        best = max(best, 1 / s)
    return best


class TestFlatten:
    def test_chsh(self, chsh):
        m = flatten(chsh)
        assert (m.rows, m.cols) == (4, 4)
        assert m.entries.sum() == pytest.approx(4)
        assert m.entries[1 * 2 + 0, 1 * 2 + 1] == chsh.probs[1, 1, 0, 1]

    def test_single_setting(self):
        t = np.array([[0.1, 0.2, 0.3], [0.15, 0.05, 0.2]])
        p = validate(t.reshape(-1), (1, 1, 2, 3))
        np.testing.assert_array_equal(flatten(p).entries, t)

    def test_magic(self, magic):
        m = flatten(magic)
        assert (m.rows, m.cols) == (24, 24)
        assert np.count_nonzero(m.entries) == 72
        assert set(np.unique(m.entries)) == {0.0, 1 / 8}


class TestFidelityBound:
    @pytest.mark.parametrize("n", [1, 2, 3, 6])
    def test_identity(self, n):
        assert psd_rank_fidelity_bound(np.eye(n)) == pytest.approx(n, rel=1e-12)
        assert brute_weighted(np.eye(n)) == pytest.approx(n, rel=1e-12)

    def test_rank_one(self):
        assert psd_rank_fidelity_bound(np.ones((2, 2))) == pytest.approx(1, abs=1e-12)
        assert guarded_ceil(psd_rank_fidelity_bound(np.outer([1, 2, 3], [4, 5]))) == 1

    def test_magic_square(self, magic):
        assert psd_rank_fidelity_bound(flatten(magic)) == pytest.approx(2, abs=1e-12)

    def test_never_exceeds_squared_form(self, rng):
        for _ in range(20):
            m = rng.random((4, 5)) ** 4
            assert psd_rank_fidelity_bound(m) <= psd_rank_f1_bound(m) * (1 + 1e-12)

    @settings(max_examples=50)
    @given(nonneg)
    def test_matches_brute_force(self, m):
        assert psd_rank_fidelity_bound(m) == pytest.approx(brute_weighted(m), rel=1e-9)

    @given(nonneg, st.floats(1e-3, 1e3))
    def test_scale_invariance(self, m, c):
        assert psd_rank_fidelity_bound(c * m) == pytest.approx(psd_rank_fidelity_bound(m), rel=1e-9)
        assert psd_rank_f1_bound(c * m) == pytest.approx(psd_rank_f1_bound(m), rel=1e-9)

    @given(nonneg)
    def test_transpose_symmetry(self, m):
        assert psd_rank_fidelity_bound(m.T) == pytest.approx(psd_rank_fidelity_bound(m), rel=1e-12)
        assert psd_rank_f1_bound(m.T) == pytest.approx(psd_rank_f1_bound(m), rel=1e-12)

    @given(nonneg, st.randoms(use_true_random=False))
    def test_permutation_invariance(self, m, rand):
        rows, cols = list(range(m.shape[0])), list(range(m.shape[1]))
        rand.shuffle(rows)
        rand.shuffle(cols)
        shuffled = m[np.ix_(rows, cols)]
        assert psd_rank_fidelity_bound(shuffled) == pytest.approx(psd_rank_fidelity_bound(m), rel=1e-9)
        assert psd_rank_f1_bound(shuffled) == pytest.approx(psd_rank_f1_bound(m), rel=1e-9)

    def test_errors(self):
        with pytest.raises(ZeroMatrix):
            psd_rank_fidelity_bound(np.zeros((2, 2)))
        with pytest.raises(NegativeEntry):
            nonneg_matrix([[1.0, -1.0]])

    def test_matrix_json(self):
        m = nonneg_matrix([[1.0, 2.0], [0.0, 3.0]])
        doc = m.to_dict()
        assert doc == {"rows": 2, "cols": 2, "m": [1.0, 2.0, 0.0, 3.0]}
        np.testing.assert_array_equal(from_dict(doc).entries, m.entries)


class TestSingleSettingCoincidence:
    @settings(max_examples=50)
    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_f1_specialization(self, na, nb, seed):
        t = np.random.default_rng(seed).random((na, nb)) ** 2
        t /= t.sum()
        p = validate(t.reshape(-1), (1, 1, na, nb))
        assert psd_rank_f1_bound(flatten(p)) == pytest.approx(max(f1(p), f2(p)), rel=1e-9)


class TestCompare:
    def test_magic_square(self, magic):
        rep = compare_bounds(magic)
        assert rep.flattened_psd_bound == pytest.approx(2, abs=1e-9)
        assert rep.flattened_psd_ceiling == 2
        assert rep.f1 == pytest.approx(4, abs=1e-9)
        assert rep.flattened_f1_bound == pytest.approx(18 / 5, abs=1e-9)

    def test_single_setting(self):
        t = np.array([[0.5, 0.0], [0.0, 0.25], [0.25, 0.0]])
        p = validate(t.reshape(-1), (1, 1, 3, 2))
        rep = compare_bounds(p)
        assert rep.flattened_f1_bound == pytest.approx(max(rep.f1, rep.f2), rel=1e-12)

    def test_uniform(self):
        rep = compare_bounds(generators.uniform())
        assert rep.flattened_psd_bound == pytest.approx(1) and rep.f1 == pytest.approx(1)

    def test_chsh_finite(self, chsh):
        rep = compare_bounds(chsh)
        assert math.isfinite(rep.flattened_psd_bound) and math.isfinite(rep.f1)

    def test_to_dict_infinity(self):
        doc = compare_bounds(generators.pr_box(2)).to_dict()
        assert doc["f1"] == "infinity"
