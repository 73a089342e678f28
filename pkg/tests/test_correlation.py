import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbertdim import generators
from hilbertdim.correlation import (
    Correlation,
    check_nonsignaling,
    from_json,
    marginal_a,
    marginal_b,
    probability,
    to_json,
    validate,
)
from hilbertdim.exceptions import IndexOutOfRange, NegativeEntry, NotNormalized, ParseError, ShapeMismatch

ALPHA = (2 + math.sqrt(2)) / 8
BETA = (2 - math.sqrt(2)) / 8


def chsh_table():
    return [ALPHA if (a ^ b) == x * y else BETA for x in range(2) for y in range(2) for a in range(2) for b in range(2)]


@st.composite
def correlations(draw, max_size=3):
    sizes = tuple(draw(st.integers(1, max_size)) for _ in range(4))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    t = rng.random(sizes) ** 3
    t /= t.sum(axis=(2, 3), keepdims=True)
    return validate(t.reshape(-1), sizes)


class TestValidate:
    def test_chsh_table_is_valid(self):
        p = validate(chsh_table(), (2, 2, 2, 2), tol=1e-9)
        assert p.sizes == (2, 2, 2, 2)

    def test_negative_entry(self):
        t = [0.25] * 16
        t[3] = -0.5
        with pytest.raises(NegativeEntry):
            validate(t, (2, 2, 2, 2))

    def test_not_normalized(self):
        with pytest.raises(NotNormalized):
            validate([0.2] * 16, (2, 2, 2, 2))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            validate([0.25] * 15, (2, 2, 2, 2))
        with pytest.raises(ShapeMismatch):
            validate([1.0], (1, 1, 1, 0))

    def test_tiny_negatives_are_clamped(self):
        raw = np.array(chsh_table())
        raw[0] += BETA + 4e-10
        raw[1] = -4e-10
        p = validate(raw, (2, 2, 2, 2), tol=1e-9)
        assert p.flat()[1] == 0.0
        assert p.flat()[0] == raw[0]
        assert np.array_equal(p.flat()[2:], raw[2:])

    def test_input_not_aliased(self):
        raw = np.array(chsh_table())
        p = validate(raw, (2, 2, 2, 2))
        raw[0] = 99.0
        assert p.flat()[0] == ALPHA
        with pytest.raises(ValueError):
            p.probs[0, 0, 0, 0] = 1.0

    def test_flat_index_order(self):
        t = np.arange(2 * 3 * 2 * 2, dtype=float)
        t = t.reshape(2, 3, 2, 2)
        t /= t.sum(axis=(2, 3), keepdims=True)
        flat = t.reshape(-1)
        p = validate(flat, (2, 3, 2, 2))
        nx, ny, na, nb = 2, 3, 2, 2
        for x, y, a, b in np.ndindex(nx, ny, na, nb):
            assert probability(p, x, y, a, b) == flat[((x * ny + y) * na + a) * nb + b]

    @given(correlations())
    def test_normalization_invariant(self, p):
        assert np.all(np.abs(p.probs.sum(axis=(2, 3)) - 1) <= 1e-9)
        assert np.all(p.probs >= 0)


class TestAccessors:
    def test_probability_examples(self, chsh):
        assert probability(chsh, 0, 0, 0, 0) == pytest.approx(0.426777, abs=1e-6)
        assert probability(generators.pr_box(2), 1, 1, 0, 0) == 0.0
        assert probability(generators.uniform(), 1, 0, 1, 1) == 0.25

    def test_index_out_of_range(self, chsh):
        with pytest.raises(IndexOutOfRange):
            probability(chsh, 2, 0, 0, 0)
        with pytest.raises(IndexOutOfRange):
            probability(chsh, 0, 0, -1, 0)
        with pytest.raises(IndexOutOfRange):
            marginal_b(chsh, 0, 5)

    @pytest.mark.parametrize("x,y", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_marginals(self, chsh, x, y):
        np.testing.assert_allclose(marginal_b(chsh, x, y), [0.5, 0.5], atol=1e-15)
        np.testing.assert_allclose(marginal_a(chsh, x, y), [0.5, 0.5], atol=1e-15)
        p1 = generators.nonconvex_trio()[0]
        np.testing.assert_array_equal(marginal_b(p1, x, y), [0.0, 1.0])
        np.testing.assert_array_equal(marginal_b(generators.uniform(), x, y), [0.5, 0.5])


class TestSignaling:
    def test_chsh_is_nonsignaling(self, chsh):
        assert check_nonsignaling(chsh).is_nonsignaling

    def test_ffl_signals(self):
        rep = check_nonsignaling(generators.ffl_uniform())
        assert not rep.is_nonsignaling
        assert rep.max_violation == pytest.approx(0.5)

    def test_local_deterministic(self):
        for fa in ([0, 1], [1, 1], [1, 0]):
            for fb in ([0, 0], [0, 1], [1, 0]):
                assert check_nonsignaling(generators.deterministic(fa, fb)).is_nonsignaling

    @given(correlations())
    def test_report_consistency(self, p):
        rep = check_nonsignaling(p, tol=1e-3)
        assert rep.is_nonsignaling == (rep.max_violation <= 1e-3)

    @given(correlations(), st.randoms(use_true_random=False))
    def test_invariant_under_output_relabeling(self, p, rand):
        perm_a = list(range(p.na))
        perm_b = list(range(p.nb))
        rand.shuffle(perm_a)
        rand.shuffle(perm_b)
        q = Correlation(p.probs[:, :, perm_a][:, :, :, perm_b])
        r1, r2 = check_nonsignaling(p), check_nonsignaling(q)
        assert r1.is_nonsignaling == r2.is_nonsignaling
        assert r1.max_violation == pytest.approx(r2.max_violation, abs=1e-15)


class TestJson:
    def test_round_trip_chsh(self, chsh):
        assert from_json(to_json(chsh)) == chsh

    def test_schema(self, magic):
        doc = json.loads(to_json(magic))
        assert doc["sizes"] == {"x": 3, "y": 3, "a": 8, "b": 8}
        assert len(doc["p"]) == 3 * 3 * 8 * 8

    @settings(max_examples=50)
    @given(correlations())
    def test_round_trip_bit_exact(self, p):
        assert np.array_equal(from_json(to_json(p)).probs, p.probs)

    def test_truncated(self, chsh):
        text = to_json(chsh)
        with pytest.raises(ParseError):
            from_json(text[: len(text) // 2])

    def test_missing_fields(self):
        with pytest.raises(ParseError):
            from_json('{"p": [1.0]}')
        with pytest.raises(ParseError):
            from_json('{"sizes": {"x": 1, "y": 1, "a": 1, "b": 1}, "p": ["one"]}')

    def test_validation_on_load(self):
        doc = {"sizes": {"x": 1, "y": 1, "a": 2, "b": 1}, "p": [0.5, 0.4]}
        with pytest.raises(NotNormalized):
            from_json(json.dumps(doc))
