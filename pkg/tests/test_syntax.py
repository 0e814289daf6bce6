import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from idxcost.errors import IndexOutOfScope, InvalidComparison, InvalidComposition, UndefinedEvaluation
from idxcost.syntax import (
    IndexedLabel,
    Indexing,
    SimpleExpr,
    compose_simple,
    eval_label,
    eval_simple,
    lex_le,
    reindex_label,
)

small = st.integers(0, 6)


def se(a, b, k=0):
    return SimpleExpr(a, b, k)


class TestSimpleExpr:
    def test_composition_formula(self):
        assert compose_simple(se(2, 1), se(3, 4)) == se(6, 9)

    def test_identity_is_neutral(self):
        e = se(3, 5)
        assert compose_simple(e, se(1, 0)) == e
        assert compose_simple(se(1, 0), e) == e

    def test_constant_absorbs(self):
        assert compose_simple(se(0, 7), se(4, 2)) == se(0, 7)

    def test_mismatched_indexes(self):
        with pytest.raises(InvalidComposition):
            compose_simple(se(1, 0, 0), se(1, 0, 1))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            SimpleExpr(-1, 0, 0)

    @pytest.mark.parametrize("e,text", [(se(0, 3), "3"), (se(1, 0), "i0"), (se(1, 1), "i0+1"),
                                        (se(2, 0, 1), "2*i1"), (se(2, 1), "2*i0+1")])
    def test_rendering(self, e, text):
        assert str(e) == text

    def test_algebra_exhaustive(self):
        r = range(5)
        exprs = [se(a, b) for a in r for b in r]
        for e1, e2, e3 in itertools.product(exprs, repeat=3):
            assert compose_simple(compose_simple(e1, e2), e3) == compose_simple(e1, compose_simple(e2, e3))
        for e1, e2 in itertools.product(exprs, repeat=2):
            for x in range(6):
                assert eval_simple(compose_simple(e1, e2), x) == eval_simple(e1, eval_simple(e2, x))

    @given(small, small, small, small, small, small)
    def test_lex_order_total(self, a1, b1, a2, b2, a3, b3):
        e1, e2, e3 = se(a1, b1), se(a2, b2), se(a3, b3)
        assert lex_le(e1, e2) or lex_le(e2, e1)
        if lex_le(e1, e2) and lex_le(e2, e1):
            assert e1 == e2
        if lex_le(e1, e2) and lex_le(e2, e3):
            assert lex_le(e1, e3)

    def test_lex_order_examples(self):
        assert lex_le(se(0, 9), se(1, 0))
        assert lex_le(se(2, 1), se(2, 2))
        with pytest.raises(InvalidComparison):
            lex_le(se(0, 0, 0), se(0, 0, 1))


class TestIndexing:
    def test_entries_must_follow_domain(self):
        with pytest.raises(ValueError):
            Indexing((se(1, 0, 1),))
        Indexing((se(1, 0, 1), se(0, 2, 2)), start=1)

    def test_identity_and_constant(self):
        assert Indexing.identity(2).is_identity
        assert Indexing.constant((4, 0)).values() == (4, 0)
        with pytest.raises(UndefinedEvaluation):
            Indexing.identity(1).values()

    def test_reindex(self):
        lab = IndexedLabel("a", Indexing((se(2, 1, 0), se(1, 0, 1))))
        out = reindex_label(lab, 1, se(2, 3, 1))
        assert str(out) == "a<2*i0+1, 2*i1+3>"
        with pytest.raises(IndexOutOfScope):
            reindex_label(lab, 2, se(1, 1, 2))

    def test_eval_label_undefined(self):
        lab = IndexedLabel("a", Indexing((se(2, 0, 0), se(1, 1, 1))))
        with pytest.raises(UndefinedEvaluation):
            eval_label(lab, {0: 2})

    def test_eval_label_constant_entries_need_no_value(self):
        lab = IndexedLabel("a", Indexing((se(2, 0, 0), se(0, 0, 1))))
        assert eval_label(lab, {0: 2}) == IndexedLabel("a", Indexing.constant((4, 0)))

    @given(st.lists(st.tuples(small, small), min_size=1, max_size=3), st.data())
    def test_eval_matches_pointwise(self, pairs, data):
        lab = IndexedLabel("x", Indexing(tuple(se(a, b, k) for k, (a, b) in enumerate(pairs))))
        cidx = {k: data.draw(small) for k in range(len(pairs))}
        got = eval_label(lab, cidx).indexing.values()
        assert got == tuple(a * cidx[k] + b for k, (a, b) in enumerate(pairs))
