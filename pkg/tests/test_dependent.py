import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idxcost.cost import compute_kappa
from idxcost.dependent import (
    Const,
    Empty,
    Eq,
    Ge,
    ModEq,
    SingletonEmpty,
    Split,
    Ternary,
    build_dependent,
    classify,
    cond_holds,
    cond_of_expr,
    eval_dependent,
    format_dependent,
    simplify,
    symbolic_costs,
)
from idxcost.errors import IncompleteCostMap, UndefinedCondition
from idxcost.gen import random_program, random_script
from idxcost.labelling import label_depths, label_indexed
from idxcost.syntax import SimpleExpr, eval_simple, iter_labels
from idxcost.textio import parse_label
from idxcost.transform import apply_script
from idxcost.vm import lower

UNSIMPLIFIED = ("(i0 == 0) ? ((i1 >= 0) ? a : 0) : ((i0 % 2 == 1 && i0 >= 1) ? ((i1 == 0) ? b : ((i1 == 1) ? c : "
         "((i1 % 2 == 0 && i1 >= 2) ? d : ((i1 % 2 == 1 && i1 >= 3) ? e : 0)))) : ((i0 % 2 == 0 && i0 >= 2) ? "
         "((i1 % 2 == 0 && i1 >= 0) ? f : ((i1 % 2 == 1 && i1 >= 1) ? g : 0)) : 0))")
SIMPLIFIED = ("(i0 == 0) ? a : ((i0 % 2 == 1) ? ((i1 == 0) ? b : ((i1 == 1) ? c : ((i1 % 2 == 0) ? d : e))) : "
         "((i1 % 2 == 0) ? f : g))")


class TestConditions:
    def test_cases(self):
        assert cond_of_expr(SimpleExpr(0, 3, 0)) == Eq(0, 3)
        assert cond_of_expr(SimpleExpr(1, 2, 0)) == Ge(0, 2)
        assert cond_of_expr(SimpleExpr(2, 5, 1)) == ModEq(1, 2, 1, 5)

    def test_holds(self):
        p = ModEq(1, 2, 1, 5)
        assert cond_holds(p, {1: 7}) and not cond_holds(p, {1: 3})
        assert cond_holds(Eq(0, 3), {0: 3})
        with pytest.raises(UndefinedCondition):
            cond_holds(Ge(0, 2), {1: 4})

    def test_characterisation_exhaustive(self):
        for a, b in itertools.product(range(9), repeat=2):
            e = SimpleExpr(a, b, 0)
            image = {eval_simple(e, d) for d in range(201)}
            p = cond_of_expr(e)
            for c in range(201):
                assert cond_holds(p, {0: c}) == (c in image), (e, c)


class TestClassify:
    def test_trivial_cases(self):
        assert classify([]) == Empty()
        assert classify([()]) == SingletonEmpty()

    def test_gamma(self, transformed):
        s = [l.indexing.entries for l in iter_labels(transformed) if l.atom == "_a2"]
        c = classify(s)
        assert isinstance(c, Split)
        assert c.head == SimpleExpr(0, 0, 0)
        assert c.matching == {(SimpleExpr(1, 0, 1),)}
        assert len(c.rest) == 6
        assert {(c.head,) + t for t in c.matching} | c.rest == set(s)


class TestBuild:
    def test_golden_shapes(self, transformed):
        labels = list(iter_labels(transformed))
        names = symbolic_costs("_a2", labels)
        k = build_dependent("_a2", names)
        assert format_dependent(k) == UNSIMPLIFIED
        assert format_dependent(simplify(k, merge=False)) == SIMPLIFIED

    def test_evaluation(self, transformed):
        labels = list(iter_labels(transformed))
        k = build_dependent("_a2", symbolic_costs("_a2", labels))
        assert eval_dependent(k, {0: 0, 1: 5}) == "a"
        assert eval_dependent(k, {0: 3, 1: 1}) == "c"
        assert eval_dependent(Const(7), {}) == 7

    def test_degenerate(self):
        assert build_dependent("_z", {}) == Const(0)
        assert build_dependent("_a", {parse_label("_a<>"): 4}) == Const(4)

    def test_incomplete(self):
        with pytest.raises(IncompleteCostMap):
            build_dependent("_a", {}, [parse_label("_a<0>")])


class TestSimplify:
    def test_tautology(self):
        assert simplify(Ternary(Ge(1, 0), Const("a"), Const(0))) == Const("a")

    def test_constants_and_merging(self):
        assert simplify(Const(3)) == Const(3)
        k = Ternary(Eq(0, 0), Const(2), Const(2))
        assert simplify(k) == Const(2)
        assert simplify(k, merge=False) == k

    def test_simplified_is_stable(self, transformed):
        k = build_dependent("_a2", symbolic_costs("_a2", list(iter_labels(transformed))))
        once = simplify(k, merge=False)
        assert simplify(once, merge=False) == once


def _random_dependents(seed):
    p = label_indexed(random_program(seed))
    q = apply_script(p, random_script(p, seed))
    an = compute_kappa(lower(q))
    labels = list(iter_labels(q))
    return {a: (d, build_dependent(a, an.kmap, labels)) for a, d in label_depths(p).items()}


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_simplify_preserves_meaning(seed):
    for depth, k in _random_dependents(seed).values():
        s = simplify(k)
        for c in itertools.product(range(13), repeat=min(depth, 3)):
            cidx = dict(enumerate(c))
            assert eval_dependent(s, cidx) == eval_dependent(k, cidx)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 5)), min_size=1, max_size=6, unique=True), st.integers(0, 10**6))
def test_simplify_on_arbitrary_conditions(heads, seed):
    import random

    rng = random.Random(seed)
    conds = [cond_of_expr(SimpleExpr(a, b, rng.randint(0, 1))) for a, b in heads]
    k = Const(0)
    for j, c in enumerate(conds):
        k = Ternary(c, Const(j + 1), k) if rng.random() < 0.5 else Ternary(c, k, Const(j + 1))
    s = simplify(k)
    for c in itertools.product(range(13), repeat=2):
        cidx = dict(enumerate(c))
        assert eval_dependent(s, cidx) == eval_dependent(k, cidx)
