import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idxcost.errors import ArithmeticOverflow, FuelExhausted, ModuloByZero, StuckEvaluation
from idxcost.gen import random_program, random_store
from idxcost.labelling import label_indexed, strip_labels
from idxcost.semantics import MachineState, eval_expr, run, step
from idxcost.textio import format_trace, parse_expr, parse_stmt

GOLDEN = "_L0<> _a1<0> _b2<0> _a1<1> _a2<1,0> _b2<1> _a1<2> _a2<2,0> _a2<2,1> _b2<2> _b1<>"


def test_golden_trace(labelled):
    assert format_trace(run(labelled, {"n": 3}).trace).split() == GOLDEN.split()


@pytest.mark.parametrize("n", range(6))
def test_transformed_trace_matches(labelled, transformed, n):
    assert run(transformed, {"n": n}).trace == run(labelled, {"n": n}).trace


def test_loop_index_lifecycle():
    prog = parse_stmt("@i0 while i < 2 do { _a<i0>: i := i + 1 }")
    seen = []
    run(prog, {}, observer=lambda lab, cidx: seen.append(dict(cidx)))
    assert seen == [{0: 0}, {0: 1}]


def test_false_guard_leaves_indexing_untouched():
    st0 = MachineState(parse_stmt("@i3 while 0 do { skip }"))
    nxt, emitted = step(st0)
    assert nxt.cidx == {} and emitted is None and nxt.halted


def test_label_needs_enclosing_loop():
    with pytest.raises(StuckEvaluation):
        run(parse_stmt("_a<i0>: skip"))


def test_fuel():
    with pytest.raises(FuelExhausted):
        run(parse_stmt("while 1 do { skip }"), fuel=50)


def test_arithmetic():
    assert eval_expr(parse_expr("-7 % 3"), {}) == 2
    assert eval_expr(parse_expr("7 % -3"), {}) == -2
    assert eval_expr(parse_expr("unset + 1"), {}) == 1
    assert eval_expr(parse_expr("0 ? 1 % 0 : 5"), {}) == 5
    with pytest.raises(ModuloByZero):
        eval_expr(parse_expr("0 && 1 % 0"), {})
    with pytest.raises(ArithmeticOverflow):
        eval_expr(parse_expr("x * x"), {"x": 2**32})


def test_unindexed_loop_inside_indexed_program():
    prog = parse_stmt("@i0 while i < 2 do { _a<i0>: j := 0; while j < 2 do { j := j + 1 }; i := i + 1 }")
    assert [l.trace_str() for l in run(prog).trace] == ["_a<0>", "_a<1>"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_erasure_simulation(seed):
    p = label_indexed(random_program(seed))
    store = random_store(seed)
    assert run(strip_labels(p), store).store == run(p, store).store
