import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idxcost.errors import BadPath, InvalidFactor, ScriptError
from idxcost.gen import random_program, random_script
from idxcost.labelling import label_indexed, strip_labels
from idxcost.syntax import SKIP, If, IndexedLabel, Indexing, Seq, SimpleExpr, While, iter_labels
from idxcost.textio import parse_stmt
from idxcost.transform import (
    Peel,
    Unroll,
    apply_script,
    check_non_overlap,
    format_script,
    get_at,
    images_disjoint,
    list_indexed_loops,
    parse_path,
    parse_script,
    peel,
    replace_at,
    unroll,
)

GAMMA = {"_a2<0, i1>", "_a2<2*i0+1, 0>", "_a2<2*i0+1, 1>", "_a2<2*i0+1, 2*i1+2>",
         "_a2<2*i0+1, 2*i1+3>", "_a2<2*i0+2, 2*i1>", "_a2<2*i0+2, 2*i1+1>"}

LOOP = parse_stmt("@i0 while i < n do { _a<i0>: i := i + 1 }")


def test_peel_shape():
    out = peel(LOOP, ())
    assert isinstance(out, If) and out.orelse == SKIP
    first, rest = out.then.first, out.then.second
    assert first.label == IndexedLabel("_a", Indexing((SimpleExpr(0, 0, 0),)))
    assert isinstance(rest, While) and rest.index == 0
    assert rest.body.label == IndexedLabel("_a", Indexing((SimpleExpr(1, 1, 0),)))


def test_unroll_shape():
    out = unroll(LOOP, (), 3)
    assert isinstance(out, While) and out.index == 0
    labs = [str(l) for l in iter_labels(out)]
    assert labs == ["_a<3*i0>", "_a<3*i0+1>", "_a<3*i0+2>"]
    guard = out.body.second
    assert isinstance(guard, If) and guard.cond == LOOP.guard
    with pytest.raises(InvalidFactor):
        unroll(LOOP, (), 1)


def test_inner_label_indexings(transformed):
    assert {str(l) for l in iter_labels(transformed) if l.atom == "_a2"} == GAMMA
    assert check_non_overlap(transformed).ok


def test_paths():
    assert parse_path(".") == ()
    with pytest.raises(BadPath):
        parse_path("seqL/sideways")
    with pytest.raises(BadPath):
        peel(LOOP, ("seqL",))
    with pytest.raises(BadPath):
        peel(parse_stmt("x := 1"), ())
    s = parse_stmt("x := 1; y := 2")
    assert get_at(replace_at(s, ("seqR",), SKIP), ("seqR",)) == SKIP


def test_script_round_trip_and_errors():
    steps = [Peel(("labelBody", "seqL")), Unroll(3, ())]
    assert parse_script(format_script(steps)) == steps
    with pytest.raises(ScriptError) as info:
        parse_script("peel .\nunroll x .\n")
    assert info.value.step == 2
    with pytest.raises(ScriptError) as info:
        apply_script(LOOP, [Peel(()), Peel(())])
    assert info.value.step == 2


def _plain_peel(stmt, path):
    w = get_at(stmt, path)
    return replace_at(stmt, path, If(w.guard, Seq(w.body, While(w.guard, w.body)), SKIP))


def _plain_unroll(stmt, path, n):
    w = get_at(stmt, path)
    tail = w.body
    for _ in range(n - 2):
        tail = Seq(w.body, If(w.guard, tail, SKIP))
    return replace_at(stmt, path, While(w.guard, Seq(w.body, If(w.guard, tail, SKIP))))


def _strip_path(path):
    """The same node's path once labels are erased."""
    return tuple(sel for sel in path if sel != "labelBody")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["peel", 2, 3]))
def test_erasure_commutes(seed, how):
    p = label_indexed(random_program(seed))
    loops = list_indexed_loops(p)
    if not loops:
        return
    path, _ = loops[seed % len(loops)]
    plain_path = _strip_path(path)
    if how == "peel":
        assert strip_labels(peel(p, path)) == _plain_peel(strip_labels(p), plain_path)
    else:
        assert strip_labels(unroll(p, path, how)) == _plain_unroll(strip_labels(p), plain_path, how)


def test_disjointness_examples():
    e = SimpleExpr
    assert images_disjoint(e(2, 0, 0), e(2, 1, 0))
    assert not images_disjoint(e(2, 0, 0), e(3, 1, 0))
    assert images_disjoint(e(0, 0, 0), e(1, 1, 0))
    assert not images_disjoint(e(0, 5, 0), e(1, 1, 0))
    assert images_disjoint(e(0, 3, 0), e(2, 0, 0))


@given(st.integers(0, 5), st.integers(0, 8), st.integers(0, 5), st.integers(0, 8))
def test_disjointness_brute_force(a1, b1, a2, b2):
    e1, e2 = SimpleExpr(a1, b1, 0), SimpleExpr(a2, b2, 0)
    # the first common value, if any, is below 200 for these coefficients
    v1 = {a1 * x + b1 for x in range(200)}
    v2 = {a2 * x + b2 for x in range(200)}
    assert images_disjoint(e1, e2) == (not (v1 & v2))


def test_overlap_detected():
    bad = parse_stmt("_L<>: @i0 while b do { _a<2*i0>: skip; _a<3*i0+1>: skip }")
    assert not check_non_overlap(bad).ok
    dup = parse_stmt("_a<>: skip; _a<>: skip")
    assert "more than once" in str(check_non_overlap(dup))
    escaped = parse_stmt("@i0 while b do { _a<i0, 0>: skip }; _a<0, 0>: skip")
    # a label outside the loop sharing an iteration with one inside it
    assert not check_non_overlap(escaped).ok


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_random_scripts_keep_non_overlap(seed):
    p = label_indexed(random_program(seed))
    q = apply_script(p, random_script(p, seed))
    assert check_non_overlap(q).ok
