from idxcost.harness import check_triple, trial_inputs, verify
from idxcost.labelling import label_indexed
from idxcost.textio import parse_stmt
from idxcost.transform import Peel, Unroll


def test_campaign_passes():
    report = verify(seed=0, trials=100)
    assert report.ok, str(report)


def test_trial_inputs_deterministic():
    assert trial_inputs(42) == trial_inputs(42)


def test_peel_unroll_triple(factorial_text, peel_unroll_script):
    res = check_triple(parse_stmt(factorial_text), peel_unroll_script, {"n": 5})
    assert res.ok, res.failure
    assert res.indexed_cost == res.actual_cost < res.plain_cost


def test_reports_failure():
    # a peel aimed at something that is not a loop fails cleanly
    res = check_triple(parse_stmt("x := 1"), [Peel(("labelBody",))], {})
    assert not res.ok and "ScriptError" in res.failure


def test_unroll_by_three():
    p = parse_stmt("i := 0; while i < n do { i := i + 1 }")
    loop = ("labelBody", "seqR", "seqL")
    assert label_indexed(p)
    for n in range(7):
        res = check_triple(p, [Unroll(3, loop), Peel(loop)], {"n": n})
        assert res.ok, res.failure
