import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idxcost.cost import (
    analysis_json,
    check_soundness,
    collapse_to_atoms,
    compute_kappa,
    format_costmap,
    parse_costmap,
)
from idxcost.errors import PrecisenessError, SoundnessError
from idxcost.gen import random_program, random_script, random_store
from idxcost.labelling import label_indexed
from idxcost.textio import parse_expr, parse_label
from idxcost.transform import apply_script
from idxcost.vm import DEFAULT_COSTS, AssignInstr, Branch, Emit, Halt, Jump, VmProgram, lower, vm_run

A = parse_label("_a<>")
B = parse_label("_b<>")


def assign():
    return AssignInstr("x", parse_expr("1"))


def test_straight_line_block():
    prog = VmProgram((Emit(A), assign(), assign(), assign(), Emit(B), Halt()))
    assert compute_kappa(prog).kmap == {A: 3, B: 0}


def diamond():
    # arms of cost 2 and 5 rejoin before the next label
    return VmProgram((
        Emit(A),
        Branch(parse_expr("c"), 2, 4),
        assign(),
        Jump(9),
        assign(), assign(), assign(), assign(), Jump(9),
        Emit(B),
        Halt(),
    ))


FREE_BRANCH = {**DEFAULT_COSTS, "BRANCH": 0}


def test_diamond_strict_and_sound():
    with pytest.raises(PrecisenessError):
        compute_kappa(diamond(), FREE_BRANCH)
    an = compute_kappa(diamond(), FREE_BRANCH, mode="sound")
    assert an.kmap[A] == 5
    (blk,) = an.imprecise
    assert (blk.min_cost, blk.max_cost) == (2, 5)
    assert blk.min_path == (0, 1, 2, 3) and blk.max_path == (0, 1, 4, 5, 6, 7, 8)
    assert "min 2" in an.report()


def test_soundness():
    loop = VmProgram((assign(), Jump(0), Halt()))
    assert not check_soundness(loop).ok
    with pytest.raises(SoundnessError):
        compute_kappa(loop)


def test_labelled_programs_are_sound_and_precise(transformed):
    prog = lower(transformed)
    assert check_soundness(prog).ok
    an = compute_kappa(prog)
    assert an.precise and an.prefix.max_cost == 0


def test_collapse():
    k = {parse_label("_a<0>"): 4, parse_label("_a<i0+1>"): 7, B: 2}
    assert collapse_to_atoms(k) == {"_a": 7, "_b": 2}


def test_serialisation(transformed):
    an = compute_kappa(lower(transformed))
    assert parse_costmap(format_costmap(an.kmap)) == an.kmap
    assert '"precise": true' in analysis_json(an)


def test_entry_prefix_counts():
    prog = VmProgram((assign(), Emit(A), assign(), Halt()))
    an = compute_kappa(prog)
    assert an.prefix.max_cost == 1 and an.kmap[A] == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.dictionaries(st.sampled_from(["EMIT", "ASSIGN", "BRANCH", "JUMP", "IND_INC", "IND_RESET", "HALT"]), st.integers(0, 4)))
def test_block_costs_add_up(seed, overrides):
    costs = {**DEFAULT_COSTS, **overrides}
    p = label_indexed(random_program(seed))
    prog = lower(apply_script(p, random_script(p, seed)))
    an = compute_kappa(prog, costs)
    r = vm_run(prog, random_store(seed), costs=costs)
    assert an.prefix.max_cost + sum(an.kmap[s] for s in r.sources) == r.cost


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_sound_mode_over_approximates_naive_lowering(seed):
    p = label_indexed(random_program(seed))
    prog = lower(apply_script(p, random_script(p, seed)), thread=False)
    an = compute_kappa(prog, mode="sound")
    r = vm_run(prog, random_store(seed))
    assert sum(an.kmap[s] for s in r.sources) >= r.cost
