"""End-to-end checks of one (program, script, store) triple and random campaigns."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .cost import collapse_to_atoms, compute_kappa
from .dependent import build_dependent, eval_dependent, simplify
from .errors import IdxCostError
from .gen import GenParams, random_program, random_script, random_store
from .instrument import instrument_indexed, instrument_plain
from .labelling import erase_indexings, label_depths, label_indexed
from .semantics import DEFAULT_FUEL, run
from .syntax import COST_VAR, Stmt, eval_simple, is_reserved, iter_labels
from .textio import pretty_print
from .transform import apply_script, check_non_overlap, format_script
from .vm import DEFAULT_COSTS, lower, vm_run

SWEEP = range(7)


class CheckFailed(Exception):
    pass


def dependent_cost_failures(labels, kmap, deps) -> list[str]:
    """Occurrences whose cost is not what the dependent cost gives at their indexes.

    For every occurrence ``I`` and every assignment ``C`` of 0..6 to the loop
    counters, the dependent cost of the atom evaluated at ``I|C`` must be the
    block cost of ``I``.
    """
    bad = []
    for lab in set(labels):
        k = deps[lab.atom]
        entries = lab.indexing.entries
        for c in itertools.product(SWEEP, repeat=len(entries)):
            d = {e.k: eval_simple(e, c[j]) for j, e in enumerate(entries)}
            got = eval_dependent(k, d)
            if got != kmap[lab]:
                bad.append(f"{lab} at {tuple(d.values())}: dependent cost {got}, block cost {kmap[lab]}")
                break
    return bad


@dataclass
class TrialResult:
    ok: bool
    failure: Optional[str] = None
    actual_cost: int = 0
    indexed_cost: int = 0
    plain_cost: int = 0


def check_triple(program: Stmt, script, store: dict, costs=None, fuel: int = DEFAULT_FUEL) -> TrialResult:
    """Run every pipeline check; the first failing one is reported."""
    costs = costs or DEFAULT_COSTS
    try:
        return _check(program, script, store, costs, fuel)
    except CheckFailed as exc:
        return TrialResult(False, str(exc))
    except IdxCostError as exc:
        return TrialResult(False, f"{type(exc).__name__}: {exc}")


def _expect(cond: bool, what: str):
    if not cond:
        raise CheckFailed(what)


def _check(program, script, store, costs, fuel) -> TrialResult:
    src = label_indexed(program)
    tgt = apply_script(src, script)

    overlap = check_non_overlap(tgt)
    _expect(overlap.ok, str(overlap))

    base = run(program, store, fuel)
    r_src = run(src, store, fuel)
    r_tgt = run(tgt, store, fuel)
    prog = lower(tgt)
    r_vm = vm_run(prog, store, fuel, costs)
    _expect(r_src.trace == r_tgt.trace, "transformed program changed the trace")
    _expect(r_src.trace == r_vm.trace, "compiled program changed the trace")
    _expect(base.store == r_src.store == r_tgt.store == r_vm.store, "final stores differ")

    an = compute_kappa(prog, costs, "strict")
    _expect(an.prefix.max_cost + sum(an.kmap[s] for s in r_vm.sources) == r_vm.cost,
            "block costs do not add up to the executed cost")

    atoms = label_depths(src)
    labels = list(iter_labels(tgt))
    deps = {a: build_dependent(a, an.kmap, labels) for a in atoms}
    simple = {a: simplify(k) for a, k in deps.items()}
    bad = dependent_cost_failures(labels, an.kmap, deps) + dependent_cost_failures(labels, an.kmap, simple)
    _expect(not bad, "dependent cost mismatch: " + "; ".join(bad[:3]))

    inst = run(instrument_indexed(src, simple).program, store, fuel)
    indexed_cost = inst.store.get(COST_VAR, 0)
    _expect(indexed_cost == r_vm.cost - an.prefix.max_cost,
            f"indexed instrumentation gives {indexed_cost}, compiled code costs {r_vm.cost}")
    user = {v: x for v, x in inst.store.items() if not is_reserved(v)}
    _expect(user == base.store, "instrumentation changed user variables")

    plain = run(instrument_plain(erase_indexings(src), collapse_to_atoms(an.kmap)).program, store, fuel)
    plain_cost = plain.store.get(COST_VAR, 0)
    _expect(plain_cost >= r_vm.cost - an.prefix.max_cost,
            f"plain instrumentation gives {plain_cost} below the actual {r_vm.cost}")
    return TrialResult(True, None, r_vm.cost, indexed_cost, plain_cost)


@dataclass
class VerifyReport:
    trials: int = 0
    passed: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.trials

    def __str__(self):
        lines = [f"trials: {self.trials}, passed: {self.passed}, failed: {self.trials - self.passed}"]
        if self.failures:
            lines.append("first counterexample:")
            lines.append(self.failures[0])
        return "\n".join(lines)


def trial_inputs(seed: int, params: GenParams = GenParams()):
    """The program, script and store used by trial ``seed``."""
    program = random_program(seed, params)
    script = random_script(label_indexed(program), seed + 1)
    store = random_store(seed + 2, params)
    return program, script, store


def verify(seed: int = 0, trials: int = 100, params: GenParams = GenParams(), costs=None) -> VerifyReport:
    report = VerifyReport()
    for t in range(trials):
        s = seed * 1_000_003 + 3 * t
        program, script, store = trial_inputs(s, params)
        res = check_triple(program, script, store, costs)
        report.trials += 1
        if res.ok:
            report.passed += 1
        else:
            report.failures.append(
                f"trial {t} (seed {s}): {res.failure}\n--- program\n{pretty_print(program)}\n"
                f"--- script\n{format_script(script)}--- store\n{store}"
            )
    return report

