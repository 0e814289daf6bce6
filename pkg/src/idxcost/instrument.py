"""Replace cost labels by updates of an explicit cost variable."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .dependent import Const, DependentCost, to_expr
from .errors import MissingCost, NotSourceLabelled
from .syntax import (
    COST_VAR,
    Assign,
    BinOp,
    If,
    Labelled,
    Num,
    Seq,
    Stmt,
    Var,
    While,
    index_var,
)


@dataclass(frozen=True)
class InstrumentedProgram:
    program: Stmt
    cost_var: str = COST_VAR
    index_vars: tuple[str, ...] = ()


def _charge(amount) -> Assign:
    return Assign(COST_VAR, BinOp("+", Var(COST_VAR), amount))


def _map(stmt: Stmt, on_label, on_loop) -> Stmt:
    def go(s):
        if isinstance(s, Seq):
            return Seq(go(s.first), go(s.second))
        if isinstance(s, If):
            return If(s.cond, go(s.then), go(s.orelse))
        if isinstance(s, While):
            return on_loop(s, go(s.body))
        if isinstance(s, Labelled):
            return Seq(on_label(s.label), go(s.body))
        return s

    return go(stmt)


def instrument_plain(stmt: Stmt, costs: Mapping[str, int]) -> InstrumentedProgram:
    def on_label(lab):
        if len(lab.indexing):
            raise NotSourceLabelled(f"{lab} is indexed; plain instrumentation expects bare labels")
        if lab.atom not in costs:
            raise MissingCost(f"no cost for atom {lab.atom}")
        return _charge(Num(costs[lab.atom]))

    return InstrumentedProgram(_map(stmt, on_label, lambda w, body: While(w.guard, body, None)))


def instrument_indexed(stmt: Stmt, costs: Mapping[str, DependentCost]) -> InstrumentedProgram:
    """Indexed loops keep their counter in ``__idx<k>``; labels add their dependent cost."""
    used: set[int] = set()

    def on_label(lab):
        if not lab.indexing.is_identity:
            raise NotSourceLabelled(f"{lab} does not carry an identity indexing")
        if lab.atom not in costs:
            raise MissingCost(f"no cost for atom {lab.atom}")
        k = costs[lab.atom]
        if isinstance(k, int):
            k = Const(k)
        return _charge(to_expr(k))

    def on_loop(w, body):
        if w.index is None:
            return While(w.guard, body, None)
        used.add(w.index)
        v = index_var(w.index)
        step = Assign(v, BinOp("+", Var(v), Num(1)))
        return Seq(Assign(v, Num(0)), While(w.guard, Seq(body, step), None))

    prog = _map(stmt, on_label, on_loop)
    return InstrumentedProgram(prog, COST_VAR, tuple(index_var(k) for k in sorted(used)))

