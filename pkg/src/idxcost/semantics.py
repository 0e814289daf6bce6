"""Small-step interpreter shared by plain, labelled and indexed programs.

A machine state is ``(current, kont, store, cidx)``.  The continuation is a
linked list ``None | (frame, rest)`` whose frames are statements still to be
run or :class:`ActiveLoop` markers for the indexed loop currently iterating.
``cidx`` maps loop-index numbers to their current iteration and grows on
demand, so every run starts from the empty constant indexing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import FuelExhausted, ModuloByZero, StuckEvaluation, UndefinedEvaluation
from .syntax import (
    SKIP,
    Assign,
    BinOp,
    Cond,
    Expr,
    If,
    IndexedLabel,
    Labelled,
    Num,
    Seq,
    Skip,
    Stmt,
    Var,
    While,
    check_int64,
    eval_label,
)

DEFAULT_FUEL = 1_000_000


def _mod(x: int, y: int) -> int:
    if y == 0:
        raise ModuloByZero("modulus by zero")
    return x % y


_BINOPS = {
    "+": lambda x, y: check_int64(x + y),
    "-": lambda x, y: check_int64(x - y),
    "*": lambda x, y: check_int64(x * y),
    "%": _mod,
    "<": lambda x, y: int(x < y),
    "<=": lambda x, y: int(x <= y),
    ">": lambda x, y: int(x > y),
    ">=": lambda x, y: int(x >= y),
    "==": lambda x, y: int(x == y),
    "!=": lambda x, y: int(x != y),
    "&&": lambda x, y: int(x != 0 and y != 0),
    "||": lambda x, y: int(x != 0 or y != 0),
}


def eval_expr(e: Expr, store) -> int:
    """Evaluate ``e``; unset variables read as 0.

    Both operands of ``&&``/``||`` are always evaluated; the ternary only
    evaluates the selected arm.
    """
    t = type(e)
    if t is Num:
        return e.value
    if t is Var:
        return store.get(e.name, 0)
    if t is BinOp:
        return _BINOPS[e.op](eval_expr(e.left, store), eval_expr(e.right, store))
    if t is Cond:
        return eval_expr(e.then if eval_expr(e.test, store) != 0 else e.orelse, store)
    raise TypeError(f"not an expression: {e!r}")


@dataclass(frozen=True, slots=True)
class ActiveLoop:
    """Continuation frame for the indexed loop we are currently inside."""

    loop: While


@dataclass(frozen=True)
class MachineState:
    current: Stmt
    kont: Optional[tuple] = None
    store: dict = field(default_factory=dict)
    cidx: dict = field(default_factory=dict)

    @property
    def halted(self) -> bool:
        return type(self.current) is Skip and self.kont is None


def _step(cur, kont, store, cidx):
    """One transition; mutates ``store`` and ``cidx`` in place.

    Returns ``(current, kont, emitted)`` where ``emitted`` is an evaluated
    label or None.
    """
    t = type(cur)
    if t is Skip:
        frame, rest = kont
        if type(frame) is ActiveLoop:
            w = frame.loop
            if eval_expr(w.guard, store) != 0:
                cidx[w.index] += 1
                return w.body, kont, None
            return SKIP, rest, None
        return frame, rest, None
    if t is Seq:
        return cur.first, (cur.second, kont), None
    if t is Assign:
        store[cur.var] = eval_expr(cur.expr, store)
        return SKIP, kont, None
    if t is If:
        return (cur.then if eval_expr(cur.cond, store) != 0 else cur.orelse), kont, None
    if t is While:
        if eval_expr(cur.guard, store) == 0:
            return SKIP, kont, None
        if cur.index is None:
            return cur.body, (cur, kont), None
        cidx[cur.index] = 0
        return cur.body, (ActiveLoop(cur), kont), None
    if t is Labelled:
        try:
            emitted = eval_label(cur.label, cidx)
        except UndefinedEvaluation as exc:
            raise StuckEvaluation(str(exc)) from None
        return cur.body, kont, emitted
    raise TypeError(f"not a statement: {cur!r}")


def step(state: MachineState):
    """Pure single step: ``(next_state, emitted_or_None)``, or None once halted."""
    if state.halted:
        return None
    store, cidx = dict(state.store), dict(state.cidx)
    cur, kont, emitted = _step(state.current, state.kont, store, cidx)
    return MachineState(cur, kont, store, cidx), emitted


@dataclass
class RunResult:
    store: dict
    trace: list[IndexedLabel]
    steps: int


def run(program: Stmt, store=None, fuel: int = DEFAULT_FUEL, observer=None) -> RunResult:
    """Execute ``program`` to completion.

    ``observer(emitted, cidx)`` is called after every label emission with
    the machine's constant indexing at that point.
    """
    store = dict(store or {})
    cidx: dict[int, int] = {}
    trace: list[IndexedLabel] = []
    cur, kont = program, None
    steps = 0
    while not (type(cur) is Skip and kont is None):
        if steps >= fuel:
            raise FuelExhausted(steps)
        cur, kont, emitted = _step(cur, kont, store, cidx)
        steps += 1
        if emitted is not None:
            trace.append(emitted)
            if observer is not None:
                observer(emitted, cidx)
    return RunResult(store, trace, steps)
