"""A flat instruction language with ``emit``/``ind_reset``/``ind_inc``.

Lowering is structural.  Two deliberate refinements keep block costs
path-independent on transformed code:

* an ``if`` without ``else`` branches straight past its then-block instead
  of jumping over an empty else-block;
* the false edge of a branch is threaded through instructions that cannot
  matter once that same condition is known false: jumps, same-condition
  branches, and the index updates of the loops those branches exit.
  Unroll guards ``if b then ...`` therefore leave the loop directly.

``lower(..., thread=False)`` produces the unrefined form.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .errors import FuelExhausted, ParseError, StuckEvaluation
from .semantics import DEFAULT_FUEL, eval_expr
from .syntax import (
    Assign,
    BinOp,
    Cond,
    Expr,
    If,
    IndexedLabel,
    Indexing,
    Labelled,
    Num,
    Seq,
    SimpleExpr,
    Skip,
    Stmt,
    Var,
    While,
    check_int64,
    expr_vars,
)
from .textio import format_expr, parse_expr, parse_label


@dataclass(frozen=True, slots=True)
class Emit:
    label: IndexedLabel
    opcode = "EMIT"


@dataclass(frozen=True, slots=True)
class IndReset:
    k: int
    opcode = "IND_RESET"


@dataclass(frozen=True, slots=True)
class IndInc:
    k: int
    opcode = "IND_INC"


@dataclass(frozen=True, slots=True)
class AssignInstr:
    var: str
    expr: Expr
    opcode = "ASSIGN"


@dataclass(frozen=True, slots=True)
class Branch:
    cond: Expr
    if_true: int
    if_false: int
    opcode = "BRANCH"


@dataclass(frozen=True, slots=True)
class Jump:
    target: int
    opcode = "JUMP"


@dataclass(frozen=True, slots=True)
class Halt:
    opcode = "HALT"


VmInstr = Union[Emit, IndReset, IndInc, AssignInstr, Branch, Jump, Halt]

OPCODES = ("EMIT", "IND_RESET", "IND_INC", "ASSIGN", "BRANCH", "JUMP", "HALT")

DEFAULT_COSTS = {
    "EMIT": 0,
    "IND_RESET": 1,
    "IND_INC": 1,
    "ASSIGN": 1,
    "BRANCH": 1,
    "JUMP": 1,
    "HALT": 0,
}


def load_cost_model(text: Optional[str]) -> dict[str, int]:
    """Parse a JSON object of opcode -> natural cost, defaulting the rest."""
    costs = dict(DEFAULT_COSTS)
    if text is None:
        return costs
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ParseError("cost model must be a JSON object")
    for name, value in data.items():
        key = name.upper()
        if key not in costs:
            raise ParseError(f"unknown opcode {name!r} in cost model")
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ParseError(f"cost of {name} must be a natural number")
        costs[key] = value
    return costs


def successors(instr: VmInstr, addr: int) -> tuple[int, ...]:
    if isinstance(instr, Branch):
        return (instr.if_true, instr.if_false)
    if isinstance(instr, Jump):
        return (instr.target,)
    if isinstance(instr, Halt):
        return ()
    return (addr + 1,)


@dataclass(frozen=True)
class VmProgram:
    instrs: tuple[VmInstr, ...]

    def __post_init__(self):
        n = len(self.instrs)
        halts = [a for a, ins in enumerate(self.instrs) if isinstance(ins, Halt)]
        if len(halts) != 1:
            raise ValueError(f"program must contain exactly one HALT, found {len(halts)}")
        for addr, ins in enumerate(self.instrs):
            for t in successors(ins, addr):
                if not 0 <= t < n:
                    raise ValueError(f"instruction {addr} targets {t}, outside 0..{n - 1}")

    def __len__(self):
        return len(self.instrs)

    def __getitem__(self, addr):
        return self.instrs[addr]


# --- lowering ----------------------------------------------------------------


def lower(stmt: Stmt, thread: bool = True) -> VmProgram:
    code: list = []

    def gen(s):
        t = type(s)
        if t is Skip:
            return
        if t is Seq:
            gen(s.first)
            gen(s.second)
        elif t is Assign:
            code.append(AssignInstr(s.var, s.expr))
        elif t is Labelled:
            code.append(Emit(s.label))
            gen(s.body)
        elif t is If:
            br = len(code)
            code.append(None)
            gen(s.then)
            if type(s.orelse) is Skip:
                code[br] = Branch(s.cond, br + 1, len(code))
                return
            jmp = len(code)
            code.append(None)
            else_start = len(code)
            gen(s.orelse)
            code[br] = Branch(s.cond, br + 1, else_start)
            code[jmp] = Jump(len(code))
        elif t is While:
            if s.index is not None:
                code.append(IndReset(s.index))
            head = len(code)
            code.append(None)
            gen(s.body)
            if s.index is not None:
                code.append(IndInc(s.index))
            code.append(Jump(head))
            code[head] = Branch(s.guard, head + 1, len(code))
        else:
            raise TypeError(f"not a statement: {s!r}")

    gen(stmt)
    code.append(Halt())
    if thread:
        code = [_thread(code, ins) if type(ins) is Branch else ins for ins in code]
    return VmProgram(tuple(code))


def _thread(code, br: Branch) -> Branch:
    cur = best = br.if_false
    seen = set()
    while cur not in seen:
        seen.add(cur)
        ins = code[cur]
        t = type(ins)
        if t is Jump:
            cur = ins.target
        elif t is IndInc or t is IndReset:
            cur += 1
        elif t is Branch and ins.cond == br.cond:
            cur = best = ins.if_false
        else:
            break
    return br if best == br.if_false else Branch(br.cond, br.if_true, best)


# --- listing format ----------------------------------------------------------


def format_instr(ins: VmInstr) -> str:
    t = type(ins)
    if t is Emit:
        return f"EMIT {ins.label}"
    if t is IndReset or t is IndInc:
        return f"{ins.opcode} {ins.k}"
    if t is AssignInstr:
        return f"ASSIGN {ins.var} := {format_expr(ins.expr)}"
    if t is Branch:
        return f"BRANCH {format_expr(ins.cond, 1)} ? {ins.if_true} : {ins.if_false}"
    if t is Jump:
        return f"JUMP {ins.target}"
    return "HALT"


def format_listing(prog: VmProgram) -> str:
    width = len(str(len(prog) - 1))
    return "".join(f"{addr:>{width}}: {format_instr(ins)}\n" for addr, ins in enumerate(prog.instrs))


_LINE_RE = re.compile(r"\s*(\d+):\s*([A-Z_]+)\s*(.*?)\s*\Z")
_BRANCH_RE = re.compile(r"(.*)\?\s*(\d+)\s*:\s*(\d+)\Z")


def parse_listing(text: str) -> VmProgram:
    instrs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise ParseError(f"bad listing line {line!r}", lineno, 1)
        addr, op, rest = int(m.group(1)), m.group(2), m.group(3)
        if addr != len(instrs):
            raise ParseError(f"expected address {len(instrs)}, got {addr}", lineno, 1)
        try:
            if op == "EMIT":
                ins = Emit(parse_label(rest))
            elif op == "IND_RESET":
                ins = IndReset(int(rest))
            elif op == "IND_INC":
                ins = IndInc(int(rest))
            elif op == "ASSIGN":
                var, expr = rest.split(":=", 1)
                ins = AssignInstr(var.strip(), parse_expr(expr, allow_reserved=True))
            elif op == "BRANCH":
                bm = _BRANCH_RE.match(rest)
                if bm is None:
                    raise ValueError(rest)
                ins = Branch(parse_expr(bm.group(1), allow_reserved=True), int(bm.group(2)), int(bm.group(3)))
            elif op == "JUMP":
                ins = Jump(int(rest))
            elif op == "HALT" and not rest:
                ins = Halt()
            else:
                raise ValueError(op)
        except (ValueError, ParseError) as exc:
            raise ParseError(f"bad {op} instruction: {exc}", lineno, 1) from None
        instrs.append(ins)
    try:
        return VmProgram(tuple(instrs))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def looks_like_listing(text: str) -> bool:
    for line in text.splitlines():
        if line.strip() and not line.lstrip().startswith("#"):
            return _LINE_RE.match(line) is not None
    return False


# --- reference stepper -------------------------------------------------------


def _instantiate(label: IndexedLabel, regs: dict) -> IndexedLabel:
    out = []
    for e in label.indexing.entries:
        if e.a == 0:
            out.append(e)
        elif e.k in regs:
            out.append(SimpleExpr(0, check_int64(e.a * regs[e.k] + e.b), e.k))
        else:
            raise StuckEvaluation(f"{label} needs unset index register i{e.k}")
    return IndexedLabel(label.atom, Indexing(tuple(out)))


class VmMachine:
    """Instruction-at-a-time execution with inspectable index registers."""

    def __init__(self, prog: VmProgram, store=None, costs=None):
        self.prog = prog
        self.pc = 0
        self.store = dict(store or {})
        self.regs: dict[int, int] = {}
        self.trace: list[IndexedLabel] = []
        self.costs = costs or DEFAULT_COSTS
        self.cost = 0
        self.steps = 0
        self.halted = False

    def index_state(self) -> dict[int, int]:
        return dict(self.regs)

    def step(self) -> Optional[IndexedLabel]:
        """Execute one instruction; return the emitted label, if any."""
        ins = self.prog[self.pc]
        self.cost += self.costs[ins.opcode]
        self.steps += 1
        t = type(ins)
        emitted = None
        if t is Emit:
            emitted = _instantiate(ins.label, self.regs)
            self.trace.append(emitted)
            self.pc += 1
        elif t is IndReset:
            self.regs[ins.k] = 0
            self.pc += 1
        elif t is IndInc:
            if ins.k not in self.regs:
                raise StuckEvaluation(f"IND_INC on unset register i{ins.k}")
            self.regs[ins.k] = check_int64(self.regs[ins.k] + 1)
            self.pc += 1
        elif t is AssignInstr:
            self.store[ins.var] = eval_expr(ins.expr, self.store)
            self.pc += 1
        elif t is Branch:
            self.pc = ins.if_true if eval_expr(ins.cond, self.store) != 0 else ins.if_false
        elif t is Jump:
            self.pc = ins.target
        else:
            self.halted = True
        return emitted

    def run(self, fuel: int = DEFAULT_FUEL):
        while not self.halted:
            if self.steps >= fuel:
                raise FuelExhausted(self.steps)
            self.step()
        return self


def vm_index_state(machine: VmMachine) -> dict[int, int]:
    return machine.index_state()


def index_state_at(prog: VmProgram, store, addr: int, visit: int = 0, fuel: int = DEFAULT_FUEL):
    """Registers just after the ``visit``-th execution of the instruction at ``addr``."""
    m = VmMachine(prog, store)
    seen = 0
    while not m.halted and m.steps < fuel:
        here = m.pc
        m.step()
        if here == addr:
            if seen == visit:
                return m.index_state()
            seen += 1
    raise ValueError(f"instruction {addr} not executed {visit + 1} times")


# --- encoding for the execution kernels -------------------------------------

# instruction opcodes
OP_EMIT, OP_IND_RESET, OP_IND_INC, OP_ASSIGN, OP_BRANCH, OP_JUMP, OP_HALT = range(7)
# expression bytecode
(X_CONST, X_LOAD, X_ADD, X_SUB, X_MUL, X_MOD, X_LT, X_LE, X_GT, X_GE, X_EQ, X_NE,
 X_AND, X_OR, X_JZ, X_JMP, X_END) = range(17)

_XBIN = {"+": X_ADD, "-": X_SUB, "*": X_MUL, "%": X_MOD, "<": X_LT, "<=": X_LE,
         ">": X_GT, ">=": X_GE, "==": X_EQ, "!=": X_NE, "&&": X_AND, "||": X_OR}


@dataclass
class EncodedProgram:
    ops: np.ndarray
    arg1: np.ndarray
    arg2: np.ndarray
    arg3: np.ndarray
    code: np.ndarray
    lab_start: np.ndarray
    lab_len: np.ndarray
    lab_a: np.ndarray
    lab_b: np.ndarray
    labels: list[IndexedLabel]
    slots: dict[str, int]
    n_regs: int
    max_stack: int
    names: list[str] = field(default_factory=list)


def _compile_expr(e: Expr, code: list, slots: dict) -> int:
    """Append postfix bytecode for ``e``; return its stack depth."""
    t = type(e)
    if t is Num:
        code += (X_CONST, e.value)
        return 1
    if t is Var:
        code += (X_LOAD, slots[e.name])
        return 1
    if t is BinOp:
        d1 = _compile_expr(e.left, code, slots)
        d2 = _compile_expr(e.right, code, slots)
        code.append(_XBIN[e.op])
        return max(d1, d2 + 1)
    if t is Cond:
        d0 = _compile_expr(e.test, code, slots)
        code += (X_JZ, -1)
        jz = len(code) - 1
        d1 = _compile_expr(e.then, code, slots)
        code += (X_JMP, -1)
        jmp = len(code) - 1
        code[jz] = len(code)
        d2 = _compile_expr(e.orelse, code, slots)
        code[jmp] = len(code)
        return max(d0, d1, d2)
    raise TypeError(f"not an expression: {e!r}")


def encode(prog: VmProgram, extra_vars=()) -> EncodedProgram:
    names: list[str] = []
    slots: dict[str, int] = {}

    def slot(name):
        if name not in slots:
            slots[name] = len(names)
            names.append(name)

    for name in extra_vars:
        slot(name)
    for ins in prog.instrs:
        if isinstance(ins, AssignInstr):
            slot(ins.var)
            for v in sorted(expr_vars(ins.expr)):
                slot(v)
        elif isinstance(ins, Branch):
            for v in sorted(expr_vars(ins.cond)):
                slot(v)

    n = len(prog)
    ops = np.zeros(n, np.int64)
    a1 = np.zeros(n, np.int64)
    a2 = np.zeros(n, np.int64)
    a3 = np.zeros(n, np.int64)
    code: list[int] = []
    labels: list[IndexedLabel] = []
    lab_start, lab_len, lab_a, lab_b = [], [], [], []
    n_regs = 0
    max_stack = 1
    for addr, ins in enumerate(prog.instrs):
        t = type(ins)
        if t is Emit:
            ops[addr] = OP_EMIT
            a1[addr] = len(labels)
            labels.append(ins.label)
            lab_start.append(len(lab_a))
            lab_len.append(len(ins.label.indexing))
            for e in ins.label.indexing.entries:
                lab_a.append(e.a)
                lab_b.append(e.b)
            n_regs = max(n_regs, len(ins.label.indexing))
        elif t is IndReset or t is IndInc:
            ops[addr] = OP_IND_RESET if t is IndReset else OP_IND_INC
            a1[addr] = ins.k
            n_regs = max(n_regs, ins.k + 1)
        elif t is AssignInstr:
            ops[addr] = OP_ASSIGN
            a1[addr] = slots[ins.var]
            a2[addr] = len(code)
            max_stack = max(max_stack, _compile_expr(ins.expr, code, slots))
            code.append(X_END)
        elif t is Branch:
            ops[addr] = OP_BRANCH
            a1[addr] = len(code)
            a2[addr] = ins.if_true
            a3[addr] = ins.if_false
            max_stack = max(max_stack, _compile_expr(ins.cond, code, slots))
            code.append(X_END)
        elif t is Jump:
            ops[addr] = OP_JUMP
            a1[addr] = ins.target
        else:
            ops[addr] = OP_HALT

    def arr(xs):
        return np.asarray(xs if xs else [0], dtype=np.int64)

    return EncodedProgram(ops, a1, a2, a3, arr(code), arr(lab_start), arr(lab_len), arr(lab_a), arr(lab_b),
                          labels, slots, n_regs, max_stack, names)


def cost_vector(costs: dict[str, int]) -> np.ndarray:
    return np.asarray([costs[op] for op in OPCODES], dtype=np.int64)


# --- fast execution ----------------------------------------------------------


class VmResult:
    """Outcome of :func:`vm_run`; labels are materialised on first access."""

    def __init__(self, store: dict, cost: int, steps: int, raw_trace, labels):
        self.store = store
        self.cost = cost
        self.steps = steps
        self.raw_trace = raw_trace  # (static label id, index values) pairs
        self._labels = labels

    @cached_property
    def trace(self) -> list[IndexedLabel]:
        labels = self._labels
        return [IndexedLabel(labels[lid].atom, Indexing.constant(vals)) for lid, vals in self.raw_trace]

    @cached_property
    def sources(self) -> list[IndexedLabel]:
        """The static label behind each emission."""
        return [self._labels[lid] for lid, _ in self.raw_trace]


def vm_run(prog, store=None, fuel: int = DEFAULT_FUEL, costs=None, kernel=None) -> VmResult:
    """Run a program with the selected execution kernel.

    ``prog`` may be a :class:`VmProgram` or a pre-built :class:`EncodedProgram`
    (whose slots must cover the variables of ``store``).
    """
    from . import kernel as default_kernel

    kern = kernel or default_kernel.active()
    store = dict(store or {})
    enc = prog if isinstance(prog, EncodedProgram) else encode(prog, sorted(store))
    values = np.zeros(max(len(enc.names), 1), np.int64)
    written = np.zeros(max(len(enc.names), 1), np.int8)
    for name, v in store.items():
        values[enc.slots[name]] = check_int64(v)
        written[enc.slots[name]] = 1
    cv = cost_vector(costs or DEFAULT_COSTS)
    raw_trace, cost, steps = kern.run(
        enc.ops, enc.arg1, enc.arg2, enc.arg3, enc.code, enc.lab_start, enc.lab_len, enc.lab_a, enc.lab_b,
        enc.n_regs, values, written, cv, fuel, enc.max_stack,
    )
    final = {name: int(values[i]) for i, name in enumerate(enc.names) if written[i]}
    return VmResult(final, int(cost), int(steps), raw_trace, enc.labels)

