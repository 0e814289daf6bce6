"""Abstract syntax and the indexed-label algebra.

One statement AST serves three language levels: plain programs (no labels,
no loop indexes), plainly labelled programs (labels with empty indexings)
and indexed-labelled programs (full indexings, indexed loops).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

from .errors import (
    ArithmeticOverflow,
    IndexOutOfScope,
    InvalidComparison,
    InvalidComposition,
    UndefinedEvaluation,
)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED_RE = re.compile(r"__cost\Z|__idx[0-9]+\Z")

COST_VAR = "__cost"


def index_var(k: int) -> str:
    return f"__idx{k}"


def is_reserved(name: str) -> bool:
    return RESERVED_RE.match(name) is not None


def check_int64(value: int) -> int:
    if value < INT64_MIN or value > INT64_MAX:
        raise ArithmeticOverflow(f"value {value} outside signed 64-bit range")
    return value


# --- expressions -------------------------------------------------------------

# Binary operators, loosest first. Comparisons and booleans yield 0/1.
BINARY_OPS = ("||", "&&", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "%")


@dataclass(frozen=True, slots=True)
class Num:
    value: int


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True, slots=True)
class Cond:
    """C-like ternary ``test ? then : orelse``; only the chosen arm is evaluated."""

    test: Expr
    then: Expr
    orelse: Expr


Expr = Union[Num, Var, BinOp, Cond]


# --- simple expressions and indexings ----------------------------------------


@dataclass(frozen=True, slots=True)
class SimpleExpr:
    """The affine map ``a*i_k + b`` with natural coefficients."""

    a: int
    b: int
    k: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.k < 0:
            raise ValueError(f"negative coefficient in simple expression {self}")

    @classmethod
    def const(cls, c: int, k: int) -> SimpleExpr:
        return cls(0, c, k)

    @classmethod
    def ident(cls, k: int) -> SimpleExpr:
        return cls(1, 0, k)

    @property
    def is_const(self) -> bool:
        return self.a == 0

    def __str__(self):
        if self.a == 0:
            return str(self.b)
        head = f"i{self.k}" if self.a == 1 else f"{self.a}*i{self.k}"
        return head if self.b == 0 else f"{head}+{self.b}"


def compose_simple(e1: SimpleExpr, e2: SimpleExpr) -> SimpleExpr:
    """Substitute ``e2`` for the index of ``e1``."""
    if e1.k != e2.k:
        raise InvalidComposition(f"cannot compose {e1} on i{e1.k} with {e2} on i{e2.k}")
    return SimpleExpr(e1.a * e2.a, e1.a * e2.b + e1.b, e1.k)


def eval_simple(e: SimpleExpr, c: int) -> int:
    return check_int64(e.a * c + e.b)


def lex_le(e1: SimpleExpr, e2: SimpleExpr) -> bool:
    if e1.k != e2.k:
        raise InvalidComparison(f"cannot compare expressions on i{e1.k} and i{e2.k}")
    return (e1.a, e1.b) <= (e2.a, e2.b)


@dataclass(frozen=True, slots=True)
class Indexing:
    """Simple expressions for the consecutive indexes ``i_start, i_start+1, ...``."""

    entries: tuple[SimpleExpr, ...] = ()
    start: int = 0

    def __post_init__(self):
        for j, e in enumerate(self.entries):
            if e.k != self.start + j:
                raise ValueError(f"entry {j} of indexing maps i{self.start + j} to an expression on i{e.k}")

    @classmethod
    def identity(cls, depth: int) -> Indexing:
        return cls(tuple(SimpleExpr.ident(k) for k in range(depth)))

    @classmethod
    def constant(cls, values) -> Indexing:
        return cls(tuple(SimpleExpr.const(c, k) for k, c in enumerate(values)))

    def __len__(self):
        return len(self.entries)

    @property
    def is_identity(self) -> bool:
        return self.start == 0 and all(e.a == 1 and e.b == 0 for e in self.entries)

    @property
    def is_constant(self) -> bool:
        return all(e.a == 0 for e in self.entries)

    def values(self) -> tuple[int, ...]:
        if not self.is_constant:
            raise UndefinedEvaluation(f"indexing {self} is not constant")
        return tuple(e.b for e in self.entries)

    def __str__(self):
        return ", ".join(str(e) for e in self.entries)


@dataclass(frozen=True, slots=True)
class IndexedLabel:
    atom: str
    indexing: Indexing = Indexing()

    def __str__(self):
        return f"{self.atom}<{self.indexing}>"

    def trace_str(self) -> str:
        """Compact rendering used in trace files, e.g. ``_a2<2,1>``."""
        return f"{self.atom}<{','.join(str(e) for e in self.indexing.entries)}>"


# A runtime snapshot of loop counters; absent keys are unset indexes.
ConstantIndexing = Mapping[int, int]


def reindex_label(label: IndexedLabel, k: int, f: SimpleExpr) -> IndexedLabel:
    entries = label.indexing.entries
    if not 0 <= k < len(entries):
        raise IndexOutOfScope(f"i{k} is outside the domain of {label}")
    new = entries[:k] + (compose_simple(entries[k], f),) + entries[k + 1:]
    return IndexedLabel(label.atom, Indexing(new))


def eval_label(label: IndexedLabel, cidx: ConstantIndexing) -> IndexedLabel:
    """Instantiate ``label`` at the runtime indexes; constant entries need no value."""
    out = []
    for e in label.indexing.entries:
        if e.a == 0:
            out.append(e)
        elif e.k in cidx:
            out.append(SimpleExpr(0, eval_simple(e, cidx[e.k]), e.k))
        else:
            raise UndefinedEvaluation(f"{label} is not constant under {dict(cidx)}")
    return IndexedLabel(label.atom, Indexing(tuple(out)))


# --- statements --------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Skip:
    pass


@dataclass(frozen=True, slots=True)
class Seq:
    first: Stmt
    second: Stmt


@dataclass(frozen=True, slots=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class If:
    cond: Expr
    then: Stmt
    orelse: Stmt = Skip()


@dataclass(frozen=True, slots=True)
class While:
    guard: Expr
    body: Stmt
    index: Optional[int] = None


@dataclass(frozen=True, slots=True)
class Labelled:
    label: IndexedLabel
    body: Stmt


Stmt = Union[Skip, Seq, Assign, If, While, Labelled]

SKIP = Skip()


def seq(*stmts: Stmt) -> Stmt:
    """Right-nested sequence of ``stmts``; ``skip`` when empty."""
    if not stmts:
        return SKIP
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out)
    return out


def map_labels(stmt: Stmt, fn) -> Stmt:
    """Rebuild ``stmt`` with every label replaced by ``fn(label)``."""
    if isinstance(stmt, Labelled):
        return Labelled(fn(stmt.label), map_labels(stmt.body, fn))
    if isinstance(stmt, Seq):
        return Seq(map_labels(stmt.first, fn), map_labels(stmt.second, fn))
    if isinstance(stmt, If):
        return If(stmt.cond, map_labels(stmt.then, fn), map_labels(stmt.orelse, fn))
    if isinstance(stmt, While):
        return While(stmt.guard, map_labels(stmt.body, fn), stmt.index)
    return stmt


def reindex_stmt(stmt: Stmt, k: int, f: SimpleExpr) -> Stmt:
    return map_labels(stmt, lambda lab: reindex_label(lab, k, f))


def iter_labels(stmt: Stmt) -> Iterator[IndexedLabel]:
    """Labels of ``stmt`` in preorder."""
    stack = [stmt]
    while stack:
        s = stack.pop()
        if isinstance(s, Labelled):
            yield s.label
            stack.append(s.body)
        elif isinstance(s, Seq):
            stack.append(s.second)
            stack.append(s.first)
        elif isinstance(s, If):
            stack.append(s.orelse)
            stack.append(s.then)
        elif isinstance(s, While):
            stack.append(s.body)


def stmt_size(stmt: Stmt) -> int:
    n = 0
    stack = [stmt]
    while stack:
        s = stack.pop()
        n += 1
        if isinstance(s, Seq):
            stack += (s.first, s.second)
        elif isinstance(s, If):
            stack += (s.then, s.orelse)
        elif isinstance(s, (While, Labelled)):
            stack.append(s.body)
    return n


def expr_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, BinOp):
        return expr_vars(e.left) | expr_vars(e.right)
    if isinstance(e, Cond):
        return expr_vars(e.test) | expr_vars(e.then) | expr_vars(e.orelse)
    return set()


def stmt_vars(stmt: Stmt) -> set[str]:
    out: set[str] = set()
    stack = [stmt]
    while stack:
        s = stack.pop()
        if isinstance(s, Assign):
            out.add(s.var)
            out |= expr_vars(s.expr)
        elif isinstance(s, Seq):
            stack += (s.first, s.second)
        elif isinstance(s, If):
            out |= expr_vars(s.cond)
            stack += (s.then, s.orelse)
        elif isinstance(s, While):
            out |= expr_vars(s.guard)
            stack.append(s.body)
        elif isinstance(s, Labelled):
            stack.append(s.body)
    return out
