"""Loop peeling and unrolling on indexed-labelled programs.

Loops are addressed by paths of child selectors from the root.  Both
transformations reindex the labels of every copy of the loop body so that
the original iteration can be reconstructed at run time.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Union

from .errors import BadPath, InvalidFactor, ScriptError
from .syntax import (
    SKIP,
    If,
    IndexedLabel,
    Labelled,
    Seq,
    SimpleExpr,
    Stmt,
    While,
    reindex_stmt,
)

SELECTORS = ("seqL", "seqR", "ifThen", "ifElse", "whileBody", "labelBody")

LoopPath = tuple[str, ...]


def parse_path(text: str) -> LoopPath:
    text = text.strip()
    if text in ("", ".", "/"):
        return ()
    steps = tuple(text.strip("/").split("/"))
    for sel in steps:
        if sel not in SELECTORS:
            raise BadPath(f"unknown selector {sel!r} in path {text!r}")
    return steps


def format_path(path: LoopPath) -> str:
    return "/".join(path) if path else "."


def _child(stmt: Stmt, sel: str) -> Stmt:
    if sel == "seqL" and isinstance(stmt, Seq):
        return stmt.first
    if sel == "seqR" and isinstance(stmt, Seq):
        return stmt.second
    if sel == "ifThen" and isinstance(stmt, If):
        return stmt.then
    if sel == "ifElse" and isinstance(stmt, If):
        return stmt.orelse
    if sel == "whileBody" and isinstance(stmt, While):
        return stmt.body
    if sel == "labelBody" and isinstance(stmt, Labelled):
        return stmt.body
    raise BadPath(f"selector {sel} does not apply to {type(stmt).__name__}")


def _with_child(stmt: Stmt, sel: str, new: Stmt) -> Stmt:
    if sel == "seqL":
        return Seq(new, stmt.second)
    if sel == "seqR":
        return Seq(stmt.first, new)
    if sel == "ifThen":
        return If(stmt.cond, new, stmt.orelse)
    if sel == "ifElse":
        return If(stmt.cond, stmt.then, new)
    if sel == "whileBody":
        return While(stmt.guard, new, stmt.index)
    return Labelled(stmt.label, new)


def get_at(stmt: Stmt, path: LoopPath) -> Stmt:
    for sel in path:
        stmt = _child(stmt, sel)
    return stmt


def replace_at(stmt: Stmt, path: LoopPath, new: Stmt) -> Stmt:
    if not path:
        return new
    child = _child(stmt, path[0])
    return _with_child(stmt, path[0], replace_at(child, path[1:], new))


def _indexed_loop(stmt: Stmt, path: LoopPath) -> While:
    node = get_at(stmt, path)
    if not isinstance(node, While) or node.index is None:
        raise BadPath(f"{format_path(path)} does not address an indexed loop")
    return node


def peel(stmt: Stmt, path: LoopPath) -> Stmt:
    """``i_k: while b do S`` becomes
    ``if b then { S.(i_k -> 0); i_k: while b do S.(i_k -> i_k+1) }``."""
    w = _indexed_loop(stmt, path)
    k = w.index
    first = reindex_stmt(w.body, k, SimpleExpr(0, 0, k))
    rest = While(w.guard, reindex_stmt(w.body, k, SimpleExpr(1, 1, k)), k)
    return replace_at(stmt, path, If(w.guard, Seq(first, rest), SKIP))


def unroll(stmt: Stmt, path: LoopPath, n: int) -> Stmt:
    """Replace the body by ``n`` copies, copy ``j`` reindexed by
    ``i_k -> n*i_k + j`` and every copy after the first guarded by the loop
    condition."""
    if n < 2:
        raise InvalidFactor(f"unroll factor must be at least 2, got {n}")
    w = _indexed_loop(stmt, path)
    k = w.index
    copies = [reindex_stmt(w.body, k, SimpleExpr(n, j, k)) for j in range(n)]
    tail = copies[-1]
    for c in reversed(copies[1:-1]):
        tail = Seq(c, If(w.guard, tail, SKIP))
    body = Seq(copies[0], If(w.guard, tail, SKIP))
    return replace_at(stmt, path, While(w.guard, body, k))


@dataclass(frozen=True)
class Peel:
    path: LoopPath

    def __str__(self):
        return f"peel {format_path(self.path)}"


@dataclass(frozen=True)
class Unroll:
    factor: int
    path: LoopPath

    def __post_init__(self):
        if self.factor < 2:
            raise InvalidFactor(f"unroll factor must be at least 2, got {self.factor}")

    def __str__(self):
        return f"unroll {self.factor} {format_path(self.path)}"


Step = Union[Peel, Unroll]


def parse_script(text: str) -> list[Step]:
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "peel" and len(words) in (1, 2):
                steps.append(Peel(parse_path(words[1] if len(words) == 2 else "")))
            elif words[0] == "unroll" and len(words) in (2, 3):
                steps.append(Unroll(int(words[1]), parse_path(words[2] if len(words) == 3 else "")))
            else:
                raise BadPath(f"cannot parse {line!r}")
        except (BadPath, InvalidFactor, ValueError) as exc:
            raise ScriptError(lineno, exc) from None
    return steps


def format_script(steps) -> str:
    return "".join(f"{s}\n" for s in steps)


def apply_step(stmt: Stmt, step: Step) -> Stmt:
    if isinstance(step, Peel):
        return peel(stmt, step.path)
    return unroll(stmt, step.path, step.factor)


def apply_script(stmt: Stmt, steps) -> Stmt:
    """Apply steps in order; each path addresses the already-transformed AST."""
    for pos, step in enumerate(steps, 1):
        try:
            stmt = apply_step(stmt, step)
        except (BadPath, InvalidFactor) as exc:
            raise ScriptError(pos, exc) from None
    return stmt


def list_indexed_loops(stmt: Stmt) -> list[tuple[LoopPath, int]]:
    out = []

    def walk(s, path):
        if isinstance(s, While):
            if s.index is not None:
                out.append((path, s.index))
            walk(s.body, path + ("whileBody",))
        elif isinstance(s, Seq):
            walk(s.first, path + ("seqL",))
            walk(s.second, path + ("seqR",))
        elif isinstance(s, If):
            walk(s.then, path + ("ifThen",))
            walk(s.orelse, path + ("ifElse",))
        elif isinstance(s, Labelled):
            walk(s.body, path + ("labelBody",))

    walk(stmt, ())
    return out


# --- non-overlap -------------------------------------------------------------


def images_disjoint(e1: SimpleExpr, e2: SimpleExpr) -> bool:
    """Whether ``{a1*x+b1}`` and ``{a2*y+b2}`` over the naturals never meet."""
    if e1.a == 0 and e2.a == 0:
        return e1.b != e2.b
    if e1.a == 0:
        e1, e2 = e2, e1
    if e2.a == 0:
        c = e2.b
        return not (c >= e1.b and (c - e1.b) % e1.a == 0)
    # both progressions are infinite upwards, so any integer solution of
    # a1*x - a2*y = b2 - b1 can be shifted to a natural one
    return (e2.b - e1.b) % gcd(e1.a, e2.a) != 0


@dataclass
class OverlapReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "non-overlap: ok"
        return "\n".join(["non-overlap: violated"] + [f"  {v}" for v in self.violations])


def _occurrences(stmt: Stmt):
    """``(label, enclosing indexed loops)`` pairs; loops are (path, index)."""
    out = []

    def walk(s, path, loops):
        if isinstance(s, Labelled):
            out.append((s.label, loops))
            walk(s.body, path + ("labelBody",), loops)
        elif isinstance(s, While):
            inner = loops + ((path, s.index),) if s.index is not None else loops
            walk(s.body, path + ("whileBody",), inner)
        elif isinstance(s, Seq):
            walk(s.first, path + ("seqL",), loops)
            walk(s.second, path + ("seqR",), loops)
        elif isinstance(s, If):
            walk(s.then, path + ("ifThen",), loops)
            walk(s.orelse, path + ("ifElse",), loops)

    walk(stmt, (), ())
    return out


def check_non_overlap(stmt: Stmt) -> OverlapReport:
    report = OverlapReport()
    occ = _occurrences(stmt)
    by_atom: dict[str, list] = {}
    for lab, loops in occ:
        by_atom.setdefault(lab.atom, []).append((lab, loops))

    for atom, items in by_atom.items():
        labels = [lab for lab, _ in items]
        for x in range(len(labels)):
            for y in range(x + 1, len(labels)):
                msg = _first_difference_violation(labels[x], labels[y])
                if msg:
                    report.violations.append(msg)

        # a label inside loop i_k and one outside it must not agree on i_0..i_k
        loops_here = {loop for _, loops in items for loop in loops}
        for loop in sorted(loops_here):
            _, k = loop
            inside = [lab for lab, loops in items if loop in loops]
            outside = [lab for lab, loops in items if loop not in loops]
            for i_lab in inside:
                for o_lab in outside:
                    ie, oe = i_lab.indexing.entries, o_lab.indexing.entries
                    if k >= min(len(ie), len(oe)) or ie[:k] != oe[:k]:
                        continue
                    if not images_disjoint(ie[k], oe[k]):
                        report.violations.append(
                            f"{i_lab} inside loop i{k} at {format_path(loop[0])} shares its prefix with {o_lab} outside"
                        )
    return report


def _first_difference_violation(l1: IndexedLabel, l2: IndexedLabel):
    e1, e2 = l1.indexing.entries, l2.indexing.entries
    if len(e1) != len(e2):
        return f"{l1} and {l2} have different indexing depths"
    for p in range(len(e1)):
        if e1[p] != e2[p]:
            if images_disjoint(e1[p], e2[p]):
                return None
            return f"{l1} and {l2} overlap at i{p}"
    return f"{l1} occurs more than once"
