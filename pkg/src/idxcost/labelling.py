"""Plain and indexed cost labelling, and the forgetful erasures."""
from __future__ import annotations

from itertools import count

from .errors import AlreadyLabelled
from .syntax import (
    SKIP,
    If,
    IndexedLabel,
    Indexing,
    Labelled,
    Seq,
    Stmt,
    While,
    iter_labels,
    map_labels,
)

TOP_ATOM = "_L0"


def _check_unlabelled(stmt: Stmt) -> None:
    stack = [stmt]
    while stack:
        s = stack.pop()
        if isinstance(s, Labelled):
            raise AlreadyLabelled(f"program already carries label {s.label}")
        if isinstance(s, While):
            if s.index is not None:
                raise AlreadyLabelled(f"loop already carries index i{s.index}")
            stack.append(s.body)
        elif isinstance(s, Seq):
            stack += (s.first, s.second)
        elif isinstance(s, If):
            stack += (s.then, s.orelse)


def _label(stmt: Stmt, depth: int, counter, indexed: bool) -> Stmt:
    def lab(atom, d):
        return IndexedLabel(atom, Indexing.identity(d) if indexed else Indexing())

    if isinstance(stmt, Seq):
        return Seq(_label(stmt.first, depth, counter, indexed), _label(stmt.second, depth, counter, indexed))
    if isinstance(stmt, If):
        n = next(counter)
        then = _label(stmt.then, depth, counter, indexed)
        orelse = _label(stmt.orelse, depth, counter, indexed)
        return If(stmt.cond, Labelled(lab(f"_a{n}", depth), then), Labelled(lab(f"_b{n}", depth), orelse))
    if isinstance(stmt, While):
        n = next(counter)
        body = _label(stmt.body, depth + 1, counter, indexed)
        loop = While(stmt.guard, Labelled(lab(f"_a{n}", depth + 1), body), depth if indexed else None)
        return Seq(loop, Labelled(lab(f"_b{n}", depth), SKIP))
    return stmt


def label_plain(program: Stmt) -> Stmt:
    """Labels with empty indexings at the head, at both arms of every
    conditional, inside every loop body and after every loop."""
    _check_unlabelled(program)
    return Labelled(IndexedLabel(TOP_ATOM), _label(program, 0, count(1), indexed=False))


def label_indexed(program: Stmt) -> Stmt:
    """Like :func:`label_plain`, but a loop nested in ``k`` others gets index
    ``i_k`` and every label carries the identity indexing of its depth."""
    _check_unlabelled(program)
    return Labelled(IndexedLabel(TOP_ATOM), _label(program, 0, count(1), indexed=True))


def strip_labels(stmt: Stmt) -> Stmt:
    """Erase every label and loop index."""
    if isinstance(stmt, Labelled):
        return strip_labels(stmt.body)
    if isinstance(stmt, Seq):
        return Seq(strip_labels(stmt.first), strip_labels(stmt.second))
    if isinstance(stmt, If):
        return If(stmt.cond, strip_labels(stmt.then), strip_labels(stmt.orelse))
    if isinstance(stmt, While):
        return While(stmt.guard, strip_labels(stmt.body))
    return stmt


def erase_indexings(stmt: Stmt) -> Stmt:
    """Keep the labels but forget indexings and loop indexes."""
    def drop(s):
        if isinstance(s, While):
            return While(s.guard, drop(s.body))
        if isinstance(s, Seq):
            return Seq(drop(s.first), drop(s.second))
        if isinstance(s, If):
            return If(s.cond, drop(s.then), drop(s.orelse))
        if isinstance(s, Labelled):
            return Labelled(s.label, drop(s.body))
        return s

    return drop(map_labels(stmt, lambda lab: IndexedLabel(lab.atom)))


def label_depths(stmt: Stmt) -> dict[str, int]:
    """Indexing length of each atom occurring in ``stmt``."""
    return {lab.atom: len(lab.indexing) for lab in iter_labels(stmt)}
