"""Costs that depend on loop iteration counters.

A label duplicated by loop transformations has one static occurrence per
indexing, each with its own block cost.  ``build_dependent`` folds all
occurrences of an atom into one nested conditional over the source loop
indexes, so the source program can be charged the right block cost on every
iteration.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Callable, Iterable, Mapping, Optional, Union

from .errors import IncompleteCostMap, UndefinedCondition
from .syntax import BinOp, Cond, Expr, IndexedLabel, Indexing, Num, SimpleExpr, Var, index_var
from .textio import format_expr


# --- simple conditions -------------------------------------------------------


@dataclass(frozen=True)
class Eq:
    index: int
    n: int

    def holds(self, x: int) -> bool:
        return x == self.n


@dataclass(frozen=True)
class Ge:
    index: int
    n: int

    def holds(self, x: int) -> bool:
        return x >= self.n


@dataclass(frozen=True)
class ModEq:
    """``i mod a == b`` and, unless ``n`` is None, ``i >= n``."""

    index: int
    a: int
    b: int
    n: Optional[int]

    def __post_init__(self):
        if self.a < 2 or not 0 <= self.b < self.a:
            raise ValueError(f"bad congruence {self.b} mod {self.a}")

    def holds(self, x: int) -> bool:
        return x % self.a == self.b and (self.n is None or x >= self.n)


SimpleCondition = Union[Eq, Ge, ModEq]


def cond_of_expr(e: SimpleExpr) -> SimpleCondition:
    """The condition satisfied exactly by the values ``e`` takes on the naturals."""
    if e.a == 0:
        return Eq(e.k, e.b)
    if e.a == 1:
        return Ge(e.k, e.b)
    return ModEq(e.k, e.a, e.b % e.a, e.b)


def cond_holds(p: SimpleCondition, cidx: Mapping[int, int]) -> bool:
    if p.index not in cidx:
        raise UndefinedCondition(f"index i{p.index} has no value")
    return p.holds(cidx[p.index])


# --- dependent costs ---------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: Union[int, str]  # str only for symbolic display


@dataclass(frozen=True)
class Ternary:
    cond: SimpleCondition
    then: "DependentCost"
    orelse: "DependentCost"


DependentCost = Union[Const, Ternary]


def eval_dependent(k: DependentCost, cidx: Mapping[int, int]):
    while isinstance(k, Ternary):
        k = k.then if cond_holds(k.cond, cidx) else k.orelse
    return k.value


def cond_to_expr(p: SimpleCondition, var_of: Callable[[int], str] = index_var) -> Expr:
    v = Var(var_of(p.index))
    if isinstance(p, Eq):
        return BinOp("==", v, Num(p.n))
    if isinstance(p, Ge):
        return BinOp(">=", v, Num(p.n))
    cong = BinOp("==", BinOp("%", v, Num(p.a)), Num(p.b))
    return cong if p.n is None else BinOp("&&", cong, BinOp(">=", v, Num(p.n)))


def to_expr(k: DependentCost, var_of: Callable[[int], str] = index_var) -> Expr:
    if isinstance(k, Const):
        return Var(k.value) if isinstance(k.value, str) else Num(k.value)
    return Cond(cond_to_expr(k.cond, var_of), to_expr(k.then, var_of), to_expr(k.orelse, var_of))


def format_dependent(k: DependentCost) -> str:
    return format_expr(to_expr(k, lambda i: f"i{i}"))


def indexes_of(k: DependentCost) -> set[int]:
    if isinstance(k, Const):
        return set()
    return {k.cond.index} | indexes_of(k.then) | indexes_of(k.orelse)


# --- the classification of indexing sets -------------------------------------


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class SingletonEmpty:
    pass


@dataclass(frozen=True)
class Split:
    head: SimpleExpr
    matching: frozenset  # tails of the members starting with head
    rest: frozenset  # members starting with something else


def _lex_key(e: SimpleExpr):
    return (e.a, e.b)


def classify(s: Iterable[tuple[SimpleExpr, ...]]):
    s = frozenset(s)
    if not s:
        return Empty()
    if s == {()}:
        return SingletonEmpty()
    if () in s:
        raise ValueError("indexings in one set must share a domain")
    head = min((ix[0] for ix in s), key=_lex_key)
    return Split(
        head,
        frozenset(ix[1:] for ix in s if ix[0] == head),
        frozenset(ix for ix in s if ix[0] != head),
    )


def occurrences(atom: str, labels: Iterable[IndexedLabel]) -> list[IndexedLabel]:
    return sorted({lab for lab in labels if lab.atom == atom}, key=lambda l: [_lex_key(e) for e in l.indexing.entries])


def build_dependent(atom: str, kmap: Mapping[IndexedLabel, object], labels=None) -> DependentCost:
    """Fold the costs of all occurrences of ``atom`` into one conditional.

    ``labels`` lists the static occurrences; it defaults to the keys of
    ``kmap`` carrying ``atom``.
    """
    occ = occurrences(atom, kmap if labels is None else labels)
    for lab in occ:
        if lab not in kmap:
            raise IncompleteCostMap(f"no cost for {lab}")

    def go(prefix: tuple, s: frozenset) -> DependentCost:
        c = classify(s)
        if isinstance(c, Empty):
            return Const(0)
        if isinstance(c, SingletonEmpty):
            start = prefix[0].k if prefix else 0
            return Const(kmap[IndexedLabel(atom, Indexing(prefix, start) if prefix else Indexing(()))])
        return Ternary(cond_of_expr(c.head), go(prefix + (c.head,), c.matching), go(prefix, c.rest))

    return go((), frozenset(lab.indexing.entries for lab in occ))


def symbolic_costs(atom: str, labels) -> dict[IndexedLabel, str]:
    """Letters ``a``, ``b``, ... for the occurrences of ``atom`` in lexicographic order."""
    occ = occurrences(atom, labels)
    if len(occ) > 26:
        raise ValueError("too many occurrences for single-letter names")
    return {lab: chr(ord("a") + j) for j, lab in enumerate(occ)}


# --- simplification ----------------------------------------------------------


@dataclass(frozen=True)
class _Set:
    """Naturals below the threshold listed explicitly; above it, residues."""

    low: frozenset
    high: frozenset


class _Domain:
    """Exact set algebra for the conditions occurring in one expression.

    With ``t`` above every constant and ``p`` a common multiple of every
    modulus, membership of ``x >= t`` depends only on ``x % p``.
    """

    def __init__(self, conds):
        self.t = 1 + max([c.n or 0 for c in conds] + [c.b for c in conds if isinstance(c, ModEq)] + [0])
        self.p = lcm(*[c.a for c in conds if isinstance(c, ModEq)], 1)

    def full(self) -> _Set:
        return _Set(frozenset(range(self.t)), frozenset(range(self.p)))

    def of(self, c: SimpleCondition) -> _Set:
        return _Set(
            frozenset(x for x in range(self.t) if c.holds(x)),
            frozenset(r for r in range(self.p) if c.holds(self.t + (r - self.t) % self.p)),
        )

    @staticmethod
    def inter(x: _Set, y: _Set) -> _Set:
        return _Set(x.low & y.low, x.high & y.high)

    @staticmethod
    def minus(x: _Set, y: _Set) -> _Set:
        return _Set(x.low - y.low, x.high - y.high)

    @staticmethod
    def empty(x: _Set) -> bool:
        return not x.low and not x.high


def _conds(k: DependentCost) -> list:
    if isinstance(k, Const):
        return []
    return [k.cond] + _conds(k.then) + _conds(k.orelse)


def _weaker_forms(c: SimpleCondition):
    if isinstance(c, ModEq) and c.n is not None:
        yield ModEq(c.index, c.a, c.b, None)


def simplify(k: DependentCost, merge: bool = True) -> DependentCost:
    """Remove tests whose outcome is fixed by the tests above them.

    Every index ranges over all naturals; no trip-count facts are used, so
    the result agrees with ``k`` on every constant indexing.
    """
    conds = _conds(k)
    if not conds:
        return k
    dom = _Domain(conds)

    def go(k, ctx: dict):
        if isinstance(k, Const):
            return k
        c = k.cond
        here = ctx.get(c.index, dom.full())
        yes = dom.of(c)
        inside = dom.inter(here, yes)
        if dom.empty(dom.minus(here, yes)):
            return go(k.then, ctx)
        if dom.empty(inside):
            return go(k.orelse, ctx)
        for weaker in _weaker_forms(c):
            if dom.inter(here, dom.of(weaker)) == inside:
                c = weaker
        then = go(k.then, {**ctx, c.index: inside})
        orelse = go(k.orelse, {**ctx, c.index: dom.minus(here, yes)})
        if merge and then == orelse:
            return then
        return Ternary(c, then, orelse)

    return go(k, {})
