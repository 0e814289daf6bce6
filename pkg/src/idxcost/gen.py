"""Seeded random programs, transformation scripts and stores.

Every loop is a counting loop ``c := 0; while c < bound do { ...; c := c + 1 }``
whose counter is assigned nowhere else and whose bound is a constant or a
read-only input, so generated programs always terminate.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .syntax import SKIP, Assign, BinOp, Expr, If, Num, Seq, Stmt, Var, While
from .transform import Peel, Unroll, apply_step, list_indexed_loops


@dataclass(frozen=True)
class GenParams:
    max_depth: int = 4
    max_loops: int = 3  # nesting
    n_vars: int = 3
    n_inputs: int = 2
    max_bound: int = 4
    max_stmts: int = 3
    modulus: int = 97


class _Gen:
    def __init__(self, rng: random.Random, p: GenParams):
        self.rng = rng
        self.p = p
        self.counters = 0
        self.data = [f"x{j}" for j in range(p.n_vars)]
        self.inputs = [f"n{j}" for j in range(p.n_inputs)]

    def atom(self) -> Expr:
        r = self.rng.random()
        if r < 0.3:
            return Num(self.rng.randint(-3, 9))
        if r < 0.5 and self.inputs:
            return Var(self.rng.choice(self.inputs))
        return Var(self.rng.choice(self.data))

    def arith(self, depth: int = 2) -> Expr:
        if depth == 0 or self.rng.random() < 0.35:
            return self.atom()
        op = self.rng.choice(["+", "-", "*", "+"])
        return BinOp(op, self.arith(depth - 1), self.arith(depth - 1))

    def cond(self) -> Expr:
        r = self.rng.random()
        if r < 0.2:
            return BinOp("==", BinOp("%", self.arith(1), Num(self.rng.randint(2, 3))), Num(0))
        c = BinOp(self.rng.choice(["<", "<=", ">", ">=", "==", "!="]), self.arith(1), self.arith(1))
        if r > 0.85:
            c = BinOp(self.rng.choice(["&&", "||"]), c, BinOp("<", self.atom(), self.atom()))
        return c

    def assign(self) -> Stmt:
        # results are reduced modulo a small constant so values stay tiny
        return Assign(self.rng.choice(self.data), BinOp("%", self.arith(), Num(self.p.modulus)))

    def block(self, depth: int, loops: int) -> Stmt:
        n = self.rng.randint(1, self.p.max_stmts)
        out = [self.stmt(depth, loops) for _ in range(n)]
        s = out[-1]
        for x in reversed(out[:-1]):
            s = Seq(x, s)
        return s

    def stmt(self, depth: int, loops: int) -> Stmt:
        r = self.rng.random()
        if depth <= 0 or r < 0.35:
            return self.assign() if self.rng.random() < 0.9 else SKIP
        if r < 0.6 or loops >= self.p.max_loops:
            orelse = self.block(depth - 1, loops) if self.rng.random() < 0.6 else SKIP
            return If(self.cond(), self.block(depth - 1, loops), orelse)
        c = f"c{self.counters}"
        self.counters += 1
        if self.inputs and self.rng.random() < 0.5:
            bound: Expr = Var(self.rng.choice(self.inputs))
        else:
            bound = Num(self.rng.randint(0, self.p.max_bound))
        guard: Expr = BinOp("<", Var(c), bound)
        if self.rng.random() < 0.15:
            guard = BinOp("&&", guard, self.cond())
        body = Seq(self.block(depth - 1, loops + 1), Assign(c, BinOp("+", Var(c), Num(1))))
        return Seq(Assign(c, Num(0)), While(guard, body))


def random_program(seed: int, params: GenParams = GenParams()) -> Stmt:
    g = _Gen(random.Random(seed), params)
    return g.block(params.max_depth, 0)


def random_store(seed: int, params: GenParams = GenParams()) -> dict[str, int]:
    rng = random.Random(seed)
    store = {f"n{j}": rng.randint(0, params.max_bound) for j in range(params.n_inputs)}
    store.update({f"x{j}": rng.randint(-5, 20) for j in range(params.n_vars)})
    return store


def random_script(stmt: Stmt, seed: int, max_steps: int = 4):
    """Up to ``max_steps`` peel/unroll steps on loops of the evolving program."""
    rng = random.Random(seed)
    steps = []
    for _ in range(rng.randint(0, max_steps)):
        loops = list_indexed_loops(stmt)
        if not loops:
            break
        path, _ = rng.choice(loops)
        step = Peel(path) if rng.random() < 0.5 else Unroll(rng.choice([2, 3]), path)
        stmt = apply_step(stmt, step)
        steps.append(step)
    return steps
