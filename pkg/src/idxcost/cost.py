"""Static block costs over the VM control-flow graph.

A block starts at an ``EMIT`` and extends along every path until the next
``EMIT`` (excluded) or through ``HALT``.  The emit instruction's own cost is
charged to its block, so the per-run identity

    actual_cost == prefix + sum(kappa[label] for label in trace)

holds for any cost model.
"""
from __future__ import annotations

import graphlib
import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, PrecisenessError, SoundnessError
from .syntax import IndexedLabel
from .textio import parse_label
from .vm import DEFAULT_COSTS, Emit, Halt, VmProgram, successors


@dataclass(frozen=True)
class SoundnessReport:
    cycle: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.cycle

    def __str__(self):
        if self.ok:
            return "soundness: ok"
        return "soundness: violated, label-free cycle through " + " -> ".join(map(str, self.cycle))


def check_soundness(prog: VmProgram) -> SoundnessReport:
    """Look for a control-flow cycle that avoids every ``EMIT``."""
    ts = graphlib.TopologicalSorter()
    for addr, ins in enumerate(prog.instrs):
        if isinstance(ins, Emit):
            continue
        ts.add(addr)
        for s in successors(ins, addr):
            if not isinstance(prog[s], Emit):
                ts.add(s, addr)
    try:
        ts.prepare()
    except graphlib.CycleError as exc:
        return SoundnessReport(tuple(exc.args[1]))
    return SoundnessReport()


@dataclass(frozen=True)
class BlockCost:
    """Cost range of the block headed at ``addr`` with witness paths."""

    addr: int
    label: Optional[IndexedLabel]
    min_cost: int
    max_cost: int
    min_path: tuple[int, ...]
    max_path: tuple[int, ...]

    @property
    def precise(self) -> bool:
        return self.min_cost == self.max_cost


@dataclass
class CostAnalysis:
    kmap: dict[IndexedLabel, int]
    blocks: list[BlockCost]
    prefix: BlockCost
    mode: str
    imprecise: list[BlockCost] = field(default_factory=list)

    @property
    def precise(self) -> bool:
        return not self.imprecise and self.prefix.precise

    def report(self) -> str:
        lines = [f"blocks: {len(self.blocks)}, imprecise: {len(self.imprecise)}"]
        if self.prefix.max_cost:
            lines.append(f"entry prefix cost: {self.prefix.min_cost}..{self.prefix.max_cost}")
        for b in self.imprecise:
            lines.append(
                f"  {b.label} @ {b.addr}: min {b.min_cost} via {_fmt_path(b.min_path)}, "
                f"max {b.max_cost} via {_fmt_path(b.max_path)}"
            )
        return "\n".join(lines)


def _fmt_path(path):
    return "[" + " ".join(map(str, path)) + "]"


def _block_ranges(prog: VmProgram, costs: dict[str, int]):
    """Min/max cost from each non-emit address to the end of its block."""
    cost = [costs[ins.opcode] for ins in prog.instrs]
    lo: dict[int, tuple[int, int]] = {}
    hi: dict[int, tuple[int, int]] = {}

    # reverse topological order over the emit-free subgraph
    ts = graphlib.TopologicalSorter()
    for addr, ins in enumerate(prog.instrs):
        if isinstance(ins, Emit):
            continue
        ts.add(addr)
        for s in successors(ins, addr):
            if not isinstance(prog[s], Emit):
                ts.add(addr, s)
    for addr in ts.static_order():
        ins = prog[addr]
        if isinstance(ins, Halt):
            lo[addr] = hi[addr] = (cost[addr], -1)
            continue
        best_lo = best_hi = None
        for s in successors(ins, addr):
            v = (0, -1) if isinstance(prog[s], Emit) else None
            vlo = v or lo[s]
            vhi = v or hi[s]
            if best_lo is None or vlo[0] < best_lo[0]:
                best_lo = (vlo[0], s)
            if best_hi is None or vhi[0] > best_hi[0]:
                best_hi = (vhi[0], s)
        lo[addr] = (cost[addr] + best_lo[0], best_lo[1])
        hi[addr] = (cost[addr] + best_hi[0], best_hi[1])
    return cost, lo, hi


def _walk(prog, table, start):
    path = []
    addr = start
    while addr != -1 and not isinstance(prog[addr], Emit):
        path.append(addr)
        addr = table[addr][1]
    return tuple(path)


def compute_kappa(prog: VmProgram, costs: Optional[dict[str, int]] = None, mode: str = "strict") -> CostAnalysis:
    if mode not in ("strict", "sound"):
        raise ValueError(f"mode must be strict or sound, not {mode!r}")
    costs = costs or DEFAULT_COSTS
    sound = check_soundness(prog)
    if not sound.ok:
        raise SoundnessError(str(sound))
    cost, lo, hi = _block_ranges(prog, costs)

    def block(addr, label, start):
        own, head = (cost[addr], (addr,)) if label is not None else (0, ())
        if isinstance(prog[start], Emit):
            return BlockCost(addr, label, own, own, head, head)
        return BlockCost(
            addr, label, own + lo[start][0], own + hi[start][0],
            head + _walk(prog, lo, start), head + _walk(prog, hi, start),
        )

    prefix = BlockCost(0, None, 0, 0, (), ()) if isinstance(prog[0], Emit) else block(0, None, 0)
    blocks = [block(a, ins.label, a + 1) for a, ins in enumerate(prog.instrs) if isinstance(ins, Emit)]

    kmap: dict[IndexedLabel, int] = {}
    imprecise = [b for b in blocks if not b.precise]
    for b in blocks:
        if b.label in kmap and kmap[b.label] != b.max_cost:
            # the same static label heads two blocks of different cost
            imprecise.append(b)
        kmap[b.label] = max(kmap.get(b.label, 0), b.max_cost)
    if mode == "strict" and (imprecise or not prefix.precise):
        what = imprecise[0] if imprecise else prefix
        raise PrecisenessError(
            f"block of {what.label or 'program entry'} at {what.addr} costs between "
            f"{what.min_cost} and {what.max_cost} (paths {_fmt_path(what.min_path)} / {_fmt_path(what.max_path)})"
        )
    return CostAnalysis(kmap, blocks, prefix, mode, imprecise)


def collapse_to_atoms(kmap: dict[IndexedLabel, int]) -> dict[str, int]:
    out: dict[str, int] = {}
    for label, c in kmap.items():
        out[label.atom] = max(out.get(label.atom, 0), c)
    return out


# --- serialisation -----------------------------------------------------------


def format_costmap(kmap: dict[IndexedLabel, int]) -> str:
    return "".join(f"{lab} = {c}\n" for lab, c in sorted(kmap.items(), key=lambda kv: _label_key(kv[0])))


def _label_key(lab: IndexedLabel):
    return (lab.atom, [(e.a, e.b) for e in lab.indexing.entries])


def parse_costmap(text: str) -> dict[IndexedLabel, int]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        lab, sep, val = line.rpartition("=")
        if not sep:
            raise ParseError(f"expected 'label = cost', got {line!r}", lineno, 1)
        try:
            c = int(val)
        except ValueError:
            raise ParseError(f"bad cost {val.strip()!r}", lineno, 1) from None
        if c < 0:
            raise ParseError("costs are natural numbers", lineno, 1)
        out[parse_label(lab.strip())] = c
    return out


def analysis_json(an: CostAnalysis) -> str:
    bad = {b.addr for b in an.imprecise}
    return json.dumps(
        {
            "mode": an.mode,
            "precise": an.precise,
            "prefix": {"min": an.prefix.min_cost, "max": an.prefix.max_cost},
            "blocks": [
                {
                    "addr": b.addr,
                    "label": str(b.label),
                    "cost": an.kmap[b.label],
                    "min": b.min_cost,
                    "max": b.max_cost,
                    "precise": b.addr not in bad,
                    "min_path": list(b.min_path),
                    "max_path": list(b.max_path),
                }
                for b in an.blocks
            ],
        },
        indent=2,
    )
