"""Command-line driver: ``idxcost <command> [flags]``.

Exit status is 0 on success, 1 when a check or analysis fails (or the
program fails at run time), and 2 for usage, input and parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import kernel as kernels
from .cost import analysis_json, check_soundness, collapse_to_atoms, compute_kappa, format_costmap
from .dependent import build_dependent, format_dependent, simplify, symbolic_costs
from .errors import BadPath, IdxCostError, ParseError, PrecisenessError, ScriptError, SoundnessError
from .harness import verify
from .instrument import instrument_indexed, instrument_plain
from .labelling import erase_indexings, label_depths, label_indexed, label_plain
from .semantics import DEFAULT_FUEL, run
from .syntax import IDENT_RE, Stmt, is_reserved, iter_labels
from .textio import format_trace, parse_stmt, pretty_print
from .transform import apply_script, check_non_overlap, parse_script
from .vm import format_listing, load_cost_model, looks_like_listing, lower, parse_listing, vm_run

INPUT_ERRORS = (ParseError, ScriptError, BadPath, OSError, ValueError)


class UsageError(Exception):
    pass


_stdin_text: str | None = None


def _read(path: str) -> str:
    global _stdin_text
    if path == "-":
        # several commands look at their input twice
        if _stdin_text is None:
            _stdin_text = sys.stdin.read()
        return _stdin_text
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _parse_store(items) -> dict[str, int]:
    store: dict[str, int] = {}
    for item in items or ():
        for part in item.split(","):
            if not part.strip():
                continue
            name, sep, value = part.partition("=")
            name = name.strip()
            if not sep or not IDENT_RE.match(name) or is_reserved(name):
                raise UsageError(f"bad store entry {part!r}")
            try:
                store[name] = int(value)
            except ValueError:
                raise UsageError(f"bad value in store entry {part!r}") from None
    return store


def _has_labels(stmt: Stmt) -> bool:
    return next(iter_labels(stmt), None) is not None


def _source(args, indexed: bool = False, allow_reserved: bool = False) -> tuple[Stmt, Stmt]:
    """(labelled source, labelled source after the optional script).

    Unlabelled input is labelled first, plainly only if asked to and
    ``indexed`` is not forced.
    """
    stmt = parse_stmt(_read(args.file), allow_reserved)
    if not _has_labels(stmt):
        stmt = label_plain(stmt) if args.plain and not indexed else label_indexed(stmt)
    target = stmt
    if getattr(args, "script", None):
        target = apply_script(stmt, parse_script(_read(args.script)))
    return stmt, target


def _costs(args):
    return load_cost_model(_read(args.costs) if getattr(args, "costs", None) else None)


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")


# --- commands ----------------------------------------------------------------


def cmd_label(args) -> int:
    stmt = parse_stmt(_read(args.file))
    _emit(pretty_print(label_plain(stmt) if args.plain else label_indexed(stmt)))
    return 0


def cmd_transform(args) -> int:
    if not args.script:
        raise UsageError("transform needs --script")
    _, target = _source(args)
    report = check_non_overlap(target)
    if args.json:
        _emit(json.dumps({"program": pretty_print(target), "non_overlap": report.ok,
                          "violations": report.violations}, indent=2))
    else:
        _emit(pretty_print(target))
        _emit("".join(f"# {line}\n" for line in str(report).splitlines()))
    return 0 if report.ok else 1


def cmd_compile(args) -> int:
    _, target = _source(args)
    _emit(format_listing(lower(target, thread=not args.naive)))
    return 0


def cmd_analyze(args) -> int:
    text = _read(args.file)
    if looks_like_listing(text):
        prog = parse_listing(text)
    else:
        _, target = _source(args)
        prog = lower(target, thread=not args.naive)
    sound = check_soundness(prog)
    if not sound.ok:
        _emit(json.dumps({"sound": False, "cycle": list(sound.cycle)}) if args.json else str(sound))
        return 1
    try:
        an = compute_kappa(prog, _costs(args), args.mode)
    except PrecisenessError as exc:
        _emit(json.dumps({"precise": False, "error": str(exc)}) if args.json else f"preciseness: violated, {exc}")
        return 1
    if args.json:
        _emit(analysis_json(an))
    else:
        _emit(format_costmap(an.kmap) + "# " + "\n# ".join(an.report().splitlines()))
        if args.atoms:
            _emit("".join(f"{a} = {c}\n" for a, c in sorted(collapse_to_atoms(an.kmap).items())))
    return 0


def cmd_annotate(args) -> int:
    # costs always come from the indexed pipeline; --plain only picks the instrumentation
    source, target = _source(args, indexed=True)
    atoms = sorted(label_depths(source))
    labels = list(iter_labels(target))
    if args.symbolic:
        out = []
        for atom in atoms:
            names = symbolic_costs(atom, labels)
            dep = build_dependent(atom, names, labels)
            shown = dep if args.no_simplify else simplify(dep, merge=False)
            out.append(f"{atom} = {format_dependent(shown)}")
            out.extend(f"#   {letter} = {lab}" for lab, letter in names.items())
        _emit("\n".join(out))
        return 0
    an = compute_kappa(lower(target), _costs(args), args.mode)
    if args.plain:
        inst = instrument_plain(erase_indexings(source), collapse_to_atoms(an.kmap))
    else:
        deps = {a: build_dependent(a, an.kmap, labels) for a in atoms}
        if not args.no_simplify:
            deps = {a: simplify(k) for a, k in deps.items()}
        inst = instrument_indexed(source, deps)
    _emit(pretty_print(inst.program))
    return 0


def cmd_run(args) -> int:
    store = _parse_store(args.store)
    text = _read(args.file)
    kern = kernels.get(args.kernel) if args.kernel != "auto" else None
    if looks_like_listing(text):
        res = vm_run(parse_listing(text), store, args.fuel, _costs(args), kern)
        trace, final, cost, steps = res.trace, res.store, res.cost, res.steps
    else:
        # instrumented programs use the reserved cost and index variables
        _, target = _source(args, allow_reserved=True)
        src = run(target, store, args.fuel)
        res = vm_run(lower(target), store, args.fuel, _costs(args), kern)
        if res.trace != src.trace or res.store != src.store:
            print("error: compiled code disagrees with the source semantics", file=sys.stderr)
            return 1
        trace, final, cost, steps = src.trace, src.store, res.cost, src.steps
    if args.json:
        _emit(json.dumps({"trace": [l.trace_str() for l in trace], "store": final,
                          "cost": cost, "steps": steps}, indent=2))
    else:
        _emit(format_trace(trace))
        _emit("# store: " + " ".join(f"{k}={v}" for k, v in sorted(final.items())))
        _emit(f"# cost: {cost}")
    return 0


def cmd_verify(args) -> int:
    costs = _costs(args)
    report = verify(args.seed, args.trials, costs=costs)
    if args.json:
        _emit(json.dumps({"trials": report.trials, "passed": report.passed,
                          "failures": report.failures[:1]}, indent=2))
    else:
        _emit(str(report))
    return 0 if report.ok else 1


# --- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="idxcost", description="Cost labels that survive loop peeling and unrolling.")
    sub = ap.add_subparsers(dest="command", required=True)

    def command(name, fn, help_, source=True):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        if source:
            p.add_argument("file", help="input file, or - for stdin")
            mode = p.add_mutually_exclusive_group()
            mode.add_argument("--indexed", dest="plain", action="store_false", help="indexed labelling (default)")
            mode.add_argument("--plain", dest="plain", action="store_true", help="plain labelling")
            p.set_defaults(plain=False)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    command("label", cmd_label, "insert cost labels")

    p = command("transform", cmd_transform, "apply a peel/unroll script")
    p.add_argument("--script", metavar="FILE")

    p = command("compile", cmd_compile, "lower to a VM listing")
    p.add_argument("--script", metavar="FILE")
    p.add_argument("--naive", action="store_true", help="skip the false-edge refinement")

    p = command("analyze", cmd_analyze, "static block costs of a listing or source")
    p.add_argument("--script", metavar="FILE")
    p.add_argument("--costs", metavar="FILE", help="JSON opcode cost model")
    p.add_argument("--mode", choices=("strict", "sound"), default="strict")
    p.add_argument("--naive", action="store_true", help="skip the false-edge refinement")
    p.add_argument("--atoms", action="store_true", help="also print per-atom maxima")

    p = command("annotate", cmd_annotate, "instrument a source with a cost variable")
    p.add_argument("--script", metavar="FILE")
    p.add_argument("--costs", metavar="FILE")
    p.add_argument("--mode", choices=("strict", "sound"), default="strict")
    p.add_argument("--symbolic", action="store_true", help="print dependent costs over letters a, b, ...")
    p.add_argument("--no-simplify", action="store_true")

    p = command("run", cmd_run, "run a source or listing")
    p.add_argument("--script", metavar="FILE")
    p.add_argument("--costs", metavar="FILE")
    p.add_argument("--store", action="append", metavar="k=v,...")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--kernel", choices=("auto", "python", "cython"), default="auto")

    p = command("verify", cmd_verify, "random end-to-end checks", source=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--costs", metavar="FILE")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "fuel", 1) < 1:
        ap.error("--fuel must be at least 1")
    if getattr(args, "trials", 1) < 0:
        ap.error("--trials must be natural")
    try:
        return args.fn(args)
    except (UsageError, *INPUT_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SoundnessError, PrecisenessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IdxCostError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
