"""Compare the compiled and pure-Python VM kernels on the same encoded programs.

    python benchmarks/bench_vm.py [--repeat N] [--n N]
"""
import argparse
import statistics
import time
from pathlib import Path

from idxcost import kernel
from idxcost.labelling import label_indexed
from idxcost.textio import parse_stmt
from idxcost.transform import apply_script, parse_script
from idxcost.vm import encode, lower, vm_run

ROOT = Path(__file__).resolve().parent.parent / "programs"


def workloads(n):
    # same shape as the example, reduced modulo a prime so large n cannot overflow
    text = (ROOT / "factorial_sum.imp").read_text().replace("p := j*p", "p := (j*p) % 1000003")
    src = label_indexed(parse_stmt(text))
    peeled = apply_script(src, parse_script((ROOT / "peel_unroll.script").read_text()))
    loop = label_indexed(parse_stmt("s := 0; i := 0; while i < n do { s := (s + i*i) % 1000003; i := i + 1 }"))
    return {
        "factorial_mod": (src, {"n": n}),
        "factorial_mod+peel_unroll": (peeled, {"n": n}),
        "flat_loop": (loop, {"n": n * n}),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=300)
    args = ap.parse_args()
    kerns = kernel.available()
    print(f"kernels: {', '.join(kerns)}  (active: {kernel.active().NAME})")
    print(f"{'workload':<26} {'steps':>10} " + " ".join(f"{k + ' [s]':>14}" for k in kerns) + f" {'speedup':>9}")
    for name, (stmt, store) in workloads(args.n).items():
        prog = lower(stmt)
        enc = encode(prog, sorted(store))
        times = {}
        results = {}
        for kname, mod in kerns.items():
            samples = []
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                results[kname] = vm_run(enc, store, fuel=10**9, kernel=mod)
                samples.append(time.perf_counter() - t0)
            times[kname] = statistics.median(samples)
        ref = next(iter(results.values()))
        assert all(r.trace == ref.trace and r.cost == ref.cost for r in results.values()), name
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<26} {ref.steps:>10} " + " ".join(f"{times[k]:>14.4f}" for k in kerns) + f" {speed:>8.1f}x")


if __name__ == "__main__":
    main()
