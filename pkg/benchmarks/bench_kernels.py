"""Time the compiled and pure-Python tape kernels on the same workloads.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one row per workload with the best-of-N wall time for each backend
and the speedup. Without a built extension only the Python column is shown.
"""
import argparse
import timeit

import numpy as np

from clairaut import _backend, parse

EXPR = parse("a*x + sqrt(x*y)*exp(-a^2/2) - ln(1 + x^2)/y")
PHI = parse("0.5*((a-3)^2 - 1)^2 + 0.5 + sin(a)/(1 + a^2)")
ROOT = parse("a^3 - 2*a - 5 + y")


def workloads(kernels):
    t = EXPR.tape
    vals = EXPR._values({"a": 0.7, "x": 1.3, "y": 2.1})
    seed = EXPR.free_vars.index("a")
    pts = np.random.default_rng(0).uniform(0.5, 2.0, size=(10_000, len(EXPR.free_vars)))
    p, pv = PHI.tape, PHI._values({"a": 0.0})
    r, rv = ROOT.tape, ROOT._values({"a": 0.0, "y": 0.25})
    ai, ri = PHI.free_vars.index("a"), ROOT.free_vars.index("a")
    return {
        "eval_value x1000": lambda: [kernels.eval_value(t.ops, t.args, t.consts, vals) for _ in range(1000)],
        "eval_dual x1000": lambda: [kernels.eval_dual(t.ops, t.args, t.consts, vals, seed) for _ in range(1000)],
        "eval_batch 10k points": lambda: kernels.eval_batch(t.ops, t.args, t.consts, pts),
        "simpson_tape 400 panels x100": lambda: [
            kernels.simpson_tape(p.ops, p.args, p.consts, pv, ai, 0.0, 4.0, 400) for _ in range(100)],
        "root_tape x1000": lambda: [
            kernels.root_tape(r.ops, r.args, r.consts, rv, ri, 0.0, 3.0, 1e-12, 200) for _ in range(1000)],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = _backend.available()
    table = {n: workloads(_backend.get(n)) for n in names}
    header = f"{'workload':32s}" + "".join(f"{n + ' [ms]':>14s}" for n in names)
    if "cython" in names:
        header += f"{'speedup':>10s}"
    print(header)
    for w in table["python"]:
        times = {n: min(timeit.repeat(table[n][w], number=1, repeat=args.repeat)) * 1e3 for n in names}
        row = f"{w:32s}" + "".join(f"{times[n]:14.3f}" for n in names)
        if "cython" in names:
            row += f"{times['python'] / times['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
