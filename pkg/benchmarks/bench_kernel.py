"""Time the compiled spin-elimination kernel against the numpy fallback."""

import argparse
import time

import numpy as np

from surfport import kernel
from surfport.coset import compile_program, coupling
from surfport.lattice import build_layout


def _time(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, np.asarray(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--distances", default="5,7,9,11")
    ap.add_argument("--shots", type=int, default=4000)
    ap.add_argument("--q", type=float, default=0.1)
    args = ap.parse_args()
    if kernel.contract_batch_compiled is None:
        raise SystemExit("compiled kernel is not built; run pip install -e . first")
    print(f"{'d':>3} {'shots':>6} {'python s':>9} {'cython s':>9} {'speedup':>8} {'max diff':>9}")
    for d in (int(v) for v in args.distances.split(",")):
        prog = compile_program(build_layout(d), "X")
        rng = np.random.default_rng(d)
        eta = np.ascontiguousarray(1 - 2 * (rng.random((args.shots, d * d)) < args.q).astype(np.int8))
        K = coupling(args.q)
        tp, a = _time(kernel.contract_batch_python, prog.ops, eta, K, prog.width)
        tc, b = _time(kernel.contract_batch_compiled, prog.ops, eta, K, prog.width)
        print(f"{d:>3} {args.shots:>6} {tp:>9.3f} {tc:>9.3f} {tp / tc:>8.1f} {np.max(np.abs(a - b)):>9.1e}")


if __name__ == "__main__":
    main()
