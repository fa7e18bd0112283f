"""Time the compiled and numpy kernels on the same batches.

    python3 benchmarks/bench_kernels.py [--batch 4096] [--n 2 3 4] [--repeat 5] [--json out.json]

Reports the best-of-repeat wall time per kernel and backend, the speedup,
and the maximum disagreement between backends.
"""

from __future__ import annotations

import argparse
import json
import math
import time

import numpy as np

from slc_lab.kernels import backends


def random_spd(rng, batch: int, n: int) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((batch, n, n)))
    lam = np.exp(rng.uniform(-2.0, 2.0, (batch, n)))
    return np.einsum("bij,bj,bkj->bik", q, lam, q)


def best_time(fn, repeat: int) -> float:
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(batch: int, dims, repeat: int, seed: int = 0) -> list[dict]:
    mods = backends()
    rng = np.random.default_rng(seed)
    rows = []
    for n in dims:
        A = random_spd(rng, batch, n)
        theta = (n - 0.5) * math.pi / 2
        ref_vals = None
        results = {}
        for name, mod in mods.items():
            vals, _ = mod.jacobi_eigh(A)
            results[name] = {
                "eigh": best_time(lambda: mod.jacobi_eigh(A), repeat),
                "r_theta": best_time(lambda: mod.r_theta(vals, theta), repeat),
                "vals": vals,
                "r": mod.r_theta(vals, theta),
            }
            if ref_vals is None:
                ref_vals = vals
        for kernel in ("eigh", "r_theta"):
            row = {"n": n, "batch": batch, "kernel": kernel}
            for name in mods:
                row[f"{name}_s"] = results[name][kernel]
            if "cython" in results:
                row["speedup"] = results["numpy"][kernel] / results["cython"][kernel]
                key = "vals" if kernel == "eigh" else "r"
                row["max_diff"] = float(np.max(np.abs(results["numpy"][key] - results["cython"][key])))
            rows.append(row)
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=4096)
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the rows here")
    args = ap.parse_args(argv)
    rows = run(args.batch, args.n, args.repeat)
    names = sorted(backends())
    print(f"backends: {', '.join(names)}")
    head = f"{'n':>2} {'kernel':>8} " + " ".join(f"{b + ' [ms]':>12}" for b in names)
    if "cython" in names:
        head += f" {'speedup':>8} {'max diff':>10}"
    print(head)
    for row in rows:
        line = f"{row['n']:>2} {row['kernel']:>8} " + " ".join(f"{1e3 * row[b + '_s']:>12.3f}" for b in names)
        if "speedup" in row:
            line += f" {row['speedup']:>8.1f} {row['max_diff']:>10.2e}"
        print(line)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
