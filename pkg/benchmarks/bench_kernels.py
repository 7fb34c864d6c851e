"""Compare the numba-compiled kernels with their pure-Python fallbacks.

    python benchmarks/bench_kernels.py            # per-kernel timings
    python benchmarks/bench_kernels.py --pipeline # end-to-end, with and without FREEQUOT_DISABLE_NUMBA

The pure path of each kernel is its ``py_func`` attribute, i.e. the same
source run by the interpreter.  Kernels that call other kernels (the power
iteration calls ``srw_apply``) still reach compiled callees on that path, so
their speedup is understated; ``--pipeline`` has no such mixing.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from freequot import kernels
from freequot._accel import USING_NUMBA
from freequot.schreier import (
    _relator_arrays,
    fold,
    preset_relators,
    relator_pregraph,
    truncated_quotient,
)
from freequot.words import parse_relators


def _best(fn, repeat):
    fn()  # warm-up (compilation for the numba path)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def workloads():
    grid, _ = truncated_quotient(2, parse_relators("abAB", 2), 30, 2)
    p6, _ = truncated_quotient(2, preset_relators("powers", 2, 6), 7, 2)
    tree, _ = truncated_quotient(2, [], 10, 0)
    t = tree.table
    cur = np.ones(t.shape, dtype=np.int64)
    out_i = np.empty_like(cur)
    f = np.random.default_rng(0).random(t.shape[0])
    out_f = np.empty_like(f)
    pre = relator_pregraph(2, parse_relators("abAB aab", 2), 3, 2)
    src, lab, dst = pre.edge_arrays()
    flat, off = _relator_arrays(parse_relators("aa bbb ababab", 2))

    def fold_with(insert, resolve):
        V = pre.n_vertices
        table = np.full((V, 4), -1, dtype=np.int64)
        parent = np.arange(V, dtype=np.int64)
        insert(table, parent, src, lab, dst)
        resolve(table, parent)

    return {
        "bfs_distances": (kernels.bfs_distances, lambda k: k(grid.table, 0)),
        "nb_step": (kernels.nb_step, lambda k: k(t, cur, out_i)),
        "srw_apply": (kernels.srw_apply, lambda k: k(t, f, out_f)),
        "dirichlet_power": (kernels.dirichlet_power, lambda k: k(p6.table, 200, 1e-14)),
        "return_probabilities": (kernels.return_probabilities, lambda k: k(tree.table, 0, 20)),
        "nb_shortest_closed": (kernels.nb_shortest_closed, lambda k: k(p6.table, 0, 13)),
        "fold_insert+resolve": (kernels.fold_insert, lambda k: fold_with(
            k, kernels.resolve_table if k is kernels.fold_insert else kernels.resolve_table.py_func)),
        "hlt_enumerate": (kernels.hlt_enumerate, lambda k: k(4, flat, off, 10_000)),
    }


def bench(repeat: int):
    rows = []
    for name, (kern, call) in workloads().items():
        pure = getattr(kern, "py_func", kern)
        t_fast = _best(lambda: call(kern), repeat)
        t_pure = _best(lambda: call(pure), max(1, repeat // 3))
        rows.append({"kernel": name, "numba_s": t_fast, "python_s": t_pure,
                     "speedup": t_pure / t_fast if t_fast > 0 else float("inf")})
    return rows


_PIPELINE = """
import time
t = time.perf_counter()
from freequot.schreier import truncated_quotient
from freequot.words import parse_relators
from freequot.counting import loop_counts
from freequot.spectral import power_iteration_rho
g, _ = truncated_quotient(2, parse_relators("abAB", 2), 24, 2)
loop_counts(g, 48)
power_iteration_rho(g)
h, _ = truncated_quotient(2, parse_relators("aaaaaa bbbbbb", 2), 6, 2)
power_iteration_rho(h)
print(time.perf_counter() - t)
"""


def pipeline():
    out = {}
    for label, flag in (("numba", None), ("python", "1")):
        env = dict(os.environ)
        env.pop("FREEQUOT_DISABLE_NUMBA", None)
        if flag:
            env["FREEQUOT_DISABLE_NUMBA"] = flag
        res = subprocess.run([sys.executable, "-c", _PIPELINE], env=env, capture_output=True,
                             text=True, check=True)
        out[label] = float(res.stdout.strip())
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--pipeline", action="store_true", help="also time a full run in subprocesses")
    args = ap.parse_args(argv)
    if not USING_NUMBA:
        print("numba disabled: both columns run the interpreter", file=sys.stderr)
    rows = bench(args.repeat)
    result = {"kernels": rows}
    if args.pipeline:
        result["pipeline_s"] = pipeline()
    if args.json:
        print(json.dumps(result, indent=2))
        return
    print(f"{'kernel':<22}{'numba (s)':>12}{'python (s)':>12}{'speedup':>10}")
    for r in rows:
        print(f"{r['kernel']:<22}{r['numba_s']:>12.5f}{r['python_s']:>12.5f}{r['speedup']:>10.1f}")
    if args.pipeline:
        p = result["pipeline_s"]
        print(f"\npipeline (build + loops + power iteration, incl. startup/compile): "
              f"numba {p['numba']:.2f}s, python {p['python']:.2f}s")


if __name__ == "__main__":
    main()
