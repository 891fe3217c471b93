"""Time the compiled graph kernels against their pure-Python versions.

    python benchmarks/bench_kernels.py --n 20000 --degree 8 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cn4kb import _fallback
from cn4kb.graphs import InducedGraph

try:
    from cn4kb import _kernels
except ImportError:
    _kernels = None


def random_graph(n: int, degree: float, seed: int) -> InducedGraph:
    rng = np.random.default_rng(seed)
    m = int(n * degree / 2)
    return InducedGraph(n, rng.integers(0, n, m), rng.integers(0, n, m))


def cases(g: InducedGraph, bfs_sources: int):
    out_ptr, out_idx = g.out_adj
    und_ptr, und_idx = g.und_adj
    extra = np.zeros(g.n, dtype=np.int64)
    extra[g.loop_vertices] = 2
    return {
        "triangle_counts": lambda m: m.triangle_counts(und_ptr, und_idx, g.n),
        "core_numbers": lambda m: m.core_numbers(und_ptr, und_idx, g.n, extra),
        "tarjan_scc": lambda m: m.tarjan_scc(out_ptr, out_idx, g.n),
        f"bfs_histogram[{bfs_sources} sources]":
            lambda m: m.bfs_histogram(out_ptr, out_idx, g.n, 0, min(bfs_sources, g.n)),
    }


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--degree", type=float, default=8.0, help="average total degree")
    ap.add_argument("--bfs-sources", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    g = random_graph(args.n, args.degree, args.seed)
    print(f"graph: {g.n} vertices, {g.n_multi} edges")
    if _kernels is None:
        print("compiled kernels not built; timing the pure-Python versions only")
    print(f"{'kernel':<28}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    for name, run in cases(g, args.bfs_sources).items():
        slow = best_of(lambda: run(_fallback), args.repeat)
        if _kernels is None:
            print(f"{name:<28}{'-':>12}{slow:>12.4f}{'-':>10}")
            continue
        fast = best_of(lambda: run(_kernels), args.repeat)
        print(f"{name:<28}{fast:>12.4f}{slow:>12.4f}{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
