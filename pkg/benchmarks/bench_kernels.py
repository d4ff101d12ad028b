"""Benchmark the numba kernel against the pure-numpy fallback.

Two workloads:
  * synthetic dense mod-p row reductions at a few sizes,
  * a real workload: the graded Hom computation between two Bott-Samelson
    bimodules (the dominant cost of the duality checks).

Run:  python benchmarks/bench_kernels.py
Select a single backend via SOERGELKIT_KERNEL=numba|numpy.
"""

import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from soergelkit import _modp
from soergelkit.bimod import _HOM_CACHE, bott_samelson, hom_graded
from soergelkit.coxeter import GeneralizedCartanMatrix, Realization


def bench_rref(backend, sizes, repeats=3):
    _modp.set_backend(backend)
    p = _modp.PRIME_POOL[0]
    rng = np.random.default_rng(42)
    results = []
    for m, n in sizes:
        base = rng.integers(0, p, size=(m, n), dtype=np.int64)
        _modp.rref_modp(base.copy(), p)  # warm-up (JIT compile)
        best = float("inf")
        for _ in range(repeats):
            a = base.copy()
            t0 = time.perf_counter()
            _modp.rref_modp(a, p)
            best = min(best, time.perf_counter() - t0)
        results.append(((m, n), best))
    return results


def bench_hom(backend):
    _modp.set_backend(backend)
    _HOM_CACHE.clear()
    real = Realization.minimal(GeneralizedCartanMatrix([[2, -2], [-2, 2]]))
    x = bott_samelson(real, (0, 1, 0))
    y = bott_samelson(real, (1, 0, 1))
    hom_graded(x, y)  # warm-up, fills the step caches and JIT
    _HOM_CACHE.clear()
    t0 = time.perf_counter()
    hom = hom_graded(x, y)
    dt = time.perf_counter() - t0
    return dt, hom.graded_rank()


def main():
    backends = [os.environ["SOERGELKIT_KERNEL"]] if "SOERGELKIT_KERNEL" in os.environ \
        else ["numpy", "numba"]
    sizes = [(200, 150), (600, 400), (1500, 900)]
    print(f"{'backend':8} {'workload':28} {'time':>10}")
    for backend in backends:
        try:
            for (m, n), dt in bench_rref(backend, sizes):
                print(f"{backend:8} rref mod p {m}x{n:<15} {dt * 1e3:9.1f}ms")
            dt, rank = bench_hom(backend)
            print(f"{backend:8} {'hom BS(010)->BS(101) affine':28} {dt:9.2f}s  "
                  f"rank={sum(rank.values())}")
        except ImportError as exc:
            print(f"{backend:8} unavailable: {exc}")


if __name__ == "__main__":
    main()
