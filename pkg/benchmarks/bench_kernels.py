"""Compare the compiled and pure-Python factorization kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import importlib
import random
import timeit

from gwsd import _kernels_py
from gwsd.factorize import encode
from gwsd.relation import Relation, product_all


def binary_product(n: int) -> Relation:
    return product_all([Relation((f"A{i:02d}",), [("0",), ("1",)]) for i in range(n)])


def blocks_product(seed: int, nblocks: int = 4, width: int = 2, rows: int = 5) -> Relation:
    rng = random.Random(seed)
    parts = []
    for b in range(nblocks):
        cols = [f"B{b}_{j}" for j in range(width)]
        vals = {tuple(str(rng.randrange(9)) for _ in cols) for _ in range(rows)}
        parts.append(Relation(cols, vals))
    return product_all(parts)


def random_relation(seed: int, arity: int = 8, nrows: int = 2000) -> Relation:
    rng = random.Random(seed)
    rows = {tuple(str(rng.randrange(4)) for _ in range(arity)) for _ in range(nrows)}
    return Relation([f"C{i}" for i in range(arity)], rows)


CASES = {
    "binary^10": lambda: binary_product(10),
    "binary^12": lambda: binary_product(12),
    "blocks 4x2": lambda: blocks_product(1),
    "random 8x2000": lambda: random_relation(2),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    kernels = {"python": _kernels_py}
    try:
        kernels["cython"] = importlib.import_module("gwsd._kernels")
    except ImportError:
        print("compiled kernel not built; timing the pure kernel only")
    print(f"{'case':<16}{'rows':>7}" + "".join(f"{k:>12}" for k in kernels) + f"{'speedup':>10}")
    for name, build in CASES.items():
        s = build()
        _, flat = encode(s)
        n, m = len(s), len(s.schema)
        times = {}
        for k, mod in kernels.items():
            t = timeit.repeat(lambda: mod.prime_partition(flat, n, m), number=1, repeat=args.repeat)
            times[k] = min(t)
        parts = {k: sorted(sorted(p) for p in mod.prime_partition(flat, n, m))
                 for k, mod in kernels.items()}
        assert len({str(p) for p in parts.values()}) == 1, "kernels disagree"
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<16}{n:>7}" + "".join(f"{times[k] * 1e3:>10.2f}ms" for k in kernels)
              + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
