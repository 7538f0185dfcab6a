"""Compare the compiled and pure-Python (suff) kernels.

    python benchmarks/bench_kernels.py [--max-n 9] [--repeat 3]

Both backends run the full axis scan on every connected configuration up to
max-n points and on a few large random clusters; results must agree.
"""

import argparse
import time

import numpy as np

from latrigid import _kernels_py, corpus, kernels
from latrigid.lattice_core import Configuration


def run(impl, arrays, first_only):
    return [impl.suff_scan(*a, first_only) for a in arrays]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=9)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    configs = [Configuration(s) for s in corpus.exhaustive(args.max_n)]
    rng = np.random.default_rng(1)
    big = [Configuration(corpus.random_cluster(n, rng)) for n in (200, 400, 800)]
    impls = {"python": _kernels_py}
    if kernels.BACKEND == "cython":
        from latrigid import _kernels

        impls["cython"] = _kernels
    for label, group in (("corpus", configs), ("large", big)):
        arrays = [kernels.csr(c) for c in group]
        ref = None
        for name, impl in impls.items():
            best = np.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                out = run(impl, arrays, False)
                best = min(best, time.perf_counter() - t0)
            if ref is None:
                ref = out
            agree = out == ref
            print(f"{label:7s} {name:7s} {len(group):6d} configs  {best * 1e3:9.1f} ms  agree={agree}")


if __name__ == "__main__":
    main()
