"""Compare the compiled and pure-Python lattice kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json]

Each kernel runs on the same reduced 4-dimensional lattices with both
backends; the best of ``--repeat`` runs is reported together with the
speed-up.  Outputs of the two backends are checked for equality first.
"""

from __future__ import annotations

import argparse
import json
import timeit

import numpy as np

from siegel_lab import kernels
from siegel_lab.lattice import LatticeBasis, reduce_basis
from siegel_lab.sampling import HaarSampler


def _workloads(seed: int):
    rng = np.random.default_rng(seed)
    G = HaarSampler(2, seed=seed).draw(4, rng)
    forms = [reduce_basis(LatticeBasis(g))[0].fp_form() for g in G]
    raw = [np.ascontiguousarray(g @ np.linalg.matrix_power(
        np.array([[1, 3, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 5, 1]], float), 3)) for g in G]
    tau = np.zeros(4)
    return {
        "fp_enumerate R=6": lambda be: [be.fp_enumerate(q, tau, 36.0, 10**8) for q in forms],
        "fp_sqnorms R=8": lambda be: [be.fp_sqnorms(q, 64.0, 10**8) for q in forms],
        "fp_count R=12": lambda be: [be.fp_count(q, tau, 0.25, 144.0) for q in forms],
        "lll_reduce x50": lambda be: [be.lll_reduce(b, 0.99) for b in raw * 50],
    }


def _same(a, b) -> bool:
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = ap.parse_args(argv)
    if kernels.compiled_backend is None:
        print("compiled extension not built; nothing to compare")
        return 1
    rows = []
    for name, job in _workloads(args.seed).items():
        same = _same(job(kernels.compiled_backend), job(kernels.python_backend))
        t_c = min(timeit.repeat(lambda: job(kernels.compiled_backend), number=1, repeat=args.repeat))
        t_p = min(timeit.repeat(lambda: job(kernels.python_backend), number=1, repeat=args.repeat))
        rows.append({"kernel": name, "cython_s": t_c, "python_s": t_p, "speedup": t_p / t_c, "identical": same})
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'kernel':<20}{'cython [s]':>12}{'python [s]':>12}{'speed-up':>10}  identical")
        for r in rows:
            print(f"{r['kernel']:<20}{r['cython_s']:>12.4f}{r['python_s']:>12.4f}{r['speedup']:>10.1f}  {r['identical']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
