"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the environment switch is not needed.
Results are checked for equality before any timing is printed.
"""
from __future__ import annotations

import argparse
import itertools
import time

import numpy as np

from dagquery import _kernels_py, library, synth
from dagquery import topology as topo

try:
    from dagquery import _kernels as _compiled
except ImportError:
    _compiled = None


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def depth_case(name: str):
    g = library.builtin(name)
    cs = topo.oracle_clauses(g)
    spec = synth.plan(cs, 1)
    ev = synth._DepthEvaluator(g, cs, spec, 1)
    gs = ev.gates(spec.order)
    offsets = np.zeros(len(gs) + 1, dtype=np.int64)
    np.cumsum([len(x) for x in gs], out=offsets[1:])
    qubits = np.fromiter(itertools.chain.from_iterable(gs), dtype=np.int32, count=int(offsets[-1]))
    return (qubits, offsets, ev.width)


def acyclic_case(name: str, count: int):
    g = library.builtin(name)
    tails = np.array([t for t, _ in g.physical_edges], dtype=np.int64)
    heads = np.array([h for _, h in g.physical_edges], dtype=np.int64)
    a = topo.sample_assignments(g, count, seed=1)
    return (tails, heads, g.num_physical_vertices, a)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--samples", type=int, default=20000)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled extension not built; run: pip install -e . --no-build-isolation")
        return
    cases = [("asap_depth", n, depth_case(n)) for n in ("3e12", "4u18", "5e20")]
    cases += [("acyclic_mask", n, acyclic_case(n, args.samples)) for n in ("3e12", "5e20")]
    print(f"{'kernel':<13} {'case':<6} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for kernel, name, case in cases:
        py = getattr(_kernels_py, kernel)
        cc = getattr(_compiled, kernel)
        if not np.array_equal(np.asarray(py(*case)), np.asarray(cc(*case))):
            raise SystemExit(f"{kernel} disagrees between backends on {name}")
        t_py = _best(lambda: py(*case), args.repeat)
        t_cc = _best(lambda: cc(*case), args.repeat)
        print(f"{kernel:<13} {name:<6} {t_py:>10.5f} {t_cc:>11.6f} {t_py / t_cc:>7.0f}x")


if __name__ == "__main__":
    main()
