"""Pure-Python versions of the compiled kernels, same signatures and results."""
from __future__ import annotations

import numpy as np


def asap_depth(qubits, offsets, n_qubits: int) -> int:
    front = [0] * max(n_qubits, 1)
    depth = 0
    qs = [int(q) for q in qubits]
    offs = [int(o) for o in offsets]
    for g in range(len(offs) - 1):
        gate = qs[offs[g]:offs[g + 1]]
        for q in gate:
            if q < 0 or q >= n_qubits:
                raise IndexError(f"qubit {q} out of range")
        layer = max((front[q] for q in gate), default=0) + 1
        for q in gate:
            front[q] = layer
        if layer > depth:
            depth = layer
    return depth


def acyclic_mask(tails, heads, n_vertices: int, assignments) -> np.ndarray:
    tails = [int(t) for t in tails]
    heads = [int(h) for h in heads]
    out = np.zeros(len(assignments), dtype=np.uint8)
    for a, bits in enumerate(int(x) for x in assignments):
        succ: list[list[int]] = [[] for _ in range(n_vertices)]
        for i, (t, h) in enumerate(zip(tails, heads)):
            if (bits >> i) & 1:
                succ[t].append(h)
            else:
                succ[h].append(t)
        out[a] = 0 if _has_cycle(succ) else 1
    return out


def _has_cycle(succ: list[list[int]]) -> bool:
    color = [0] * len(succ)
    for root in range(len(succ)):
        if color[root]:
            continue
        color[root] = 1
        stack = [(root, iter(succ[root]))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if color[w] == 1:
                    return True
                if color[w] == 0:
                    color[w] = 1
                    stack.append((w, iter(succ[w])))
                    break
            else:
                color[v] = 2
                stack.pop()
    return False
