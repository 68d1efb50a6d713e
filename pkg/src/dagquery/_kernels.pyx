# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: ASAP layer scheduling and batched DFS cycle checks."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, calloc, free

cnp.import_array()


def asap_depth(const int[::1] qubits, const long long[::1] offsets, int n_qubits):
    """Layer count when each gate lands one past the busiest of its qubits."""
    cdef int *front = <int *> calloc(n_qubits if n_qubits > 0 else 1, sizeof(int))
    if front == NULL:
        raise MemoryError()
    cdef Py_ssize_t g, k, n_gates = offsets.shape[0] - 1
    cdef int layer, depth = 0, q
    try:
        for g in range(n_gates):
            layer = 0
            for k in range(offsets[g], offsets[g + 1]):
                q = qubits[k]
                if q < 0 or q >= n_qubits:
                    raise IndexError(f"qubit {q} out of range")
                if front[q] > layer:
                    layer = front[q]
            layer += 1
            for k in range(offsets[g], offsets[g + 1]):
                front[qubits[k]] = layer
            if layer > depth:
                depth = layer
    finally:
        free(front)
    return depth


def acyclic_mask(const long long[::1] tails, const long long[::1] heads, int n_vertices,
                 const unsigned long long[::1] assignments):
    """1 where the orientation encoded by each assignment has no directed cycle."""
    cdef Py_ssize_t n_edges = tails.shape[0], m = assignments.shape[0]
    cdef Py_ssize_t a, i, v, w, top, k
    cdef unsigned long long bits
    out = np.zeros(m, dtype=np.uint8)
    cdef unsigned char[::1] res = out
    cdef int *deg = <int *> malloc((n_vertices + 1) * sizeof(int))
    cdef int *adj = <int *> malloc((n_edges if n_edges > 0 else 1) * sizeof(int))
    cdef int *fill = <int *> malloc((n_vertices + 1) * sizeof(int))
    cdef int *src = <int *> malloc((n_edges if n_edges > 0 else 1) * sizeof(int))
    cdef int *dst = <int *> malloc((n_edges if n_edges > 0 else 1) * sizeof(int))
    cdef char *color = <char *> malloc(n_vertices if n_vertices > 0 else 1)
    cdef int *stack = <int *> malloc((n_vertices + 1) * sizeof(int))
    cdef int *cursor = <int *> malloc((n_vertices + 1) * sizeof(int))
    cdef bint cyclic
    if (deg == NULL or adj == NULL or fill == NULL or src == NULL or dst == NULL
            or color == NULL or stack == NULL or cursor == NULL):
        raise MemoryError()
    try:
        for a in range(m):
            bits = assignments[a]
            for v in range(n_vertices + 1):
                deg[v] = 0
            for i in range(n_edges):
                if (bits >> i) & 1:
                    src[i] = <int> tails[i]
                    dst[i] = <int> heads[i]
                else:
                    src[i] = <int> heads[i]
                    dst[i] = <int> tails[i]
                deg[src[i] + 1] += 1
            for v in range(n_vertices):
                deg[v + 1] += deg[v]
                fill[v] = deg[v]
            for i in range(n_edges):
                adj[fill[src[i]]] = dst[i]
                fill[src[i]] += 1
            for v in range(n_vertices):
                color[v] = 0
            cyclic = False
            for v in range(n_vertices):
                if cyclic:
                    break
                if color[v] != 0:
                    continue
                top = 0
                stack[0] = <int> v
                cursor[0] = deg[v]
                color[v] = 1
                while top >= 0 and not cyclic:
                    k = cursor[top]
                    if k < deg[stack[top] + 1]:
                        cursor[top] = <int> (k + 1)
                        w = adj[k]
                        if color[w] == 1:
                            cyclic = True
                        elif color[w] == 0:
                            color[w] = 1
                            top += 1
                            stack[top] = <int> w
                            cursor[top] = deg[w]
                    else:
                        color[stack[top]] = 2
                        top -= 1
            res[a] = 0 if cyclic else 1
    finally:
        free(deg); free(adj); free(fill); free(src); free(dst)
        free(color); free(stack); free(cursor)
    return out
