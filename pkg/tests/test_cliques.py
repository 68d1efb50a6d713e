import itertools
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from dagquery import library
from dagquery import topology as topo
from dagquery.clauses import mutual_aux_matrix, mutual_clauses_matrix
from dagquery.cliques import (
    MAX_NODES,
    CliquePartition,
    exact_clique_partition,
    greedy_clique_partition,
    is_clique_partition,
    maximal_cliques,
)

A, B, Cn, D = range(4)


def adj(n, edges):
    m = np.zeros((n, n), dtype=np.uint8)
    for u, v in edges:
        m[u, v] = m[v, u] = 1
    return m


FIG = adj(4, [(A, B), (B, Cn), (A, Cn), (Cn, D)])


@st.composite
def small_graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    p = draw(st.floats(0.1, 0.9))
    rng = random.Random(draw(st.integers(0, 2**32)))
    return adj(n, [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p])


def test_maximal_cliques_examples():
    assert maximal_cliques(FIG) == [(A, B, Cn), (Cn, D)]
    assert maximal_cliques(adj(4, [])) == [(0,), (1,), (2,), (3,)]
    k5 = adj(5, itertools.combinations(range(5), 2))
    assert maximal_cliques(k5) == [(0, 1, 2, 3, 4)]


def test_greedy_examples():
    assert greedy_clique_partition(FIG).groups == ((A, B, Cn), (D,))
    assert greedy_clique_partition(adj(3, [(0, 1), (1, 2)])).groups == ((0, 1), (2,))


def test_three_eloop_groups():
    cs = topo.oracle_clauses(library.builtin("3e12"))
    part = greedy_clique_partition(mutual_aux_matrix(cs))
    assert sorted(map(len, part), reverse=True) == [4, 3, 3]


def test_size_bound():
    with pytest.raises(ValueError, match=str(MAX_NODES)):
        maximal_cliques(np.zeros((MAX_NODES + 1, MAX_NODES + 1), dtype=np.uint8))


@given(small_graphs(max_n=14))
def test_maximal_cliques_match_networkx(m):
    ref = sorted(tuple(sorted(c)) for c in nx.find_cliques(nx.from_numpy_array(m)))
    assert sorted(maximal_cliques(m)) == ref


def _min_cover_oracle(m) -> int:
    # minimum clique cover = chromatic number of the complement; try k colours
    n = len(m)
    comp = [[v for v in range(n) if v != u and not m[u, v]] for u in range(n)]
    for k in range(1, n + 1):
        colour = [-1] * n

        def paint(v: int) -> bool:
            if v == n:
                return True
            used = {colour[w] for w in comp[v] if colour[w] >= 0}
            for c in range(min(k, max(colour[:v], default=-1) + 2)):
                if c not in used:
                    colour[v] = c
                    if paint(v + 1):
                        return True
            colour[v] = -1
            return False

        if paint(0):
            return k
    return n


@given(small_graphs(max_n=10))
def test_exact_partition_is_optimal(m):
    part = exact_clique_partition(m)
    assert is_clique_partition(m, part)
    assert len(part) == _min_cover_oracle(m)


@given(small_graphs())
def test_greedy_is_valid_upper_bound(m):
    g = greedy_clique_partition(m)
    assert is_clique_partition(m, g)
    assert len(g) >= len(exact_clique_partition(m))


@given(small_graphs())
def test_greedy_takes_a_maximum_clique_first(m):
    g = greedy_clique_partition(m)
    assert len(g.groups[0]) == len(maximal_cliques(m)[0])
    assert g == greedy_clique_partition(m)


def test_lookahead_beats_plain_tie_break_on_five_eloop_blocks():
    cs = topo.oracle_clauses(library.builtin("5e20"))
    m = mutual_clauses_matrix(cs)
    assert len(greedy_clique_partition(m, lookahead=0)) == 8
    assert len(greedy_clique_partition(m)) == len(exact_clique_partition(m)) == 7


def test_is_clique_partition_rejects():
    assert not is_clique_partition(FIG, CliquePartition(((A, B, Cn, D),)))
    assert not is_clique_partition(FIG, CliquePartition(((A, B),)))
    assert is_clique_partition(FIG, CliquePartition(((A, B), (Cn, D))))


def test_empty_graph():
    m = np.zeros((0, 0), dtype=np.uint8)
    assert len(greedy_clique_partition(m)) == 0 == len(exact_clique_partition(m))
