"""Maximal cliques and clique partitions of small undirected graphs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dagquery.clauses import AdjacencyMatrix

MAX_NODES = 64


@dataclass(frozen=True)
class CliquePartition:
    groups: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    def group_of(self) -> dict[int, int]:
        return {v: gi for gi, grp in enumerate(self.groups) for v in grp}


def _adjacency(g: AdjacencyMatrix | np.ndarray | Sequence[Sequence[int]]) -> list[set[int]]:
    bits = g.bits if isinstance(g, AdjacencyMatrix) else np.asarray(g)
    if bits.shape[0] > MAX_NODES:
        raise ValueError(f"{bits.shape[0]} nodes exceeds the bound of {MAX_NODES}")
    adj = [set(np.flatnonzero(row).tolist()) for row in bits]
    for v, nb in enumerate(adj):
        nb.discard(v)
    return adj


def _bron_kerbosch(adj: list[set[int]], nodes: set[int]) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        # Tomita pivot: the vertex covering most of P
        u = max(p | x, key=lambda w: len(adj[w] & p))
        for v in sorted(p - adj[u]):
            expand(r + [v], p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand([], set(nodes), set())
    return out


def maximal_cliques(g) -> list[tuple[int, ...]]:
    """Every maximal clique, largest first, ties in lexicographic order."""
    adj = _adjacency(g)
    cliques = _bron_kerbosch(adj, set(range(len(adj))))
    cliques.sort(key=lambda c: (-len(c), c))
    return cliques


def _peel(adj: list[set[int]], remaining: set[int], lookahead: int) -> list[tuple[int, ...]]:
    groups = []
    remaining = set(remaining)
    while remaining:
        sub = [nb & remaining for nb in adj]
        cliques = _bron_kerbosch(sub, remaining)
        size = max(len(c) for c in cliques)
        tied = sorted(c for c in cliques if len(c) == size)
        best = tied[0]
        if lookahead > 0 and len(tied) > 1:
            # score each tied candidate by how many groups the rest needs
            best = min(
                tied,
                key=lambda c: (len(_peel(adj, remaining - set(c), lookahead - 1)), c),
            )
        groups.append(best)
        remaining -= set(best)
    return groups


def greedy_clique_partition(g, lookahead: int = 1) -> CliquePartition:
    """Peel off a maximum clique of what remains until nothing remains.

    Every step takes a clique of maximum size. When several tie, each is
    scored by the group count of the peeling that follows it (``lookahead``
    levels deep, 0 disables); remaining ties go to the lexicographically
    smallest sorted node tuple, so the result is deterministic.
    """
    adj = _adjacency(g)
    return CliquePartition(tuple(_peel(adj, set(range(len(adj))), lookahead)))


def exact_clique_partition(g) -> CliquePartition:
    """Minimum clique partition by complete branch-and-bound search.

    Vertices are placed one at a time into an existing compatible group or a
    new one; branches that cannot beat the incumbent are cut. Exponential in
    the worst case, fine for the few dozen nodes seen here.
    """
    adj = _adjacency(g)
    n = len(adj)
    if n == 0:
        return CliquePartition(())
    order = sorted(range(n), key=lambda v: (len(adj[v]), v))
    # first-fit incumbent; deliberately not the greedy partition under test
    best: list[list[int]] = []
    for v in order:
        for grp in best:
            if all(w in adj[v] for w in grp):
                grp.append(v)
                break
        else:
            best.append([v])
    best_size = [len(best)]
    lower = _independent_lower_bound(adj)
    if best_size[0] == lower:
        return CliquePartition(tuple(tuple(sorted(grp)) for grp in best))

    groups: list[list[int]] = []
    members: list[set[int]] = []

    def place(k: int) -> bool:
        if len(groups) >= best_size[0]:
            return False
        if k == n:
            best[:] = [list(grp) for grp in groups]
            best_size[0] = len(groups)
            return best_size[0] == lower
        v = order[k]
        for grp, mem in zip(groups, members):
            if mem <= adj[v]:
                grp.append(v)
                mem.add(v)
                if place(k + 1):
                    return True
                grp.pop()
                mem.discard(v)
        groups.append([v])
        members.append({v})
        done = place(k + 1)
        groups.pop()
        members.pop()
        return done

    place(0)
    return CliquePartition(tuple(sorted(tuple(sorted(grp)) for grp in best)))


def _independent_lower_bound(adj: list[set[int]]) -> int:
    # each clique holds at most one vertex of an independent set
    order = sorted(range(len(adj)), key=lambda v: len(adj[v]))
    chosen: set[int] = set()
    for v in order:
        if not (adj[v] & chosen):
            chosen.add(v)
    return len(chosen)


def is_clique_partition(g, part: CliquePartition) -> bool:
    adj = _adjacency(g)
    seen: list[int] = [v for grp in part for v in grp]
    if sorted(seen) != list(range(len(adj))):
        return False
    return all(
        b in adj[a] for grp in part for i, a in enumerate(grp) for b in grp[i + 1:]
    )
