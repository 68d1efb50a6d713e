"""Set-level multigraphs, their simple cycles, and the winner oracles.

A topology is a connected multigraph whose edges are *sets*: a set ``j`` with
multiplicity ``k`` stands for ``k`` physical edges wired in series between its
two endpoints. Every physical edge carries one orientation bit (``1`` = the
set's reference direction ``tail -> head``). Assignments are plain integers
whose bit ``i`` is the state of physical edge ``e_i``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from dagquery import kernels
from dagquery.clauses import ClauseSet, EloopClause

MAX_EXHAUSTIVE_EDGES = 26


class TopologyError(ValueError):
    """Malformed topology input."""


@dataclass(frozen=True)
class SetEdge:
    id: int
    tail: int
    head: int
    multiplicity: int = 1
    edge_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class SignedCycle:
    """One simple cycle as ``(set id, polarity)`` pairs in traversal order."""

    entries: tuple[tuple[int, int], ...]

    @property
    def set_ids(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SetGraph:
    name: str
    num_vertices: int
    sets: tuple[SetEdge, ...]
    fixed_set: int = 0
    _physical: tuple[tuple[int, int], ...] = field(default=(), repr=False, compare=False)
    _num_physical_vertices: int = field(default=0, repr=False, compare=False)

    @classmethod
    def build(
        cls,
        name: str,
        num_vertices: int,
        sets: Iterable[tuple[int, int, int]],
        fixed_set: int = 0,
    ) -> "SetGraph":
        """Validate ``(tail, head, multiplicity)`` triples and assign edge ids.

        Edge ids are contiguous per set; the fixed set is numbered first so
        that ``e_0`` always belongs to it, the rest follow in set order.
        """
        raw = [tuple(int(x) for x in s) for s in sets]
        if num_vertices < 1:
            raise TopologyError("a topology needs at least one vertex")
        if not raw:
            raise TopologyError("a topology needs at least one set")
        if not 0 <= fixed_set < len(raw):
            raise TopologyError(f"fixed set {fixed_set} does not exist")
        for j, (u, v, k) in enumerate(raw):
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise TopologyError(f"set {j}: endpoint outside 0..{num_vertices - 1}")
            if u == v:
                raise TopologyError(f"set {j}: self-loop {u}-{v}")
            if k < 1:
                raise TopologyError(f"set {j}: multiplicity must be >= 1")

        order = [fixed_set] + [j for j in range(len(raw)) if j != fixed_set]
        ids: dict[int, tuple[int, ...]] = {}
        nxt = 0
        for j in order:
            k = raw[j][2]
            ids[j] = tuple(range(nxt, nxt + k))
            nxt += k
        set_edges = tuple(
            SetEdge(j, u, v, k, ids[j]) for j, (u, v, k) in enumerate(raw)
        )

        # physical chain: tail -> w_1 -> ... -> head through fresh vertices
        physical: list[tuple[int, int]] = [(0, 0)] * nxt
        fresh = num_vertices
        for s in set_edges:
            prev = s.tail
            for pos, e in enumerate(s.edge_ids):
                if pos == s.multiplicity - 1:
                    physical[e] = (prev, s.head)
                else:
                    physical[e] = (prev, fresh)
                    prev = fresh
                    fresh += 1

        g = cls(name, num_vertices, set_edges, fixed_set, tuple(physical), fresh)
        used = {x for s in set_edges for x in (s.tail, s.head)}
        if len(used) != num_vertices:
            dangling = sorted(set(range(num_vertices)) - used)
            raise TopologyError(f"dangling vertices: {dangling}")
        if not g.is_connected():
            raise TopologyError(f"topology {name!r} is disconnected")
        if g.cycle_rank < 1:
            raise TopologyError(f"topology {name!r} has no cycles (cycle rank 0)")
        return g

    @property
    def n(self) -> int:
        """Total number of physical edges."""
        return sum(s.multiplicity for s in self.sets)

    @property
    def cycle_rank(self) -> int:
        return len(self.sets) - self.num_vertices + 1

    @property
    def physical_edges(self) -> tuple[tuple[int, int], ...]:
        """``(tail, head)`` per physical edge id, in reference orientation."""
        return self._physical

    @property
    def num_physical_vertices(self) -> int:
        return self._num_physical_vertices

    @property
    def fixed_edge(self) -> int:
        return self.sets[self.fixed_set].edge_ids[0]

    def set_mask(self, j: int) -> int:
        m = 0
        for e in self.sets[j].edge_ids:
            m |= 1 << e
        return m

    def is_connected(self) -> bool:
        adj: dict[int, set[int]] = {v: set() for v in range(self.num_vertices)}
        for s in self.sets:
            adj[s.tail].add(s.head)
            adj[s.head].add(s.tail)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_vertices


# -- text format -------------------------------------------------------------


def parse_topology(text: str, source: str = "<string>") -> SetGraph:
    """Parse the line-oriented topology format.

    ``topology <name>``, ``vertices <count>``, ``set <j> <tail> <head> <mult>``
    (ascending ``j``) and an optional ``fix <j>``. ``#`` starts a comment.
    """
    name = None
    nverts = None
    fixed = 0
    sets: dict[int, tuple[int, int, int]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key, args = parts[0], parts[1:]

        def fail(msg: str) -> TopologyError:
            return TopologyError(f"{source}:{lineno}: {msg}")

        try:
            if key == "topology" and len(args) == 1:
                name = args[0]
            elif key == "vertices" and len(args) == 1:
                nverts = int(args[0])
            elif key == "set" and len(args) == 4:
                j, u, v, k = (int(a) for a in args)
                if j in sets:
                    raise fail(f"duplicate set id {j}")
                if j != len(sets):
                    raise fail(f"set ids must ascend from 0 (expected {len(sets)}, got {j})")
                sets[j] = (u, v, k)
            elif key == "fix" and len(args) == 1:
                fixed = int(args[0])
            else:
                raise fail(f"cannot parse {line!r}")
        except ValueError as exc:
            if isinstance(exc, TopologyError):
                raise
            raise fail(f"bad integer in {line!r}") from None
    if name is None:
        raise TopologyError(f"{source}: missing 'topology <name>' line")
    if nverts is None:
        raise TopologyError(f"{source}: missing 'vertices <count>' line")
    try:
        return SetGraph.build(name, nverts, [sets[j] for j in range(len(sets))], fixed)
    except TopologyError as exc:
        raise TopologyError(f"{source}: {exc}") from None


def format_topology(g: SetGraph) -> str:
    lines = [f"topology {g.name}", f"vertices {g.num_vertices}"]
    lines += [f"set {s.id} {s.tail} {s.head} {s.multiplicity}" for s in g.sets]
    if g.fixed_set:
        lines.append(f"fix {g.fixed_set}")
    return "\n".join(lines) + "\n"


def load_topology(path: str | Path) -> SetGraph:
    path = Path(path)
    return parse_topology(path.read_text(), str(path))


# -- cycles and clauses --------------------------------------------------------


def enumerate_cycles(g: SetGraph) -> list[SignedCycle]:
    """All simple cycles of the set-level multigraph, each exactly once.

    Cycles start at their lowest set id traversed tail -> head; output is
    sorted by length, then by the sorted tuple of set ids.
    """
    if g.cycle_rank < 1:
        raise TopologyError("graph has cycle rank 0")
    incident: dict[int, list[tuple[int, int]]] = {v: [] for v in range(g.num_vertices)}
    for s in g.sets:
        incident[s.tail].append((s.id, s.head))
        incident[s.head].append((s.id, s.tail))

    found: dict[frozenset[int], list[int]] = {}

    # rooted at the smallest vertex on the cycle; both directions get found
    # and are collapsed by their set-id support
    def extend(root: int, v: int, path_sets: list[int], visited: set[int]) -> None:
        for j, w in incident[v]:
            if j in path_sets:
                continue
            if w == root and path_sets:
                key = frozenset(path_sets + [j])
                found.setdefault(key, path_sets + [j])
            elif w > root and w not in visited:
                visited.add(w)
                path_sets.append(j)
                extend(root, w, path_sets, visited)
                path_sets.pop()
                visited.discard(w)

    for root in range(g.num_vertices):
        extend(root, root, [], {root})

    cycles = [_canonical_cycle(g, seq) for seq in found.values()]
    cycles.sort(key=lambda c: (len(c), sorted(c.set_ids)))
    return cycles


def _canonical_cycle(g: SetGraph, seq: list[int]) -> SignedCycle:
    # rotate so the lowest set leads, then walk it tail -> head
    k = seq.index(min(seq))
    seq = seq[k:] + seq[:k]
    first = g.sets[seq[0]]
    at = first.head
    rest = seq[1:]
    # the remaining sets must continue from `at`; flip the walk if they don't
    nxt = g.sets[rest[0]]
    if at not in (nxt.tail, nxt.head):
        rest = rest[::-1]
    entries = [(first.id, 1)]
    for j in rest:
        s = g.sets[j]
        if s.tail == at:
            entries.append((j, 1))
            at = s.head
        else:
            entries.append((j, -1))
            at = s.tail
    assert at == first.tail, "cycle walk did not close"
    return SignedCycle(tuple(entries))


def generate_clauses(g: SetGraph) -> ClauseSet:
    """One clause per simple cycle followed by its mirror (all polarities flipped)."""
    cycles = enumerate_cycles(g)
    base = [EloopClause(k, dict(c.entries)) for k, c in enumerate(cycles)]
    m = len(base)
    mirrors = [
        EloopClause(m + c.id, {j: -p for j, p in c.literals.items()}, mirror_of=c.id)
        for c in base
    ]
    return ClauseSet(base + mirrors, g.name)


def reduce_by_fixed_edge(cs: ClauseSet, g: SetGraph) -> ClauseSet:
    """Drop clauses demanding the fixed set reversed; they cannot fire once e_0 = 1."""
    fixed = g.fixed_set
    keep = [c for c in cs.clauses if c.literals.get(fixed) != -1]
    return ClauseSet.relabeled(keep, cs.graph_ref)


def _cycle_order(g: SetGraph, c: EloopClause) -> list[int]:
    """Vertices of the clause's cycle in walking order."""
    ends = {j: (g.sets[j].tail, g.sets[j].head) for j in c.literals}
    first = min(ends)
    order = [ends[first][0]]
    v = ends[first][1]
    used = {first}
    while v != order[0]:
        order.append(v)
        j = next(j for j, (a, b) in ends.items() if j not in used and v in (a, b))
        used.add(j)
        a, b = ends[j]
        v = b if v == a else a
    return order


def chord_sets(g: SetGraph, c: EloopClause) -> list[int]:
    """Sets outside the clause joining two cycle vertices that are not neighbours
    on the cycle, so both arcs they cut off hold at least two sets.
    """
    order = _cycle_order(g, c)
    pos = {v: i for i, v in enumerate(order)}
    n = len(order)
    out = []
    for s in g.sets:
        if s.id in c.literals or s.tail not in pos or s.head not in pos:
            continue
        d = abs(pos[s.tail] - pos[s.head])
        if min(d, n - d) >= 2:
            out.append(s.id)
    return out


def prune_implied_clauses(cs: ClauseSet, g: SetGraph) -> ClauseSet:
    """Drop clauses made redundant by a single-edge chord.

    If a cycle has a chord set holding exactly one physical edge, that edge
    points one way or the other, so a directed cycle always implies a directed
    sub-cycle through the chord. Both sub-cycles are strictly shorter, so by
    induction on length the constraint is carried by clauses that stay.
    Graphs with only multi-edge sets are returned unchanged.
    """
    keep = [
        c
        for c in cs.clauses
        if not any(g.sets[j].multiplicity == 1 for j in chord_sets(g, c))
    ]
    if len(keep) == len(cs.clauses):
        return cs
    return ClauseSet.relabeled(keep, cs.graph_ref)


def oracle_clauses(g: SetGraph, prune: bool = True) -> ClauseSet:
    """The clause list fed to synthesis: generated, reduced, optionally pruned."""
    cs = reduce_by_fixed_edge(generate_clauses(g), g)
    return prune_implied_clauses(cs, g) if prune else cs


# -- winner oracles --------------------------------------------------------------


def _check_size(g: SetGraph) -> None:
    if g.n > MAX_EXHAUSTIVE_EDGES:
        raise TopologyError(
            f"{g.n} edges exceeds the exhaustive enumeration bound of {MAX_EXHAUSTIVE_EDGES}"
        )


def fixed_assignments(g: SetGraph) -> np.ndarray:
    """Every assignment with the fixed edge set to 1, ascending."""
    _check_size(g)
    free = [i for i in range(g.n) if i != g.fixed_edge]
    low = np.arange(1 << len(free), dtype=np.uint64)
    out = np.full(low.shape, np.uint64(1 << g.fixed_edge))
    for pos, bit in enumerate(free):
        out |= ((low >> np.uint64(pos)) & np.uint64(1)) << np.uint64(bit)
    out.sort()
    return out


def clause_hits(g: SetGraph, cs: ClauseSet, assignments: np.ndarray) -> np.ndarray:
    """Boolean array, True where at least one clause is satisfied."""
    a = np.asarray(assignments, dtype=np.uint64)
    hit = np.zeros(a.shape, dtype=bool)
    for c in cs.clauses:
        ones = zeros = 0
        for j, p in c.literals.items():
            if p > 0:
                ones |= g.set_mask(j)
            else:
                zeros |= g.set_mask(j)
        mask = np.uint64(ones | zeros)
        hit |= (a & mask) == np.uint64(ones)
    return hit


def brute_force_winners(g: SetGraph, cs: ClauseSet) -> frozenset[int]:
    """Assignments with e_0 = 1 that satisfy no clause, by exhaustion."""
    a = fixed_assignments(g)
    return frozenset(int(x) for x in a[~clause_hits(g, cs, a)])


def acyclic_mask(g: SetGraph, assignments: np.ndarray) -> np.ndarray:
    """DFS cycle check of the oriented physical multigraph, per assignment."""
    tails = np.array([t for t, _ in g.physical_edges], dtype=np.int64)
    heads = np.array([h for _, h in g.physical_edges], dtype=np.int64)
    a = np.ascontiguousarray(assignments, dtype=np.uint64)
    return kernels.acyclic_mask(tails, heads, g.num_physical_vertices, a).astype(bool)


def cycle_detect_winners(g: SetGraph) -> frozenset[int]:
    """Acyclic orientations with e_0 = 1, found without any clause."""
    a = fixed_assignments(g)
    return frozenset(int(x) for x in a[acyclic_mask(g, a)])


def sample_assignments(g: SetGraph, count: int, seed: int = 0) -> np.ndarray:
    """Random assignments with the fixed edge at 1 (duplicates possible)."""
    rng = np.random.default_rng(seed)
    words = rng.integers(0, 1 << 62, size=count, dtype=np.int64).astype(np.uint64)
    if g.n < 64:
        words &= np.uint64((1 << g.n) - 1)
    return words | np.uint64(1 << g.fixed_edge)


def assignment_bits(a: int, n: int) -> tuple[int, ...]:
    return tuple((a >> i) & 1 for i in range(n))


def mirror_assignment(a: int, n: int) -> int:
    return a ^ ((1 << n) - 1)


def set_level_states(g: SetGraph, set_ids: Sequence[int]) -> Iterable[dict[int, int]]:
    """All set-level states over ``set_ids``: +1 all ones, -1 all zeros, 0 mixed.

    Mixed is only offered for sets with more than one edge.
    """
    choices = [(1, -1, 0) if g.sets[j].multiplicity > 1 else (1, -1) for j in set_ids]
    for combo in itertools.product(*choices):
        yield dict(zip(set_ids, combo))


def random_topology(rng: random.Random, max_vertices: int = 5, max_sets: int = 8) -> SetGraph:
    """Small random connected set-graph with at least one cycle (for tests)."""
    while True:
        nv = rng.randint(2, max_vertices)
        sets = []
        # spanning tree first, then extra sets
        for v in range(1, nv):
            u = rng.randrange(v)
            sets.append((u, v) if rng.random() < 0.5 else (v, u))
        for _ in range(rng.randint(1, max(1, max_sets - len(sets)))):
            u, v = rng.sample(range(nv), 2)
            sets.append((u, v))
        rng.shuffle(sets)
        triples = [(u, v, rng.randint(1, 2)) for u, v in sets]
        if sum(k for *_, k in triples) > 14:
            continue
        try:
            return SetGraph.build("random", nv, triples)
        except TopologyError:
            continue
