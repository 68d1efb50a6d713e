"""Grover oracle synthesis from a reduced clause set.

Pipeline: clauses sharing an ancilla (mutually exclusive groups), clauses
sharing an X-negation column (blocks), a depth-minimising block order, then
emission of the full Grover circuit.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from dagquery import kernels
from dagquery.circuit import CircuitIR, Gate, depth
from dagquery.clauses import (
    ClauseSet,
    block_compatible,
    mutual_aux_matrix,
    mutual_clauses_matrix,
    mutually_exclusive,
)
from dagquery.cliques import CliquePartition, greedy_clique_partition
from dagquery.topology import SetGraph

EXHAUSTIVE_BLOCKS = 8
DEFAULT_BUDGET = 20000
# reported depth treats each diffuser as a single multi-qubit operation
REPORT_OPAQUE = ("diffuser",)


class SynthesisError(ValueError):
    pass


@dataclass(frozen=True)
class OracleSpec:
    maux: CliquePartition
    blocks: CliquePartition
    order: tuple[int, ...]
    pad_qubits: int = 0

    @property
    def n_ancillas(self) -> int:
        return len(self.maux)

    def ordered_blocks(self) -> list[tuple[int, ...]]:
        return [self.blocks.groups[b] for b in self.order]


@dataclass(frozen=True)
class GroverParams:
    r: int
    N: int
    theta: float
    t: int
    predicted_success: float
    applicable: bool


def assign_ancillas(cs: ClauseSet) -> CliquePartition:
    return greedy_clique_partition(mutual_aux_matrix(cs))


def group_blocks(cs: ClauseSet) -> CliquePartition:
    return greedy_clique_partition(mutual_clauses_matrix(cs))


def needs_padding(r: int, N: int) -> bool:
    return 4 * r > N


def compute_grover_params(r: int, N: int) -> GroverParams:
    """Mixing angle, iteration count and success probability for r winners in N."""
    if not 0 < r < N:
        raise ValueError(f"need 0 < r < N, got r={r}, N={N}")
    theta = math.asin(math.sqrt(r / N))
    t = max(1, round(math.pi / (4 * theta) - 0.5))
    success = math.sin((2 * t + 1) * theta) ** 2
    # arcsin(sqrt(1/4)) sits within an ulp of pi/6
    applicable = theta <= math.pi / 6 + 1e-12
    return GroverParams(r, N, theta, t, success, applicable)


def plan(cs: ClauseSet, pad_qubits: int = 0) -> OracleSpec:
    """Ancilla groups and blocks, blocks in the order the partition produced them."""
    maux = assign_ancillas(cs)
    blocks = group_blocks(cs)
    return OracleSpec(maux, blocks, tuple(range(len(blocks))), pad_qubits)


def baseline_spec(cs: ClauseSet, pad_qubits: int = 0) -> OracleSpec:
    """Unoptimised reference: one ancilla per eloop, one block per clause.

    A clause and its mirror are trivially exclusive and share an ancilla, so
    the ancilla count equals the number of surviving cycles.
    """
    groups: list[list[int]] = []
    slot: dict[int, int] = {}
    for c in cs.clauses:
        if c.mirror_of is not None and c.mirror_of in slot:
            groups[slot[c.mirror_of]].append(c.id)
        else:
            slot[c.id] = len(groups)
            groups.append([c.id])
    maux = CliquePartition(tuple(tuple(g) for g in groups))
    blocks = CliquePartition(tuple((c.id,) for c in cs.clauses))
    return OracleSpec(maux, blocks, tuple(range(len(cs))), pad_qubits)


def validate_spec(cs: ClauseSet, spec: OracleSpec) -> None:
    m = len(cs)
    for label, part in (("ancilla group", spec.maux), ("block", spec.blocks)):
        seen = sorted(i for grp in part for i in grp)
        if seen != list(range(m)):
            raise SynthesisError(f"every clause must sit in exactly one {label}")
    if sorted(spec.order) != list(range(len(spec.blocks))):
        raise SynthesisError("block order is not a permutation")
    if spec.pad_qubits not in (0, 1):
        raise SynthesisError(f"pad_qubits must be 0 or 1, got {spec.pad_qubits}")
    for grp in spec.maux:
        for a, b in itertools.combinations(grp, 2):
            if not mutually_exclusive(cs[a], cs[b]):
                raise SynthesisError(f"c{a} and c{b} share an ancilla but can hold together")
    for grp in spec.blocks:
        for a, b in itertools.combinations(grp, 2):
            if not block_compatible(cs[a], cs[b]):
                raise SynthesisError(f"c{a} and c{b} disagree on a shared set in one block")


# -- circuit emission -------------------------------------------------------------


@dataclass(frozen=True)
class Layout:
    n_edges: int
    pad: int
    n_anc: int

    @property
    def search(self) -> range:
        return range(self.n_edges + self.pad)

    @property
    def ancillas(self) -> range:
        base = self.n_edges + self.pad
        return range(base, base + self.n_anc)

    @property
    def out(self) -> int:
        return self.n_edges + self.pad + self.n_anc

    @property
    def width(self) -> int:
        return self.out + 1


def _oracle_forward(
    g: SetGraph, cs: ClauseSet, spec: OracleSpec, lay: Layout
) -> tuple[list[Gate], dict[int, int]]:
    """Blocks in order, each behind the X column it needs; returns the final frame."""
    group_of = spec.maux.group_of()
    anc = list(lay.ancillas)
    frame = {s.id: 1 for s in g.sets}
    gates: list[Gate] = []
    for block in spec.ordered_blocks():
        need: dict[int, int] = {}
        for k in block:
            for j, p in cs[k].literals.items():
                if need.setdefault(j, p) != p:
                    raise SynthesisError(f"block {block} mixes polarities on set s{j}")
        for j in sorted(need):
            if frame[j] != need[j]:
                gates.extend(Gate.x(q) for q in g.sets[j].edge_ids)
                frame[j] = need[j]
        for k in block:
            if k not in group_of:
                raise SynthesisError(f"clause c{k} has no ancilla")
            ctl = sorted(q for j in cs[k].literals for q in g.sets[j].edge_ids)
            gates.append(Gate.mcx(ctl, anc[group_of[k]]))
    return gates, frame


def _kickback(g: SetGraph, frame: dict[int, int], lay: Layout) -> list[Gate]:
    e0 = g.fixed_edge
    ctl = list(lay.ancillas) + [e0] + list(range(lay.n_edges, lay.n_edges + lay.pad))
    gate = Gate.mcx(sorted(ctl), lay.out)
    if frame[g.fixed_set] < 0:
        return [Gate.x(e0), gate, Gate.x(e0)]
    return [gate]


def _diffuser(lay: Layout) -> list[Gate]:
    reg = list(lay.search)
    return (
        [Gate.h(q) for q in reg]
        + [Gate.x(q) for q in reg]
        + [Gate.mcz(reg)]
        + [Gate.x(q) for q in reg]
        + [Gate.h(q) for q in reg]
    )


def _init(lay: Layout) -> list[Gate]:
    return (
        [Gate.h(q) for q in lay.search]
        + [Gate.x(q) for q in lay.ancillas]
        + [Gate.x(lay.out), Gate.h(lay.out)]
    )


def emit_circuit(
    g: SetGraph, cs: ClauseSet, spec: OracleSpec, p: GroverParams | None = None
) -> CircuitIR:
    """Full Grover circuit: init, then ``p.t`` rounds of oracle, kickback, uncompute, diffuser.

    Qubits: edges ``0..n-1``, then the pad qubit if any, ancillas, and ``out`` last.
    """
    validate_spec(cs, spec)
    t = p.t if p is not None else 1
    lay = Layout(g.n, spec.pad_qubits, spec.n_ancillas)
    c = CircuitIR(lay.width)
    c.registers["edge"] = (0, g.n)
    if lay.pad:
        c.registers["pad"] = (g.n, g.n + lay.pad)
    c.registers["ancilla"] = (lay.ancillas.start, lay.ancillas.stop)
    c.registers["out"] = (lay.out, lay.out + 1)

    start = len(c.gates)
    c.extend(_init(lay))
    c.mark("init", start)
    fwd, frame = _oracle_forward(g, cs, spec, lay)
    kick = _kickback(g, frame, lay)
    for _ in range(t):
        for name, gs in (
            ("oracle", fwd),
            ("kickback", kick),
            ("uncompute", fwd[::-1]),
            ("diffuser", _diffuser(lay)),
        ):
            start = len(c.gates)
            c.extend(gs)
            c.mark(name, start)
    return c


def oracle_circuit(g: SetGraph, cs: ClauseSet, spec: OracleSpec) -> CircuitIR:
    """Only the clause-marking part on |e>|a> (no init, kickback or diffuser)."""
    lay = Layout(g.n, spec.pad_qubits, spec.n_ancillas)
    fwd, _ = _oracle_forward(g, cs, spec, lay)
    c = CircuitIR(lay.width - 1)
    c.registers["edge"] = (0, g.n)
    c.registers["ancilla"] = (lay.ancillas.start, lay.ancillas.stop)
    c.extend(fwd)
    c.mark("oracle", 0)
    start = len(c.gates)
    c.extend(fwd[::-1])
    c.mark("uncompute", start)
    return c


# -- block ordering ------------------------------------------------------------------


class _DepthEvaluator:
    """Reported depth for a block order, without building Gate objects."""

    def __init__(self, g: SetGraph, cs: ClauseSet, spec: OracleSpec, t: int):
        validate_spec(cs, spec)
        self.t = t
        self.lay = lay = Layout(g.n, spec.pad_qubits, spec.n_ancillas)
        self.width = lay.width
        group_of = spec.maux.group_of()
        anc = list(lay.ancillas)
        self.set_qubits = {s.id: [(q,) for q in s.edge_ids] for s in g.sets}
        self.needs = []
        self.mcx = []
        for block in spec.blocks:
            need: dict[int, int] = {}
            gates = []
            for k in block:
                need.update(cs[k].literals)
                ctl = sorted(q for j in cs[k].literals for q in g.sets[j].edge_ids)
                gates.append(tuple(ctl) + (anc[group_of[k]],))
            self.needs.append(sorted(need.items()))
            self.mcx.append(gates)
        self.init = [gt.qubits for gt in _init(lay)]
        self.diff = [tuple(lay.search)]
        self.g = g

    def gates(self, order: Sequence[int]) -> list[tuple[int, ...]]:
        frame = {j: 1 for j in self.set_qubits}
        fwd: list[tuple[int, ...]] = []
        for b in order:
            for j, p in self.needs[b]:
                if frame[j] != p:
                    fwd.extend(self.set_qubits[j])
                    frame[j] = p
            fwd.extend(self.mcx[b])
        kick = [gt.qubits for gt in _kickback(self.g, frame, self.lay)]
        body = fwd + kick + fwd[::-1] + self.diff
        return self.init + body * self.t

    def __call__(self, order: Sequence[int]) -> int:
        gs = self.gates(order)
        offsets = np.zeros(len(gs) + 1, dtype=np.int64)
        np.cumsum([len(x) for x in gs], out=offsets[1:])
        qubits = np.fromiter(itertools.chain.from_iterable(gs), dtype=np.int32, count=int(offsets[-1]))
        return int(kernels.asap_depth(qubits, offsets, self.width))


def optimize_order(
    spec: OracleSpec,
    g: SetGraph,
    cs: ClauseSet,
    p: GroverParams | None = None,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> OracleSpec:
    """Reorder blocks to minimise the reported full-circuit depth.

    Exhaustive over all permutations up to ``EXHAUSTIVE_BLOCKS`` blocks;
    beyond that, seeded simulated annealing with restarts spending at most
    ``budget`` depth evaluations. Ties go to the lexicographically smaller
    order, and the incoming order is always a candidate, so depth never rises.
    """
    nb = len(spec.blocks)
    if nb <= 1:
        return replace(spec, order=tuple(range(nb)))
    evaluate = _DepthEvaluator(g, cs, spec, p.t if p is not None else 1)
    start = tuple(spec.order)
    best = (evaluate(start), start)
    if nb <= EXHAUSTIVE_BLOCKS:
        for perm in itertools.permutations(range(nb)):
            cand = (evaluate(perm), perm)
            if cand < best:
                best = cand
    else:
        best = _anneal(evaluate, start, best, random.Random(seed), budget)
    return replace(spec, order=best[1])


def _anneal(evaluate, start, best, rng: random.Random, budget: int):
    nb = len(start)
    restarts = max(1, min(8, budget // 500))
    per_run = max(1, (budget - 1) // restarts)
    for r in range(restarts):
        cur = list(start) if r == 0 else rng.sample(range(nb), nb)
        cur_cost = evaluate(cur)
        temp = max(1.0, 0.1 * cur_cost)
        cool = (0.01 / temp) ** (1.0 / per_run) if per_run > 1 else 1.0
        for _ in range(per_run):
            i = rng.randrange(nb - 1)
            cand = cur[:]
            cand[i], cand[i + 1] = cand[i + 1], cand[i]
            cost = evaluate(cand)
            if cost <= cur_cost or rng.random() < math.exp((cur_cost - cost) / temp):
                cur, cur_cost = cand, cost
                if (cost, tuple(cand)) < best:
                    best = (cost, tuple(cand))
            temp *= cool
    return best


def full_depth(
    g: SetGraph,
    cs: ClauseSet,
    spec: OracleSpec,
    p: GroverParams | None = None,
    opaque: Sequence[str] = REPORT_OPAQUE,
) -> int:
    return depth(emit_circuit(g, cs, spec, p), opaque)


# -- text format ---------------------------------------------------------------------


def format_spec(spec: OracleSpec, name: str = "") -> str:
    lines = [f"oracle {name}".rstrip(), f"pad {spec.pad_qubits}"]
    for i, grp in enumerate(spec.maux):
        lines.append(f"maux {i}: " + " ".join(f"c{k}" for k in grp))
    for i, grp in enumerate(spec.blocks):
        lines.append(f"block {i}: " + " ".join(f"c{k}" for k in grp))
    lines.append("order " + " ".join(str(b) for b in spec.order))
    return "\n".join(lines) + "\n"


def parse_spec(text: str) -> tuple[OracleSpec, str]:
    name = ""
    pad = 0
    maux: list[tuple[int, ...]] = []
    blocks: list[tuple[int, ...]] = []
    order: tuple[int, ...] = ()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        try:
            if head == "oracle":
                name = rest.strip()
            elif head == "pad":
                pad = int(rest)
            elif head in ("maux", "block"):
                idx, _, members = rest.partition(":")
                grp = tuple(int(tok[1:]) for tok in members.split())
                target = maux if head == "maux" else blocks
                if int(idx) != len(target):
                    raise SynthesisError(f"line {lineno}: {head} index out of sequence")
                target.append(grp)
            elif head == "order":
                order = tuple(int(tok) for tok in rest.split())
            else:
                raise SynthesisError(f"line {lineno}: unknown statement {head!r}")
        except ValueError as exc:
            if isinstance(exc, SynthesisError):
                raise
            raise SynthesisError(f"line {lineno}: cannot parse {raw!r}") from None
    return OracleSpec(CliquePartition(tuple(maux)), CliquePartition(tuple(blocks)), order, pad), name

