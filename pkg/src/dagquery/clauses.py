"""Eloop clauses: conjunctions of signed set literals.

A literal ``+j`` demands every edge of set ``j`` in its reference direction,
``-j`` demands every edge reversed. Clauses are pure conjunctions, so two of
them can never hold together exactly when some set appears with opposite signs.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:
    from dagquery.topology import SetGraph


class ClauseFormatError(ValueError):
    pass


@dataclass(frozen=True)
class EloopClause:
    id: int
    literals: dict[int, int]
    mirror_of: int | None = None

    def __post_init__(self) -> None:
        if any(p not in (1, -1) for p in self.literals.values()):
            raise ValueError(f"clause c{self.id}: polarities must be +1 or -1")

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.literals)

    def key(self) -> frozenset[tuple[int, int]]:
        """Label-free identity of the clause's content."""
        return frozenset(self.literals.items())

    def mirrored(self) -> "EloopClause":
        return EloopClause(self.id, {j: -p for j, p in self.literals.items()})

    def __str__(self) -> str:
        lits = " ".join(f"{'+' if p > 0 else '-'}s{j}" for j, p in sorted(self.literals.items()))
        return f"c{self.id}: {lits}"


@dataclass
class ClauseSet:
    clauses: list[EloopClause]
    graph_ref: str = ""

    def __post_init__(self) -> None:
        for k, c in enumerate(self.clauses):
            if c.id != k:
                raise ValueError(f"clause ids must be dense: position {k} holds c{c.id}")

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __getitem__(self, k: int) -> EloopClause:
        return self.clauses[k]

    @classmethod
    def relabeled(cls, clauses: Sequence[EloopClause], graph_ref: str = "") -> "ClauseSet":
        """Renumber ``clauses`` densely, keeping mirror links that survive."""
        new_id = {c.id: k for k, c in enumerate(clauses)}
        out = []
        for k, c in enumerate(clauses):
            src = new_id.get(c.mirror_of) if c.mirror_of is not None else None
            out.append(EloopClause(k, dict(c.literals), src))
        return cls(out, graph_ref)

    @property
    def set_ids(self) -> list[int]:
        return sorted({j for c in self.clauses for j in c.literals})

    def keys(self) -> list[frozenset[tuple[int, int]]]:
        return [c.key() for c in self.clauses]


# -- predicates -------------------------------------------------------------------


def evaluate_clause(c: EloopClause, g: "SetGraph", a: int) -> bool:
    """True iff assignment ``a`` (bit i = e_i) satisfies every literal of ``c``."""
    for j, p in c.literals.items():
        m = g.set_mask(j)
        if (a & m) != (m if p > 0 else 0):
            return False
    return True


def evaluate_set_level(c: EloopClause, state: dict[int, int]) -> bool:
    """Evaluate on a set-level state (+1 all ones, -1 all zeros, 0 mixed)."""
    return all(state.get(j, 0) == p for j, p in c.literals.items())


def mutually_exclusive(ci: EloopClause, cj: EloopClause) -> bool:
    """Some set carries opposite polarities, so ``ci and cj`` is empty."""
    lits = cj.literals
    return any(lits.get(j) == -p for j, p in ci.literals.items())


def block_compatible(ci: EloopClause, cj: EloopClause) -> bool:
    """Polarities agree on every shared set; one X column then serves both."""
    lits = cj.literals
    return all(lits.get(j, p) == p for j, p in ci.literals.items())


@dataclass(frozen=True)
class AdjacencyMatrix:
    bits: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        b = self.bits
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if (b != b.T).any() or b.diagonal().any():
            raise ValueError("adjacency matrix must be symmetric with zero diagonal")

    @property
    def size(self) -> int:
        return self.bits.shape[0]

    def neighbors(self) -> list[set[int]]:
        return [set(np.flatnonzero(row).tolist()) for row in self.bits]

    def edge_count(self) -> int:
        return int(self.bits.sum()) // 2


def _pairwise(cs: ClauseSet | Sequence[EloopClause], pred) -> AdjacencyMatrix:
    clauses = list(cs)
    m = len(clauses)
    bits = np.zeros((m, m), dtype=np.uint8)
    for i in range(m):
        for j in range(i + 1, m):
            if pred(clauses[i], clauses[j]):
                bits[i, j] = bits[j, i] = 1
    return AdjacencyMatrix(bits)


def mutual_aux_matrix(cs: ClauseSet | Sequence[EloopClause]) -> AdjacencyMatrix:
    """Exclusivity graph: clauses that may share an ancilla are adjacent."""
    return _pairwise(cs, mutually_exclusive)


def is_outer(c: EloopClause) -> bool:
    """All literals positive: the clause needs no negation column at all."""
    return all(p > 0 for p in c.literals.values())


def mutual_clauses_matrix(cs: ClauseSet | Sequence[EloopClause]) -> AdjacencyMatrix:
    """Block graph: clauses that may share one X-negation column are adjacent.

    All-positive clauses are left isolated so each forms a block of its own.
    """
    return _pairwise(
        cs, lambda a, b: not is_outer(a) and not is_outer(b) and block_compatible(a, b)
    )


# -- text format -------------------------------------------------------------------

_LINE = re.compile(r"^c(\d+):((?:\s+[+-]s\d+)+)(?:\s+\(mirror c(\d+)\))?$")


def format_clauses(cs: ClauseSet) -> str:
    lines = [f"# clauses {cs.graph_ref}"] if cs.graph_ref else []
    for c in cs.clauses:
        line = str(c)
        if c.mirror_of is not None:
            line += f" (mirror c{c.mirror_of})"
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_clauses(text: str) -> ClauseSet:
    ref = ""
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# clauses "):
                ref = line[len("# clauses "):]
            continue
        m = _LINE.match(line)
        if m is None:
            raise ClauseFormatError(f"line {lineno}: cannot parse {raw!r}")
        lits: dict[int, int] = {}
        for tok in m.group(2).split():
            j = int(tok[2:])
            if j in lits:
                raise ClauseFormatError(f"line {lineno}: set s{j} repeated")
            lits[j] = 1 if tok[0] == "+" else -1
        mirror = int(m.group(3)) if m.group(3) is not None else None
        clauses.append(EloopClause(int(m.group(1)), lits, mirror))
    try:
        return ClauseSet(clauses, ref)
    except ValueError as exc:
        raise ClauseFormatError(str(exc)) from None


def parse_literals(spec: str) -> dict[int, int]:
    """``"s0 ~s4 s5"`` -> ``{0: 1, 4: -1, 5: 1}`` (``~`` marks a reversed set)."""
    out = {}
    for tok in spec.split():
        neg = tok.startswith("~")
        out[int(tok.lstrip("~s"))] = -1 if neg else 1
    return out


def catalog_match(
    ours: Iterable[EloopClause], theirs: Iterable[EloopClause]
) -> tuple[bool, list[str], list[str]]:
    """Compare clause lists up to relabeling and one global mirror.

    Returns ``(match, missing, unexpected)`` where the lists name clauses of
    ``theirs`` absent from ``ours`` and vice versa under the better of the
    direct and globally mirrored comparison.
    """
    ours = list(ours)
    theirs = list(theirs)
    best = None
    for flip in (False, True):
        mine = [c.mirrored().key() if flip else c.key() for c in ours]
        ref = [c.key() for c in theirs]
        missing = [str(c) for c, k in zip(theirs, ref) if k not in mine]
        unexpected = [str(c) for c, k in zip(ours, mine) if k not in ref]
        dupes = len(set(mine)) != len(mine) or len(set(ref)) != len(ref)
        ok = not missing and not unexpected and len(mine) == len(ref) and not dupes
        cand = (ok, missing, unexpected)
        if ok:
            return cand
        if best is None or len(missing) + len(unexpected) < len(best[1]) + len(best[2]):
            best = cand
    assert best is not None
    return best
