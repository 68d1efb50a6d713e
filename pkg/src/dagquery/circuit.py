"""Gate-level circuit IR with depth, width and area metrics.

The gate alphabet is H, X, MCX and MCZ. Depth is the ASAP layer count where
every gate, multi-controlled or not, occupies one layer on all of its qubits.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from dagquery import kernels


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind in ("H", "X"):
            if len(self.targets) != 1 or self.controls:
                raise CircuitError(f"{self.kind} acts on exactly one qubit")
        elif self.kind == "MCX":
            if len(self.targets) != 1 or not self.controls:
                raise CircuitError("MCX needs one target and at least one control")
            if self.targets[0] in self.controls:
                raise CircuitError("MCX target among its controls")
        elif self.kind == "MCZ":
            if len(self.targets) < 1 or self.controls:
                raise CircuitError("MCZ lists its qubits as targets")
        else:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind} touches a qubit twice")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    @property
    def arity(self) -> int:
        """Number of controls (MCZ: qubits minus one)."""
        if self.kind == "MCZ":
            return len(self.targets) - 1
        return len(self.controls)

    @staticmethod
    def h(q: int) -> "Gate":
        return Gate("H", (q,))

    @staticmethod
    def x(q: int) -> "Gate":
        return Gate("X", (q,))

    @staticmethod
    def mcx(controls: Iterable[int], target: int) -> "Gate":
        return Gate("MCX", (target,), tuple(controls))

    @staticmethod
    def mcz(qubits: Iterable[int]) -> "Gate":
        return Gate("MCZ", tuple(qubits))


@dataclass
class CircuitIR:
    n_qubits: int
    registers: dict[str, tuple[int, int]] = field(default_factory=dict)
    gates: list[Gate] = field(default_factory=list)
    # named spans [start, stop) of gate indices
    regions: list[tuple[str, int, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        for q in g.qubits:
            if not 0 <= q < self.n_qubits:
                raise CircuitError(f"qubit {q} outside 0..{self.n_qubits - 1}")

    def append(self, g: Gate) -> None:
        self._check(g)
        self.gates.append(g)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def register(self, name: str) -> range:
        lo, hi = self.registers.get(name, (0, 0))
        return range(lo, hi)

    def mark(self, name: str, start: int) -> None:
        self.regions.append((name, start, len(self.gates)))

    def region_gates(self, *names: str) -> list[Gate]:
        out = []
        for name, lo, hi in self.regions:
            if name in names:
                out.extend(self.gates[lo:hi])
        return out

    def prefix(self, stop: int) -> "CircuitIR":
        regions = [(n, lo, min(hi, stop)) for n, lo, hi in self.regions if lo < stop]
        return CircuitIR(self.n_qubits, dict(self.registers), self.gates[:stop], regions)

    def flat(self, opaque: Sequence[str] = ()) -> tuple[np.ndarray, np.ndarray]:
        """CSR view (qubit list, offsets) with ``opaque`` regions fused per span."""
        groups: list[Iterable[int]] = []
        spans = sorted((lo, hi) for n, lo, hi in self.regions if n in opaque and hi > lo)
        i = 0
        for lo, hi in spans + [(len(self.gates), len(self.gates))]:
            groups.extend(g.qubits for g in self.gates[i:lo])
            if hi > lo:
                groups.append(sorted({q for g in self.gates[lo:hi] for q in g.qubits}))
            i = max(i, hi)
        sizes = [len(q) for q in groups]
        offsets = np.zeros(len(groups) + 1, dtype=np.int64)
        np.cumsum(sizes, out=offsets[1:])
        qubits = np.fromiter((q for grp in groups for q in grp), dtype=np.int32, count=int(offsets[-1]))
        return qubits, offsets


@dataclass(frozen=True)
class Metrics:
    depth: int
    width: int

    @property
    def area(self) -> int:
        return self.depth * self.width


def depth(c: CircuitIR, opaque: Sequence[str] = ()) -> int:
    """ASAP layer count. Regions named in ``opaque`` count as one gate per span."""
    qubits, offsets = c.flat(opaque)
    return int(kernels.asap_depth(qubits, offsets, c.n_qubits))


def gate_depth(gates: Sequence[Sequence[int]], n_qubits: int) -> int:
    """Depth of a bare list of per-gate qubit tuples."""
    offsets = np.zeros(len(gates) + 1, dtype=np.int64)
    np.cumsum([len(g) for g in gates], out=offsets[1:])
    qubits = np.fromiter((q for g in gates for q in g), dtype=np.int32, count=int(offsets[-1]))
    return int(kernels.asap_depth(qubits, offsets, n_qubits))


def metrics(c: CircuitIR, opaque: Sequence[str] = ()) -> Metrics:
    return Metrics(depth(c, opaque), c.n_qubits)


def layers(c: CircuitIR) -> list[list[int]]:
    """Gate indices grouped by their ASAP layer."""
    front = [0] * c.n_qubits
    out: list[list[int]] = []
    for i, g in enumerate(c.gates):
        lay = max(front[q] for q in g.qubits)
        for q in g.qubits:
            front[q] = lay + 1
        if lay == len(out):
            out.append([])
        out[lay].append(i)
    return out


# -- text format -----------------------------------------------------------------


def _qlist(qs: Sequence[int]) -> str:
    if len(qs) > 2 and list(qs) == list(range(qs[0], qs[0] + len(qs))):
        return f"q{qs[0]}..q{qs[-1]}"
    return ",".join(f"q{q}" for q in qs)


def _parse_qlist(tok: str) -> list[int]:
    m = re.fullmatch(r"q(\d+)\.\.q(\d+)", tok)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        return list(range(lo, hi + 1))
    return [int(t[1:]) for t in tok.split(",") if t]


def format_circuit(c: CircuitIR) -> str:
    lines = [f"qubits {c.n_qubits}"]
    for name, (lo, hi) in c.registers.items():
        lines.append(f"register {name} {lo} {hi}")
    for name, lo, hi in c.regions:
        lines.append(f"region {name} {lo} {hi}")
    for g in c.gates:
        if g.kind in ("H", "X"):
            lines.append(f"{g.kind} q{g.targets[0]}")
        elif g.kind == "MCX":
            lines.append(f"MCX c:{_qlist(g.controls)} t:q{g.targets[0]}")
        else:
            lines.append(f"MCZ {_qlist(g.targets)}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> CircuitIR:
    """Inverse of :func:`format_circuit`; ``H``/``X`` lines may list several qubits."""
    n: int | None = None
    registers: dict[str, tuple[int, int]] = {}
    regions: list[tuple[str, int, int]] = []
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "qubits":
                n = int(rest[0])
            elif head == "register":
                registers[rest[0]] = (int(rest[1]), int(rest[2]))
            elif head == "region":
                regions.append((rest[0], int(rest[1]), int(rest[2])))
            elif head in ("H", "X"):
                gates.extend(Gate(head, (q,)) for tok in rest for q in _parse_qlist(tok))
            elif head == "MCX":
                ctl = next(t for t in rest if t.startswith("c:"))[2:]
                tgt = next(t for t in rest if t.startswith("t:"))[2:]
                gates.append(Gate.mcx(_parse_qlist(ctl), _parse_qlist(tgt)[0]))
            elif head == "MCZ":
                gates.append(Gate.mcz(q for tok in rest for q in _parse_qlist(tok)))
            else:
                raise CircuitError(f"unknown statement {head!r}")
        except (IndexError, ValueError, StopIteration) as exc:
            raise CircuitError(f"line {lineno}: cannot parse {raw!r} ({exc})") from None
    if n is None:
        raise CircuitError("missing 'qubits' line")
    c = CircuitIR(n, registers, [], regions)
    c.extend(gates)
    return c


# -- multi-controlled gate decomposition ---------------------------------------------

DECOMPOSE_MODES = ("borrow-free-ladder", "none")


def _toffoli(a: int, b: int, t: int) -> Gate:
    return Gate.mcx((a, b), t)


def mcx_ladder(controls: Sequence[int], target: int, dirty: Sequence[int]) -> list[Gate]:
    """C^m X as 4(m-2) Toffolis over m-2 borrowed qubits left as found.

    The borrowed qubits may hold any state; each is toggled an even number
    of times per branch, so they come back unchanged.
    """
    x = list(controls)
    m = len(x)
    if m <= 2:
        return [Gate.mcx(x, target)]
    a = list(dirty[: m - 2])
    if len(a) < m - 2:
        raise CircuitError(f"ladder for {m} controls needs {m - 2} spare qubits")
    # 1-based names from the construction: x_i = x[i-1], a_i = a[i-1]
    down = [_toffoli(x[i - 1], a[i - 3], a[i - 2]) for i in range(m - 1, 2, -1)]
    up = down[::-1]
    core = down + [_toffoli(x[0], x[1], a[0])] + up
    top = _toffoli(x[m - 1], a[m - 3], target)
    return [top] + core + [top] + core


def mcx_split(
    controls: Sequence[int], target: int, spare: int, others: Sequence[int]
) -> list[Gate]:
    """C^m X with a single borrowed qubit: two half-size gates, each applied twice."""
    x = list(controls)
    m1 = (len(x) + 1) // 2
    c1, c2 = x[:m1], x[m1:]
    g1 = _decompose_one(c1, spare, list(c2) + [target] + list(others))
    g2 = _decompose_one(c2 + [spare], target, list(c1) + list(others))
    return g1 + g2 + g1 + g2


def _decompose_one(controls: Sequence[int], target: int, free: Sequence[int]) -> list[Gate]:
    m = len(controls)
    if m <= 2:
        return [Gate.mcx(controls, target)]
    if len(free) >= m - 2:
        return mcx_ladder(controls, target, free)
    if free:
        return mcx_split(controls, target, free[0], free[1:])
    raise CircuitError(f"no spare qubit available to decompose a {m}-control gate")


def decompose_mcx(c: CircuitIR, mode: str = "borrow-free-ladder") -> CircuitIR:
    """Rewrite MCX/MCZ with three or more controls into Toffolis, CNOTs, X and H.

    Spare qubits are borrowed from the circuit itself, preferring those idle
    for longest, so the width never grows. Gates with at most two controls
    are left alone. MCZ becomes H-conjugated MCX on its last qubit.
    """
    if mode not in DECOMPOSE_MODES:
        raise CircuitError(f"unknown decomposition mode {mode!r}")
    out = CircuitIR(c.n_qubits, dict(c.registers))
    if mode == "none":
        out.gates = list(c.gates)
        out.regions = list(c.regions)
        return out
    front = [0] * c.n_qubits

    def emit(gs: list[Gate]) -> None:
        for g in gs:
            lay = max(front[q] for q in g.qubits) + 1
            for q in g.qubits:
                front[q] = lay
            out.append(g)

    new_start: dict[int, int] = {}
    for i, g in enumerate(c.gates):
        new_start[i] = len(out.gates)
        if g.arity < 3:
            emit([g])
            continue
        used = set(g.qubits)
        free = sorted((q for q in range(c.n_qubits) if q not in used), key=lambda q: (front[q], q))
        if g.kind == "MCX":
            emit(_decompose_one(g.controls, g.targets[0], free))
        else:
            *ctl, tgt = g.targets
            emit([Gate.h(tgt)] + _decompose_one(ctl, tgt, free) + [Gate.h(tgt)])
    new_start[len(c.gates)] = len(out.gates)
    out.regions = [(n, new_start[lo], new_start[hi]) for n, lo, hi in c.regions]
    return out
