"""Dense statevector simulation of CircuitIR and Grover verification.

Amplitudes are little-endian: qubit ``q`` is bit ``q`` of the basis index.
The search register (edges, then the pad qubit) occupies the low bits, so its
marginal is a plain reshape and sum.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from dagquery.circuit import CircuitIR, Gate

DEFAULT_MAX_QUBITS = 24
NORM_TOL = 1e-12
_S = 1.0 / math.sqrt(2.0)


class SimulationError(ValueError):
    pass


@dataclass
class Statevector:
    amplitudes: np.ndarray
    n_qubits: int

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "Statevector":
        amp = np.zeros(1 << n_qubits, dtype=np.complex128)
        amp[index] = 1.0
        return cls(amp, n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def marginal(self, low_bits: int) -> np.ndarray:
        """Distribution over the lowest ``low_bits`` qubits."""
        p = self.probabilities().reshape(-1, 1 << low_bits)
        return p.sum(axis=0)


def _index(n: int, fixed: dict[int, int]) -> tuple:
    # axis n-1-q of the (2,)*n view holds qubit q
    idx: list = [slice(None)] * n
    for q, v in fixed.items():
        idx[n - 1 - q] = v
    return tuple(idx)


def apply_gate(view: np.ndarray, g: Gate, n: int) -> None:
    """Apply ``g`` in place to the ``(2,)*n`` tensor view of the amplitudes."""
    ctl = {q: 1 for q in g.controls}
    if g.kind == "H":
        (t,) = g.targets
        i0, i1 = _index(n, {t: 0}), _index(n, {t: 1})
        a0 = view[i0].copy()
        a1 = view[i1].copy()
        view[i0] = (a0 + a1) * _S
        view[i1] = (a0 - a1) * _S
    elif g.kind in ("X", "MCX"):
        (t,) = g.targets
        i0, i1 = _index(n, {**ctl, t: 0}), _index(n, {**ctl, t: 1})
        tmp = view[i0].copy()
        view[i0] = view[i1]
        view[i1] = tmp
    elif g.kind == "MCZ":
        view[_index(n, {q: 1 for q in g.qubits})] *= -1
    else:
        raise SimulationError(f"cannot simulate gate kind {g.kind!r}")


def _check_budget(n_qubits: int, max_qubits: int) -> None:
    if n_qubits > max_qubits:
        raise SimulationError(
            f"circuit needs {n_qubits} qubits, above the simulation budget of {max_qubits}"
        )


def run(
    c: CircuitIR,
    max_qubits: int = DEFAULT_MAX_QUBITS,
    initial: int | np.ndarray | Statevector = 0,
    check_norm: bool = False,
) -> Statevector:
    """Apply the gates of ``c`` in order, starting from ``|initial>``.

    ``initial`` is a basis index, an amplitude array or a Statevector (copied).
    With ``check_norm`` every gate is followed by a norm check; the state is
    never renormalised.
    """
    n = c.n_qubits
    _check_budget(n, max_qubits)
    if isinstance(initial, Statevector):
        amp = initial.amplitudes.astype(np.complex128, copy=True)
    elif isinstance(initial, np.ndarray):
        amp = initial.astype(np.complex128, copy=True)
    else:
        amp = Statevector.basis(n, int(initial)).amplitudes
    if amp.shape != (1 << n,):
        raise SimulationError(f"initial state has {amp.size} amplitudes, expected {1 << n}")
    view = amp.reshape((2,) * n) if n else amp
    start = np.linalg.norm(amp)
    for k, g in enumerate(c.gates):
        apply_gate(view, g, n)
        if check_norm:
            drift = abs(np.linalg.norm(amp) - start)
            if drift > NORM_TOL:
                raise SimulationError(f"norm drifted by {drift:.3e} after gate {k} ({g.kind})")
    return Statevector(amp, n)


# -- classical routes -------------------------------------------------------------


def permute_basis(c: CircuitIR, states: np.ndarray) -> np.ndarray:
    """Image of each basis index under a circuit of X, MCX and MCZ gates.

    MCZ only changes phases, so it leaves the index alone. H has no
    classical image and is rejected.
    """
    s = np.asarray(states, dtype=np.int64).copy()
    for g in c.gates:
        if g.kind == "MCZ":
            continue
        if g.kind not in ("X", "MCX"):
            raise SimulationError(f"{g.kind} has no classical basis image")
        cmask = 0
        for q in g.controls:
            cmask |= 1 << q
        hit = (s & cmask) == cmask
        s[hit] ^= 1 << g.targets[0]
    return s


def tagged_restoration_error(c: CircuitIR, states: Sequence[int], max_qubits: int = DEFAULT_MAX_QUBITS) -> float:
    """Run ``c`` once on a superposition giving each listed basis state a
    distinct amplitude; return the worst amplitude error against the input.

    A circuit that restores every listed basis state (phases included) maps
    this vector to itself, so one pass covers the whole list.
    """
    states = np.unique(np.asarray(states, dtype=np.int64))
    amp = np.zeros(1 << c.n_qubits, dtype=np.complex128)
    tags = np.arange(1, len(states) + 1, dtype=np.float64)
    amp[states] = tags / np.linalg.norm(tags)
    out = run(c, max_qubits, amp).amplitudes
    return float(np.max(np.abs(out - amp)))


def negative_search_states(sv: Statevector, search_bits: int, rest: int) -> frozenset[int]:
    """Search-register indices whose amplitude is negative in the slice where
    the remaining qubits read ``rest``.
    """
    block = sv.amplitudes.reshape(-1, 1 << search_bits)[rest]
    return frozenset(int(i) for i in np.flatnonzero(block.real < -NORM_TOL))


# -- Grover verification ---------------------------------------------------------


@dataclass(frozen=True)
class MeasurementReport:
    name: str
    n_qubits: int
    search_bits: int
    probabilities: np.ndarray = field(repr=False, compare=False)
    threshold: float
    amplified: frozenset[int]
    expected: frozenset[int]
    winner_probability: float
    predicted_success: float

    @property
    def missing(self) -> list[int]:
        return sorted(self.expected - self.amplified)

    @property
    def extra(self) -> list[int]:
        return sorted(self.amplified - self.expected)

    @property
    def ok(self) -> bool:
        floor = max(0.8, self.predicted_success - 0.01)
        return self.amplified == self.expected and self.winner_probability >= floor

    @property
    def total_probability(self) -> float:
        return float(self.probabilities.sum())

    def winner_hash(self) -> str:
        text = ",".join(str(s) for s in sorted(self.amplified))
        return hashlib.sha256(text.encode()).hexdigest()

    def to_text(self, list_states: bool = True) -> str:
        lines = [
            f"report {self.name}".rstrip(),
            f"qubits {self.n_qubits}",
            f"search_bits {self.search_bits}",
            f"threshold {self.threshold:.12e}",
            f"amplified {len(self.amplified)}",
            f"expected {len(self.expected)}",
            f"winner_probability {self.winner_probability:.12f}",
            f"predicted_success {self.predicted_success:.12f}",
            f"total_probability {self.total_probability:.12f}",
            f"winner_hash sha256:{self.winner_hash()}",
            f"verdict {'ok' if self.ok else 'mismatch'}",
        ]
        if self.missing:
            lines.append("missing " + " ".join(str(s) for s in self.missing))
        if self.extra:
            lines.append("extra " + " ".join(str(s) for s in self.extra))
        if list_states:
            width = (self.search_bits + 3) // 4
            for s in sorted(self.amplified):
                lines.append(f"state 0x{s:0{width}x} {self.probabilities[s]:.12e}")
        return "\n".join(lines) + "\n"


def search_bits(c: CircuitIR) -> int:
    lo, hi = c.registers["edge"]
    if "pad" in c.registers:
        hi = c.registers["pad"][1]
    return hi - lo


def extend_winners(winners: Iterable[int], n_edges: int, pad: int) -> frozenset[int]:
    """Winners as search-register indices: the pad qubit, if present, reads 1."""
    bit = (1 << n_edges) if pad else 0
    return frozenset(int(w) | bit for w in winners)


def measure(sv: Statevector, k: int, expected: Iterable[int], predicted: float, name: str = "") -> MeasurementReport:
    probs = sv.marginal(k)
    threshold = 2.0 / (1 << k)
    amplified = frozenset(int(i) for i in np.flatnonzero(probs > threshold))
    expected = frozenset(expected)
    win = float(probs[sorted(expected)].sum()) if expected else 0.0
    return MeasurementReport(name, sv.n_qubits, k, probs, threshold, amplified, expected, win, predicted)


def grover_verify(
    g,
    c: CircuitIR,
    p,
    winners: Iterable[int],
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> MeasurementReport:
    """Simulate the full Grover circuit and compare the amplified set with ``winners``."""
    _check_budget(c.n_qubits, max_qubits)
    k = search_bits(c)
    pad = k - g.n
    sv = run(c, max_qubits)
    return measure(sv, k, extend_winners(winners, g.n, pad), p.predicted_success, g.name)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
