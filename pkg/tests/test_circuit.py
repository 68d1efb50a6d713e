import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dagquery import simulator
from dagquery.circuit import (
    CircuitError,
    CircuitIR,
    Gate,
    decompose_mcx,
    depth,
    format_circuit,
    layers,
    mcx_ladder,
    metrics,
    parse_circuit,
)


def circ(n, gates, regions=()):
    c = CircuitIR(n)
    c.extend(gates)
    c.regions = list(regions)
    return c


@st.composite
def circuits(draw, n_max=6, g_max=12, spare=False):
    n = draw(st.integers(3, n_max))
    # leave one qubit free when the circuit is meant for decomposition
    top = n - 1 if spare else n
    rng = random.Random(draw(st.integers(0, 2**32)))
    gates = []
    for _ in range(draw(st.integers(0, g_max))):
        kind = rng.choice("HXMZ")
        if kind == "H":
            gates.append(Gate.h(rng.randrange(n)))
        elif kind == "X":
            gates.append(Gate.x(rng.randrange(n)))
        elif kind == "M":
            qs = rng.sample(range(n), rng.randint(2, top))
            gates.append(Gate.mcx(qs[1:], qs[0]))
        else:
            gates.append(Gate.mcz(rng.sample(range(n), rng.randint(1, top))))
    return circ(n, gates)


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("MCX", (0,), (0, 1))
    with pytest.raises(CircuitError):
        Gate("SWAP", (0, 1))
    with pytest.raises(CircuitError):
        Gate("H", (0, 1))
    with pytest.raises(CircuitError, match="qubit"):
        circ(2, [Gate.x(2)])


def test_depth_examples():
    assert depth(circ(2, [Gate.h(0), Gate.x(1)])) == 1
    assert depth(circ(5, [Gate.h(q) for q in range(5)])) == 1
    c = circ(3, [Gate.h(0), Gate.mcx((0, 1), 2), Gate.x(1)])
    assert depth(c) == 3
    m = metrics(circ(3, [Gate.h(q) for q in range(3)]))
    assert (m.depth, m.width, m.area) == (1, 3, 3)


def test_opaque_region_counts_once():
    gates = [Gate.h(0), Gate.x(0), Gate.mcz((0, 1)), Gate.x(0), Gate.h(0)]
    c = circ(2, gates, [("diffuser", 0, 5)])
    assert depth(c) == 5
    assert depth(c, ("diffuser",)) == 1


@given(circuits())
def test_depth_invariant_under_in_layer_reordering(c):
    rng = random.Random(0)
    order = []
    for lay in layers(c):
        lay = list(lay)
        rng.shuffle(lay)
        order += lay
    shuffled = circ(c.n_qubits, [c.gates[i] for i in order])
    assert depth(shuffled) == depth(c) == len(layers(c))


@given(circuits(), circuits())
def test_depth_subadditive(a, b):
    n = max(a.n_qubits, b.n_qubits)
    joined = circ(n, a.gates + b.gates)
    assert depth(joined) <= depth(a) + depth(b)


def test_depth_concatenation_equality_on_conflict():
    a = circ(2, [Gate.h(0), Gate.mcx((0,), 1)])
    b = circ(2, [Gate.x(1), Gate.h(0)])
    assert depth(circ(2, a.gates + b.gates)) == depth(a) + depth(b)


@given(circuits())
def test_text_roundtrip(c):
    c.registers["edge"] = (0, 2)
    c.mark("all", 0)
    back = parse_circuit(format_circuit(c))
    assert back.gates == c.gates
    assert back.registers == c.registers and back.regions == c.regions


def test_text_format_shape():
    c = circ(4, [Gate.mcx((0, 1, 2), 3), Gate.mcz((0, 1, 2, 3))])
    text = format_circuit(c)
    assert "MCX c:q0..q2 t:q3" in text and "MCZ q0..q3" in text
    with pytest.raises(CircuitError, match="line 2"):
        parse_circuit("qubits 2\nFOO q1\n")


def _unitary_matches(a: CircuitIR, b: CircuitIR) -> bool:
    n = a.n_qubits
    for k in range(1 << n):
        u = simulator.run(a, initial=k).amplitudes
        v = simulator.run(b, initial=k).amplitudes
        if not np.allclose(u, v, atol=1e-12):
            return False
    return True


@pytest.mark.parametrize("m", [3, 4, 5])
def test_ladder_exact_on_all_basis_states(m):
    n = 2 * m - 1
    ctl, tgt, dirty = list(range(m)), m, list(range(m + 1, n))
    ref = circ(n, [Gate.mcx(ctl, tgt)])
    lad = circ(n, mcx_ladder(ctl, tgt, dirty))
    assert len(lad.gates) == 4 * (m - 2)
    states = np.arange(1 << n)
    assert (simulator.permute_basis(ref, states) == simulator.permute_basis(lad, states)).all()


@given(circuits(n_max=6, g_max=8, spare=True))
def test_decomposition_preserves_unitary(c):
    d = decompose_mcx(c)
    assert d.n_qubits == c.n_qubits
    assert all(g.arity <= 2 for g in d.gates)
    assert _unitary_matches(c, d)


def test_decomposition_split_with_one_spare():
    # six controls, one target, one spare: the ladder cannot fit
    c = circ(8, [Gate.mcx(range(6), 6)])
    d = decompose_mcx(c)
    assert all(g.arity <= 2 for g in d.gates)
    s = np.arange(1 << 8)
    assert (simulator.permute_basis(c, s) == simulator.permute_basis(d, s)).all()


def test_decomposition_leaves_small_gates():
    c = circ(3, [Gate.mcx((0,), 1), Gate.mcx((0, 1), 2)])
    assert decompose_mcx(c).gates == c.gates
    assert decompose_mcx(c, "none").gates == c.gates


def test_decomposition_errors():
    with pytest.raises(CircuitError, match="spare"):
        decompose_mcx(circ(4, [Gate.mcx((0, 1, 2), 3)]))
    with pytest.raises(CircuitError, match="mode"):
        decompose_mcx(circ(1, []), "clean")


def test_decomposition_keeps_regions_and_width():
    c = circ(6, [Gate.h(0), Gate.mcz((0, 1, 2, 3)), Gate.h(0)], [("diffuser", 1, 2)])
    d = decompose_mcx(c)
    (name, lo, hi), = d.regions
    assert name == "diffuser" and d.gates[lo].kind == "H" and hi == len(d.gates) - 1
    assert metrics(d).width == 6 and metrics(d).depth == depth(d)


def test_prefix():
    c = circ(2, [Gate.h(0), Gate.x(1), Gate.h(1)], [("a", 0, 2), ("b", 2, 3)])
    p = c.prefix(2)
    assert len(p.gates) == 2 and p.regions == [("a", 0, 2)]


def test_register_lookup():
    c = circ(3, [])
    c.registers["edge"] = (0, 2)
    assert list(c.register("edge")) == [0, 1]
    assert list(itertools.chain(c.region_gates("none"))) == []
