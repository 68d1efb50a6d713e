import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dagquery import _kernels_py, kernels

compiled = pytest.importorskip("dagquery._kernels")


@st.composite
def gate_lists(draw):
    n = draw(st.integers(1, 12))
    gates = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True), max_size=40))
    offsets = np.zeros(len(gates) + 1, dtype=np.int64)
    np.cumsum([len(g) for g in gates], out=offsets[1:])
    qubits = np.array([q for g in gates for q in g], dtype=np.int32)
    return qubits, offsets, n


@given(gate_lists())
def test_asap_depth_backends_agree(case):
    assert compiled.asap_depth(*case) == _kernels_py.asap_depth(*case)


@st.composite
def oriented_graphs(draw):
    nv = draw(st.integers(2, 7))
    m = draw(st.integers(1, 12))
    pairs = [draw(st.tuples(st.integers(0, nv - 1), st.integers(0, nv - 1)).filter(lambda t: t[0] != t[1]))
             for _ in range(m)]
    tails = np.array([u for u, _ in pairs], dtype=np.int64)
    heads = np.array([v for _, v in pairs], dtype=np.int64)
    a = np.arange(1 << m, dtype=np.uint64)
    return tails, heads, nv, a


@given(oriented_graphs())
def test_acyclic_mask_backends_agree(case):
    assert np.array_equal(compiled.acyclic_mask(*case), _kernels_py.acyclic_mask(*case))


def test_out_of_range_qubit():
    q = np.array([3], dtype=np.int32)
    off = np.array([0, 1], dtype=np.int64)
    for impl in (compiled, _kernels_py):
        with pytest.raises(IndexError):
            impl.asap_depth(q, off, 2)


def test_compiled_backend_selected():
    if os.environ.get("DAGQUERY_PURE_PYTHON", "") in ("", "0"):
        assert kernels.BACKEND == "compiled"


def test_env_switch_forces_fallback():
    env = dict(os.environ, DAGQUERY_PURE_PYTHON="1")
    res = subprocess.run(
        [sys.executable, "-c", "from dagquery import kernels; print(kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert res.stdout.strip() == "python"
