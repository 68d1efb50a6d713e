import functools

import pytest
from hypothesis import HealthCheck, settings

from dagquery import library, synth
from dagquery import topology as topo

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@functools.lru_cache(maxsize=None)
def pipeline(name: str):
    """Graph, reduced clauses, winners, params and optimised spec for a builtin."""
    g = library.builtin(name)
    cs = topo.oracle_clauses(g)
    winners = topo.brute_force_winners(g, cs)
    N = 1 << g.n
    pad = 1 if synth.needs_padding(len(winners), N) else 0
    p = synth.compute_grover_params(len(winners), N << pad)
    unordered = synth.plan(cs, pad)
    spec = synth.optimize_order(unordered, g, cs, p)
    return g, cs, winners, p, unordered, spec


@pytest.fixture
def k4():
    return library.builtin("3e12")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
