import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dagquery import library
from dagquery import topology as topo
from dagquery.clauses import (
    ClauseFormatError,
    ClauseSet,
    EloopClause,
    block_compatible,
    catalog_match,
    evaluate_clause,
    evaluate_set_level,
    format_clauses,
    is_outer,
    mutual_aux_matrix,
    mutual_clauses_matrix,
    mutually_exclusive,
    parse_clauses,
    parse_literals,
)
from dagquery.topology import SetGraph


def C(k, spec, mirror=None):
    return EloopClause(k, parse_literals(spec), mirror)


literal_maps = st.dictionaries(st.integers(0, 5), st.sampled_from([1, -1]), min_size=1, max_size=5)


def test_evaluate_examples():
    g = SetGraph.build("p", 2, [(0, 1, 2), (0, 1, 1)])
    assert evaluate_clause(C(0, "s0"), g, 0b011)
    assert not evaluate_clause(C(0, "~s0"), g, 0b001)
    k4 = library.builtin("3e12")
    assert evaluate_clause(C(0, "s0 s1 s2"), k4, (1 << k4.n) - 1)


def test_exclusivity_examples(k4):
    cs = topo.oracle_clauses(k4)
    c2 = next(c for c in cs if c.key() == C(0, "s1 ~s4 s5").key())
    c7 = next(c for c in cs if c.mirror_of == c2.id)
    assert mutually_exclusive(c2, c7)
    assert not mutually_exclusive(c2, c2)
    assert not mutually_exclusive(C(0, "s0 s1 s2"), C(1, "s0 ~s3 s4"))


def test_block_examples():
    assert block_compatible(C(1, "s0 ~s3 s4"), C(4, "s0 s1 ~s3 s5"))
    assert block_compatible(C(0, "s0 s1"), C(1, "s2 ~s3"))
    c = C(0, "s1 ~s4 s5")
    assert not block_compatible(c, c.mirrored())


def test_matrix_examples():
    conflict = [C(0, "s0 s1"), C(1, "~s0 s2"), C(2, "s0 ~s1 ~s2")]
    assert mutual_aux_matrix(conflict).edge_count() == 3
    shared = [C(0, "s0 s1"), C(1, "s0 s2"), C(2, "s0 ~s3")]
    assert mutual_aux_matrix(shared).edge_count() == 0
    # clauses paired with their mirrors: every pair disagrees somewhere
    fam = [C(0, "s1 ~s2"), C(0, "s1 ~s2").mirrored(), C(2, "~s1 ~s2"), C(2, "~s1 ~s2").mirrored()]
    assert mutual_clauses_matrix(fam).edge_count() == 0
    single = mutual_clauses_matrix([C(0, "s1")])
    assert single.bits.shape == (1, 1) and not single.bits.any()


def test_outer_clause_is_isolated_in_block_graph():
    cs = [C(0, "s0 s1 s2"), C(1, "s0 ~s3 s4"), C(2, "s5 ~s6")]
    assert is_outer(cs[0]) and not is_outer(cs[1])
    m = mutual_clauses_matrix(cs)
    assert not m.bits[0].any()
    assert m.bits[1, 2] == 1


@given(literal_maps, literal_maps)
def test_predicates_symmetric(a, b):
    ca, cb = EloopClause(0, a), EloopClause(1, b)
    assert mutually_exclusive(ca, cb) == mutually_exclusive(cb, ca)
    assert block_compatible(ca, cb) == block_compatible(cb, ca)


@given(st.lists(literal_maps, min_size=1, max_size=7))
def test_matrices_symmetric_zero_diagonal(maps):
    cs = [EloopClause(k, m) for k, m in enumerate(maps)]
    for mat in (mutual_aux_matrix(cs), mutual_clauses_matrix(cs)):
        assert (mat.bits == mat.bits.T).all() and not mat.bits.diagonal().any()


def _jointly_satisfiable(g, a, b):
    ids = sorted(a.support | b.support)
    return any(
        evaluate_set_level(a, s) and evaluate_set_level(b, s)
        for s in topo.set_level_states(g, ids)
    )


@pytest.mark.parametrize("name", library.BUILTINS)
def test_exclusivity_matches_set_level_exhaustion(name):
    g = library.builtin(name)
    cs = topo.oracle_clauses(g)
    for a, b in itertools.combinations(cs, 2):
        assert mutually_exclusive(a, b) == (not _jointly_satisfiable(g, a, b))


@pytest.mark.parametrize("name", ["3e9", "3e12", "4e12"])
def test_xor_identity_and_one_hit_per_group(name):
    from dagquery import synth

    g = library.builtin(name)
    cs = topo.oracle_clauses(g)
    a = topo.fixed_assignments(g)
    hit = np.array([[evaluate_clause(c, g, int(x)) for x in a] for c in cs])
    for i, j in itertools.combinations(range(len(cs)), 2):
        if mutually_exclusive(cs[i], cs[j]):
            assert ((hit[i] | hit[j]) == (hit[i] ^ hit[j])).all()
    for grp in synth.assign_ancillas(cs):
        assert hit[list(grp)].sum(axis=0).max() <= 1


def test_format_parse_roundtrip(k4):
    cs = topo.oracle_clauses(k4)
    text = format_clauses(cs)
    assert "(mirror c" in text and text.startswith("# clauses 3e12")
    back = parse_clauses(text)
    assert back.keys() == cs.keys()
    assert [c.mirror_of for c in back] == [c.mirror_of for c in cs]
    assert back.graph_ref == "3e12"


@given(st.lists(literal_maps, min_size=1, max_size=6))
def test_format_parse_roundtrip_random(maps):
    cs = ClauseSet([EloopClause(k, m) for k, m in enumerate(maps)])
    assert parse_clauses(format_clauses(cs)).keys() == cs.keys()


@pytest.mark.parametrize(
    "text, msg",
    [("c0: +s1 s2\n", "line 1"), ("c0: +s1\nc0: -s2\n", "dense"), ("c0: +s1 -s1\n", "repeated")],
)
def test_parse_errors(text, msg):
    with pytest.raises(ClauseFormatError, match=msg):
        parse_clauses(text)


def test_polarity_validation():
    with pytest.raises(ValueError):
        EloopClause(0, {0: 2})


def test_catalog_match_relabel_and_mirror():
    ours = [C(0, "s0 s1"), C(1, "s1 ~s2")]
    assert catalog_match(ours, [C(0, "s1 ~s2"), C(1, "s0 s1")])[0]
    assert catalog_match(ours, [c.mirrored() for c in ours])[0]
    ok, missing, unexpected = catalog_match(ours, [C(0, "s0 s1"), C(1, "s1 s2")])
    assert not ok and missing == ["c1: +s1 +s2"] and unexpected == ["c1: +s1 -s2"]
    # a partial mirror is not a match
    assert not catalog_match(ours, [C(0, "s0 s1"), C(1, "s1 ~s2").mirrored()])[0]


def test_relabeled_keeps_mirror_links():
    cs = ClauseSet.relabeled([C(3, "s0"), C(7, "~s0", mirror=3), C(9, "s1", mirror=5)])
    assert [c.id for c in cs] == [0, 1, 2]
    assert cs[1].mirror_of == 0 and cs[2].mirror_of is None
