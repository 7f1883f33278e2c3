from hypothesis import given, settings
from hypothesis import strategies as st

import pytest

from autogrp.cosets import (SubgroupData, SubgroupError, build_coset_system, coset_kb,
                            efficiency_check, generalized_word_problem,
                            quasiconvexity_probe, subgroup_word_acceptor)
from autogrp.fsa import bool_op, enumerate_words

from oracles import (StallingsGraph, all_words, coset_of, coset_table_free, dfa_words,
                     free_reduce)


def inv_table(A):
    return [A.inv[a] for a in range(A.size)]


# -- the oracles themselves -----------------------------------------------------


def test_oracles_agree_on_small_cases(f2):
    A = f2.alphabet
    inv = inv_table(A)
    gens = [A.parse_word(g) for g in ("a", "bb", "baB")]
    table = coset_table_free(gens, inv, A.size)
    assert len(table) == 2
    assert coset_table_free([A.parse_word("a")], inv, A.size) is None
    g = StallingsGraph(gens, inv)
    for w in all_words(A.size, 5):
        assert g.contains(w) == (coset_of(table, w) == 0)


# -- coset systems in F2 --------------------------------------------------------


@pytest.mark.parametrize("fixture,gens", [("f2_cyclic_cosets", ["a"]),
                                          ("f2_index2_cosets", ["a", "bb", "baB"])])
def test_gwp_matches_stallings(fixture, gens, request, f2):
    cs = request.getfixturevalue(fixture)
    assert cs.verified and cs.strong
    A = f2.alphabet
    inv = inv_table(A)
    g = StallingsGraph([A.parse_word(x) for x in gens], inv)
    for w in all_words(A.size, 8):
        assert generalized_word_problem(w, cs) == g.contains(w)


def test_examples_from_the_cyclic_subgroup(f2_cyclic_cosets, f2):
    A = f2.alphabet
    cs = f2_cyclic_cosets
    assert generalized_word_problem(A.parse_word("aaa"), cs)
    assert not generalized_word_problem(A.parse_word("b"), cs)
    assert not generalized_word_problem(A.parse_word("ab"), cs)
    assert generalized_word_problem(A.parse_word("bBA"), cs)
    assert A.format_word(cs.representative(A.parse_word("aab"))) == "b"


def test_index_two_acceptor_hits_each_coset_once(f2_index2_cosets, f2):
    A = f2.alphabet
    cs = f2_index2_cosets
    table = coset_table_free([A.parse_word(g) for g in ("a", "bb", "baB")],
                             inv_table(A), A.size)
    words = enumerate_words(cs.acceptor, 6)
    assert sorted(coset_of(table, w) for w in words) == [0, 1]
    for w in all_words(A.size, 6):
        assert coset_of(table, cs.representative(w)) == coset_of(table, w)


def test_decompose(f2_index2_cosets, f2):
    A = f2.alphabet
    cs = f2_index2_cosets
    inv = inv_table(A)
    for w in all_words(A.size, 5):
        h, x = cs.decompose(w)
        assert cs.acceptor.accepts(x)
        assert free_reduce(cs.sub.def_word(h) + x, inv) == free_reduce(w, inv)


def test_whole_group_and_z2(f2, z2):
    A = f2.alphabet
    cs = build_coset_system(f2, SubgroupData(A, ["a", "b"]))
    assert cs.verified
    assert enumerate_words(cs.acceptor, 4) == [()]
    B = z2.alphabet
    cz = build_coset_system(z2, SubgroupData(B, ["a"]))
    assert cz.verified
    # cosets of <a> in Z^2 are indexed by the b exponent
    reps = enumerate_words(cz.acceptor, 4)
    assert sorted(B.format_word(w) for w in reps) == sorted(
        ["_", "b", "B", "bb", "BB", "bbb", "BBB", "bbbb", "BBBB"])
    for w in all_words(B.size, 5):
        eb = w.count(B.index("b")) - w.count(B.index("B"))
        assert generalized_word_problem(w, cz) == (eb == 0)


def test_subgroup_data_validation(f2):
    with pytest.raises(SubgroupError):
        SubgroupData(f2.alphabet, [(0, 9)])
    with pytest.raises(SubgroupError):
        SubgroupData(f2.alphabet, ["a"], names=[])
    sub = SubgroupData(f2.alphabet, ["ab"])
    assert sub.B.names == ("y1", "Y1")
    assert sub.def_word(sub.B.parse_word("Y1")) == f2.alphabet.parse_word("BA")


def test_coset_rules_are_layered(f2):
    cr = coset_kb(f2, SubgroupData(f2.alphabet, ["a"]))
    assert cr.confluent
    assert cr.coset_rules
    for lhs, h, rhs in cr.coset_rules:
        assert len(h) >= 1 or len(rhs) < len(lhs)


# -- subgroup acceptor, efficiency and the probe -------------------------------------


def test_subgroup_word_acceptor(f2_structure, f2_cyclic_cosets, f2):
    A = f2.alphabet
    d = subgroup_word_acceptor(f2_structure, f2_cyclic_cosets)
    got = {A.format_word(w) for w in enumerate_words(d, 4)}
    assert got == {"_", "a", "aa", "aaa", "aaaa", "A", "AA", "AAA", "AAAA"}
    cb = build_coset_system(f2, SubgroupData(A, ["b"]))
    db = subgroup_word_acceptor(f2_structure, cb)
    assert {A.format_word(w) for w in enumerate_words(db, 2)} == {"_", "b", "bb", "B", "BB"}
    # <a> and <b> meet only in the identity
    assert enumerate_words(bool_op("and", d, db), 6) == [()]


def test_subgroup_acceptor_matches_membership(f2_structure, f2_index2_cosets, f2):
    d = subgroup_word_acceptor(f2_structure, f2_index2_cosets)
    A = f2.alphabet
    g = StallingsGraph([A.parse_word(x) for x in ("a", "bb", "baB")], inv_table(A))
    want = sorted(w for w in enumerate_words(f2_structure.acceptor, 5) if g.contains(w))
    assert sorted(map(tuple, dfa_words(d.delta, d.initial, d.accepting, 5))) == want


def test_efficiency(f2_cyclic_cosets, f2):
    e = efficiency_check(f2_cyclic_cosets)
    assert e.efficient and e.witness is None
    assert all(len(l) <= 1 for labs in e.labels.values() for l in labs)


def test_inefficient_generating_set(f2):
    A = f2.alphabet
    cs = build_coset_system(f2, SubgroupData(A, ["ab", "Ab"]))
    assert cs.verified
    e = efficiency_check(cs)
    assert not e.efficient
    b, lab = e.witness
    assert len(lab) > 1
    # the composite relation is right: w * y = label * x in the free group
    inv = inv_table(A)
    L = e.composites[b]
    for label, m in L.items():
        for w in enumerate_words(cs.acceptor, 3):
            for x in enumerate_words(cs.acceptor, 5):
                if m.accepts_pair(w, x):
                    assert free_reduce(tuple(w) + cs.sub.defs[b], inv) == \
                        free_reduce(cs.sub.def_word(label) + tuple(x), inv)


def test_probe_bounded_for_free_factor(f2_structure, f2_cyclic_cosets):
    r = quasiconvexity_probe(f2_structure, f2_cyclic_cosets, depth=6)
    assert r.verdict == "bounded"
    assert r.bound == 0
    r0 = quasiconvexity_probe(f2_structure, f2_cyclic_cosets, depth=0)
    assert r0.profile == [0] and not r0.growing


def test_probe_family_fields(f2_structure, f2_cyclic_cosets, f2):
    A = f2.alphabet
    r = quasiconvexity_probe(f2_structure, f2_cyclic_cosets, depth=3,
                             family=("b", "B"), family_range=2)
    assert [f["n"] for f in r.witnesses] == [0, 1, 2]
    # b^n B^n freely reduces, so it is not accepted for n > 0
    assert [f["in_L"] for f in r.witnesses] == [True, False, False]
    assert [A.format_word(f["prefix_rep"]) for f in r.witnesses] == ["_", "b", "bb"]
    assert r.verdict == "bounded"


def test_strong_fellow_travel(f2_index2_cosets, f2):
    """With ``w a = h x``, the paths ``w`` and ``h x`` stay close in the Cayley graph."""
    cs = f2_index2_cosets
    A = f2.alphabet
    inv = inv_table(A)
    k = cs.k
    for w in enumerate_words(cs.acceptor, 5):
        for a in range(A.size):
            h, x = cs.decompose((a,), start=w)
            hw = cs.sub.def_word(h)
            assert free_reduce(tuple(w) + (a,), inv) == free_reduce(hw + tuple(x), inv)
            for t in range(max(len(w), len(x)) + 1):
                d = free_reduce(A.invert(tuple(w[:t])) + hw + tuple(x[:t]), inv)
                assert len(d) <= k


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=16))
def test_representative_is_a_coset_invariant(w):
    cs = _index2()
    table = _index2_table()
    x = cs.representative(w)
    assert cs.acceptor.accepts(x)
    assert coset_of(table, x) == coset_of(table, w)
    assert cs.representative(x) == x


_cache = {}


def _index2():
    if "cs" not in _cache:
        from autogrp.fsaio import read_group
        from conftest import data_path
        p = read_group(data_path("f2.grp"))
        _cache["cs"] = build_coset_system(p, SubgroupData(p.alphabet, ["a", "bb", "baB"]))
    return _cache["cs"]


def _index2_table():
    if "table" not in _cache:
        A = _index2().alphabet
        _cache["table"] = coset_table_free([A.parse_word(g) for g in ("a", "bb", "baB")],
                                           inv_table(A), A.size)
    return _cache["table"]
