import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autogrp.alphabet import Alphabet, AlphabetError, shortlex_compare
from autogrp.fsa import (BudgetExceeded, Dfa, FsaError, Midfa, bool_op, complement, compose,
                         determinize, diagonal, difference_witness, empty_dfa,
                         enumerate_words, exists_project, growth_series, inverse_relation,
                         is_empty, language_equal, minimize, padding_violation,
                         pair_word_dfa, shortest_word, universal_dfa, word_dfa)

from oracles import all_words, dfa_words, free_reduce, moore_minimal_size, shortlex_sorted

A1 = Alphabet(["a"], {"a": "a"})
F2A = Alphabet("aAbB", {"a": "A", "b": "B"})
AB = Alphabet("ab")


def reduced_words_dfa(naive=False):
    """Acceptor of freely reduced words over a A b B; state = last letter."""
    inv = F2A.inv
    # state 0 start, state 1+x after letter x
    delta = [[1 + a for a in range(4)]]
    for x in range(4):
        delta.append([1 + a if a != inv[x] else -1 for a in range(4)])
    if naive:
        # duplicate every letter state: after an even / odd number of letters
        delta = [[1 + a for a in range(4)]]
        for par in range(2):
            for x in range(4):
                base = 5 if par == 0 else 1
                delta.append([base + a if a != inv[x] else -1 for a in range(4)])
        return Dfa(F2A, delta, 0, range(9))
    return Dfa(F2A, delta, 0, range(5))


def lang(d, n=6):
    return set(tuple(w) for w in enumerate_words(d, n))


# -- alphabet and words ------------------------------------------------------


def test_alphabet_involution_checked():
    with pytest.raises(AlphabetError):
        Alphabet("aAB", {"a": "A", "A": "B"})
    with pytest.raises(AlphabetError):
        Alphabet(["a", "_"])


def test_alphabet_parse_and_format():
    assert F2A.parse_word("abA") == (0, 2, 1)
    assert F2A.parse_word("a b A") == (0, 2, 1)
    assert F2A.parse_word("_") == ()
    assert F2A.format_word(()) == "_"
    assert F2A.invert((0, 2)) == (3, 1)
    assert F2A.free_reduce((0, 2, 3, 1)) == ()


def test_padded_pair_and_names():
    p = F2A.padded_pair((0,), (2, 3))
    assert [F2A.pair_name(x) for x in p] == ["a,b", "_,B"]
    assert F2A.parse_pair("_,B") == p[1]
    with pytest.raises(AlphabetError):
        F2A.parse_pair("_,_")


def test_shortlex_compare_examples():
    b, ab, aa = F2A.parse_word("b"), F2A.parse_word("ab"), F2A.parse_word("aa")
    assert shortlex_compare(b, ab) == -1
    assert shortlex_compare(aa, ab) == -1
    assert shortlex_compare(ab, ab) == 0


# -- determinize --------------------------------------------------------------


def test_determinize_single_initial_is_identity():
    d = reduced_words_dfa()
    m = Midfa(F2A, d.delta, [0], d.accepting)
    assert language_equal(determinize(m), d)


def test_determinize_union_of_initials():
    # state 0: a*, state 1 -a-> 0 gives aa*; the union is a*
    m = Midfa(A1, [[0], [0]], [0, 1], [0])
    d = determinize(m)
    assert lang(d) == {(0,) * n for n in range(7)}
    assert minimize(d).nstates == 1


def test_determinize_empty_accepting():
    m = Midfa(A1, [[0], [0]], [0, 1], [])
    assert is_empty(determinize(m))


# -- minimize -------------------------------------------------------------------


def test_minimize_merges_bisimilar_states():
    d = Dfa(A1, [[1], [2], [1]], 0, [0, 1, 2])
    assert minimize(d).nstates == 1


def test_minimize_free_reduced_words_8_to_5():
    naive = reduced_words_dfa(naive=True)
    assert naive.nstates == 9
    want = moore_minimal_size(naive.delta, naive.initial, naive.accepting, 4)
    assert want == 5
    m = minimize(naive)
    assert m.nstates == want
    assert lang(m) == lang(naive)


def test_minimize_empty_language():
    d = Dfa(AB, [[1, 2], [2, 0], [0, 1]], 0, [])
    m = minimize(d)
    assert m.nstates == 1 and not m.accepting


def test_minimize_canonical_numbering():
    d1 = Dfa(AB, [[1, 0], [1, 0]], 0, [1])
    d2 = Dfa(AB, [[0, 0], [2, 1], [2, 1]], 1, [0, 2])  # state 0 unreachable
    assert minimize(d1) == minimize(d2)


# -- boolean operations ----------------------------------------------------


def test_bool_op_examples():
    star = universal_dfa(A1)
    even = Dfa(A1, [[1], [0]], 0, [0])
    assert language_equal(bool_op("and", even, even), even)
    assert language_equal(bool_op("and", star, even), even)
    got = lang(bool_op("and", star, even), 8)
    assert got == {(0,) * n for n in range(0, 9, 2)}
    d = reduced_words_dfa()
    assert language_equal(bool_op("andnot", universal_dfa(F2A), d), complement(d))


def test_bool_op_alphabet_mismatch():
    with pytest.raises(FsaError):
        bool_op("and", universal_dfa(A1), universal_dfa(AB))


def test_shortest_word_and_witness():
    d = reduced_words_dfa()
    assert shortest_word(d) == ()
    assert shortest_word(empty_dfa(F2A)) is None
    w = difference_witness(d, universal_dfa(F2A))
    assert w == (0, 1)


# -- pair automata ------------------------------------------------------------


def right_mult_relation(letter):
    """{(w, reduce(w letter))} on freely reduced words of length <= 5."""
    pairs = []
    for w in all_words(4, 5):
        if free_reduce(w, F2A.inv) != w:
            continue
        pairs.append((w, free_reduce(w + (letter,), F2A.inv)))
    return pairs


def test_exists_project_examples():
    d = reduced_words_dfa()
    assert language_equal(exists_project(diagonal(d), 1), d)
    assert is_empty(exists_project(empty_dfa(F2A, pair=True), 1))
    # {(w, wa)} with wa freely reduced: the first projection avoids a trailing A
    pairs = [(w, x) for w, x in right_mult_relation(0) if len(x) > len(w)]
    p = pair_word_dfa(F2A, pairs)
    got = lang(exists_project(p, 1), 4)
    want = {w for w in all_words(4, 4)
            if free_reduce(w, F2A.inv) == w and (not w or w[-1] != 1)}
    assert got == want
    assert lang(exists_project(p, 2), 3) == {x for w, x in pairs if len(x) <= 3}


def test_compose_examples():
    d = reduced_words_dfa()
    Ma = pair_word_dfa(F2A, right_mult_relation(0))
    MA = pair_word_dfa(F2A, right_mult_relation(1))
    assert language_equal(compose(diagonal(d), Ma), Ma)
    assert is_empty(compose(empty_dfa(F2A, pair=True), Ma))
    both = compose(Ma, MA)
    # the relations stop at length 5, so pairs up to length 3 see all partners
    for w in all_words(4, 3):
        for x in all_words(4, 3):
            want = free_reduce(w, F2A.inv) == w and w == x
            assert both.accepts_pair(w, x) == want, (w, x)


def test_compose_budget():
    d = reduced_words_dfa()
    with pytest.raises(BudgetExceeded):
        compose(diagonal(d), diagonal(d), cap=1)


def test_inverse_relation_swaps():
    p = pair_word_dfa(F2A, [((0,), (2, 3, 2))])
    q = inverse_relation(p)
    assert q.accepts_pair((2, 3, 2), (0,))
    assert not q.accepts_pair((0,), (2, 3, 2))


def test_padding_violation_detected():
    pad = F2A.pad
    bad = Dfa(F2A, [[-1] * F2A.pair_size for _ in range(3)], 0, [2], pair=True)
    bad.delta[0][F2A.pair(pad, 0)] = 1
    bad.delta[1][F2A.pair(0, 0)] = 2
    assert padding_violation(bad) is not None
    assert padding_violation(diagonal(reduced_words_dfa())) is None


# -- enumeration and growth ---------------------------------------------------


def test_enumerate_examples():
    d = minimize(reduced_words_dfa())
    assert [F2A.format_word(w) for w in enumerate_words(d, 1)] == ["_", "a", "A", "b", "B"]
    assert len(enumerate_words(d, 2)) == 1 + 4 + 12
    assert enumerate_words(empty_dfa(F2A), 3) == []


def test_growth_examples():
    trivial = Dfa(F2A, [[-1] * 4], 0, [0])
    assert growth_series(trivial, 4) == [1, 0, 0, 0]
    d = minimize(reduced_words_dfa())
    want = [1] + [4 * 3 ** (n - 1) for n in range(1, 7)]
    assert growth_series(d, 7) == want
    assert growth_series(d, 7) == [len([w for w in enumerate_words(d, n) if len(w) == n])
                                   for n in range(7)]


# -- properties against the enumeration oracle -------------------------------


@st.composite
def small_dfas(draw, alphabet=AB, max_states=4):
    n = draw(st.integers(1, max_states))
    delta = [[draw(st.integers(-1, n - 1)) for _ in range(alphabet.size)] for _ in range(n)]
    acc = draw(st.sets(st.integers(0, n - 1)))
    return Dfa(alphabet, delta, 0, acc)


@st.composite
def small_pair_dfas(draw, max_pairs=4):
    words = st.lists(st.integers(0, 1), max_size=2).map(tuple)
    pairs = draw(st.lists(st.tuples(words, words), max_size=max_pairs))
    return pairs


def oracle_lang(d, n=6):
    return set(dfa_words(d.delta, d.initial, d.accepting, n))


@settings(max_examples=60, deadline=None)
@given(small_dfas())
def test_minimize_preserves_language_and_is_idempotent(d):
    m = minimize(d)
    assert oracle_lang(m) == oracle_lang(d)
    assert minimize(m) == m
    assert m.nstates == moore_minimal_size(d.delta, d.initial, d.accepting, 2)


@settings(max_examples=60, deadline=None)
@given(small_dfas(), small_dfas())
def test_bool_ops_match_set_operations(d1, d2):
    L1, L2 = oracle_lang(d1), oracle_lang(d2)
    assert oracle_lang(bool_op("and", d1, d2)) == L1 & L2
    assert oracle_lang(bool_op("or", d1, d2)) == L1 | L2
    assert oracle_lang(bool_op("andnot", d1, d2)) == L1 - L2
    assert oracle_lang(complement(d1)) == set(all_words(2, 6)) - L1
    assert language_equal(d1, d2) == (minimize(d1) == minimize(d2))


@settings(max_examples=60, deadline=None)
@given(small_dfas())
def test_enumerate_is_shortlex_and_complete(d):
    got = enumerate_words(d, 5)
    assert got == shortlex_sorted(oracle_lang(d, 5))
    assert growth_series(d, 6) == [sum(1 for w in got if len(w) == n) for n in range(6)]


@settings(max_examples=40, deadline=None)
@given(small_dfas(), small_dfas())
def test_determinize_is_union_and_idempotent(d1, d2):
    off = d1.nstates
    delta = [list(r) for r in d1.delta] + [[t + off if t >= 0 else -1 for t in r]
                                          for r in d2.delta]
    acc = set(d1.accepting) | {s + off for s in d2.accepting}
    m = Midfa(AB, delta, [0, off], acc)
    d = determinize(m)
    assert oracle_lang(d) == oracle_lang(d1) | oracle_lang(d2)
    again = determinize(Midfa(AB, d.delta, [d.initial], d.accepting))
    assert language_equal(again, d)


def pairs_upto(n):
    ws = list(all_words(2, n))
    return [(u, v) for u in ws for v in ws]


@settings(max_examples=30, deadline=None)
@given(small_pair_dfas(), small_pair_dfas(), small_pair_dfas())
def test_compose_is_relational_and_associative(r1, r2, r3):
    p, q, s = (pair_word_dfa(AB, r) for r in (r1, r2, r3))
    S1, S2 = set(r1), set(r2)
    pq = compose(p, q)
    want = {(u, x) for u, y in S1 for y2, x in S2 if y == y2}
    got = {(u, v) for u, v in pairs_upto(2) if pq.accepts_pair(u, v)}
    assert got == want
    left = compose(pq, s)
    right = compose(p, compose(q, s))
    for u, v in pairs_upto(2):
        assert left.accepts_pair(u, v) == right.accepts_pair(u, v)
    for m in (pq, left, right):
        assert padding_violation(m) is None


@settings(max_examples=40, deadline=None)
@given(small_pair_dfas())
def test_projection_matches_relation(r):
    p = pair_word_dfa(AB, r)
    assert oracle_lang(exists_project(p, 1), 2) == {u for u, _ in r}
    assert oracle_lang(exists_project(p, 2), 2) == {v for _, v in r}


def test_word_dfa_is_finite_language():
    words = [(0,), (0, 1), (1, 1, 1)]
    assert set(enumerate_words(word_dfa(AB, words), 5)) == set(words)


def test_dfa_validation():
    with pytest.raises(FsaError):
        Dfa(AB, [[0, 5]], 0, [])
    with pytest.raises(FsaError):
        Dfa(AB, [[0, 0]], 0, [3])
    d = reduced_words_dfa()
    with pytest.raises(FsaError):
        diagonal(d).accepts((0,))


def test_all_words_helper_counts():
    assert sum(1 for _ in all_words(2, 3)) == 15
    assert list(itertools.islice(all_words(2, 1), 3)) == [(), (0,), (1,)]
