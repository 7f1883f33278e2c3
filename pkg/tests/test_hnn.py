from hypothesis import given, settings
from hypothesis import strategies as st

import pytest

from autogrp.alphabet import Alphabet
from autogrp.cosets import SubgroupData, build_coset_system
from autogrp.fsa import enumerate_words
from autogrp.hnn import (HnnError, HnnInput, async_run, hnn_normal_form,
                         hnn_normal_form_rtl, lag_family, nf_multiply, normal_form_word,
                         parse_normal_form, verify_async_structure)
from autogrp.rewriting import Presentation

from oracles import all_words, toy_free_product_form


def free_group(names):
    A = Alphabet([c for n in names for c in (n, n.upper())], {n: n.upper() for n in names})
    return A, Presentation(A, [])


@pytest.fixture(scope="module")
def cyclic_k():
    """F3 = <a, b, c> amalgamated with itself, alpha cycling the generators."""
    A, p = free_group("abc")
    cs = build_coset_system(p, SubgroupData(A, ["a", "b", "c"]))
    return HnnInput(cs, {"y1": "y2", "y2": "y3", "y3": "y1"})


def _toy_oracle_form(k, w):
    K = k.K
    i = K.index
    extra = {i("y1"): [i("a")], i("Y1"): [i("A")]}
    return toy_free_product_form(w, i("a"), i("A"), i("b"), i("B"), i("z"), i("Z"), extra)


# -- the toy extension K = <a, b, z | za = az> ------------------------------------


def test_toy_examples(toy_k):
    k = toy_k
    assert k.K.names == ("y1", "Y1", "a", "A", "b", "B", "z", "Z")
    assert k.format(normal_form_word(k.parse("z a"), k)) == "y1 z"
    assert k.format(normal_form_word(k.parse("a b A"), k)) == "y1 b A"
    assert k.format(normal_form_word(k.parse("b z B"), k)) == "b z B"
    assert normal_form_word(k.parse("z Z"), k) == ()
    L = k.word_acceptor()
    assert L.accepts(k.parse("y1 z"))
    assert not L.accepts(k.parse("z a"))
    assert not L.accepts(k.parse("a"))
    assert L.accepts(k.parse("y1"))


def test_toy_normal_forms_are_a_bijection(toy_k):
    k = toy_k
    seen = {}
    for w in all_words(k.K.size, 5):
        nf = normal_form_word(w, k)
        key = _toy_oracle_form(k, w)
        assert seen.setdefault(key, nf) == nf
    # distinct group elements get distinct normal forms
    assert len(set(seen.values())) == len(seen)


def test_toy_acceptor_is_the_normal_form_language(toy_k):
    k = toy_k
    L = k.word_acceptor()
    for u in enumerate_words(L, 5):
        assert normal_form_word(u, k) == tuple(u)
        assert parse_normal_form(u, k).word(k) == tuple(u)


def test_toy_multipliers(toy_k):
    k = toy_k
    for c in ("z", "a", "b", "y1", "Z"):
        m = k.multiplier(c)
        u = k.parse("b z b")
        v = normal_form_word(u + (k.K.index(c),), k)
        assert async_run(m, u, v).accepted
        assert not async_run(m, u, u).accepted
    rep = verify_async_structure(k, 4)
    assert rep.passed, rep.failures[:3]
    assert rep.max_lag <= 2


@pytest.mark.parametrize("name", ["toy_k", "swap_k", "cyclic_k"])
def test_left_and_right_collection_agree(name, request):
    k = request.getfixturevalue(name)
    for w in all_words(k.K.size, 4):
        assert hnn_normal_form(w, k) == hnn_normal_form_rtl(w, k)


@pytest.mark.parametrize("name", ["toy_k", "swap_k", "cyclic_k"])
def test_conjugation_applies_alpha(name, request):
    k = request.getfixturevalue(name)
    z, Z = k.z, k.Z
    for h in all_words(k.B.size, 2):
        for n in range(-4, 5):
            conj = (Z,) * n + tuple(h) + (z,) * n if n >= 0 else \
                (z,) * -n + tuple(h) + (Z,) * -n
            want = normal_form_word(k.apply_alpha(h, n), k)
            assert normal_form_word(conj, k) == want


def test_cyclic_alpha_direction(cyclic_k):
    k = cyclic_k
    assert k.format(normal_form_word(k.parse("Z y1 z"), k)) == "y2"
    assert k.format(normal_form_word(k.parse("z y1 Z"), k)) == "y3"
    assert k.order == 3


def test_alpha_validation(f2_cyclic_cosets, f2_index2_cosets):
    with pytest.raises(HnnError):
        HnnInput(f2_cyclic_cosets, {"y1": "Y1"})
    with pytest.raises(HnnError):
        HnnInput(f2_index2_cosets, {"y1": "y2"})
    with pytest.raises(HnnError):
        HnnInput(f2_index2_cosets, {"y1": "y1", "y2": "y1", "y3": "y3"})
    with pytest.raises(HnnError):
        HnnInput(f2_cyclic_cosets, None, stable=("a", "A"))


def test_direct_product_with_z():
    A, p = free_group("ab")
    cs = build_coset_system(p, SubgroupData(A, ["a", "b"]))
    k = HnnInput(cs)
    # every element is h z^n
    assert k.format(normal_form_word(k.parse("z a Z b z"), k)) == "y1 y2 z"
    rep = verify_async_structure(k, 3)
    assert rep.passed


def test_swap_lag_grows_with_r(swap_k):
    rows = lag_family(swap_k, "b", "a", r_max=8)
    assert [r for r, *_ in rows] == list(range(9))
    assert all(ok for *_, ok in rows)
    assert [lag for _, _, _, lag, _ in rows] == [r + 2 for r in range(9)]


def test_swap_verify(swap_k):
    rep = verify_async_structure(swap_k, 3)
    assert rep.passed, rep.failures[:3]
    assert rep.words > 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 7), max_size=10), st.integers(0, 7))
def test_nf_multiply_matches_oracle(w, c):
    k = _toy()
    nf = hnn_normal_form(w, k)
    assert _toy_oracle_form(k, nf.word(k)) == _toy_oracle_form(k, w)
    nf2 = nf_multiply(nf, c, k)
    assert _toy_oracle_form(k, nf2.word(k)) == _toy_oracle_form(k, tuple(w) + (c,))
    assert k.word_acceptor().accepts(nf2.word(k))


_cache = {}


def _toy():
    if "k" not in _cache:
        A, p = free_group("ab")
        _cache["k"] = HnnInput(build_coset_system(p, SubgroupData(A, ["a"])))
    return _cache["k"]
