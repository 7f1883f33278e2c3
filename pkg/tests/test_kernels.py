"""The compiled kernels and their pure-Python twins must agree."""

import os
import subprocess
import sys

from hypothesis import given, settings
from hypothesis import strategies as st

import pytest

from autogrp import _kernels, _pykernels
from autogrp.rewriting import IndexAutomaton, _Trie

from oracles import moore_minimal_size, rewrite_to_exhaustion

BACKENDS = _kernels.backends()
NSYM = 3

needs_c = pytest.mark.skipif("cython" not in BACKENDS, reason="extension not built")

words = st.lists(st.integers(0, NSYM - 1), max_size=20)
lhs_lists = st.lists(st.lists(st.integers(0, NSYM - 1), min_size=1, max_size=4).map(tuple),
                     min_size=1, max_size=8, unique=True)


def _length_reducing(lhss):
    """Rules ``lhs -> lhs[:-1]`` with no left side inside another one."""
    keep = []
    for l in sorted(lhss, key=len):
        if not any(any(l[i:i + len(m)] == m for i in range(len(l) - len(m) + 1)) for m in keep):
            keep.append(l)
    return [(l, l[:-1]) for l in keep]


@needs_c
@settings(max_examples=150, deadline=None)
@given(lhs_lists)
def test_build_index(lhss):
    c = BACKENDS["cython"]
    g1, m1 = _pykernels.build_index(NSYM, lhss)
    g2, m2 = c.build_index(NSYM, lhss)
    assert list(g1) == list(g2) and list(m1) == list(m2)


@needs_c
@settings(max_examples=150, deadline=None)
@given(lhs_lists, words)
def test_reduce_and_scan(lhss, w):
    rules = _length_reducing(lhss)
    ia = IndexAutomaton(NSYM, rules, emits=[True] * len(rules))
    outs = []
    for k in BACKENDS.values():
        fired = []
        r = list(k.reduce_word(w, ia.goto, NSYM, ia.match, ia.lhs_len, ia.rhs_rev,
                               ia.emit, fired))
        outs.append((r, fired, k.scan_match(w, ia.goto, NSYM, ia.match)))
    assert outs[0] == outs[1]
    # deleting letters reaches the same irreducible word in any order
    assert tuple(outs[0][0]) == rewrite_to_exhaustion(w, rules)


@needs_c
@settings(max_examples=150, deadline=None)
@given(lhs_lists, words)
def test_trie_scan(lhss, w):
    t = _Trie(NSYM)
    for rid, l in enumerate(lhss):
        t.add(l, rid)
    got = [k.trie_scan(w, t.goto, NSYM, t.term) for k in BACKENDS.values()]
    assert got[0] == got[1]
    if got[0] is not None:
        i, j, r = got[0]
        assert tuple(w[i:j]) == lhss[r]
        # nothing ends earlier
        assert not any(tuple(w[a:b]) in lhss for b in range(j) for a in range(b))


@st.composite
def partial_dfas(draw):
    n = draw(st.integers(1, 12))
    delta = [[draw(st.integers(-1, n - 1)) for _ in range(NSYM)] for _ in range(n)]
    acc = draw(st.sets(st.integers(0, n - 1)))
    return n, delta, acc


@needs_c
@settings(max_examples=150, deadline=None)
@given(partial_dfas())
def test_partition_refine(d):
    n, delta, acc = d
    tails, labels, heads = [], [], []
    for s in range(n):
        for a in range(NSYM):
            if delta[s][a] >= 0:
                tails.append(s)
                labels.append(a)
                heads.append(delta[s][a])
    classes = [sorted(acc), [s for s in range(n) if s not in acc]]
    classes = [c for c in classes if c]
    got = [list(k.partition_refine(n, tails, labels, heads, classes))
           for k in BACKENDS.values()]
    assert got[0] == got[1]


@settings(max_examples=100, deadline=None)
@given(partial_dfas())
def test_partition_refine_is_minimal(d):
    """On trim automata the block count is the minimal state count."""
    n, delta, acc = d
    # make every state reachable and co-reachable: a cycle through all states
    delta = [row[:] for row in delta]
    for s in range(n):
        delta[s][0] = (s + 1) % n
    acc = set(acc) or {0}
    tails, labels, heads = [], [], []
    for s in range(n):
        for a in range(NSYM):
            if delta[s][a] >= 0:
                tails.append(s)
                labels.append(a)
                heads.append(delta[s][a])
    classes = [c for c in (sorted(acc), [s for s in range(n) if s not in acc]) if c]
    blocks = _pykernels.partition_refine(n, tails, labels, heads, classes)
    assert len(set(blocks)) == moore_minimal_size(delta, 0, acc, NSYM)


def test_pure_python_switch():
    code = "from autogrp import _kernels; print(_kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={**os.environ, "AUTOGRP_PURE_PYTHON": "1"}, check=True)
    assert out.stdout.strip() == "python"


def test_selected_backend_is_listed():
    assert _kernels.BACKEND in BACKENDS
