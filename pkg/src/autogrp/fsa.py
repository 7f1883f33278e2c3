"""Finite state automata over generator alphabets and padded-pair alphabets.

A :class:`Dfa` has states ``0..n-1`` and a partial transition table
``delta[state][symbol]`` in which ``-1`` means "no transition".  There is no
explicit failure state, so state counts are those of the trim automaton.
When ``pair`` is true the symbols are padded pairs of the alphabet, encoded
by :meth:`Alphabet.pair`.

All automata are treated as immutable once built.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, Sequence

from . import _kernels
from .alphabet import Alphabet

DEFAULT_STATE_CAP = 1_000_000


class BudgetExceeded(RuntimeError):
    """A construction would exceed its configured state budget."""


class FsaError(ValueError):
    pass


class Dfa:
    __slots__ = ("alphabet", "pair", "delta", "initial", "accepting")

    def __init__(self, alphabet: Alphabet, delta, initial: int, accepting,
                 pair: bool = False):
        self.alphabet = alphabet
        self.pair = pair
        self.delta = delta
        self.initial = initial
        self.accepting = frozenset(accepting)
        nsym = self.nsym
        n = len(delta)
        if not 0 <= initial < max(n, 1):
            raise FsaError(f"initial state {initial} out of range")
        for row in delta:
            if len(row) != nsym:
                raise FsaError("transition row has wrong width")
            for t in row:
                if t >= n or t < -1:
                    raise FsaError(f"transition target {t} out of range")
        if any(not 0 <= s < n for s in self.accepting):
            raise FsaError("accepting state out of range")

    @property
    def nsym(self) -> int:
        return self.alphabet.pair_size if self.pair else self.alphabet.size

    @property
    def nstates(self) -> int:
        return len(self.delta)

    def __repr__(self):
        kind = "PairDfa" if self.pair else "Dfa"
        return f"<{kind} {self.nstates} states, {len(self.accepting)} accepting>"

    def run(self, symbols: Iterable[int], state: int | None = None) -> int:
        """State reached after reading ``symbols`` (``-1`` once dead)."""
        s = self.initial if state is None else state
        delta = self.delta
        for a in symbols:
            if s < 0:
                return -1
            s = delta[s][a]
        return s

    def accepts(self, word: Sequence[int]) -> bool:
        if self.pair:
            raise FsaError("use accepts_pair on a pair automaton")
        return self.run(word) in self.accepting

    def accepts_pair(self, w: Sequence[int], x: Sequence[int]) -> bool:
        return self.run(self.alphabet.padded_pair(w, x)) in self.accepting

    def canonical(self):
        """Hashable form; equal for language-equivalent minimized automata."""
        return (self.pair, self.alphabet.names, self.initial,
                tuple(sorted(self.accepting)), tuple(tuple(r) for r in self.delta))

    def __eq__(self, other):
        return isinstance(other, Dfa) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def is_pair(self) -> bool:
        return self.pair


PairDfa = Dfa  # a Dfa with pair=True


class Midfa:
    """Automaton with deterministic transitions and several initial states.

    Each initial state may carry a label, a word over some other alphabet
    (for coset multipliers, a word in the subgroup generators).
    """

    __slots__ = ("alphabet", "pair", "delta", "initials", "labels", "accepting",
                 "label_alphabet")

    def __init__(self, alphabet, delta, initials, accepting, labels=None,
                 pair=False, label_alphabet=None):
        self.alphabet = alphabet
        self.pair = pair
        self.delta = delta
        self.initials = tuple(initials)
        if labels is None:
            labels = [None] * len(self.initials)
        self.labels = tuple(None if l is None else tuple(l) for l in labels)
        if len(self.labels) != len(self.initials):
            raise FsaError("one label per initial state")
        self.accepting = frozenset(accepting)
        self.label_alphabet = label_alphabet

    @property
    def nsym(self):
        return self.alphabet.pair_size if self.pair else self.alphabet.size

    @property
    def nstates(self):
        return len(self.delta)

    def __repr__(self):
        return (f"<Midfa {self.nstates} states, {len(self.initials)} initial, "
                f"{len(self.accepting)} accepting>")

    def from_initial(self, i: int) -> Dfa:
        return minimize(Dfa(self.alphabet, self.delta, self.initials[i],
                            self.accepting, pair=self.pair))

    def by_label(self) -> dict:
        """Minimized automaton for each label (union over initial states)."""
        groups: dict = {}
        for s, lab in zip(self.initials, self.labels):
            groups.setdefault(lab, []).append(s)
        out = {}
        for lab, starts in groups.items():
            sub = Midfa(self.alphabet, self.delta, starts, self.accepting,
                        pair=self.pair)
            out[lab] = determinize(sub)
        return out

    @classmethod
    def from_labelled(cls, machines: dict, label_alphabet=None) -> "Midfa":
        """Disjoint union of ``label -> Dfa`` as a labelled Midfa."""
        items = sorted(machines.items(), key=lambda kv: (len(kv[0] or ()), kv[0] or ()))
        if not items:
            raise FsaError("no machines")
        alpha = items[0][1].alphabet
        pair = items[0][1].pair
        delta, initials, labels, acc = [], [], [], set()
        for lab, d in items:
            off = len(delta)
            for row in d.delta:
                delta.append([t + off if t >= 0 else -1 for t in row])
            initials.append(d.initial + off)
            labels.append(lab)
            acc.update(s + off for s in d.accepting)
        return cls(alpha, delta, initials, acc, labels, pair=pair,
                   label_alphabet=label_alphabet)


# ---------------------------------------------------------------------------
# basic constructions


def empty_dfa(alphabet: Alphabet, pair: bool = False) -> Dfa:
    nsym = alphabet.pair_size if pair else alphabet.size
    return Dfa(alphabet, [[-1] * nsym], 0, (), pair=pair)


def universal_dfa(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet, [[0] * alphabet.size], 0, (0,))


def word_dfa(alphabet: Alphabet, words: Iterable[Sequence[int]]) -> Dfa:
    """Acceptor of a finite set of words (a trie, then minimized)."""
    delta = [[-1] * alphabet.size]
    acc = set()
    for w in words:
        s = 0
        for a in w:
            t = delta[s][a]
            if t < 0:
                t = len(delta)
                delta.append([-1] * alphabet.size)
                delta[s][a] = t
            s = t
        acc.add(s)
    return minimize(Dfa(alphabet, delta, 0, acc))


def pair_word_dfa(alphabet: Alphabet, pairs: Iterable[tuple]) -> Dfa:
    """Pair automaton accepting exactly the given (w, x) word pairs."""
    nsym = alphabet.pair_size
    delta = [[-1] * nsym]
    acc = set()
    for w, x in pairs:
        s = 0
        for p in alphabet.padded_pair(w, x):
            t = delta[s][p]
            if t < 0:
                t = len(delta)
                delta.append([-1] * nsym)
                delta[s][p] = t
            s = t
        acc.add(s)
    return minimize(Dfa(alphabet, delta, 0, acc, pair=True))


def diagonal(d: Dfa) -> Dfa:
    """Pair automaton of ``{(w, w) : w in L(d)}``."""
    A = d.alphabet
    n = A.size
    nsym = A.pair_size
    delta = []
    for row in d.delta:
        r = [-1] * nsym
        for a in range(n):
            r[A.pair(a, a)] = row[a]
        delta.append(r)
    return minimize(Dfa(A, delta, d.initial, d.accepting, pair=True))


# ---------------------------------------------------------------------------
# minimization


def _reachable_order(delta, starts):
    """States reachable from ``starts`` in breadth-first, symbol order."""
    seen = {}
    order = []
    dq = deque()
    for s in starts:
        if s not in seen:
            seen[s] = len(order)
            order.append(s)
            dq.append(s)
    while dq:
        s = dq.popleft()
        for t in delta[s]:
            if t >= 0 and t not in seen:
                seen[t] = len(order)
                order.append(t)
                dq.append(t)
    return order


def _coreachable(delta, states, accepting):
    preds: dict = {}
    for s in states:
        for t in delta[s]:
            if t >= 0:
                preds.setdefault(t, []).append(s)
    live = set(a for a in accepting if a in states)
    stack = list(live)
    while stack:
        t = stack.pop()
        for s in preds.get(t, ()):
            if s not in live:
                live.add(s)
                stack.append(s)
    return live


def minimize(d: Dfa) -> Dfa:
    """Minimal trim automaton for L(d), canonically numbered.

    States are numbered breadth-first from the initial state, trying
    symbols in alphabet order, so language-equal inputs give identical
    tables.
    """
    return minimize_labelled(d, {s: True for s in d.accepting})[0]


def minimize_labelled(d: Dfa, labels: dict):
    """Minimize while keeping apart accepting states with different labels.

    ``labels`` maps each accepting state to a hashable, sortable label;
    the accepting set of ``d`` is ignored.  Returns ``(dfa, labels')`` where
    ``labels'`` maps the accepting states of the result to their labels.
    """
    delta = d.delta
    order = _reachable_order(delta, [d.initial])
    reach = set(order)
    live = _coreachable(delta, reach, labels)
    nsym = d.nsym
    if d.initial not in live:
        return Dfa(d.alphabet, [[-1] * nsym], 0, (), pair=d.pair), {}
    keep = [s for s in order if s in live]
    idx = {s: i for i, s in enumerate(keep)}
    tails, syms, heads = [], [], []
    for s in keep:
        i = idx[s]
        row = delta[s]
        for a in range(nsym):
            t = row[a]
            if t >= 0 and t in idx:
                tails.append(i)
                syms.append(a)
                heads.append(idx[t])
    groups: dict = {}
    for s in keep:
        if s in labels:
            groups.setdefault(labels[s], []).append(idx[s])
    classes = [groups[k] for k in sorted(groups)]
    block = _kernels.partition_refine(len(keep), tails, syms, heads, classes)
    nb = max(block) + 1
    qdelta = [[-1] * nsym for _ in range(nb)]
    for t in range(len(tails)):
        qdelta[block[tails[t]]][syms[t]] = block[heads[t]]
    qlab = {block[idx[s]]: labels[s] for s in keep if s in labels}
    return _renumber(d.alphabet, qdelta, block[idx[d.initial]], qlab, d.pair)


def _renumber(alphabet, delta, initial, labels, pair):
    order = _reachable_order(delta, [initial])
    idx = {s: i for i, s in enumerate(order)}
    nd = []
    for s in order:
        nd.append([idx[t] if t >= 0 else -1 for t in delta[s]])
    lab = {idx[s]: v for s, v in labels.items() if s in idx}
    return Dfa(alphabet, nd, 0, lab, pair=pair), lab


def minimize_midfa(m: "Midfa", accept_labels: dict | None = None):
    """Merge language-equivalent states of a multi-initial automaton.

    Initial states whose language is empty are dropped together with their
    labels.  States are renumbered breadth-first from the initial states in
    order.  With ``accept_labels`` (accepting state -> label) states with
    different labels are kept apart; the result is then ``(midfa,
    labels')``, otherwise just the Midfa.
    """
    labels = accept_labels if accept_labels is not None else {s: True for s in m.accepting}
    delta = m.delta
    nsym = m.nsym
    order = _reachable_order(delta, m.initials)
    live = _coreachable(delta, set(order), labels)
    keep = [s for s in order if s in live]
    idx = {s: i for i, s in enumerate(keep)}
    tails, syms, heads = [], [], []
    for s in keep:
        row = delta[s]
        for a in range(nsym):
            t = row[a]
            if t >= 0 and t in idx:
                tails.append(idx[s])
                syms.append(a)
                heads.append(idx[t])
    groups: dict = {}
    for s in keep:
        if s in labels:
            groups.setdefault(labels[s], []).append(idx[s])
    classes = [groups[k] for k in sorted(groups)]
    if keep:
        block = _kernels.partition_refine(len(keep), tails, syms, heads, classes)
        nb = max(block) + 1
    else:
        block, nb = [], 0
    qdelta = [[-1] * nsym for _ in range(nb)]
    for t in range(len(tails)):
        qdelta[block[tails[t]]][syms[t]] = block[heads[t]]
    starts, slabels = [], []
    for s, lab in zip(m.initials, m.labels):
        if s in idx:
            starts.append(block[idx[s]])
            slabels.append(lab)
    border = _reachable_order(qdelta, starts)
    ren = {q: i for i, q in enumerate(border)}
    nd = [[ren[t] if t >= 0 else -1 for t in qdelta[q]] for q in border]
    qlab = {}
    for s in keep:
        if s in labels:
            qlab[ren[block[idx[s]]]] = labels[s]
    out = Midfa(m.alphabet, nd if nd else [[-1] * nsym], [ren[q] for q in starts],
                qlab, slabels, pair=m.pair, label_alphabet=m.label_alphabet)
    if accept_labels is None:
        return out
    return out, qlab


# ---------------------------------------------------------------------------
# subset construction


def subset_construction(alphabet, pair, start, successors: Callable, accepting: Callable,
                        cap: int | None = DEFAULT_STATE_CAP) -> Dfa:
    """Determinize an automaton given by callbacks.

    ``successors(e)`` returns a mapping ``symbol -> iterable of elements``
    for one element ``e``; ``accepting(e)`` tells whether ``e`` accepts.
    Macro-states are frozensets of elements.  The result is minimized.
    """
    nsym = alphabet.pair_size if pair else alphabet.size
    start = frozenset(start)
    index = {start: 0}
    sets = [start]
    delta = []
    acc = set()
    succ_cache: dict = {}
    acc_cache: dict = {}
    i = 0
    while i < len(sets):
        S = sets[i]
        row = [-1] * nsym
        merged: dict = {}
        isacc = False
        for e in S:
            sc = succ_cache.get(e)
            if sc is None:
                sc = succ_cache[e] = successors(e)
            for a, ts in sc.items():
                m = merged.get(a)
                if m is None:
                    merged[a] = set(ts)
                else:
                    m.update(ts)
            ac = acc_cache.get(e)
            if ac is None:
                ac = acc_cache[e] = accepting(e)
            isacc = isacc or ac
        if isacc:
            acc.add(i)
        for a, ts in merged.items():
            if not ts:
                continue
            key = frozenset(ts)
            j = index.get(key)
            if j is None:
                j = index[key] = len(sets)
                sets.append(key)
                if cap is not None and len(sets) > cap:
                    raise BudgetExceeded(f"subset construction exceeded {cap} states")
            row[a] = j
        delta.append(row)
        i += 1
    return minimize(Dfa(alphabet, delta, 0, acc, pair=pair))


def determinize(m: Midfa, cap: int | None = DEFAULT_STATE_CAP) -> Dfa:
    """Dfa for the union of the languages of all initial states of ``m``."""
    delta = m.delta
    nsym = m.nsym

    def succ(s):
        row = delta[s]
        return {a: (row[a],) for a in range(nsym) if row[a] >= 0}

    acc = m.accepting
    return subset_construction(m.alphabet, m.pair, m.initials, succ,
                               acc.__contains__, cap)


# ---------------------------------------------------------------------------
# boolean operations


def bool_op(kind: str, d1: Dfa, d2: Dfa) -> Dfa:
    """``and``, ``or`` or ``andnot`` of two automata over the same alphabet."""
    if d1.alphabet != d2.alphabet or d1.pair != d2.pair:
        raise FsaError("alphabet mismatch")
    if kind not in ("and", "or", "andnot"):
        raise FsaError(f"unknown boolean operation {kind!r}")
    nsym = d1.nsym
    D1, D2 = d1.delta, d2.delta
    A1, A2 = d1.accepting, d2.accepting
    start = (d1.initial, d2.initial)
    index = {start: 0}
    states = [start]
    delta = []
    acc = set()
    need_both = kind == "and"
    keep_right_dead = kind == "or"
    i = 0
    while i < len(states):
        s1, s2 = states[i]
        in1 = s1 >= 0 and s1 in A1
        in2 = s2 >= 0 and s2 in A2
        if (kind == "and" and in1 and in2) or (kind == "or" and (in1 or in2)) or \
                (kind == "andnot" and in1 and not in2):
            acc.add(i)
        r1 = D1[s1] if s1 >= 0 else None
        r2 = D2[s2] if s2 >= 0 else None
        row = [-1] * nsym
        for a in range(nsym):
            t1 = r1[a] if r1 is not None else -1
            t2 = r2[a] if r2 is not None else -1
            if t1 < 0 and (need_both or not keep_right_dead or t2 < 0):
                continue
            if need_both and t2 < 0:
                continue
            key = (t1, t2)
            j = index.get(key)
            if j is None:
                j = index[key] = len(states)
                states.append(key)
            row[a] = j
        delta.append(row)
        i += 1
    return minimize(Dfa(d1.alphabet, delta, 0, acc, pair=d1.pair))


def complement(d: Dfa) -> Dfa:
    if d.pair:
        raise FsaError("complement of a pair automaton is not a padded language")
    return bool_op("andnot", universal_dfa(d.alphabet), d)


def is_empty(d: Dfa) -> bool:
    return not minimize(d).accepting


def language_equal(d1: Dfa, d2: Dfa) -> bool:
    return minimize(d1).canonical() == minimize(d2).canonical()


def shortest_word(d: Dfa):
    """Shortlex-least accepted symbol string, or None."""
    if d.initial in d.accepting:
        return ()
    prev = {d.initial: None}
    dq = deque([d.initial])
    while dq:
        s = dq.popleft()
        row = d.delta[s]
        for a, t in enumerate(row):
            if t >= 0 and t not in prev:
                prev[t] = (s, a)
                if t in d.accepting:
                    out = []
                    while prev[t] is not None:
                        t, a2 = prev[t]
                        out.append(a2)
                    return tuple(reversed(out))
                dq.append(t)
    return None


def difference_witness(d1: Dfa, d2: Dfa):
    """Shortlex-least string in exactly one of the two languages, or None."""
    w = shortest_word(bool_op("andnot", d1, d2))
    v = shortest_word(bool_op("andnot", d2, d1))
    if w is None:
        return v
    if v is None:
        return w
    return min(w, v, key=lambda s: (len(s), s))


# ---------------------------------------------------------------------------
# pair automata: projection and composition


def _pad_closure_acceptor(delta, accepting, steps):
    """Function telling whether a state reaches acceptance via ``steps`` symbols."""
    memo: dict = {}

    def ok(q):
        r = memo.get(q)
        if r is not None:
            return r
        seen = {q}
        stack = [q]
        found = False
        while stack:
            s = stack.pop()
            if s in accepting or memo.get(s):
                found = True
                break
            row = delta[s]
            for a in steps:
                t = row[a]
                if t >= 0 and t not in seen:
                    seen.add(t)
                    stack.append(t)
        if found:
            memo[q] = True
        else:
            for s in seen:
                memo[s] = False
        return found

    return ok


def exists_project(p: Dfa, coordinate: int = 1,
                   cap: int | None = DEFAULT_STATE_CAP) -> Dfa:
    """Acceptor of the words on one tape that have some partner in L(p)."""
    if not p.pair:
        raise FsaError("exists_project needs a pair automaton")
    if coordinate not in (1, 2):
        raise FsaError("coordinate must be 1 or 2")
    A = p.alphabet
    n, pad = A.size, A.pad
    delta = p.delta
    if coordinate == 1:
        groups = [[A.pair(a, b) for b in range(n + 1)] for a in range(n)]
        tail = [A.pair(pad, b) for b in range(n)]
    else:
        groups = [[A.pair(b, a) for b in range(n + 1)] for a in range(n)]
        tail = [A.pair(b, pad) for b in range(n)]
    final = _pad_closure_acceptor(delta, p.accepting, tail)

    def succ(q):
        row = delta[q]
        out = {}
        for a in range(n):
            ts = [row[s] for s in groups[a] if row[s] >= 0]
            if ts:
                out[a] = ts
        return out

    return subset_construction(A, False, [p.initial], succ, final, cap)


def compose(p: Dfa, q: Dfa, cap: int | None = DEFAULT_STATE_CAP) -> Dfa:
    """Pair automaton of ``{(w, x) : (w, y) in L(p), (y, x) in L(q) for some y}``."""
    if not (p.pair and q.pair) or p.alphabet != q.alphabet:
        raise FsaError("compose needs pair automata over one alphabet")
    A = p.alphabet
    n1 = A.size + 1
    pad = A.pad
    P, Q = p.delta, q.delta
    # p transitions grouped by second coordinate, q by first
    p_mid = []
    for row in P:
        g: dict = {}
        for sym, t in enumerate(row):
            if t >= 0:
                a1, a2 = divmod(sym, n1)
                g.setdefault(a2, []).append((a1, t))
        p_mid.append(g)
    q_mid = []
    for row in Q:
        g = {}
        for sym, t in enumerate(row):
            if t >= 0:
                a2, a3 = divmod(sym, n1)
                g.setdefault(a2, []).append((a3, t))
        q_mid.append(g)
    PA, QA = p.accepting, q.accepting

    final_memo: dict = {}

    def final(e):
        e = e[:2]
        r = final_memo.get(e)
        if r is not None:
            return r
        seen = {e}
        stack = [e]
        found = False
        while stack:
            s1, s2 = stack.pop()
            if (s1 in PA and s2 in QA) or final_memo.get((s1, s2)):
                found = True
                break
            gp, gq = p_mid[s1], q_mid[s2]
            for a2, lst in gp.items():
                if a2 == pad:
                    continue
                lq = gq.get(a2)
                if not lq:
                    continue
                for a1, t1 in lst:
                    if a1 != pad:
                        continue
                    for a3, t2 in lq:
                        if a3 == pad and (t1, t2) not in seen:
                            seen.add((t1, t2))
                            stack.append((t1, t2))
        if found:
            final_memo[e] = True
        else:
            for s in seen:
                final_memo[s] = False
        return found

    def succ(e):
        # ``ended`` is 1 or 2 once that output tape has been padded
        s1, s2, ended = e
        gp, gq = p_mid[s1], q_mid[s2]
        out: dict = {}

        def put(sym, t):
            a1, a3 = divmod(sym, n1)
            if (ended == 1 and a1 != pad) or (ended == 2 and a3 != pad):
                return
            t = t + (1 if a1 == pad else 2 if a3 == pad else ended,)
            s = out.get(sym)
            if s is None:
                out[sym] = {t}
            else:
                s.add(t)

        for a2, lst in gp.items():
            lq = gq.get(a2)
            if not lq:
                continue
            for a1, t1 in lst:
                base = a1 * n1
                for a3, t2 in lq:
                    if a1 == pad and a3 == pad:
                        continue
                    put(base + a3, (t1, t2))
        # the middle word has ended: a tape that has ended too stays put,
        # which is only possible in an accepting state
        if s1 in PA:
            for a3, t2 in gq.get(pad, ()):
                if a3 != pad:
                    put(pad * n1 + a3, (s1, t2))
        if s2 in QA:
            for a1, t1 in gp.get(pad, ()):
                if a1 != pad:
                    put(a1 * n1 + pad, (t1, s2))
        return out

    return subset_construction(A, True, [(p.initial, q.initial, 0)], succ, final, cap)


def inverse_relation(p: Dfa) -> Dfa:
    """Swap the two tapes of a pair automaton."""
    A = p.alphabet
    nsym = A.pair_size
    delta = []
    for row in p.delta:
        r = [-1] * nsym
        for sym, t in enumerate(row):
            if t >= 0:
                a1, a2 = A.unpair(sym)
                r[A.pair(a2, a1)] = t
        delta.append(r)
    return minimize(Dfa(A, delta, p.initial, p.accepting, pair=True))


def padding_violation(p: Dfa):
    """A reachable co-reachable transition breaking the padding rule, or None.

    Returns ``(state, symbol)`` for the first offending transition found.
    """
    A = p.alphabet
    pad = A.pad
    live = _coreachable(p.delta, set(range(p.nstates)), p.accepting)
    start = (p.initial, False, False)
    seen = {start}
    dq = deque([start])
    while dq:
        s, f1, f2 = dq.popleft()
        for sym, t in enumerate(p.delta[s]):
            if t < 0 or t not in live:
                continue
            a1, a2 = A.unpair(sym)
            if (f1 and a1 != pad) or (f2 and a2 != pad):
                return (s, sym)
            nxt = (t, f1 or a1 == pad, f2 or a2 == pad)
            if nxt not in seen:
                seen.add(nxt)
                dq.append(nxt)
    return None


# ---------------------------------------------------------------------------
# enumeration and growth


def enumerate_words(d: Dfa, max_len: int) -> list:
    """All accepted words of length at most ``max_len`` in shortlex order."""
    if d.pair:
        raise FsaError("enumerate a pair automaton via its symbol strings")
    n = d.nstates
    nsym = d.nsym
    delta = d.delta
    # can[r] = states from which some word of length exactly r is accepted
    can = [set(d.accepting)]
    for r in range(1, max_len + 1):
        prev = can[-1]
        can.append({s for s in range(n) if any(t >= 0 and t in prev for t in delta[s])})
    out = []
    for length in range(max_len + 1):
        if d.initial not in can[length]:
            continue
        # depth-first in lexicographic order
        res = []

        def walk(s, prefix, rem):
            if rem == 0:
                res.append(prefix)
                return
            row = delta[s]
            nxt = can[rem - 1]
            for a in range(nsym):
                t = row[a]
                if t >= 0 and t in nxt:
                    walk(t, prefix + (a,), rem - 1)

        walk(d.initial, (), length)
        out.extend(res)
    return out


def growth_series(d: Dfa, n_terms: int) -> list:
    """Number of accepted words of each length ``0 .. n_terms-1``."""
    counts = {d.initial: 1}
    acc = d.accepting
    delta = d.delta
    out = []
    for _ in range(n_terms):
        out.append(sum(c for s, c in counts.items() if s in acc))
        nxt: dict = {}
        for s, c in counts.items():
            for t in delta[s]:
                if t >= 0:
                    nxt[t] = nxt.get(t, 0) + c
        counts = nxt
    return out


def pad_extend(d: Dfa):
    """Transition table of ``d`` plus one padding state.

    Returns ``(delta, pstate)`` where ``delta`` has width ``size+1``: column
    ``size`` is the padding symbol, which leads from any accepting state (and
    from the padding state itself) to ``pstate``.
    """
    n = d.alphabet.size
    ps = d.nstates
    delta = []
    for s, row in enumerate(d.delta):
        delta.append(list(row) + [ps if s in d.accepting else -1])
    delta.append([-1] * n + [ps])
    return delta, ps
