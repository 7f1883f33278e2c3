"""Asynchronously automatic structures for HNN extensions.

The extension is ``K = <G, z | z^-1 y z = alpha(y), y in Y>`` where ``H`` is
generated by ``Y``, ``alpha`` permutes ``Y ∪ Y^-1`` and ``(G, H)`` has a
strong coset system for which ``Y`` is efficient.  Every element of ``K``
has a unique normal form

    h t1 z^n1 t2 z^n2 ... tr z^nr

with ``h`` an accepted word of the automatic structure of ``H`` (over the
alphabet ``B``), ``ti`` accepted coset representatives, ``ti != ε`` for
``i > 1`` and ``ni != 0`` for ``i < r``.

Multiplying a normal form on the right by a letter of ``G`` changes the
last block and then pushes a subgroup element (a *label*) leftwards
through every block, so the two words are compared block by block while
their lengths may drift apart without bound.  The multipliers built here
read the two tapes segment by segment: within a segment the heads
alternate, and a head that reaches the end of its segment waits for the
other one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .alphabet import Alphabet, Word
from .autostructure import AutLimits, AutomaticStructure, autstructure, composite
from .cosets import CosetSystem, EfficiencyResult, compose_labelled, efficiency_check
from .fsa import DEFAULT_STATE_CAP, BudgetExceeded, Dfa, diagonal, enumerate_words, minimize
from .rewriting import Presentation


class HnnError(ValueError):
    pass


# segment kinds of a normal form word
SEG_H, SEG_T, SEG_Z = "H", "T", "Z"


def _perm_order(perm) -> int:
    n = 1
    seen = set()
    for s in range(len(perm)):
        if s in seen:
            continue
        k, t = 0, s
        while True:
            seen.add(t)
            t = perm[t]
            k += 1
            if t == s:
                break
        n = n * k // _gcd(n, k)
    return n


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def subgroup_presentation(cs: CosetSystem) -> Presentation:
    """Presentation of ``H`` over ``B`` read off from the subgroup rules.

    Rules that only cancel an inverse pair are implied and left out.
    """
    B = cs.sub.B
    eqs = []
    for l, r in cs.cr.sub_rules:
        if len(l) == 2 and not r and l[1] == B.inv[l[0]]:
            continue
        eqs.append((tuple(l), tuple(r)))
    return Presentation(B, eqs)


class HnnInput:
    """Validated data for ``K = HNN(G, H, alpha)``.

    ``alpha`` maps each name of ``B`` to a name of ``B``; images of inverse
    letters may be omitted.  The structure for ``H`` is computed from the
    subgroup rules of the coset system when not supplied.
    """

    def __init__(self, cosets: CosetSystem, alpha=None, stable=("z", "Z"),
                 group: AutomaticStructure | None = None,
                 subgroup_structure: AutomaticStructure | None = None,
                 efficiency: EfficiencyResult | None = None,
                 limits: AutLimits | None = None, cap: int | None = DEFAULT_STATE_CAP):
        if not cosets.verified or not cosets.strong:
            raise HnnError("the coset system is not a verified strong system")
        if group is not None and not group.verified:
            raise HnnError("the structure for G is not verified")
        self.cosets = cosets
        self.group = group
        self.cap = cap
        self.sub = cosets.sub
        B = self.B = cosets.sub.B
        A = self.A = cosets.alphabet
        self.alpha = self._parse_alpha(alpha)
        self.alpha_inv = [0] * B.size
        for b, c in enumerate(self.alpha):
            self.alpha_inv[c] = b
        self.order = _perm_order(self.alpha)
        if subgroup_structure is None:
            subgroup_structure = autstructure(subgroup_presentation(cosets), limits)
        if not subgroup_structure.verified:
            raise HnnError("the structure for H is not verified")
        if subgroup_structure.alphabet != B:
            raise HnnError("the structure for H is over the wrong alphabet")
        self.hs = subgroup_structure
        for l, r in self.hs.rs.rules:
            if self.h_reduce(self.apply_alpha(l, 1)) != self.h_reduce(self.apply_alpha(r, 1)):
                raise HnnError("alpha does not respect the relations of H")
        self.efficiency = efficiency if efficiency is not None else efficiency_check(cosets)
        if not self.efficiency.efficient:
            raise HnnError("the subgroup generators are not efficient")
        z, Z = stable
        names = B.names + A.names + (z, Z)
        if len(set(names)) != len(names):
            raise HnnError("generator names of K must be distinct")
        inv = list(B.inv) + [a + B.size for a in A.inv] + [B.size + A.size + 1,
                                                           B.size + A.size]
        self.K = Alphabet(names, inv)
        self.stable = (z, Z)
        self.nB, self.nA = B.size, A.size
        self.z = self.nB + self.nA
        self.Z = self.z + 1
        self._mults: dict = {}
        self._lk = None
        self._tables = None

    def _parse_alpha(self, alpha):
        B = self.B
        if alpha is None:
            return list(range(B.size))
        perm = [-1] * B.size
        for k, v in alpha.items():
            b = B.index(k) if isinstance(k, str) else k
            c = B.index(v) if isinstance(v, str) else v
            perm[b] = c
        for b in range(B.size):
            if perm[b] < 0 and perm[B.inv[b]] >= 0:
                perm[b] = B.inv[perm[B.inv[b]]]
        if any(p < 0 for p in perm):
            raise HnnError("alpha must give an image for every generator")
        if sorted(perm) != list(range(B.size)):
            raise HnnError("alpha is not a bijection of B")
        for b in range(B.size):
            if perm[B.inv[b]] != B.inv[perm[b]]:
                raise HnnError("alpha does not respect inverses")
        gens = set(range(0, B.size, 2))
        for b in gens:
            if perm[b] not in gens:
                # alpha(Y) = Y: generators go to generators
                raise HnnError("alpha must map the generators Y to Y")
        return perm

    # -- symbols -----------------------------------------------------------

    def kind(self, s: int) -> str:
        if s < self.nB:
            return SEG_H
        if s < self.nB + self.nA:
            return SEG_T
        return SEG_Z

    def to_A(self, s: int) -> int:
        return s - self.nB

    def from_A(self, w) -> Word:
        return tuple(a + self.nB for a in w)

    def parse(self, text) -> Word:
        return self.K.parse_word(text)

    def format(self, w) -> str:
        return self.K.format_word(w)

    # -- the subgroup ------------------------------------------------------

    def h_reduce(self, h) -> Word:
        rs = self.hs.rs
        if rs.confluent:
            return rs.reduce(tuple(h))
        return self.hs.reduce(h)

    def apply_alpha(self, h, n: int) -> Word:
        """``alpha^n`` applied letter by letter."""
        n %= self.order
        out = tuple(h)
        for _ in range(n):
            out = tuple(self.alpha[b] for b in out)
        return out

    def def_word(self, h) -> Word:
        return self.sub.def_word(h)

    # -- component automata ------------------------------------------------

    def tables(self):
        if self._tables is None:
            self._tables = _LabelTables(self)
        return self._tables

    def word_acceptor(self) -> Dfa:
        if self._lk is None:
            self._lk = build_LK_acceptor(self)
        return self._lk

    def multiplier(self, c) -> "AsyncAutomaton":
        if isinstance(c, str):
            c = self.K.index(c)
        m = self._mults.get(c)
        if m is None:
            m = self._mults[c] = build_async_multiplier(c, self)
        return m

    def generators(self):
        return list(range(self.K.size))


# ---------------------------------------------------------------------------
# normal forms


@dataclass(frozen=True)
class HnnNormalForm:
    h: Word
    blocks: tuple          # ((t1, n1), ..., (tr, nr)); t over A, n signed

    def word(self, inp: HnnInput) -> Word:
        out = list(self.h)
        for t, n in self.blocks:
            out.extend(inp.from_A(t))
            out.extend([inp.z if n > 0 else inp.Z] * abs(n))
        return tuple(out)

    @property
    def r(self) -> int:
        return len(self.blocks)


IDENTITY = HnnNormalForm((), (((), 0),))


def parse_normal_form(w, inp: HnnInput) -> HnnNormalForm:
    """Split a word of the normal-form language into its parts.

    Only the shape is checked (letters of ``B`` first, single-signed
    z-runs); membership of the parts in their languages is not.
    """
    w = tuple(w)
    i = 0
    while i < len(w) and inp.kind(w[i]) == SEG_H:
        i += 1
    h = w[:i]
    blocks = []
    while True:
        j = i
        while j < len(w) and inp.kind(w[j]) == SEG_T:
            j += 1
        t = tuple(inp.to_A(a) for a in w[i:j])
        k = j
        while k < len(w) and w[k] == (w[j] if j < len(w) else -1) and inp.kind(w[k]) == SEG_Z:
            k += 1
        n = (k - j) * (1 if j < len(w) and w[j] == inp.z else -1)
        if j < len(w) and inp.kind(w[j]) != SEG_Z:
            raise HnnError("letter of B after the subgroup prefix")
        blocks.append((t, n))
        i = k
        if i >= len(w):
            break
        if inp.kind(w[i]) != SEG_T:
            raise HnnError("z-runs must be separated by letters of G")
    return HnnNormalForm(h, tuple(blocks))


def _push(inp: HnnInput, blocks: list, j: int, x: Word) -> Word:
    """Move the subgroup element ``x`` standing after block ``j`` leftwards.

    Returns what is left in front of the first block.
    """
    cs = inp.cosets
    while x and j >= 0:
        t, n = blocks[j]
        y = inp.h_reduce(inp.apply_alpha(x, -n))
        x, t2 = cs.decompose(inp.def_word(y), start=t)
        x = inp.h_reduce(x)
        blocks[j] = (t2, n)
        j -= 1
    return x


def nf_multiply(nf: HnnNormalForm, c: int, inp: HnnInput) -> HnnNormalForm:
    """Normal form of ``nf · c`` for one letter ``c`` of ``K``."""
    blocks = list(nf.blocks)
    t, n = blocks[-1]
    if c == inp.z or c == inp.Z:
        blocks[-1] = (t, n + (1 if c == inp.z else -1))
        return HnnNormalForm(nf.h, tuple(blocks))
    g = (inp.to_A(c),) if inp.kind(c) == SEG_T else inp.def_word((c,))
    cs = inp.cosets
    if n == 0:
        x, t2 = cs.decompose(g, start=t)
        x = inp.h_reduce(x)
        if t2 or len(blocks) == 1:
            # x stands in front of the last block
            blocks[-1] = (t2, 0)
            j = len(blocks) - 2
        else:
            # the last block vanished; x follows the z-run before it
            blocks.pop()
            j = len(blocks) - 1
    else:
        x, t2 = cs.decompose(g)
        x = inp.h_reduce(x)
        if t2:
            blocks.append((t2, 0))
            j = len(blocks) - 2
        else:
            j = len(blocks) - 1
    rest = _push(inp, blocks, j, x)
    return HnnNormalForm(inp.h_reduce(tuple(nf.h) + tuple(rest)), tuple(blocks))


def hnn_normal_form(w, inp: HnnInput) -> HnnNormalForm:
    """Normal form of ``w`` by collecting letters from left to right."""
    nf = IDENTITY
    for c in w:
        nf = nf_multiply(nf, c, inp)
    return nf


def normal_form_word(w, inp: HnnInput) -> Word:
    return hnn_normal_form(w, inp).word(inp)


def nf_left_multiply(c: int, nf: HnnNormalForm, inp: HnnInput) -> HnnNormalForm:
    """Normal form of ``c · nf``; only the subgroup part and first block change."""
    blocks = list(nf.blocks)
    h = nf.h
    if inp.kind(c) == SEG_H:
        return HnnNormalForm(inp.h_reduce((c,) + tuple(h)), nf.blocks)
    if inp.kind(c) == SEG_T:
        t, n = blocks[0]
        x, t2 = inp.cosets.decompose((inp.to_A(c),) + inp.def_word(h) + tuple(t))
        blocks[0] = (t2, n)
        return HnnNormalForm(inp.h_reduce(x), tuple(blocks))
    e = 1 if c == inp.z else -1
    h2 = inp.h_reduce(inp.apply_alpha(h, -e))
    t, n = blocks[0]
    if t:
        blocks.insert(0, ((), e))
    elif n + e == 0 and len(blocks) > 1:
        blocks.pop(0)
    else:
        blocks[0] = ((), n + e)
    return HnnNormalForm(h2, tuple(blocks))


def hnn_normal_form_rtl(w, inp: HnnInput) -> HnnNormalForm:
    """The same normal form, collected from right to left."""
    nf = IDENTITY
    for c in reversed(tuple(w)):
        nf = nf_left_multiply(c, nf, inp)
    return nf


# ---------------------------------------------------------------------------
# the normal-form language


def build_LK_acceptor(inp: HnnInput) -> Dfa:
    """Minimized acceptor of the normal-form words of ``K``."""
    WH = inp.hs.acceptor
    WC = inp.cosets.acceptor
    K = inp.K
    nK = K.size
    index: dict = {}
    states: list = []
    delta: list = []

    def sid(key):
        i = index.get(key)
        if i is None:
            i = index[key] = len(states)
            states.append(key)
        return i

    sid((SEG_H, WH.initial))
    i = 0
    acc = set()
    while i < len(states):
        kind, q = states[i]
        row = [-1] * nK
        if kind == SEG_H:
            done = q in WH.accepting
            if done:
                acc.add(i)
            for s in range(nK):
                k = inp.kind(s)
                if k == SEG_H:
                    t = WH.delta[q][s]
                    if t >= 0:
                        row[s] = sid((SEG_H, t))
                elif done and k == SEG_T:
                    t = WC.delta[WC.initial][inp.to_A(s)]
                    if t >= 0:
                        row[s] = sid((SEG_T, t))
                elif done and WC.initial in WC.accepting:
                    row[s] = sid((SEG_Z, s))
        elif kind == SEG_T:
            done = q in WC.accepting
            if done:
                acc.add(i)
            for s in range(nK):
                k = inp.kind(s)
                if k == SEG_T:
                    t = WC.delta[q][inp.to_A(s)]
                    if t >= 0:
                        row[s] = sid((SEG_T, t))
                elif k == SEG_Z and done:
                    row[s] = sid((SEG_Z, s))
        else:
            acc.add(i)
            for s in range(nK):
                k = inp.kind(s)
                if s == q:
                    row[s] = i
                elif k == SEG_T:
                    t = WC.delta[WC.initial][inp.to_A(s)]
                    if t >= 0:
                        row[s] = sid((SEG_T, t))
        delta.append(row)
        i += 1
    return minimize(Dfa(K, delta, 0, acc))


# ---------------------------------------------------------------------------
# asynchronous automata


class AsyncAutomaton:
    """A deterministic two-tape automaton whose states choose the tape.

    States are discovered lazily from a *stepper* which supplies the start
    key, the tape read in a key (1 or 2), the successor of a key on a
    symbol (None to reject) and whether a key accepts.  Symbol ``END``
    (one past the alphabet) is read once when a tape is exhausted; a run
    finishes when both tapes have delivered ``END``.
    """

    def __init__(self, alphabet: Alphabet, stepper, name: str = "", cap=DEFAULT_STATE_CAP):
        self.alphabet = alphabet
        self.END = alphabet.size
        self.stepper = stepper
        self.name = name
        self.cap = cap
        self._keys: list = []
        self._index: dict = {}
        self._read: list = []
        self._acc: list = []
        self._delta: list = []
        self.initial = self._intern(stepper.start())

    def _intern(self, key) -> int:
        i = self._index.get(key)
        if i is None:
            i = self._index[key] = len(self._keys)
            if self.cap is not None and i >= self.cap:
                raise BudgetExceeded("asynchronous automaton exceeded the state budget")
            self._keys.append(key)
            self._read.append(self.stepper.read(key))
            self._acc.append(self.stepper.accepting(key))
            self._delta.append({})
        return i

    def read(self, s: int) -> int:
        return self._read[s]

    def accepting(self, s: int) -> bool:
        return self._acc[s]

    def key(self, s: int):
        return self._keys[s]

    def summary(self, s: int):
        return self.stepper.summary(self._keys[s])

    def step(self, s: int, sym: int) -> int:
        row = self._delta[s]
        t = row.get(sym)
        if t is None:
            k = self.stepper.step(self._keys[s], sym)
            t = row[sym] = -1 if k is None else self._intern(k)
        return t

    @property
    def nstates(self) -> int:
        """States discovered so far."""
        return len(self._keys)

    def materialize(self):
        """Explore every reachable state; returns ``(delta, read, accepting)``."""
        i = 0
        while i < len(self._keys):
            for sym in range(self.END + 1):
                self.step(i, sym)
            i += 1
        delta = [[self._delta[s].get(a, -1) for a in range(self.END + 1)]
                 for s in range(len(self._keys))]
        acc = [s for s in range(len(self._keys)) if self._acc[s]]
        return delta, list(self._read), acc


@dataclass
class RunResult:
    accepted: bool
    trace: list = field(default_factory=list)     # (phi, psi, summary) per step

    def __bool__(self):
        return self.accepted

    @property
    def max_lag(self) -> int:
        return max((abs(p - q) for p, q, _ in self.trace), default=0)


def async_run(m: AsyncAutomaton, u, v, trace: bool = True) -> RunResult:
    """Run ``m`` on the tapes ``u`` and ``v``."""
    u, v = tuple(u), tuple(v)
    END = m.END
    s = m.initial
    phi = psi = 0
    end1 = end2 = False
    out = []
    if trace:
        out.append((0, 0, m.summary(s)))
    while not (end1 and end2):
        if m.read(s) == 1:
            if end1:
                return RunResult(False, out)
            if phi < len(u):
                sym = u[phi]
                phi += 1
            else:
                sym = END
                end1 = True
        else:
            if end2:
                return RunResult(False, out)
            if psi < len(v):
                sym = v[psi]
                psi += 1
            else:
                sym = END
                end2 = True
        s = m.step(s, sym)
        if s < 0:
            return RunResult(False, out)
        if trace:
            out.append((phi, psi, m.summary(s)))
    return RunResult(m.accepting(s), out)


# ---------------------------------------------------------------------------
# multipliers


class _LabelTables:
    """Pair automata for every case the multipliers can meet.

    ``labels`` is the closed set of subgroup labels, ``coset[y]`` the
    labelled composite for a label ``y`` (pairs ``(t, t')`` with ``t·y =
    x·t'`` by label ``x``) and ``subgroup[x]`` the multiplier of ``H`` for
    ``x``.
    """

    def __init__(self, inp: HnnInput):
        cs = inp.cosets
        self.inp = inp
        A = cs.alphabet
        comps = inp.efficiency.composites

        def clean(L):
            out: dict = {}
            for lab, d in L.items():
                lab = inp.h_reduce(tuple(lab or ()))
                if lab in out:
                    raise HnnError("two labels of a multiplier coincide in H")
                out[lab] = d
            return out

        self.final = {}
        for c in range(inp.K.size):
            k = inp.kind(c)
            if k == SEG_T:
                self.final[c] = clean(cs.labelled(inp.to_A(c)))
            elif k == SEG_H:
                self.final[c] = clean(comps[c])
        self.coset = {(): {(): diagonal(cs.acceptor)}}
        labels = set()
        for L in self.final.values():
            labels.update(L)
        queue = sorted(labels, key=lambda w: (len(w), w))
        while queue:
            x = queue.pop()
            for n in range(inp.order):
                y = inp.h_reduce(inp.apply_alpha(x, -n))
                if y in self.coset:
                    continue
                self.coset[y] = L = self._coset_composite(y, comps, clean)
                for lab in L:
                    if lab not in labels:
                        labels.add(lab)
                        queue.append(lab)
        self.labels = sorted(labels, key=lambda w: (len(w), w))
        self.by_label: dict = {}
        for y in sorted(self.coset, key=lambda w: (len(w), w)):
            for x in self.coset[y]:
                self.by_label.setdefault(x, []).append(y)
        hs = inp.hs
        ident = hs.multipliers[hs.alphabet.pad]
        cache: dict = {}
        self.subgroup = {x: composite(hs.multipliers, x, ident, inp.cap, cache)
                         for x in self.labels}
        self.A = A

    def _coset_composite(self, y, comps, clean):
        if len(y) == 1:
            return clean(comps[y[0]])
        inp = self.inp
        L = clean(comps[y[0]])
        for b in y[1:]:
            L = compose_labelled(L, clean(comps[b]), inp.h_reduce, inp.cap)
        return L


class _GeneratorStepper:
    """Multiplier for a letter of ``G`` or of ``B``.

    A key is ``(phase, pending, held1, held2, sign, comps)``: ``phase`` is
    the segment kind, ``pending`` a symbol read from tape 1 awaiting its
    partner, ``held1``/``held2`` the symbol that ended the segment on a
    tape (None while it is still open) and ``comps`` the set of case
    data.  Case data are tagged tuples:

    - ``("H", x, q)``: comparing the subgroup prefixes for label ``x``
    - ``("F", x, q)``: the last coset block, expecting label ``x``
    - ``("I", y, x, q)``: an inner coset block multiplied by ``y``
    - ``("Z", y, n)``: inside a z-run of exponent ``n`` (mod the order of alpha)
    """

    def __init__(self, inp: HnnInput, c: int):
        self.inp = inp
        self.c = c
        self.T = inp.tables()
        self.END = inp.K.size
        self.final = self.T.final[c]

    # the reading schedule

    def start(self):
        T = self.T
        comps = frozenset(("H", x, T.subgroup[x].initial) for x in T.labels)
        return (SEG_H, None, None, None, 0, comps)

    def read(self, key):
        phase, pending, h1, h2, sign, comps = key
        if phase == "ACC":
            return 1
        if pending is not None:
            return 2
        if h1 is None:
            return 1
        return 2

    def accepting(self, key):
        return key[0] == "ACC"

    def summary(self, key):
        phase, pending, h1, h2, sign, comps = key
        if phase == "ACC":
            return ("ACC", ())
        labs = set()
        for cd in comps:
            if cd[0] in ("H", "F"):
                labs.add(cd[1])
            elif cd[0] == "I":
                labs.add(cd[1])
                labs.add(cd[2])
            else:
                labs.add(cd[1])
        return (phase, tuple(sorted(labs, key=lambda w: (len(w), w))))

    def _belongs(self, phase, sign, s):
        if s == self.END:
            return False
        k = self.inp.kind(s)
        if phase == SEG_Z:
            return s == sign
        return k == phase

    def step(self, key, s):
        phase, pending, h1, h2, sign, comps = key
        if phase == "ACC":
            return None
        if not self._legal(phase, sign, s):
            return None
        inside = self._belongs(phase, sign, s)
        if pending is None and h1 is None:
            if inside:
                if h2 is not None:
                    comps = self._feed(phase, comps, s, None)
                    return self._norm(phase, None, None, h2, sign, comps)
                return self._norm(phase, s, None, None, sign, comps)
            return self._norm(phase, None, s, h2, sign, comps)
        if pending is not None:
            if inside:
                comps = self._feed(phase, comps, pending, s)
                return self._norm(phase, None, None, None, sign, comps)
            comps = self._feed(phase, comps, pending, None)
            return self._norm(phase, None, None, s, sign, comps)
        # tape 1 is done, reading tape 2
        if inside:
            comps = self._feed(phase, comps, None, s)
            return self._norm(phase, None, h1, None, sign, comps)
        return self._norm(phase, None, h1, s, sign, comps)

    def _legal(self, phase, sign, s):
        if s == self.END:
            return True
        k = self.inp.kind(s)
        if phase == SEG_H:
            return True
        if phase == SEG_T:
            return k != SEG_H
        return k == SEG_T or s == sign

    def _norm(self, phase, pending, h1, h2, sign, comps):
        """Resolve segment ends until a read is needed."""
        while True:
            if not comps:
                return None
            if h1 is None or h2 is None or pending is not None:
                return (phase, pending, h1, h2, sign, comps)
            nxt = self._advance(phase, sign, h1, h2, comps)
            if nxt is None:
                return None
            if nxt == "ACC":
                return ("ACC", None, None, None, 0, frozenset())
            phase, sign, comps = nxt
            # the held symbols open the new segment
            in1 = self._belongs(phase, sign, h1)
            in2 = self._belongs(phase, sign, h2)
            if in1 and in2:
                comps = self._feed(phase, comps, h1, h2)
                h1 = h2 = None
            elif in1:
                comps = self._feed(phase, comps, h1, None)
                h1 = None
            elif in2:
                comps = self._feed(phase, comps, None, h2)
                h2 = None

    def _advance(self, phase, sign, h1, h2, comps):
        """Leave a finished segment; returns the next (phase, sign, comps)."""
        T = self.T
        inp = self.inp
        END = self.END
        if phase == SEG_H:
            new = set()
            for cd in comps:
                _, x, q = cd
                if q in T.subgroup[x].accepting:
                    new.update(self._open_block(x))
            return (SEG_T, 0, frozenset(new))
        if phase == SEG_T:
            if h1 == END and h2 == END:
                for cd in comps:
                    if cd[0] == "F" and cd[2] in self.final[cd[1]].accepting:
                        return "ACC"
                return None
            if h1 != h2 or h1 == END or inp.kind(h1) != SEG_Z:
                return None
            new = set()
            for cd in comps:
                if cd[0] == "I":
                    _, y, x, q = cd
                    if q in T.coset[y][x].accepting:
                        new.add(("Z", y, 0))
            return (SEG_Z, h1, frozenset(new))
        # end of a z-run
        new = set()
        for cd in comps:
            _, y, n = cd
            x = inp.h_reduce(inp.apply_alpha(y, n))
            new.update(self._open_block(x))
        return (SEG_T, 0, frozenset(new))

    def _open_block(self, x):
        T = self.T
        out = []
        d = self.final.get(x)
        if d is not None:
            out.append(("F", x, d.initial))
        for y in T.by_label.get(x, ()):
            out.append(("I", y, x, T.coset[y][x].initial))
        return out

    def _feed(self, phase, comps, s1, s2):
        """Advance every case datum on one aligned pair of symbols."""
        inp = self.inp
        T = self.T
        new = set()
        if phase == SEG_H:
            B = inp.B
            p = B.pair(B.pad if s1 is None else s1, B.pad if s2 is None else s2)
            for _, x, q in comps:
                t = T.subgroup[x].delta[q][p]
                if t >= 0:
                    new.add(("H", x, t))
        elif phase == SEG_T:
            A = T.A
            p = A.pair(A.pad if s1 is None else inp.to_A(s1),
                       A.pad if s2 is None else inp.to_A(s2))
            for cd in comps:
                if cd[0] == "F":
                    _, x, q = cd
                    t = self.final[x].delta[q][p]
                    if t >= 0:
                        new.add(("F", x, t))
                else:
                    _, y, x, q = cd
                    t = T.coset[y][x].delta[q][p]
                    if t >= 0:
                        new.add(("I", y, x, t))
        else:
            if s1 is None or s2 is None:
                return frozenset()
            e = 1 if s1 == inp.z else -1
            for _, y, n in comps:
                new.add(("Z", y, (n + e) % inp.order))
        return frozenset(new)


class _StableStepper:
    """Multiplier for ``z`` or ``z^-1``: equal words up to one final letter.

    Keys are ``(q, pending, tail)``: ``q`` is the state of the normal-form
    acceptor on the common prefix, ``pending`` a tape-1 symbol awaiting its
    partner and ``tail`` records an unmatched last letter ("u" when tape 1
    carries the inverse letter, "v" when tape 2 carries the letter).
    """

    def __init__(self, inp: HnnInput, c: int):
        self.inp = inp
        self.c = c
        self.ci = inp.K.inv[c]
        self.L = inp.word_acceptor()
        self.END = inp.K.size

    def start(self):
        return (self.L.initial, None, None)

    def read(self, key):
        q, pending, tail = key
        if tail == "ACC":
            return 1
        if tail == "u":
            return 1
        if tail == "v":
            return 2
        return 2 if pending is not None else 1

    def accepting(self, key):
        return key[2] == "ACC"

    def summary(self, key):
        q, pending, tail = key
        return ("Z", () if tail is None else (tail,))

    def step(self, key, s):
        q, pending, tail = key
        L, END = self.L, self.END
        if tail == "ACC":
            return None
        if tail is not None:
            if s != END:
                return None
            return (q, None, "ACC")
        if pending is None:
            return (q, s, None)
        s1, s2 = pending, s
        if s1 != END and s1 == s2:
            t = L.delta[q][s1]
            return None if t < 0 else (t, None, None)
        if s1 == END and s2 == self.c:
            t = L.delta[q][self.c]
            if q in L.accepting and t >= 0 and t in L.accepting:
                return (q, None, "v")
            return None
        if s1 == self.ci and s2 == END:
            t = L.delta[q][self.ci]
            if q in L.accepting and t >= 0 and t in L.accepting:
                return (q, None, "u")
            return None
        return None


def build_async_multiplier(c: int, inp: HnnInput) -> AsyncAutomaton:
    """Asynchronous multiplier for the letter ``c`` of ``K``."""
    if isinstance(c, str):
        c = inp.K.index(c)
    if c == inp.z or c == inp.Z:
        stepper = _StableStepper(inp, c)
    else:
        stepper = _GeneratorStepper(inp, c)
    return AsyncAutomaton(inp.K, stepper, "M_" + inp.K.names[c], inp.cap)


# ---------------------------------------------------------------------------
# bounded verification


@dataclass
class HnnReport:
    passed: bool
    depth: int
    words: int = 0
    checked: int = 0
    rejections: int = 0
    failures: list = field(default_factory=list)     # (u, c, v, reason)
    max_lag: int = 0
    labels: list = field(default_factory=list)

    def summary(self) -> str:
        if self.passed:
            return (f"{self.words} words, {self.checked} accepted pairs and "
                    f"{self.rejections} rejected pairs checked to depth {self.depth}")
        return f"{len(self.failures)} failures at depth {self.depth}"


def verify_async_structure(inp: HnnInput, depth: int, letters=None, samples: int = 2,
                           max_failures: int = 20) -> HnnReport:
    """Exhaustive check of the multipliers on normal forms of length ``depth``.

    For every accepted ``u`` and letter ``c`` the normal form ``v`` of
    ``u c`` must be accepted by ``M_c`` and a few other accepted words
    (the normal forms of ``u c d`` for the first letters ``d``, and ``u``)
    must be rejected.  Every summary met in an accepted run must use
    labels from the precomputed set.
    """
    L = inp.word_acceptor()
    letters = inp.generators() if letters is None else [
        inp.K.index(c) if isinstance(c, str) else c for c in letters]
    known = set(inp.tables().labels)
    known.add(())
    rep = HnnReport(False, depth, labels=sorted(known, key=lambda w: (len(w), w)))
    words = enumerate_words(L, depth)
    rep.words = len(words)

    def fail(u, c, v, why):
        if len(rep.failures) < max_failures:
            rep.failures.append((tuple(u), c, tuple(v), why))

    for u in words:
        nf = parse_normal_form(u, inp)
        if nf.word(inp) != tuple(u):
            fail(u, None, u, "accepted word does not parse back")
            continue
        for c in letters:
            m = inp.multiplier(c)
            vnf = nf_multiply(nf, c, inp)
            v = vnf.word(inp)
            if not L.accepts(v):
                fail(u, c, v, "normal form not accepted")
                continue
            res = async_run(m, u, v)
            rep.checked += 1
            if not res.accepted:
                fail(u, c, v, "multiplier rejects the product")
                continue
            rep.max_lag = max(rep.max_lag, res.max_lag)
            for _, _, summ in res.trace:
                if any(lab not in known for lab in summ[1] if isinstance(lab, tuple)):
                    fail(u, c, v, "label outside the precomputed set")
                    break
            wrong = []
            if tuple(u) != v:
                wrong.append(tuple(u))
            for d in letters:
                if len(wrong) > samples:
                    break
                w = nf_multiply(vnf, d, inp).word(inp)
                if w != v and w not in wrong:
                    wrong.append(w)
            for w in wrong[:samples + 1]:
                rep.rejections += 1
                if async_run(m, u, w, trace=False).accepted:
                    fail(u, c, w, "multiplier accepts a wrong product")
    rep.passed = not rep.failures
    return rep


def lag_family(inp: HnnInput, block, letter, r_max: int = 8, exponent: int = 1):
    """Runs of ``M_letter`` on ``u_r = (block z^exponent)^r block``.

    Returns a list of ``(r, u, v, max |phi - psi|, accepted)``.
    """
    if isinstance(block, str):
        block = tuple(inp.to_A(s) for s in inp.parse(block))
    c = inp.K.index(letter) if isinstance(letter, str) else letter
    m = inp.multiplier(c)
    zs = [inp.z if exponent > 0 else inp.Z] * abs(exponent)
    out = []
    for r in range(r_max + 1):
        u = tuple(itertools.chain.from_iterable(
            [inp.from_A(block) + tuple(zs)] * r)) + inp.from_A(block)
        v = normal_form_word(u + (c,), inp)
        res = async_run(m, u, v)
        out.append((r, u, v, res.max_lag, res.accepted))
    return out
