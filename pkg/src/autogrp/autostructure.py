"""Shortlex automatic structures.

The pipeline is: (partial) Knuth-Bendix completion, a word-difference
machine read off the rules, the word acceptor recognising words that no
known difference can shorten, the multipliers built from triples
``(s1, s2, g)``, and finally an axiom check that either certifies the
structure or yields counterexamples used to enlarge the difference set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .alphabet import Alphabet, Word
from .fsa import (DEFAULT_STATE_CAP, BudgetExceeded, Dfa, compose, diagonal,
                  difference_witness, exists_project, minimize, minimize_labelled,
                  pad_extend)
from .rewriting import KBLimits, Presentation, RewritingSystem, knuth_bendix

DEFAULT_DIFF_CAP = 200_000

# comparison status of a difference track: how the x-prefix read so far
# compares with the w-prefix (equal, less, greater, or x already ended)
EQ, LT, GT, PADDED = 0, 1, 2, 3


class StructureError(RuntimeError):
    """An automatic structure failed to produce an answer it must produce."""


class WordDifferenceMachine:
    """Reduced words standing for the differences ``w(t)^-1 x(t)``.

    ``table[d][(a1, a2)]`` is the index of ``reduce(a1^-1 d a2)`` when that
    word is itself a stored difference, else -1.  Index 0 is the empty word.
    ``reduce`` is any function returning a word equal in the group; the
    stored words are its fixed points as far as the machine is concerned.
    """

    def __init__(self, alphabet: Alphabet, reduce, cap: int = DEFAULT_DIFF_CAP):
        self.alphabet = alphabet
        self._reduce = reduce
        self.cap = cap
        self.words: list = [()]
        self.index: dict = {(): 0}
        self._steps: dict = {}
        self.table: list = []
        self.succ: list = []

    def __len__(self):
        return len(self.words)

    @property
    def k(self) -> int:
        return max(len(w) for w in self.words)

    def reduce(self, w) -> Word:
        return tuple(self._reduce(tuple(w)))

    def add(self, w) -> int:
        """Store ``reduce(w)`` and its inverse; return the index of the first.

        The set is kept closed under inversion because a track comparing
        ``x`` against ``w`` meets the inverses of the differences of ``w``
        against ``x``.
        """
        w = self.reduce(w)
        i = self.index.get(w)
        if i is None:
            i = self._store(w)
            self._store(self.reduce(self.alphabet.invert(w)))
        return i

    def _store(self, w) -> int:
        i = self.index.get(w)
        if i is None:
            if len(self.words) >= self.cap:
                raise BudgetExceeded(f"more than {self.cap} word differences")
            i = self.index[w] = len(self.words)
            self.words.append(w)
        return i

    def step_word(self, d: Word, a1: int, a2: int) -> Word:
        A = self.alphabet
        pad = A.pad
        left = () if a1 == pad else (A.inv[a1],)
        right = () if a2 == pad else (a2,)
        return self.reduce(left + tuple(d) + right)

    def add_alignment(self, w, x, start=()) -> int:
        """Add the differences met while reading ``(w, x)`` from ``start``.

        The differences are computed incrementally, each from the previous
        one, so the new entries are linked by transitions once closed.
        Returns the index of the final difference.
        """
        pad = self.alphabet.pad
        d = self.reduce(start)
        self.add(d)
        for t in range(max(len(w), len(x))):
            a1 = w[t] if t < len(w) else pad
            a2 = x[t] if t < len(x) else pad
            d = self.step_word(d, a1, a2)
            self.add(d)
        return self.index[d]

    def close(self):
        """Recompute the transition table over the stored differences."""
        A = self.alphabet
        n1 = A.size + 1
        nsym = A.pair_size
        steps = self._steps
        index = self.index
        table = []
        for i, d in enumerate(self.words):
            row = [-1] * nsym
            for sym in range(nsym):
                key = (i, sym)
                w = steps.get(key)
                if w is None:
                    a1, a2 = divmod(sym, n1)
                    w = steps[key] = self.step_word(d, a1, a2)
                row[sym] = index.get(w, -1)
            table.append(row)
        self.table = table
        # successors grouped by the first coordinate: succ[d][a] = [(b, d'), ...]
        succ = []
        for row in table:
            per = []
            for a in range(A.size):
                base = a * n1
                per.append([(b, row[base + b]) for b in range(n1) if row[base + b] >= 0])
            succ.append(per)
        self.succ = succ
        return self

    def equals_letter(self, d: int, a: int) -> bool:
        """Whether difference ``d`` reduces to the generator ``a`` (or to ε for pad)."""
        A = self.alphabet
        w = self.words[d]
        if a == A.pad:
            return not w
        return not self.reduce(A.invert(w) + (a,))


def word_differences_from_rules(rs: RewritingSystem, cap: int = DEFAULT_DIFF_CAP,
                                reduce=None) -> WordDifferenceMachine:
    """Difference machine from aligning the two sides of every rule."""
    wd = WordDifferenceMachine(rs.alphabet, reduce or rs.reduce, cap)
    for lhs, rhs in rs.rules:
        wd.add_alignment(lhs, rhs)
    return wd.close()


# ---------------------------------------------------------------------------
# word acceptor


def _step_tracks(wd, tracks, a):
    """Advance a set of encoded tracks by the w-letter ``a``.

    Returns the new track set, or None when some track proves that the word
    read so far has a smaller equal word.
    """
    pad = wd.alphabet.pad
    succ = wd.succ
    new = set()
    for tr in tracks:
        d, st = divmod(tr, 4)
        for b, d2 in succ[d][a]:
            if st == PADDED:
                if b != pad:
                    continue
                ns = PADDED
            elif b == pad:
                ns = PADDED
            elif st == EQ:
                ns = EQ if b == a else (LT if b < a else GT)
            else:
                ns = st
            if d2 == 0:
                if ns == LT or ns == PADDED:
                    return None
                continue
            new.add(d2 * 4 + ns)
    return new


def acceptor_from_differences(wd: WordDifferenceMachine, start_diffs=(),
                              cap: int | None = DEFAULT_STATE_CAP) -> Dfa:
    """Words not shortened by any difference track, as a minimized Dfa.

    A track starts as ``(ε, EQ)`` at every position; ``start_diffs`` adds
    tracks ``(d, EQ)`` at position 0, used for coset acceptors where ``d``
    is the defining word of a subgroup element.
    """
    A = wd.alphabet
    n = A.size
    fresh = 0 * 4 + EQ
    start = frozenset(d * 4 + EQ for d in start_diffs if d != 0)
    index = {start: 0}
    sets = [start]
    delta = []
    i = 0
    while i < len(sets):
        S = sets[i]
        tracks = set(S)
        tracks.add(fresh)
        row = [-1] * n
        for a in range(n):
            new = _step_tracks(wd, tracks, a)
            if new is None:
                continue
            key = frozenset(new)
            j = index.get(key)
            if j is None:
                j = index[key] = len(sets)
                sets.append(key)
                if cap is not None and len(sets) > cap:
                    raise BudgetExceeded(f"word acceptor exceeded {cap} states")
            row[a] = j
        delta.append(row)
        i += 1
    return minimize(Dfa(A, delta, 0, range(len(delta))))


def build_word_acceptor(wd: WordDifferenceMachine, rs: RewritingSystem | None = None,
                        cap: int | None = DEFAULT_STATE_CAP) -> Dfa:
    """Shortlex word acceptor for the differences in ``wd``.

    ``rs`` is accepted for symmetry with the other builders; the rules
    are already folded into ``wd``.
    """
    return acceptor_from_differences(wd, (), cap)


def wd_find_reduction(wd: WordDifferenceMachine, word, start_diffs=()):
    """First factor of ``word`` that a difference track shortens.

    Returns ``(i, j, x)`` meaning ``word[i:j]`` may be replaced by the
    shortlex-smaller equal word ``x``, or None when ``word`` is accepted.
    With ``start_diffs`` the tracks started at position 0 carry the given
    initial differences (for coset reduction; then ``x`` is returned
    together with the index of the start difference as a fourth item).
    """
    A = wd.alphabet
    pad = A.pad
    succ = wd.succ
    tracks: dict = {}
    for d in start_diffs:
        if d != 0:
            tracks.setdefault(d * 4 + EQ, (0, (), d))
    for t, a in enumerate(word):
        tracks.setdefault(EQ, (t, (), 0))
        new: dict = {}
        for tr, (i, xs, d0) in tracks.items():
            d, st = divmod(tr, 4)
            for b, d2 in succ[d][a]:
                if st == PADDED:
                    if b != pad:
                        continue
                    ns = PADDED
                elif b == pad:
                    ns = PADDED
                elif st == EQ:
                    ns = EQ if b == a else (LT if b < a else GT)
                else:
                    ns = st
                x2 = xs if b == pad else xs + (b,)
                if d2 == 0:
                    if ns == LT or ns == PADDED:
                        return (i, t + 1, x2, d0)
                    continue
                key = d2 * 4 + ns
                if key not in new:
                    new[key] = (i, x2, d0)
        tracks = new
    return None


def wd_reduce(wd: WordDifferenceMachine, word) -> Word:
    """Rewrite ``word`` with difference-track reductions until accepted."""
    w = list(word)
    while True:
        found = wd_find_reduction(wd, w)
        if found is None:
            return tuple(w)
        i, j, x, _ = found
        w[i:j] = x


# ---------------------------------------------------------------------------
# multipliers


def triple_product(W: Dfa, wd: WordDifferenceMachine, start_diffs=(0,),
                   cap: int | None = DEFAULT_STATE_CAP):
    """Reachable part of the triple automaton ``(s1, s2, g)``.

    ``W`` is extended by a padding state so the padded pairs of accepted
    words are read.  Returns ``(delta, triples, pstate)``; triple ``i`` is
    ``triples[i]`` and the states for ``start_diffs`` come first.
    """
    A = W.alphabet
    n1 = A.size + 1
    nsym = A.pair_size
    Wd, ps = pad_extend(W)
    table = wd.table
    index: dict = {}
    triples: list = []
    for d in start_diffs:
        key = (W.initial, W.initial, d)
        if key not in index:
            index[key] = len(triples)
            triples.append(key)
    delta = []
    i = 0
    while i < len(triples):
        s1, s2, d = triples[i]
        r1, r2, dr = Wd[s1], Wd[s2], table[d]
        row = [-1] * nsym
        for a1 in range(n1):
            t1 = r1[a1]
            if t1 < 0:
                continue
            base = a1 * n1
            for a2 in range(n1):
                sym = base + a2
                if sym >= nsym:
                    break
                t2 = r2[a2]
                if t2 < 0:
                    continue
                d2 = dr[sym]
                if d2 < 0:
                    continue
                key = (t1, t2, d2)
                j = index.get(key)
                if j is None:
                    j = index[key] = len(triples)
                    triples.append(key)
                    if cap is not None and len(triples) > cap:
                        raise BudgetExceeded(f"multiplier exceeded {cap} states")
                row[sym] = j
        delta.append(row)
        i += 1
    return delta, triples, ps


def build_multipliers(W: Dfa, wd: WordDifferenceMachine,
                      cap: int | None = DEFAULT_STATE_CAP):
    """Per-letter multipliers ``M_a`` and the labelled general multiplier.

    Returns ``(mults, general, general_labels)``: ``mults`` maps each
    generator index, and ``pad`` for ``M_$``, to a minimized pair automaton;
    ``general`` is the minimized automaton whose accepting states carry the
    tuple of letters they accept for.
    """
    A = W.alphabet
    delta, triples, ps = triple_product(W, wd, (0,), cap)
    fin = set(W.accepting)
    fin.add(ps)
    letters = list(range(A.size)) + [A.pad]
    hits: dict = {}
    memo: dict = {}
    for i, (s1, s2, d) in enumerate(triples):
        if s1 not in fin or s2 not in fin:
            continue
        lab = memo.get(d)
        if lab is None:
            lab = memo[d] = tuple(a for a in letters if wd.equals_letter(d, a))
        if lab:
            hits[i] = lab
    mults = {}
    for a in letters:
        acc = [i for i, lab in hits.items() if a in lab]
        mults[a] = minimize(Dfa(A, delta, 0, acc, pair=True))
    general, glabels = minimize_labelled(Dfa(A, delta, 0, (), pair=True), hits)
    return mults, general, glabels


def multiply(m: Dfa, u, max_extra: int | None = None):
    """The word ``v`` with ``(u, v)`` accepted by the pair automaton ``m``.

    Reads ``u`` once, keeping for each reachable state one back-pointer;
    afterwards pads ``u`` until an accepting state is met.  Returns None
    when there is no partner.
    """
    A = m.alphabet
    n1 = A.size + 1
    pad = A.pad
    delta = m.delta
    layers = [{m.initial: None}]
    for a in u:
        base = a * n1
        cur = layers[-1]
        new: dict = {}
        for s in cur:
            row = delta[s]
            for b in range(n1):
                t = row[base + b]
                if t >= 0 and t not in new:
                    new[t] = (s, b)
        if not new:
            return None
        layers.append(new)
    acc = m.accepting
    base = pad * n1
    limit = m.nstates if max_extra is None else max_extra
    for _ in range(limit + 1):
        cur = layers[-1]
        hit = [s for s in cur if s in acc]
        if hit:
            s = min(hit)
            out = []
            for layer in range(len(layers) - 1, 0, -1):
                s, b = layers[layer][s]
                if b != pad:
                    out.append(b)
            out.reverse()
            return tuple(out)
        new = {}
        for s in cur:
            row = delta[s]
            for b in range(A.size):
                t = row[base + b]
                if t >= 0 and t not in new:
                    new[t] = (s, b)
        if not new:
            return None
        layers.append(new)
    return None


# ---------------------------------------------------------------------------
# structures and checks


@dataclass
class AutLimits:
    kb: KBLimits = field(default_factory=KBLimits)
    iterations: int = 8
    max_diffs: int = DEFAULT_DIFF_CAP
    state_cap: int = DEFAULT_STATE_CAP
    compose_cap: int = DEFAULT_STATE_CAP


@dataclass
class Failure:
    family: str          # "diagonal", "totality" or "equation"
    detail: str
    witness: tuple       # words involved, as symbol tuples


@dataclass
class AxiomReport:
    passed: bool
    inconclusive: bool = False
    failures: list = field(default_factory=list)
    checked: int = 0

    def summary(self) -> str:
        if self.passed:
            return f"all {self.checked} checks passed"
        if self.inconclusive:
            return "inconclusive (state budget exceeded)"
        return f"{len(self.failures)} failing checks"


@dataclass
class AutomaticStructure:
    alphabet: Alphabet
    acceptor: Dfa
    multipliers: dict
    wd: WordDifferenceMachine
    rs: RewritingSystem
    general: Dfa | None = None
    general_labels: dict = field(default_factory=dict)
    verified: bool = False
    report: AxiomReport | None = None
    iterations: int = 0

    def multiplier(self, a: int) -> Dfa:
        return self.multipliers[a]

    def reduce(self, w) -> Word:
        return word_reduce_quadratic(w, self)

    def stats(self) -> dict:
        return {
            "wa_states": self.acceptor.nstates,
            "gm_states": self.general.nstates if self.general is not None else 0,
            "diffs": len(self.wd),
            "k": self.wd.k,
            "rules": len(self.rs),
            "verified": self.verified,
            "iterations": self.iterations,
        }


def split_pair_string(A: Alphabet, syms) -> tuple:
    """Decode a padded-pair symbol string into its two words."""
    pad = A.pad
    w, x = [], []
    for p in syms:
        a, b = A.unpair(p)
        if a != pad:
            w.append(a)
        if b != pad:
            x.append(b)
    return tuple(w), tuple(x)


def composite(mults: dict, word, identity, cap=DEFAULT_STATE_CAP, cache=None):
    """Pair automaton of ``{(w, x) : w·word = x}`` from letter multipliers."""
    if not word:
        return identity
    if cache is not None and tuple(word) in cache:
        return cache[tuple(word)]
    if len(word) == 1:
        m = mults[word[0]]
    else:
        m = compose(composite(mults, word[:-1], identity, cap, cache),
                    mults[word[-1]], cap)
    if cache is not None:
        cache[tuple(word)] = m
    return m


def axiom_check(s: AutomaticStructure, p: Presentation,
                cap: int | None = DEFAULT_STATE_CAP) -> AxiomReport:
    """Check the diagonal, totality and equation families.

    The equations are those of ``p`` together with ``a a^-1 = ε`` for each
    generator.  Exceeding the composition budget gives an inconclusive
    report rather than a failure.
    """
    A = s.alphabet
    W = s.acceptor
    mults = s.multipliers
    rep = AxiomReport(passed=False)
    ident = mults[A.pad]
    try:
        rep.checked += 1
        diag = diagonal(W)
        wit = difference_witness(ident, diag)
        if wit is not None:
            rep.failures.append(Failure("diagonal", "M_$ differs from the diagonal",
                                        split_pair_string(A, wit)))
        for a in range(A.size):
            rep.checked += 1
            proj = exists_project(mults[a], 1, cap)
            wit = difference_witness(W, proj)
            if wit is not None:
                rep.failures.append(Failure(
                    "totality", f"M_{A.names[a]} is not total on L(W)", (wit, (a,))))
        cache: dict = {}
        eqs = list(p.equations) + [((a, A.inv[a]), ()) for a in range(A.size)
                                   if a <= A.inv[a]]
        for u, v in eqs:
            rep.checked += 1
            mu = composite(mults, u, ident, cap, cache)
            mv = composite(mults, v, ident, cap, cache)
            wit = difference_witness(mu, mv)
            if wit is not None:
                w, x = split_pair_string(A, wit)
                rep.failures.append(Failure(
                    "equation",
                    f"{A.format_word(u)} = {A.format_word(v)} fails",
                    (w, x, tuple(u), tuple(v))))
    except BudgetExceeded:
        rep.inconclusive = True
        return rep
    rep.passed = not rep.failures
    return rep


def full_reduce(s_or_wd, rs, word) -> Word:
    """Alternate rewriting and difference-track reduction until stable."""
    wd = s_or_wd
    w = tuple(word)
    while True:
        w = rs.reduce(w)
        w2 = wd_reduce(wd, w)
        if w2 == w:
            return w
        w = w2


def _correct(wd: WordDifferenceMachine, rs: RewritingSystem, rep: AxiomReport) -> int:
    """Add the differences of true equations found from the failures."""
    before = len(wd)
    for f in rep.failures:
        if f.family == "totality":
            w, (a,) = f.witness
            x = full_reduce(wd, rs, tuple(w) + (a,))
            wd.add_alignment(w, x)
        elif f.family == "equation":
            w, x, u, v = f.witness
            ends = []
            for word in (u, v):
                y = w
                for c in word:
                    y2 = full_reduce(wd, rs, y + (c,))
                    wd.add_alignment(y, y2)
                    y = y2
                ends.append(y)
            ends.append(full_reduce(wd, rs, x))
            for e in ends:
                if e != x:
                    wd.add_alignment(e, x)
        elif f.family == "diagonal":
            w, x = f.witness
            wd.add_alignment(w, x)
    wd.close()
    return len(wd) - before


def build_structure(rs: RewritingSystem, wd: WordDifferenceMachine,
                    limits: AutLimits | None = None) -> AutomaticStructure:
    limits = limits or AutLimits()
    W = build_word_acceptor(wd, rs, limits.state_cap)
    mults, gen, glab = build_multipliers(W, wd, limits.state_cap)
    return AutomaticStructure(rs.alphabet, W, mults, wd, rs, gen, glab)


def autstructure(p: Presentation, limits: AutLimits | None = None) -> AutomaticStructure:
    """Compute and check a shortlex automatic structure for ``p``."""
    limits = limits or AutLimits()
    rs = knuth_bendix(p, limits.kb)
    wd = word_differences_from_rules(rs, limits.max_diffs)
    s = None
    for it in range(1, max(1, limits.iterations) + 1):
        s = build_structure(rs, wd, limits)
        s.iterations = it
        rep = axiom_check(s, p, limits.compose_cap)
        s.report = rep
        if rep.passed:
            s.verified = True
            break
        if rep.inconclusive:
            break
        if not _correct(wd, rs, rep):
            break
    return s


def word_reduce_quadratic(w, s: AutomaticStructure) -> Word:
    """The accepted word equal to ``w``, by multiplying one letter at a time."""
    u: Word = ()
    for a in w:
        v = multiply(s.multipliers[a], u)
        if v is None:
            raise StructureError(
                f"no partner for {s.alphabet.format_word(u)} under M_{s.alphabet.names[a]}")
        u = v
    return u
