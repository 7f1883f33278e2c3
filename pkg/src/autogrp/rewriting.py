"""Shortlex string rewriting for groups, Knuth-Bendix completion, Tietze moves."""

from __future__ import annotations

import heapq
import logging
from array import array
from dataclasses import dataclass, field
from typing import Sequence

from . import _kernels
from .alphabet import Alphabet, Word, shortlex_key

log = logging.getLogger(__name__)

TIDY_INTERVAL = 256


class PresentationError(ValueError):
    pass


@dataclass
class Presentation:
    """Generators (with inverses) and equations ``u = v``.

    The inverse relations ``a a^-1 = 1`` are implicit.
    """

    alphabet: Alphabet
    equations: list = field(default_factory=list)

    def __post_init__(self):
        n = self.alphabet.size
        eqs = []
        for u, v in self.equations:
            u, v = tuple(u), tuple(v)
            if any(not 0 <= a < n for a in u + v):
                raise PresentationError("equation uses a symbol outside the alphabet")
            eqs.append((u, v))
        self.equations = eqs

    def relators(self) -> list:
        A = self.alphabet
        return [A.free_reduce(u + A.invert(v)) for u, v in self.equations]

    def inverse_equations(self) -> list:
        """The implicit equations ``a a^-1 = 1``, one per symbol."""
        return [((a, self.alphabet.inv[a]), ()) for a in range(self.alphabet.size)]

    def format(self) -> str:
        A = self.alphabet
        eqs = ", ".join(f"{A.format_word(u)}={A.format_word(v)}" for u, v in self.equations)
        return f"<{','.join(A.names)} | {eqs}>"


def canonical_relator(A: Alphabet, r: Sequence[int]) -> Word:
    """Least rotation of the cyclic reduction of ``r`` or of its inverse."""
    w = list(A.free_reduce(r))
    while len(w) >= 2 and w[0] == A.inv[w[-1]]:
        w = w[1:-1]
    best = None
    for cand in (tuple(w), A.invert(w)):
        for i in range(max(len(cand), 1)):
            rot = cand[i:] + cand[:i]
            if best is None or rot < best:
                best = rot
    return best or ()


def relator_set(p: Presentation) -> set:
    """The relators of ``p`` up to cyclic permutation and inversion."""
    return {canonical_relator(p.alphabet, r) for r in p.relators()} - {()}


# ---------------------------------------------------------------------------
# index automaton


class IndexAutomaton:
    """Aho-Corasick automaton over the left sides of a rule list."""

    __slots__ = ("nsym", "goto", "match", "lhs_len", "rhs_rev", "emit", "nstates",
                 "rule_ids")

    def __init__(self, nsym: int, rules: Sequence, emits: Sequence | None = None,
                 rule_ids: Sequence | None = None):
        for lhs, rhs in rules:
            if not lhs:
                raise ValueError("empty left side")
        goto, match = _kernels.build_index(nsym, [l for l, _ in rules])
        N = len(match)
        self.nsym = nsym
        self.nstates = N
        self.goto = goto if isinstance(goto, array) else array("i", goto)
        self.match = match if isinstance(match, array) else array("i", match)
        self.lhs_len = array("i", [len(l) for l, _ in rules])
        self.rhs_rev = [tuple(reversed(r)) for _, r in rules]
        if emits is None:
            self.emit = array("b", bytes(len(rules)))
        else:
            self.emit = array("b", [1 if e else 0 for e in emits])
        self.rule_ids = list(rule_ids) if rule_ids is not None else list(range(len(rules)))

    def reduce(self, word, fired=None) -> list:
        if fired is None:
            fired = []
        return _kernels.reduce_word(word, self.goto, self.nsym, self.match,
                                    self.lhs_len, self.rhs_rev, self.emit, fired)

    def first_match(self, word) -> int:
        return _kernels.scan_match(word, self.goto, self.nsym, self.match)


# ---------------------------------------------------------------------------
# rewriting systems


class RewritingSystem:
    """Rules ``lhs -> rhs`` that strictly decrease a reduction order.

    ``emits`` optionally attaches to each rule a word in an auxiliary
    alphabet that is output whenever the rule is applied; the coset systems
    use this to collect subgroup elements.
    """

    def __init__(self, alphabet: Alphabet, rules, confluent: bool = False,
                 emits=None, complete_info: dict | None = None):
        self.alphabet = alphabet
        self.rules = [(tuple(l), tuple(r)) for l, r in rules]
        self.confluent = confluent
        self.emits = None if emits is None else [tuple(e) if e is not None else None
                                                 for e in emits]
        self.info = dict(complete_info or {})
        self._index = None

    def __len__(self):
        return len(self.rules)

    def __repr__(self):
        return f"<RewritingSystem {len(self.rules)} rules, confluent={self.confluent}>"

    @property
    def index(self) -> IndexAutomaton:
        if self._index is None:
            self._index = IndexAutomaton(self.alphabet.size, self.rules, self.emits)
        return self._index

    def reduce(self, w: Sequence[int]) -> Word:
        return tuple(self.index.reduce(w))

    def reduce_collect(self, w: Sequence[int]):
        """Reduce ``w`` and return ``(word, emitted)``, the emitted words in order."""
        fired: list = []
        out = self.index.reduce(w, fired)
        em = []
        for r in fired:
            e = self.emits[r]
            if e:
                em.extend(e)
        return tuple(out), tuple(em)

    def is_reduced(self, w: Sequence[int]) -> bool:
        return self.index.first_match(w) < 0

    def format_rules(self) -> list:
        A = self.alphabet
        return [f"{A.format_word(l)} -> {A.format_word(r)}" for l, r in self.rules]


def inverse_rules(A: Alphabet) -> list:
    return [((a, A.inv[a]), ()) for a in range(A.size)]


# ---------------------------------------------------------------------------
# Knuth-Bendix completion


@dataclass
class KBLimits:
    max_rules: int = 32768
    max_lhs_len: int = 64
    max_iterations: int | None = None


class _Trie:
    """Plain trie of recently added left sides (no failure links).

    Stored as a flat child table so the scan can run in the kernel.
    """

    __slots__ = ("nsym", "goto", "term", "count")

    def __init__(self, nsym):
        self.nsym = nsym
        self.goto = array("i", [-1] * nsym)
        self.term = array("i", [-1])
        self.count = 0

    def add(self, lhs, rid):
        nsym = self.nsym
        goto = self.goto
        node = 0
        for a in lhs:
            t = goto[node * nsym + a]
            if t < 0:
                t = len(self.term)
                goto[node * nsym + a] = t
                goto.extend([-1] * nsym)
                self.term.append(-1)
            node = t
        self.term[node] = rid
        self.count += 1

    def find(self, w):
        """``(start, end, rule)`` of the leftmost-ending match, or None."""
        return _kernels.trie_scan(w, self.goto, self.nsym, self.term)


class Completion:
    """State of a Knuth-Bendix run over a shortlex order.

    Left-to-right index automaton for the rules current at the last
    interreduction, plus a trie for the rules added since.  The caller may
    supply an ``order_key`` replacing shortlex, and a ``normalize`` function
    rewriting each reduced equation ``(u, v)`` into an equivalent one before
    it is oriented.
    """

    def __init__(self, alphabet: Alphabet, limits: KBLimits | None = None,
                 order_key=shortlex_key, normalize=None):
        self.alphabet = alphabet
        self.nsym = alphabet.size
        self.limits = limits or KBLimits()
        self.key = order_key
        self.normalize = normalize
        self.lhs: list = []
        self.rhs: list = []
        self.alive: list = []
        self.by_lhs: dict = {}
        self.heap: list = []
        self.main = IndexAutomaton(self.nsym, [])
        self.main_ids: list = []
        self.recent = _Trie(self.nsym)
        self.since_tidy = 0
        self.discarded = 0
        self.prefix_idx: dict = {}
        self.suffix_idx: dict = {}
        self.processed = 0
        self.stopped = None

    # -- reduction ------------------------------------------------------
    def reduce(self, w) -> Word:
        w = self.main.reduce(w)
        while self.recent.count:
            hit = self.recent.find(w)
            if hit is None:
                break
            i, j, rid = hit
            w = self.main.reduce(w[:i] + list(self.rhs[rid]) + w[j:])
        return tuple(w)

    @property
    def nrules(self) -> int:
        return len(self.by_lhs)

    # -- rules -----------------------------------------------------------
    def add_equation(self, u, v) -> bool:
        u = self.reduce(u)
        v = self.reduce(v)
        if self.normalize is not None:
            while u != v:
                u2, v2 = self.normalize(u, v)
                if (u2, v2) == (u, v):
                    break
                u, v = self.reduce(u2), self.reduce(v2)
        if u == v:
            return False
        if self.key(u) < self.key(v):
            u, v = v, u
        if len(u) > self.limits.max_lhs_len:
            self.discarded += 1
            return False
        rid = len(self.lhs)
        self.lhs.append(u)
        self.rhs.append(v)
        self.alive.append(True)
        self.by_lhs[u] = rid
        heapq.heappush(self.heap, (len(u), self.key(u), rid))
        self.recent.add(u, rid)
        self.since_tidy += 1
        return True

    def rules(self):
        return [(self.lhs[i], self.rhs[i]) for i in sorted(self.by_lhs.values())
                if self.alive[i]]

    def tidy(self, full: bool = False):
        """Interreduce: drop rules whose left side contains another left side,
        reduce right sides, and rebuild the index.  Dropped rules are re-added
        as equations.  With ``full`` repeat until nothing changes."""
        while True:
            ids = sorted(i for i in self.by_lhs.values() if self.alive[i])
            idx = IndexAutomaton(self.nsym, [(self.lhs[i], self.rhs[i]) for i in ids])
            redo = []
            for i in ids:
                l = self.lhs[i]
                if len(l) > 1 and (idx.first_match(l[:-1]) >= 0 or
                                   idx.first_match(l[1:]) >= 0):
                    redo.append(i)
            if redo:
                for i in redo:
                    self.alive[i] = False
                    del self.by_lhs[self.lhs[i]]
                keep = [i for i in ids if self.alive[i]]
                idx = IndexAutomaton(self.nsym, [(self.lhs[i], self.rhs[i]) for i in keep])
            else:
                keep = ids
            for pos, i in enumerate(keep):
                r = self.rhs[i]
                if r and idx.first_match(r) >= 0:
                    nr = tuple(idx.reduce(r))
                    self.rhs[i] = nr
                    idx.rhs_rev[pos] = tuple(reversed(nr))
            self.main = idx
            self.main_ids = keep
            self.recent = _Trie(self.nsym)
            self.since_tidy = 0
            for i in redo:
                self.add_equation(self.lhs[i], self.rhs[i])
            if not full or not self.recent.count:
                return

    # -- overlaps --------------------------------------------------------
    def _critical(self, r1, r2, k):
        l1, l2 = self.lhs[r1], self.lhs[r2]
        left = self.rhs[r1] + l2[k:]
        right = l1[:-k] + self.rhs[r2]
        self.add_equation(left, right)

    def _process(self, r):
        l = self.lhs[r]
        n = len(l)
        alive = self.alive
        for k in range(1, n):
            suf = l[-k:]
            for r2 in self.prefix_idx.get(suf, ()):
                if alive[r2] and alive[r]:
                    self._critical(r, r2, k)
            pre = l[:k]
            for r1 in self.suffix_idx.get(pre, ()):
                if alive[r1] and alive[r]:
                    self._critical(r1, r, k)
            if l[-k:] == l[:k] and alive[r]:
                self._critical(r, r, k)
        if not alive[r]:
            return
        for k in range(1, n):
            self.prefix_idx.setdefault(l[:k], []).append(r)
            self.suffix_idx.setdefault(l[-k:], []).append(r)

    def run(self) -> bool:
        """Complete as far as the limits allow; True iff confluent."""
        lim = self.limits
        self.tidy()
        while True:
            while self.heap:
                if self.nrules > lim.max_rules:
                    self.stopped = "max_rules"
                    break
                if lim.max_iterations is not None and self.processed >= lim.max_iterations:
                    self.stopped = "max_iterations"
                    break
                _, _, r = heapq.heappop(self.heap)
                if not self.alive[r]:
                    continue
                self._process(r)
                self.processed += 1
                if self.since_tidy >= TIDY_INTERVAL:
                    self.tidy()
            self.tidy(full=True)
            if self.stopped is not None:
                break
            self.heap = [e for e in self.heap if self.alive[e[2]]]
            heapq.heapify(self.heap)
            if not self.heap:
                break
        return not self.heap and not self.discarded and self.stopped is None


def knuth_bendix(p: Presentation, limits: KBLimits | None = None) -> RewritingSystem:
    """Shortlex Knuth-Bendix completion of a group presentation.

    Returns the interreduced system.  If the limits stop the run before all
    critical pairs resolve, the partial system is returned with
    ``confluent=False``.
    """
    comp = Completion(p.alphabet, limits)
    for u, v in inverse_rules(p.alphabet):
        comp.add_equation(u, v)
    for u, v in p.equations:
        comp.add_equation(u, v)
    confluent = comp.run()
    info = {"processed": comp.processed, "discarded": comp.discarded,
            "stopped": comp.stopped}
    log.info("knuth_bendix: %d rules, confluent=%s, %s", comp.nrules, confluent, info)
    return RewritingSystem(p.alphabet, comp.rules(), confluent=confluent,
                           complete_info=info)


def critical_pairs_resolve(rs: RewritingSystem) -> list:
    """Critical pairs of ``rs`` that do not reduce to a common word.

    Checks every overlap directly; used to certify confluence.
    """
    bad = []
    rules = rs.rules
    for i, (l1, r1) in enumerate(rules):
        for j, (l2, r2) in enumerate(rules):
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    a = rs.reduce(r1 + l2[k:])
                    b = rs.reduce(l1[:-k] + r2)
                    if a != b:
                        bad.append((i, j, k))
            if i != j and len(l2) < len(l1):
                for s in range(len(l1) - len(l2) + 1):
                    if l1[s:s + len(l2)] == l2:
                        if rs.reduce(r1) != rs.reduce(l1[:s] + r2 + l1[s + len(l2):]):
                            bad.append((i, j, -s - 1))
    return bad


# ---------------------------------------------------------------------------
# Tietze transformations


def _cancel_common(u: Word, v: Word):
    i = 0
    while i < len(u) and i < len(v) and u[i] == v[i]:
        i += 1
    u, v = u[i:], v[i:]
    j = 0
    while j < len(u) and j < len(v) and u[-1 - j] == v[-1 - j]:
        j += 1
    if j:
        u, v = u[:-j], v[:-j]
    return u, v


def normalize_equation(A: Alphabet, u, v):
    """Free reduce both sides and cancel a common prefix and suffix."""
    return _cancel_common(A.free_reduce(u), A.free_reduce(v))


def tietze_eliminate(p: Presentation, gen: str, defining: int) -> Presentation:
    """Remove generator ``gen`` using equation number ``defining``.

    The equation must contain ``gen`` (or its inverse) exactly once; it is
    solved for ``gen`` and the solution substituted everywhere else.
    """
    A = p.alphabet
    g = A.index(gen)
    G = A.inv[g]
    if g == G:
        raise PresentationError("cannot eliminate a self-inverse generator")
    u, v = p.equations[defining]
    r = A.free_reduce(u + A.invert(v))
    pos = [i for i, a in enumerate(r) if a in (g, G)]
    if len(pos) != 1:
        raise PresentationError(
            f"equation {defining} does not isolate {gen} (it occurs {len(pos)} times)")
    i = pos[0]
    pre, post = r[:i], r[i + 1:]
    if r[i] == g:
        value = A.free_reduce(A.invert(pre) + A.invert(post))
    else:
        value = A.free_reduce(post + pre)
    ivalue = A.invert(value)
    keep = [a for a in range(A.size) if a not in (g, G)]
    names = [A.names[a] for a in keep]
    remap = {a: k for k, a in enumerate(keep)}
    inv = {A.names[a]: A.names[A.inv[a]] for a in keep}
    B = Alphabet(names, inv)

    def subst(w):
        out = []
        for a in w:
            if a == g:
                out.extend(value)
            elif a == G:
                out.extend(ivalue)
            else:
                out.append(a)
        return tuple(remap[a] for a in A.free_reduce(out))

    eqs = []
    for k, (x, y) in enumerate(p.equations):
        if k == defining:
            continue
        x, y = normalize_equation(B, subst(x), subst(y))
        if x != y:
            eqs.append((x, y))
    return Presentation(B, eqs)


def tietze_add_generator(p: Presentation, name: str, inverse: str, word,
                         position: int | None = None) -> Presentation:
    """Add generator ``name = word`` (with inverse ``inverse``)."""
    A = p.alphabet
    if isinstance(word, str):
        word = A.parse_word(word)
    names = list(A.names)
    inv = {A.names[a]: A.names[A.inv[a]] for a in range(A.size)}
    pos = len(names) if position is None else position
    names[pos:pos] = [name] if name == inverse else [name, inverse]
    inv[name] = inverse
    inv[inverse] = name
    B = Alphabet(names, inv)
    m = {a: B.index(A.names[a]) for a in range(A.size)}
    eqs = [(tuple(m[a] for a in u), tuple(m[a] for a in v)) for u, v in p.equations]
    eqs.append(((B.index(name),), tuple(m[a] for a in word)))
    return Presentation(B, eqs)


def tietze_substitute(p: Presentation, using: int, target: int,
                      reverse: bool = False) -> Presentation:
    """Rewrite equation ``target`` by replacing each occurrence of the right
    side of equation ``using`` with its left side (or the other way round if
    ``reverse``)."""
    A = p.alphabet
    u, v = p.equations[using]
    old, new = (u, v) if reverse else (v, u)
    if not old:
        raise PresentationError("cannot substitute for the empty word")

    def repl(w):
        out = []
        i = 0
        while i < len(w):
            if w[i:i + len(old)] == old:
                out.extend(new)
                i += len(old)
            else:
                out.append(w[i])
                i += 1
        return tuple(out)

    eqs = list(p.equations)
    x, y = eqs[target]
    eqs[target] = normalize_equation(A, repl(x), repl(y))
    return Presentation(A, eqs)


def reorder_generators(p: Presentation, order: Sequence[str]) -> Presentation:
    """Same presentation with the alphabet in the given order."""
    A = p.alphabet
    if sorted(order) != sorted(A.names):
        raise PresentationError("order must be a permutation of the generators")
    inv = {A.names[a]: A.names[A.inv[a]] for a in range(A.size)}
    B = Alphabet(order, inv)
    m = [B.index(A.names[a]) for a in range(A.size)]
    return Presentation(B, [(tuple(m[a] for a in u), tuple(m[a] for a in v))
                            for u, v in p.equations])


def drop_generator(p: Presentation, gen: str) -> Presentation:
    """Delete a generator together with every equation that mentions it."""
    A = p.alphabet
    g = A.index(gen)
    G = A.inv[g]
    keep = [a for a in range(A.size) if a not in (g, G)]
    remap = {a: k for k, a in enumerate(keep)}
    B = Alphabet([A.names[a] for a in keep],
                 {A.names[a]: A.names[A.inv[a]] for a in keep})
    eqs = []
    for u, v in p.equations:
        if g in u + v or G in u + v:
            continue
        eqs.append((tuple(remap[a] for a in u), tuple(remap[a] for a in v)))
    return Presentation(B, eqs)


def balance_equation(p: Presentation, index: int) -> Presentation:
    """Rewrite equation ``index`` as ``x = y`` with ``x y^-1`` its relator split
    in the middle (the left half gets the extra letter for odd lengths)."""
    A = p.alphabet
    u, v = p.equations[index]
    r = A.free_reduce(tuple(u) + A.invert(v))
    h = (len(r) + 1) // 2
    eqs = list(p.equations)
    eqs[index] = (r[:h], A.invert(r[h:]))
    return Presentation(A, eqs)
