"""Coset automatic systems for a group and a finitely generated subgroup.

A word ``h # w`` over the joint alphabet ``B ∪ {#} ∪ A`` stands for the
element ``h·w``, with ``h`` a word in the subgroup generators ``B``.  Knuth-Bendix
completion under a layered order (first the ``A``-part, then the marker,
then the ``B``-part) produces three kinds of rules: group rules over ``A``,
marker rules ``# w -> h # w'`` recording ``H w = H w'`` with ``w = h w'``,
and relations of the subgroup over ``B``.  The marker rules supply coset
word differences that start away from the identity; everything else follows
the group construction in :mod:`autogrp.autostructure`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .alphabet import Alphabet, Word, shortlex_key
from .autostructure import (DEFAULT_DIFF_CAP, AxiomReport, Failure, StructureError,
                            WordDifferenceMachine, acceptor_from_differences, composite,
                            multiply, split_pair_string, triple_product, wd_find_reduction)
from .fsa import (DEFAULT_STATE_CAP, BudgetExceeded, Dfa, Midfa, bool_op, compose,
                  determinize, diagonal, difference_witness, exists_project, is_empty,
                  minimize, minimize_midfa)
from .rewriting import Completion, KBLimits, Presentation, RewritingSystem

MARK = "%"


class SubgroupError(ValueError):
    pass


class SubgroupData:
    """Generators ``Y`` of a subgroup and the alphabet ``B = Y ∪ Y^-1``.

    ``names`` gives one ``(name, inverse_name)`` pair per generator; by
    default ``y1, Y1, y2, Y2, ...``.  Symbol ``2i`` of ``B`` is generator
    ``i`` and symbol ``2i+1`` its inverse.
    """

    def __init__(self, alphabet: Alphabet, generators, names=None):
        self.alphabet = alphabet
        gens = [tuple(alphabet.parse_word(g)) if isinstance(g, str) else tuple(g)
                for g in generators]
        for g in gens:
            if any(not 0 <= a < alphabet.size for a in g):
                raise SubgroupError("generator uses a symbol outside the alphabet")
        if names is None:
            names = [(f"y{i + 1}", f"Y{i + 1}") for i in range(len(gens))]
        if len(names) != len(gens):
            raise SubgroupError("one name pair per generator")
        flat = []
        inv = {}
        for n, m in names:
            flat.extend((n, m))
            inv[n] = m
        self.generators = gens
        self.names = [tuple(n) for n in names]
        self.B = Alphabet(flat, inv)
        defs = []
        for g in gens:
            defs.append(g)
            defs.append(alphabet.invert(g))
        self.defs = defs

    def __repr__(self):
        A = self.alphabet
        return "<SubgroupData " + ", ".join(A.format_word(g) for g in self.generators) + ">"

    def def_word(self, h) -> Word:
        """The word over ``A`` defined by the ``B``-word ``h``."""
        out: list = []
        for b in h:
            out.extend(self.defs[b])
        return tuple(out)

    def generator_symbols(self):
        return list(range(0, self.B.size, 2))


def layered_key(nB: int):
    """Order key: ``A``-part shortlex, then marker count, then ``B``-part shortlex."""

    def key(w):
        bp = tuple(x for x in w if x < nB)
        ap = tuple(x for x in w if x > nB)
        return (len(ap), ap, len(w) - len(bp) - len(ap), len(bp), bp)

    return key


def marker_normalizer(B: Alphabet):
    """Cancel subgroup words on the left of coset equations.

    ``h1 # w1 = h2 # w2`` with ``w1`` the shortlex-larger side becomes
    ``# w1 = h1^-1 h2 # w2``, so the left side of the resulting rule starts
    with the marker; when ``w1 = w2`` it becomes the subgroup relation
    ``h1 = h2``.
    """
    nB = B.size

    def normalize(u, v):
        if nB not in u or nB not in v:
            return u, v
        i, j = u.index(nB), v.index(nB)
        h1, w1 = u[:i], u[i:]
        h2, w2 = v[:j], v[j:]
        if w1 == w2:
            return h1, h2
        if shortlex_key(w1) < shortlex_key(w2):
            h1, w1, h2, w2 = h2, w2, h1, w1
        if not h1:
            return (w1, h2 + w2)
        return w1, B.invert(h1) + h2 + w2

    return normalize


class CosetRewriting:
    """A completed (possibly partial) system over ``B ∪ {#} ∪ A``."""

    def __init__(self, sub: SubgroupData, rs: RewritingSystem):
        self.sub = sub
        self.A = sub.alphabet
        self.B = sub.B
        self.rs = rs
        self.nB = sub.B.size
        self.mark = self.nB
        self.off = self.nB + 1
        self.confluent = rs.confluent
        self.info = rs.info
        nB, off = self.nB, self.off
        self.group_rules = []
        self.coset_rules = []
        self.sub_rules = []
        for l, r in rs.rules:
            if l[0] == self.mark:
                pos = r.index(self.mark)
                self.coset_rules.append((
                    tuple(a - off for a in l[1:]), tuple(r[:pos]),
                    tuple(a - off for a in r[pos + 1:])))
            elif l[0] < nB:
                self.sub_rules.append((l, r))
            else:
                self.group_rules.append((tuple(a - off for a in l),
                                         tuple(a - off for a in r)))

    def __len__(self):
        return len(self.rs)

    def joint(self, w) -> Word:
        off = self.off
        return tuple(a + off for a in w)

    def group_reduce(self, w) -> Word:
        off = self.off
        return tuple(a - off for a in self.rs.reduce(self.joint(w)))

    def coset_reduce(self, w):
        """``(h, x)`` with ``# w`` reducing to ``h # x``."""
        r = self.rs.reduce((self.mark,) + self.joint(w))
        pos = r.index(self.mark)
        off = self.off
        return tuple(r[:pos]), tuple(a - off for a in r[pos + 1:])

    def reduce_B(self, h) -> Word:
        return tuple(self.rs.reduce(tuple(h)))

    def format_rules(self):
        return self.rs.format_rules()


def coset_kb(p: Presentation, sub: SubgroupData, limits: KBLimits | None = None) -> CosetRewriting:
    """Layered Knuth-Bendix completion for the pair ``(G, H)``."""
    A, B = p.alphabet, sub.B
    if sub.alphabet != A:
        raise SubgroupError("subgroup is over a different alphabet")
    nB = B.size
    off = nB + 1
    inv = list(B.inv) + [nB] + [off + A.inv[a] for a in range(A.size)]
    J = Alphabet(B.names + (MARK,) + A.names, inv)
    comp = Completion(J, limits, order_key=layered_key(nB),
                      normalize=marker_normalizer(B))
    for a in range(A.size):
        comp.add_equation((a + off, A.inv[a] + off), ())
    for b in range(nB):
        comp.add_equation((b, B.inv[b]), ())
    for u, v in p.equations:
        comp.add_equation(tuple(a + off for a in u), tuple(a + off for a in v))
    for b in range(nB):
        comp.add_equation((nB,) + tuple(a + off for a in sub.defs[b]), (b, nB))
    confluent = comp.run()
    info = {"processed": comp.processed, "discarded": comp.discarded,
            "stopped": comp.stopped}
    rs = RewritingSystem(J, comp.rules(), confluent=confluent, complete_info=info)
    return CosetRewriting(sub, rs)


# ---------------------------------------------------------------------------
# coset systems


@dataclass
class CosetLimits:
    kb: KBLimits = field(default_factory=KBLimits)
    iterations: int = 8
    max_diffs: int = DEFAULT_DIFF_CAP
    state_cap: int = DEFAULT_STATE_CAP
    compose_cap: int = DEFAULT_STATE_CAP


@dataclass
class CosetSystem:
    alphabet: Alphabet
    sub: SubgroupData
    cr: CosetRewriting
    wd: WordDifferenceMachine
    h_labels: dict                  # difference index -> B-word, for differences in H
    acceptor: Dfa
    multipliers: dict               # letter (or pad) -> Midfa with B-word labels
    general: Midfa | None = None
    general_labels: dict = field(default_factory=dict)
    verified: bool = False
    strong: bool = False
    report: AxiomReport | None = None
    iterations: int = 0
    _det: dict = field(default_factory=dict, repr=False)

    @property
    def k(self) -> int:
        return self.wd.k

    def det(self, a) -> Dfa:
        """Union over initial states of ``M_a`` as a pair Dfa."""
        d = self._det.get(a)
        if d is None:
            d = self._det[a] = determinize(self.multipliers[a])
        return d

    def labelled(self, a) -> dict:
        """``label -> pair Dfa`` for the multiplier of ``a``."""
        return self.multipliers[a].by_label()

    def representative(self, w) -> Word:
        """Accepted representative of the coset ``H w``."""
        u: Word = ()
        for a in w:
            v = multiply(self.det(a), u)
            if v is None:
                raise StructureError(
                    f"no coset partner for {self.alphabet.format_word(u)} "
                    f"under M_{self.alphabet.names[a]}")
            u = v
        return u

    def decompose(self, w, start=()):
        """``(h, x)`` with ``start·w = h·x`` in G.

        ``h`` is a reduced B-word and ``x`` accepted; ``start`` must itself
        be an accepted representative.
        """
        h: list = []
        u: Word = tuple(start)
        for a in w:
            lab, v = multiply_labelled(self.multipliers[a], u)
            if v is None:
                raise StructureError("coset multiplier has no partner")
            h.extend(lab)
            u = v
        return self.cr.reduce_B(h), u

    def stats(self) -> dict:
        return {
            "coset_wa_states": self.acceptor.nstates,
            "coset_gm_states": self.general.nstates if self.general is not None else 0,
            "coset_multiplier_states": {self.alphabet.names[a] if a < self.alphabet.size
                                        else "_": m.nstates
                                        for a, m in self.multipliers.items()},
            "diffs": len(self.wd),
            "k": self.k,
            "rules": len(self.cr),
            "labels": len(set(self.h_labels.values())),
            "verified": self.verified,
            "strong": self.strong,
            "iterations": self.iterations,
        }


def multiply_labelled(m: Midfa, u):
    """Like :func:`multiply` for a labelled Midfa; returns ``(label, v)``."""
    A = m.alphabet
    n1 = A.size + 1
    pad = A.pad
    delta = m.delta
    first: dict = {}
    for s, lab in zip(m.initials, m.labels):
        first.setdefault(s, lab if lab is not None else ())
    layers = [{s: None for s in first}]
    for a in u:
        base = a * n1
        new: dict = {}
        for s in layers[-1]:
            row = delta[s]
            for b in range(n1):
                t = row[base + b]
                if t >= 0 and t not in new:
                    new[t] = (s, b)
        if not new:
            return None, None
        layers.append(new)
    acc = m.accepting
    base = pad * n1
    for _ in range(m.nstates + 1):
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
            return first[s], tuple(out)
        new = {}
        for s in cur:
            row = delta[s]
            for b in range(A.size):
                t = row[base + b]
                if t >= 0 and t not in new:
                    new[t] = (s, b)
        if not new:
            return None, None
        layers.append(new)
    return None, None


def coset_differences(cr: CosetRewriting, cap: int = DEFAULT_DIFF_CAP) -> WordDifferenceMachine:
    wd = WordDifferenceMachine(cr.A, cr.group_reduce, cap)
    for l, r in cr.group_rules:
        wd.add_alignment(l, r)
    for w, h, x in cr.coset_rules:
        wd.add_alignment(w, x, start=cr.sub.def_word(h))
    return wd.close()


def subgroup_labels(wd: WordDifferenceMachine, cr: CosetRewriting) -> dict:
    """Differences lying in H (by coset reduction), with their B-words."""
    out = {0: ()}
    for i, d in enumerate(wd.words):
        if i == 0:
            continue
        h, x = cr.coset_reduce(d)
        if not x:
            out[i] = cr.reduce_B(h)
    return out


def _build(cr: CosetRewriting, wd: WordDifferenceMachine, limits: CosetLimits) -> CosetSystem:
    A = cr.A
    hl = subgroup_labels(wd, cr)
    starts = [0] + sorted(i for i in hl if i != 0)
    W = acceptor_from_differences(wd, starts[1:], limits.state_cap)
    delta, triples, ps = triple_product(W, wd, starts, limits.state_cap)
    fin = set(W.accepting)
    fin.add(ps)
    letters = list(range(A.size)) + [A.pad]
    memo: dict = {}
    hits: dict = {}
    for i, (s1, s2, d) in enumerate(triples):
        if s1 in fin and s2 in fin:
            lab = memo.get(d)
            if lab is None:
                lab = memo[d] = tuple(a for a in letters if wd.equals_letter(d, a))
            if lab:
                hits[i] = lab
    labels = [hl[d] for d in starts]
    inits = list(range(len(starts)))
    mults = {}
    for a in letters:
        acc = [i for i, lab in hits.items() if a in lab]
        mults[a] = minimize_midfa(Midfa(A, delta, inits, acc, labels, pair=True,
                                        label_alphabet=cr.B))
    general, glab = minimize_midfa(Midfa(A, delta, inits, (), labels, pair=True,
                                         label_alphabet=cr.B), hits)
    return CosetSystem(A, cr.sub, cr, wd, hl, W, mults, general, glab)


def coset_full_reduce(cr: CosetRewriting, wd: WordDifferenceMachine, hl: dict, w):
    """``(h, x)`` with ``w = h x``, reducing by rules and difference tracks."""
    starts = [i for i in hl if i != 0]
    h, x = cr.coset_reduce(w)
    h = list(h)
    while True:
        found = wd_find_reduction(wd, x, starts)
        if found is None:
            return cr.reduce_B(h), x
        i, j, x2, d0 = found
        if d0:
            h.extend(hl[d0])
        h2, x = cr.coset_reduce(tuple(x[:i]) + tuple(x2) + tuple(x[j:]))
        h.extend(h2)


def coset_axiom_check(cs: CosetSystem, p: Presentation,
                      cap: int | None = DEFAULT_STATE_CAP) -> AxiomReport:
    """Group-style checks on the determinized coset multipliers.

    Besides the diagonal, totality and equation families (inverse relations
    included) each subgroup generator must map the trivial coset to itself.
    """
    A = cs.alphabet
    W = cs.acceptor
    rep = AxiomReport(passed=False)
    try:
        ident = cs.det(A.pad)
        rep.checked += 1
        wit = difference_witness(ident, diagonal(W))
        if wit is not None:
            rep.failures.append(Failure("diagonal", "M_$ differs from the diagonal",
                                        split_pair_string(A, wit)))
        dets = {a: cs.det(a) for a in range(A.size)}
        for a in range(A.size):
            rep.checked += 1
            wit = difference_witness(W, exists_project(dets[a], 1, cap))
            if wit is not None:
                rep.failures.append(Failure(
                    "totality", f"M_{A.names[a]} is not total on the coset acceptor",
                    (wit, (a,))))
        if rep.failures:
            return rep
        cache: dict = {}
        eqs = list(p.equations) + [((a, A.inv[a]), ()) for a in range(A.size)
                                   if a <= A.inv[a]]
        for u, v in eqs:
            rep.checked += 1
            mu = composite(dets, u, ident, cap, cache)
            mv = composite(dets, v, ident, cap, cache)
            wit = difference_witness(mu, mv)
            if wit is not None:
                w, x = split_pair_string(A, wit)
                rep.failures.append(Failure(
                    "equation", f"{A.format_word(u)} = {A.format_word(v)} fails",
                    (w, x, tuple(u), tuple(v))))
        for y in cs.sub.generators:
            rep.checked += 1
            x = cs.representative(y)
            if x:
                rep.failures.append(Failure(
                    "subgroup", f"generator {A.format_word(y)} moves the trivial coset",
                    ((), x, tuple(y), ())))
    except BudgetExceeded:
        rep.inconclusive = True
        return rep
    rep.passed = not rep.failures
    return rep


def _coset_correct(cs: CosetSystem, rep: AxiomReport) -> int:
    cr, wd, hl = cs.cr, cs.wd, cs.h_labels
    before = len(wd)
    sub = cs.sub

    def link(w, x_target=None):
        h, x = coset_full_reduce(cr, wd, hl, w)
        wd.add_alignment(w, x, start=sub.def_word(h))
        return x

    for f in rep.failures:
        if f.family == "totality":
            w, (a,) = f.witness
            h, x = coset_full_reduce(cr, wd, hl, tuple(w) + (a,))
            wd.add_alignment(w, x, start=sub.def_word(h))
        elif f.family in ("equation", "subgroup"):
            w, x, u, v = f.witness
            for word in (u, v):
                y = tuple(w)
                for c in word:
                    h, y2 = coset_full_reduce(cr, wd, hl, y + (c,))
                    wd.add_alignment(y, y2, start=sub.def_word(h))
                    y = y2
                link(y)
            link(tuple(x))
        elif f.family == "diagonal":
            w, x = f.witness
            link(tuple(w))
            link(tuple(x))
    wd.close()
    return len(wd) - before


def build_coset_system(p: Presentation, sub: SubgroupData,
                       limits: CosetLimits | None = None, cr: CosetRewriting | None = None
                       ) -> CosetSystem:
    """Coset word acceptor and labelled multipliers, checked and corrected."""
    limits = limits or CosetLimits()
    if cr is None:
        cr = coset_kb(p, sub, limits.kb)
    wd = coset_differences(cr, limits.max_diffs)
    cs = None
    for it in range(1, max(1, limits.iterations) + 1):
        cs = _build(cr, wd, limits)
        cs.iterations = it
        rep = coset_axiom_check(cs, p, limits.compose_cap)
        cs.report = rep
        if rep.passed:
            cs.verified = True
            cs.strong = True
            break
        if rep.inconclusive or not _coset_correct(cs, rep):
            break
    return cs


# ---------------------------------------------------------------------------
# queries


def generalized_word_problem(w, cs: CosetSystem) -> bool:
    """Whether ``w`` represents an element of the subgroup."""
    return cs.representative(w) == ()


def subgroup_word_acceptor(s, cs: CosetSystem, bound: int | None = None,
                           max_bound: int = 12, cap: int | None = DEFAULT_STATE_CAP) -> Dfa:
    """Acceptor of ``L(W) ∩ H`` for a group structure ``s``.

    States pair a state of ``W`` with the coset representative of the prefix
    read; prefixes whose representative is longer than ``bound`` are cut.
    When ``bound`` is None it is raised from 0 until the minimized result
    stops changing (at most ``max_bound``); this terminates when ``H`` is
    quasiconvex for ``L(W)`` and is a heuristic otherwise.
    """
    if bound is not None:
        return _bounded_subgroup_acceptor(s, cs, bound, cap)
    prev = None
    for r in range(max_bound + 1):
        cur = _bounded_subgroup_acceptor(s, cs, r, cap)
        if prev is not None and cur == prev:
            return cur
        prev = cur
    return prev


def _bounded_subgroup_acceptor(s, cs, bound, cap):
    W = s.acceptor
    A = W.alphabet
    dets = {a: cs.det(a) for a in range(A.size)}
    start = (W.initial, ())
    index = {start: 0}
    states = [start]
    delta = []
    acc = set()
    i = 0
    while i < len(states):
        q, x = states[i]
        if q in W.accepting and not x:
            acc.add(i)
        row = [-1] * A.size
        for a in range(A.size):
            t = W.delta[q][a]
            if t < 0:
                continue
            y = multiply(dets[a], x)
            if y is None or len(y) > bound:
                continue
            key = (t, y)
            j = index.get(key)
            if j is None:
                j = index[key] = len(states)
                states.append(key)
                if cap is not None and len(states) > cap:
                    raise BudgetExceeded("subgroup acceptor exceeded the state budget")
            row[a] = j
        delta.append(row)
        i += 1
    return minimize(Dfa(A, delta, 0, acc))


def compose_labelled(L1: dict, L2: dict, reduce_label, cap=DEFAULT_STATE_CAP) -> dict:
    """Compose ``label -> pair Dfa`` maps, multiplying labels."""
    out: dict = {}
    for l1 in sorted(L1, key=lambda w: (len(w), w)):
        for l2 in sorted(L2, key=lambda w: (len(w), w)):
            c = compose(L1[l1], L2[l2], cap)
            if is_empty(c):
                continue
            lab = tuple(reduce_label(tuple(l1) + tuple(l2)))
            out[lab] = c if lab not in out else bool_op("or", out[lab], c)
    return out


def labelled_composite(cs: CosetSystem, word, cap=DEFAULT_STATE_CAP) -> dict:
    """Labelled multiplier for a word, composed from the letter multipliers."""
    A = cs.alphabet
    L = {tuple(k or ()): v for k, v in cs.labelled(A.pad).items()}
    for a in word:
        La = {tuple(k or ()): v for k, v in cs.labelled(a).items()}
        L = compose_labelled(L, La, cs.cr.reduce_B, cap)
    return L


@dataclass
class EfficiencyResult:
    efficient: bool
    labels: dict            # B symbol -> sorted list of labels found
    witness: tuple | None = None   # (b, label) outside {ε} ∪ B
    composites: dict = field(default_factory=dict, repr=False)  # b -> labelled composite

    def __bool__(self):
        return self.efficient


def efficiency_check(cs: CosetSystem, sub: SubgroupData | None = None,
                     cap: int | None = DEFAULT_STATE_CAP) -> EfficiencyResult:
    """Whether all labels of the multipliers for ``B`` lie in ``{ε} ∪ B``."""
    sub = sub or cs.sub
    labels = {}
    comps = {}
    witness = None
    for b in range(sub.B.size):
        L = comps[b] = labelled_composite(cs, sub.defs[b], cap)
        labs = sorted(L, key=lambda w: (len(w), w))
        labels[b] = labs
        for lab in labs:
            if len(lab) > 1 and witness is None:
                witness = (b, lab)
    return EfficiencyResult(witness is None, labels, witness, comps)


@dataclass
class ProbeResult:
    verdict: str                     # "bounded" or "growing"
    bound: int                       # largest prefix distance observed
    profile: list                    # max prefix distance for words of each length
    witnesses: list = field(default_factory=list)

    @property
    def growing(self) -> bool:
        return self.verdict == "growing"


def quasiconvexity_probe(s, cs: CosetSystem, sub: SubgroupData | None = None,
                         depth: int = 8, family=None, family_range: int = 4) -> ProbeResult:
    """Probe whether prefixes of words in ``L(W) ∩ H`` stay near ``H``.

    The length of the coset representative of a prefix is its distance to
    ``H``.  All words of ``L(W)`` up to ``depth`` are searched, cutting a
    prefix once its distance exceeds the letters left.  With ``family =
    (p, q)`` the words ``p^n q^n`` for ``n <= family_range`` are examined as
    well: each must be accepted and lie in ``H``, and the representatives of
    ``p^n`` are reported.  The verdict is "growing" when the largest
    distance keeps increasing, which is evidence, not proof.
    """
    W = s.acceptor
    A = W.alphabet
    dets = {a: cs.det(a) for a in range(A.size)}
    best = [0] * (depth + 1)
    witnesses = []
    stack = [(W.initial, (), (), 0)]
    while stack:
        q, word, x, far = stack.pop()
        n = len(word)
        if not x and q in W.accepting and far > best[n]:
            best[n] = far
            witnesses.append((word, far))
        if n == depth:
            continue
        for a in range(A.size - 1, -1, -1):
            t = W.delta[q][a]
            if t < 0:
                continue
            y = multiply(dets[a], x)
            if y is None or len(y) > depth - n - 1:
                continue
            stack.append((t, word + (a,), y, max(far, len(y))))
    profile = []
    m = 0
    for n in range(depth + 1):
        m = max(m, best[n])
        profile.append(m)
    growing = depth > 0 and profile[-1] > profile[depth // 2]
    result = ProbeResult("growing" if growing else "bounded", profile[-1], profile,
                         sorted(witnesses, key=lambda t: (len(t[0]), t[0])))
    if family is not None:
        p_w, q_w = (tuple(A.parse_word(f)) if isinstance(f, str) else tuple(f)
                    for f in family)
        fam = []
        for n in range(family_range + 1):
            w = p_w * n + q_w * n
            rep_p = cs.representative(p_w * n)
            fam.append({"n": n, "word": w, "in_L": W.accepts(w),
                        "in_H": generalized_word_problem(w, cs),
                        "prefix_rep": rep_p})
        lens = [len(f["prefix_rep"]) for f in fam]
        if all(f["in_L"] and f["in_H"] for f in fam) and \
                all(lens[i] < lens[i + 1] for i in range(len(lens) - 1)):
            result.verdict = "growing"
            result.bound = max(result.bound, lens[-1])
        result.witnesses = fam
    return result
