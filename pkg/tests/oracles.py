"""Independent reference implementations used by the tests.

Nothing here imports the package's algorithms; words are tuples of ints and
alphabets are given by an inverse table.
"""

import itertools
from collections import deque


def free_reduce(w, inv):
    out = []
    for a in w:
        if out and out[-1] == inv[a]:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def all_words(nsym, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(range(nsym), repeat=n)


def shortlex_sorted(words):
    return sorted(words, key=lambda w: (len(w), w))


# ---------------------------------------------------------------------------
# automata


def moore_minimal_size(delta, initial, accepting, nsym):
    """State count of the minimal trim DFA, by Moore refinement."""
    reach = {initial}
    todo = [initial]
    while todo:
        s = todo.pop()
        for a in range(nsym):
            t = delta[s][a]
            if t >= 0 and t not in reach:
                reach.add(t)
                todo.append(t)
    # drop states that cannot reach acceptance
    live = {s for s in reach if s in accepting}
    changed = True
    while changed:
        changed = False
        for s in reach:
            if s not in live and any(delta[s][a] in live for a in range(nsym)):
                live.add(s)
                changed = True
    if not live:
        return 1
    cls = {s: (s in accepting) for s in live}
    while True:
        sig = {s: (cls[s],) + tuple(cls.get(delta[s][a], None) for a in range(nsym))
               for s in live}
        names = {}
        new = {s: names.setdefault(sig[s], len(names)) for s in live}
        if len(set(new.values())) == len(set(cls.values())):
            return len(names)
        cls = new


def dfa_words(delta, initial, accepting, max_len):
    out = []
    nsym = len(delta[0]) if delta else 0
    for w in all_words(nsym, max_len):
        s = initial
        for a in w:
            s = delta[s][a] if s >= 0 else -1
        if s >= 0 and s in accepting:
            out.append(w)
    return out


# ---------------------------------------------------------------------------
# finite groups as permutation groups


def perm_mul(p, q):
    """Apply p then q."""
    return tuple(q[i] for i in p)


def permutation_group(gens):
    """All elements of the group generated by ``gens`` (tuples)."""
    n = len(gens[0])
    e = tuple(range(n))
    seen = {e}
    todo = deque([e])
    while todo:
        g = todo.popleft()
        for s in gens:
            h = perm_mul(g, s)
            if h not in seen:
                seen.add(h)
                todo.append(h)
    return seen


def evaluate(w, images):
    n = len(images[0])
    g = tuple(range(n))
    for a in w:
        g = perm_mul(g, images[a])
    return g


# ---------------------------------------------------------------------------
# string rewriting


def rewrite_to_exhaustion(w, rules):
    """Apply the leftmost applicable rule until none applies."""
    w = tuple(w)
    while True:
        for i in range(len(w)):
            for l, r in rules:
                if w[i:i + len(l)] == l:
                    w = w[:i] + r + w[i + len(l):]
                    break
            else:
                continue
            break
        else:
            return w


def critical_pairs(rules):
    """All overlap and inclusion critical pairs, as pairs of words."""
    out = []
    for l1, r1 in rules:
        for l2, r2 in rules:
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    out.append((r1 + l2[k:], l1[:-k] + r2))
            if (l1, r1) != (l2, r2):
                for i in range(len(l1) - len(l2) + 1):
                    if l1[i:i + len(l2)] == l2:
                        out.append((r1, l1[:i] + r2 + l1[i + len(l2):]))
    return out


def naive_completion(equations, nsym, max_rounds=20):
    """Textbook shortlex completion for tiny presentations."""
    key = lambda w: (len(w), w)
    rules = []

    def orient(u, v):
        u, v = rewrite_to_exhaustion(u, rules), rewrite_to_exhaustion(v, rules)
        if u == v:
            return None
        return (u, v) if key(u) > key(v) else (v, u)

    pending = list(equations)
    for _ in range(max_rounds):
        while pending:
            r = orient(*pending.pop(0))
            if r is not None:
                rules.append(r)
        # interreduce
        changed = True
        while changed:
            changed = False
            for i, (l, r) in enumerate(rules):
                others = rules[:i] + rules[i + 1:]
                l2 = rewrite_to_exhaustion(l, others)
                if l2 != l:
                    rules = others
                    pending.append((l2, r))
                    changed = True
                    break
                r2 = rewrite_to_exhaustion(r, rules)
                if r2 != r:
                    rules[i] = (l, r2)
        while pending:
            r = orient(*pending.pop(0))
            if r is not None:
                rules.append(r)
        new = [(u, v) for u, v in critical_pairs(rules)
               if rewrite_to_exhaustion(u, rules) != rewrite_to_exhaustion(v, rules)]
        if not new:
            return sorted(rules, key=lambda lr: (key(lr[0]), lr[1]))
        pending.extend(new)
    raise RuntimeError("no completion in the round budget")


# ---------------------------------------------------------------------------
# subgroups of free groups


class StallingsGraph:
    """Folded graph of a subgroup of a free group; membership by reading."""

    def __init__(self, gens, inv):
        self.inv = inv
        self.out = [{}]           # vertex -> {letter: set of vertices}
        self.alive = [True]
        for g in gens:
            g = free_reduce(g, inv)
            v = 0
            for i, a in enumerate(g):
                w = 0 if i == len(g) - 1 else self._new()
                self._edge(v, a, w)
                v = w
        self._fold()

    def _new(self):
        self.out.append({})
        self.alive.append(True)
        return len(self.out) - 1

    def _edge(self, v, a, w):
        self.out[v].setdefault(a, set()).add(w)
        self.out[w].setdefault(self.inv[a], set()).add(v)

    def _merge(self, u, w):
        """Identify vertex ``w`` with ``u``."""
        for a, ts in self.out[w].items():
            for t in ts:
                t2 = u if t == w else t
                self.out[u].setdefault(a, set()).add(t2)
                back = self.out[t].get(self.inv[a]) if t != w else None
                if back is not None:
                    back.discard(w)
                    back.add(u)
        self.out[w] = {}
        self.alive[w] = False
        for v in range(len(self.out)):
            for ts in self.out[v].values():
                if w in ts:
                    ts.discard(w)
                    ts.add(u)

    def _fold(self):
        while True:
            for v in range(len(self.out)):
                if not self.alive[v]:
                    continue
                hit = next((ts for ts in self.out[v].values() if len(ts) > 1), None)
                if hit:
                    u, w = sorted(hit)[:2]
                    self._merge(u, w)
                    break
            else:
                return

    def contains(self, w):
        v = 0
        for a in free_reduce(w, self.inv):
            ts = self.out[v].get(a)
            if not ts:
                return False
            (v,) = ts
        return v == 0


def coset_table_free(gens, inv, nsym):
    """Coset table of ``H = <gens>`` in a free group, or None for infinite index.

    Todd-Coxeter with no relators: scan each generator word from coset 0,
    defining cosets and processing coincidences.  The index is finite
    exactly when the resulting table is complete.
    """
    table = [dict()]
    parent = [0]

    def find(c):
        while parent[c] != c:
            c = parent[c]
        return c

    def define(c, a):
        d = len(table)
        table.append(dict())
        parent.append(d)
        table[c][a] = d
        table[d][inv[a]] = c
        return d

    def link(c, a, t, queue):
        """Set ``c a = t`` and ``t a^-1 = c``, queueing any clash."""
        table[c][a] = t
        b = inv[a]
        if b in table[t] and find(table[t][b]) != find(c):
            queue.append((table[t][b], c))
        else:
            table[t][b] = c

    def coincidence(c, d):
        queue = [(c, d)]
        while queue:
            c, d = queue.pop()
            c, d = find(c), find(d)
            if c == d:
                continue
            if d < c:
                c, d = d, c
            parent[d] = c
            for a, t in list(table[d].items()):
                t = find(t)
                if a in table[c]:
                    queue.append((table[c][a], t))
                else:
                    link(c, a, t, queue)

    for g in gens:
        g = tuple(g)
        if not g:
            continue
        c = 0
        for a in g[:-1]:
            c = find(c)
            c = table[c][a] if a in table[c] else define(c, a)
        c = find(c)
        a = g[-1]
        if a in table[c]:
            coincidence(table[c][a], 0)
        else:
            queue = []
            link(c, a, 0, queue)
            for x, y in queue:
                coincidence(x, y)
    live = sorted({find(c) for c in range(len(table))})
    ren = {c: i for i, c in enumerate(live)}
    out = []
    for c in live:
        row = {a: ren[find(t)] for a, t in table[c].items()}
        if len(row) != nsym:
            return None
        out.append(row)
    return out


def coset_of(table, w):
    c = 0
    for a in w:
        c = table[c][a]
    return c


# ---------------------------------------------------------------------------
# the toy HNN extension K = <a, b, z | za = az> = Z^2 * Z


def toy_free_product_form(word, a, A, b, B, z, Z, extra=None):
    """Normal form of a word in ``Z^2(a, z) * Z(b)`` as a tuple of syllables.

    ``extra`` maps further symbols to words first (e.g. the subgroup letters).
    """
    letters = []
    for s in word:
        if extra and s in extra:
            letters.extend(extra[s])
        else:
            letters.append(s)
    out = []   # list of ["P", i, j] or ["b", k]
    for s in letters:
        if s in (a, A, z, Z):
            di = 1 if s == a else -1 if s == A else 0
            dj = 1 if s == z else -1 if s == Z else 0
            if out and out[-1][0] == "P":
                out[-1][1] += di
                out[-1][2] += dj
                if out[-1][1] == 0 and out[-1][2] == 0:
                    out.pop()
            else:
                out.append(["P", di, dj])
        else:
            d = 1 if s == b else -1
            if out and out[-1][0] == "b":
                out[-1][1] += d
                if out[-1][1] == 0:
                    out.pop()
            else:
                out.append(["b", d])
        # merging after a pop
        if len(out) >= 2 and out[-1][0] == out[-2][0]:
            last = out.pop()
            for i in range(1, len(last)):
                out[-1][i] += last[i]
            if all(x == 0 for x in out[-1][1:]):
                out.pop()
    return tuple(tuple(x) for x in out)
