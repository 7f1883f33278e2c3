"""Pure-Python implementations of the hot kernels.

Every function here has a drop-in twin in ``_ckernels.pyx``; the two are
kept behaviourally identical and the test suite checks them against each
other.
"""

BACKEND = "python"


class _Partition:
    __slots__ = ("z", "E", "L", "S", "F", "P", "M", "W")

    def __init__(self, n):
        self.z = 1 if n else 0
        self.E = list(range(n))
        self.L = list(range(n))
        self.S = [0] * n
        self.F = [0] * (n + 1)
        self.P = [0] * (n + 1)
        self.M = [0] * (n + 1)
        self.W = []
        if n:
            self.P[0] = n

    def mark(self, e):
        S, L, E, M = self.S, self.L, self.E, self.M
        s = S[e]
        i = L[e]
        j = self.F[s] + M[s]
        E[i] = E[j]
        L[E[i]] = i
        E[j] = e
        L[e] = j
        if not M[s]:
            self.W.append(s)
        M[s] += 1

    def split(self):
        F, P, M, S, E, W = self.F, self.P, self.M, self.S, self.E, self.W
        while W:
            s = W.pop()
            j = F[s] + M[s]
            if j == P[s]:
                M[s] = 0
                continue
            z = self.z
            if M[s] <= P[s] - j:
                F[z] = F[s]
                P[z] = F[s] = j
            else:
                P[z] = P[s]
                F[z] = P[s] = j
            for i in range(F[z], P[z]):
                S[E[i]] = z
            M[s] = M[z] = 0
            self.z = z + 1


def partition_refine(n, tails, labels, heads, classes):
    """Coarsest language-equivalence partition of a trim partial DFA.

    ``tails[t] --labels[t]--> heads[t]`` are the transitions; ``classes`` is
    a list of disjoint state lists (the accepting states, or one list per
    output label) that must end up in different blocks from everything
    else.  Returns the block index of every state.  Valmari and Lehtinen's
    O(m log n) refinement for incomplete automata.
    """
    m = len(tails)
    B = _Partition(n)
    for cls in classes:
        for q in cls:
            B.mark(q)
        B.split()
    if m == 0:
        return list(B.S)
    C = _Partition(0)
    order = sorted(range(m), key=labels.__getitem__)
    C.E = order
    C.L = [0] * m
    C.S = [0] * m
    C.F = [0] * (m + 1)
    C.P = [0] * (m + 1)
    C.M = [0] * (m + 1)
    z = 0
    a = labels[order[0]]
    for i, t in enumerate(order):
        if labels[t] != a:
            a = labels[t]
            C.P[z] = i
            z += 1
            C.F[z] = i
        C.S[t] = z
        C.L[t] = i
    C.P[z] = m
    C.z = z + 1
    # incoming transitions per state
    first = [0] * (n + 1)
    for h in heads:
        first[h + 1] += 1
    for q in range(n):
        first[q + 1] += first[q]
    adj = [0] * m
    fill = first[:]
    for t in range(m):
        h = heads[t]
        adj[fill[h]] = t
        fill[h] += 1
    b = 1
    c = 0
    BE, BF, BP = B.E, B.F, B.P
    CE, CF, CP = C.E, C.F, C.P
    bmark, cmark = B.mark, C.mark
    while c < C.z:
        for i in range(CF[c], CP[c]):
            bmark(tails[CE[i]])
        B.split()
        c += 1
        while b < B.z:
            for i in range(BF[b], BP[b]):
                q = BE[i]
                for j in range(first[q], first[q + 1]):
                    cmark(adj[j])
            C.split()
            b += 1
    return list(B.S)


def reduce_word(word, goto, nsym, match, lhs_len, rhs_rev, emit, fired):
    """Rewrite ``word`` to an irreducible word with an index automaton.

    ``goto`` is the flat transition table of the automaton; ``match[s]`` is
    the rule whose left side is a suffix of the string of state ``s`` (or
    -1).  ``rhs_rev[r]`` is the reversed right side of rule ``r``.  Rules
    with ``emit[r]`` set are appended to ``fired`` when applied.
    """
    pending = list(word)
    pending.reverse()
    out = []
    st = [0]
    pop = pending.pop
    while pending:
        a = pop()
        s = goto[st[-1] * nsym + a]
        r = match[s]
        if r >= 0:
            k = lhs_len[r] - 1
            if k:
                del out[-k:]
                del st[-k:]
            pending.extend(rhs_rev[r])
            if emit[r]:
                fired.append(r)
        else:
            out.append(a)
            st.append(s)
    return out


def scan_match(word, goto, nsym, match):
    """Index of the end of the first rule match in ``word`` or -1."""
    s = 0
    for i, a in enumerate(word):
        s = goto[s * nsym + a]
        if match[s] >= 0:
            return i
    return -1


def trie_scan(word, goto, nsym, term):
    """Leftmost-ending occurrence of a trie word in ``word``.

    ``goto`` is the flat child table of a trie rooted at node 0 (-1 for no
    child) and ``term[node]`` the rule ending at a node (or -1).  Returns
    ``(start, end, rule)`` or None.
    """
    n = len(word)
    best = None
    for i in range(n):
        node = 0
        j = i
        limit = n if best is None else best[1]
        while j < limit:
            node = goto[node * nsym + word[j]]
            if node < 0:
                break
            r = term[node]
            if r >= 0:
                best = (i, j + 1, r)
                break
            j += 1
    return best


def build_index(nsym, lhss):
    """Aho-Corasick automaton of a list of nonempty words.

    Returns ``(goto, match)`` as lists: ``goto[s*nsym+a]`` is the total
    transition function and ``match[s]`` the index of a word that is a
    suffix of the string of state ``s`` (the one ending there, else the
    one inherited through the failure link), or -1.
    """
    goto = [-1] * nsym
    term = [-1]
    for rid, lhs in enumerate(lhss):
        s = 0
        for a in lhs:
            c = goto[s * nsym + a]
            if c < 0:
                c = len(term)
                goto[s * nsym + a] = c
                goto.extend([-1] * nsym)
                term.append(-1)
            s = c
        term[s] = rid
    n = len(term)
    fail = [0] * n
    match = [-1] * n
    queue = []
    for a in range(nsym):
        c = goto[a]
        if c < 0:
            goto[a] = 0
        else:
            queue.append(c)
    head = 0
    while head < len(queue):
        s = queue[head]
        head += 1
        f = fail[s]
        match[s] = term[s] if term[s] >= 0 else match[f]
        base = s * nsym
        fbase = f * nsym
        for a in range(nsym):
            c = goto[base + a]
            if c < 0:
                goto[base + a] = goto[fbase + a]
            else:
                fail[c] = goto[fbase + a]
                queue.append(c)
    return goto, match
