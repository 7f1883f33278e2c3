# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""

from cpython.mem cimport PyMem_Malloc, PyMem_Realloc, PyMem_Free

BACKEND = "cython"


cdef struct Part:
    int z
    int *E
    int *L
    int *S
    int *F
    int *P
    int *M
    int *W
    int w


cdef int part_init(Part *p, int n) except -1:
    cdef int i
    p.z = 1 if n > 0 else 0
    p.w = 0
    p.E = <int*>PyMem_Malloc((n + 1) * sizeof(int))
    p.L = <int*>PyMem_Malloc((n + 1) * sizeof(int))
    p.S = <int*>PyMem_Malloc((n + 1) * sizeof(int))
    p.F = <int*>PyMem_Malloc((n + 1) * sizeof(int))
    p.P = <int*>PyMem_Malloc((n + 1) * sizeof(int))
    p.M = <int*>PyMem_Malloc((n + 1) * sizeof(int))
    p.W = <int*>PyMem_Malloc((n + 1) * sizeof(int))
    if not (p.E and p.L and p.S and p.F and p.P and p.M and p.W):
        raise MemoryError()
    for i in range(n):
        p.E[i] = i
        p.L[i] = i
        p.S[i] = 0
    for i in range(n + 1):
        p.F[i] = 0
        p.P[i] = 0
        p.M[i] = 0
    if n > 0:
        p.P[0] = n
    return 0


cdef void part_free(Part *p):
    PyMem_Free(p.E)
    PyMem_Free(p.L)
    PyMem_Free(p.S)
    PyMem_Free(p.F)
    PyMem_Free(p.P)
    PyMem_Free(p.M)
    PyMem_Free(p.W)


cdef inline void part_mark(Part *p, int e):
    cdef int s = p.S[e]
    cdef int i = p.L[e]
    cdef int j = p.F[s] + p.M[s]
    p.E[i] = p.E[j]
    p.L[p.E[i]] = i
    p.E[j] = e
    p.L[e] = j
    if p.M[s] == 0:
        p.W[p.w] = s
        p.w += 1
    p.M[s] += 1


cdef void part_split(Part *p):
    cdef int s, j, i, z
    while p.w:
        p.w -= 1
        s = p.W[p.w]
        j = p.F[s] + p.M[s]
        if j == p.P[s]:
            p.M[s] = 0
            continue
        z = p.z
        if p.M[s] <= p.P[s] - j:
            p.F[z] = p.F[s]
            p.F[s] = j
            p.P[z] = j
        else:
            p.P[z] = p.P[s]
            p.P[s] = j
            p.F[z] = j
        for i in range(p.F[z], p.P[z]):
            p.S[p.E[i]] = z
        p.M[s] = 0
        p.M[z] = 0
        p.z = z + 1


def partition_refine(int n, tails, labels, heads, classes):
    cdef int m = len(tails)
    cdef Part B, C
    cdef int i, j, t, q, b, c, z, a, h
    cdef int *T
    cdef int *H
    cdef int *first
    cdef int *adj
    cdef int *fill
    part_init(&B, n)
    try:
        for cls in classes:
            for q in cls:
                part_mark(&B, q)
            part_split(&B)
        if m == 0:
            return [B.S[i] for i in range(n)]
        order = sorted(range(m), key=labels.__getitem__)
        part_init(&C, m)
        T = <int*>PyMem_Malloc(m * sizeof(int))
        H = <int*>PyMem_Malloc(m * sizeof(int))
        adj = <int*>PyMem_Malloc(m * sizeof(int))
        first = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        fill = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        try:
            for t in range(m):
                T[t] = tails[t]
                H[t] = heads[t]
            z = 0
            a = labels[order[0]]
            for i in range(m):
                t = order[i]
                C.E[i] = t
                if labels[t] != a:
                    a = labels[t]
                    C.P[z] = i
                    z += 1
                    C.F[z] = i
                C.S[t] = z
                C.L[t] = i
            C.P[z] = m
            C.z = z + 1
            for q in range(n + 1):
                first[q] = 0
            for t in range(m):
                first[H[t] + 1] += 1
            for q in range(n):
                first[q + 1] += first[q]
            for q in range(n + 1):
                fill[q] = first[q]
            for t in range(m):
                h = H[t]
                adj[fill[h]] = t
                fill[h] += 1
            b = 1
            c = 0
            while c < C.z:
                for i in range(C.F[c], C.P[c]):
                    part_mark(&B, T[C.E[i]])
                part_split(&B)
                c += 1
                while b < B.z:
                    for i in range(B.F[b], B.P[b]):
                        q = B.E[i]
                        for j in range(first[q], first[q + 1]):
                            part_mark(&C, adj[j])
                    part_split(&C)
                    b += 1
            return [B.S[i] for i in range(n)]
        finally:
            PyMem_Free(T)
            PyMem_Free(H)
            PyMem_Free(adj)
            PyMem_Free(first)
            PyMem_Free(fill)
            part_free(&C)
    finally:
        part_free(&B)


cdef int *grow(int *buf, Py_ssize_t *cap, Py_ssize_t need) except NULL:
    cdef Py_ssize_t c = cap[0]
    cdef int *nb
    if need <= c:
        return buf
    while c < need:
        c *= 2
    nb = <int*>PyMem_Realloc(buf, c * sizeof(int))
    if not nb:
        raise MemoryError()
    cap[0] = c
    return nb


def reduce_word(word, int[:] goto, int nsym, int[:] match, int[:] lhs_len,
                rhs_rev, char[:] emit, list fired):
    cdef Py_ssize_t n = len(word)
    cdef Py_ssize_t cp = n + 16, co = n + 16, cs = n + 17
    cdef int *pending
    cdef int *out
    cdef int *st
    cdef Py_ssize_t np = 0, no = 0, k, i, m
    cdef int a, s, r
    cdef tuple rr
    if n == 0:
        return []
    pending = <int*>PyMem_Malloc(cp * sizeof(int))
    out = <int*>PyMem_Malloc(co * sizeof(int))
    st = <int*>PyMem_Malloc(cs * sizeof(int))
    if not (pending and out and st):
        PyMem_Free(pending)
        PyMem_Free(out)
        PyMem_Free(st)
        raise MemoryError()
    try:
        for i in range(n):
            pending[n - 1 - i] = word[i]
        np = n
        st[0] = 0
        while np:
            np -= 1
            a = pending[np]
            s = goto[st[no] * nsym + a]
            r = match[s]
            if r >= 0:
                k = lhs_len[r] - 1
                no -= k
                rr = rhs_rev[r]
                m = len(rr)
                pending = grow(pending, &cp, np + m)
                for i in range(m):
                    pending[np] = rr[i]
                    np += 1
                if emit[r]:
                    fired.append(r)
            else:
                out = grow(out, &co, no + 1)
                st = grow(st, &cs, no + 2)
                out[no] = a
                no += 1
                st[no] = s
        return [out[i] for i in range(no)]
    finally:
        PyMem_Free(pending)
        PyMem_Free(out)
        PyMem_Free(st)


def scan_match(word, int[:] goto, int nsym, int[:] match):
    cdef int s = 0
    cdef Py_ssize_t i
    for i in range(len(word)):
        s = goto[s * nsym + <int>word[i]]
        if match[s] >= 0:
            return i
    return -1


def trie_scan(word, int[:] goto, int nsym, int[:] term):
    cdef Py_ssize_t n = len(word)
    cdef Py_ssize_t i, j, limit
    cdef int node, r
    cdef int bi = -1, bj = -1, br = -1
    cdef int *w = <int*>PyMem_Malloc((n + 1) * sizeof(int))
    if not w:
        raise MemoryError()
    try:
        for i in range(n):
            w[i] = word[i]
        limit = n
        for i in range(n):
            node = 0
            j = i
            while j < limit:
                node = goto[node * nsym + w[j]]
                if node < 0:
                    break
                r = term[node]
                if r >= 0:
                    bi = i
                    bj = j + 1
                    br = r
                    limit = j + 1
                    break
                j += 1
        if br < 0:
            return None
        return (bi, bj, br)
    finally:
        PyMem_Free(w)


def build_index(int nsym, lhss):
    from array import array
    cdef Py_ssize_t total = 1, cap
    cdef int s, c, a, f, n, head, tail, base, fbase
    for lhs in lhss:
        total += len(lhs)
    goto = array("i", [-1]) * (total * nsym)
    term = array("i", [-1]) * total
    cdef int[:] G = goto
    cdef int[:] T = term
    n = 1
    cdef int rid = 0
    for lhs in lhss:
        s = 0
        for x in lhs:
            a = x
            c = G[s * nsym + a]
            if c < 0:
                c = n
                n += 1
                G[s * nsym + a] = c
            s = c
        T[s] = rid
        rid += 1
    match = array("i", [-1]) * n
    cdef int[:] M = match
    cdef int *fail = <int*>PyMem_Malloc(n * sizeof(int))
    cdef int *queue = <int*>PyMem_Malloc(n * sizeof(int))
    if not (fail and queue):
        raise MemoryError()
    try:
        head = 0
        tail = 0
        fail[0] = 0
        for a in range(nsym):
            c = G[a]
            if c < 0:
                G[a] = 0
            else:
                fail[c] = 0
                queue[tail] = c
                tail += 1
        while head < tail:
            s = queue[head]
            head += 1
            f = fail[s]
            M[s] = T[s] if T[s] >= 0 else M[f]
            base = s * nsym
            fbase = f * nsym
            for a in range(nsym):
                c = G[base + a]
                if c < 0:
                    G[base + a] = G[fbase + a]
                else:
                    fail[c] = G[fbase + a]
                    queue[tail] = c
                    tail += 1
    finally:
        PyMem_Free(fail)
        PyMem_Free(queue)
    return goto[: n * nsym], match
