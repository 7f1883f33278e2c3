"""Text formats for presentations, subgroups, HNN data and automata.

Every file holds one record ``kind { ... }``.  Inside a record a statement
is a run of tokens ending in ``;`` and a nested block is ``name { ... }``.
Whitespace is insignificant and ``#`` starts a comment.  States are
numbered from 1 in files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .alphabet import PAD_NAME, Alphabet, AlphabetError
from .fsa import Dfa, FsaError, Midfa
from .rewriting import Presentation, PresentationError, RewritingSystem

END_NAME = "$"
SPECIAL = "{};=:"


class ParseError(ValueError):
    """Malformed or inconsistent input, with a position when known."""

    def __init__(self, msg, line=None, col=None, source=None):
        self.msg = msg
        self.line = line
        self.col = col
        self.source = source
        super().__init__(self._text())

    def _text(self):
        where = []
        if self.source:
            where.append(str(self.source))
        if self.line is not None:
            where.append(str(self.line))
            if self.col is not None:
                where.append(str(self.col))
        return (":".join(where) + ": " if where else "") + self.msg


@dataclass
class Tok:
    text: str
    line: int
    col: int


@dataclass
class Block:
    name: str
    tok: Tok
    stmts: list = field(default_factory=list)      # token lists
    blocks: list = field(default_factory=list)     # nested Blocks

    def child(self, name):
        found = [b for b in self.blocks if b.name == name]
        if len(found) > 1:
            raise ParseError(f"block '{name}' given twice", found[1].tok.line, found[1].tok.col)
        return found[0] if found else None

    def assignments(self, source=None) -> dict:
        """``key = values ;`` statements as ``key -> (key token, value tokens)``."""
        out = {}
        for st in self.stmts:
            if len(st) < 2 or st[1].text != "=":
                raise ParseError("expected 'key = value ;'", st[0].line, st[0].col, source)
            k = st[0].text
            if k in out:
                raise ParseError(f"'{k}' given twice", st[0].line, st[0].col, source)
            out[k] = (st[0], st[2:])
        return out


def tokenize(text: str, source=None) -> list:
    toks = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in SPECIAL:
            toks.append(Tok(c, line, col))
            i += 1
            col += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in SPECIAL and text[j] != "#":
            j += 1
        toks.append(Tok(text[i:j], line, col))
        col += j - i
        i = j
    return toks


def parse_record(text: str, source=None) -> Block:
    """Parse the single top-level record of a file."""
    toks = tokenize(text, source)
    pos = 0

    def err(msg, t=None):
        if t is None:
            t = toks[pos] if pos < len(toks) else (toks[-1] if toks else Tok("", 1, 1))
        return ParseError(msg, t.line, t.col, source)

    def block():
        nonlocal pos
        name = toks[pos]
        pos += 2
        b = Block(name.text, name)
        cur = []
        while True:
            if pos >= len(toks):
                raise err(f"unterminated block '{name.text}', expected '}}'", name)
            t = toks[pos]
            if t.text == "}":
                if cur:
                    raise err("expected ';' before '}'", t)
                pos += 1
                return b
            if t.text == "{":
                raise err("unexpected '{'", t)
            if (not cur and t.text not in SPECIAL and pos + 1 < len(toks)
                    and toks[pos + 1].text == "{"):
                b.blocks.append(block())
                continue
            if t.text == ";":
                if cur:
                    b.stmts.append(cur)
                cur = []
                pos += 1
                continue
            cur.append(t)
            pos += 1

    if not toks:
        raise ParseError("empty input", 1, 1, source)
    if len(toks) < 2 or toks[1].text != "{" or toks[0].text in SPECIAL:
        raise err("expected 'kind {'", toks[0])
    rec = block()
    if pos != len(toks):
        raise err("text after the end of the record", toks[pos])
    return rec


def _read(path):
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror}", source=path) from None


def _expect_kind(rec: Block, kind: str, source):
    if rec.name != kind:
        raise ParseError(f"expected a '{kind}' record, found '{rec.name}'",
                         rec.tok.line, rec.tok.col, source)


def _pairs(toks, source):
    """``a:A b:B`` as a list of ``(name, name, token)``."""
    out = []
    i = 0
    while i < len(toks):
        if i + 2 >= len(toks):
            raise ParseError("expected 'x:y'", toks[i].line, toks[i].col, source)
        a, colon, b = toks[i], toks[i + 1], toks[i + 2]
        if colon.text != ":" or a.text in SPECIAL or b.text in SPECIAL:
            raise ParseError("expected 'x:y'", a.line, a.col, source)
        out.append((a.text, b.text, a))
        i += 3
    return out


def _words(toks):
    return " ".join(t.text for t in toks)


def _parse_word(A: Alphabet, toks, source):
    if not toks:
        return ()
    try:
        return A.parse_word([t.text for t in toks] if len(toks) > 1 else toks[0].text)
    except AlphabetError as e:
        raise ParseError(str(e), toks[0].line, toks[0].col, source) from None


def _word_text(A: Alphabet, w) -> str:
    if not w:
        return PAD_NAME
    return " ".join(A.names[a] for a in w)


# ---------------------------------------------------------------------------
# alphabets and presentations


def alphabet_from(assign: dict, rec: Block, source, gens_key="generators",
                  inv_key="inverses") -> Alphabet:
    """Alphabet from ``generators``/``alphabet``, ``inverses`` and ``order``."""
    if gens_key not in assign:
        raise ParseError(f"missing '{gens_key} = ...;'", rec.tok.line, rec.tok.col, source)
    gtok, gens = assign[gens_key]
    names = [t.text for t in gens]
    for t in gens:
        if t.text in SPECIAL:
            raise ParseError("expected a symbol name", t.line, t.col, source)
    inv: dict = {}
    if inv_key in assign:
        for a, b, t in _pairs(assign[inv_key][1], source):
            for x, y in ((a, b), (b, a)):
                if inv.get(x, y) != y:
                    raise ParseError(f"inverses are not an involution at '{x}'",
                                     t.line, t.col, source)
                inv[x] = y
    full = list(names)
    for a in names:
        b = inv.get(a)
        if b is not None and b not in full:
            full.append(b)
    unknown = [a for a in inv if a not in full]
    if unknown:
        t = assign[inv_key][0]
        raise ParseError(f"unknown symbol '{unknown[0]}' in inverses", t.line, t.col, source)
    if "order" in assign:
        otok, order = assign["order"]
        order = [t.text for t in order]
        if sorted(order) != sorted(full):
            raise ParseError("order must list every generator and inverse exactly once",
                             otok.line, otok.col, source)
    elif gens_key == "generators":
        order = []
        for a in names:
            order.append(a)
            b = inv.get(a)
            if b is not None and b != a and b not in names:
                order.append(b)
    else:
        order = full
    missing = [a for a in order if a not in inv]
    if missing:
        raise ParseError(f"no inverse given for '{missing[0]}'", gtok.line, gtok.col, source)
    try:
        return Alphabet(order, inv)
    except AlphabetError as e:
        raise ParseError(str(e), gtok.line, gtok.col, source) from None


def parse_group(text: str, source=None) -> Presentation:
    rec = parse_record(text, source)
    _expect_kind(rec, "group", source)
    assign = rec.assignments(source)
    A = alphabet_from(assign, rec, source)
    eqs = []
    blk = rec.child("equations")
    if blk is not None:
        for st in blk.stmts:
            eqpos = [i for i, t in enumerate(st) if t.text == "="]
            if len(eqpos) != 1:
                raise ParseError("expected 'lhs = rhs ;'", st[0].line, st[0].col, source)
            i = eqpos[0]
            eqs.append((_parse_word(A, st[:i], source), _parse_word(A, st[i + 1:], source)))
    try:
        return Presentation(A, eqs)
    except PresentationError as e:
        raise ParseError(str(e), rec.tok.line, rec.tok.col, source) from None


def _alphabet_lines(A: Alphabet, key="generators", inv_key="inverses") -> list:
    gens = [A.names[i] for i, j in A.inverse_pairs()]
    if key == "generators":
        lines = [f"  generators = {' '.join(gens)} ;"]
    else:
        lines = [f"  {key} = {' '.join(A.names)} ;"]
    lines.append(f"  {inv_key} = " + " ".join(f"{A.names[i]}:{A.names[j]}"
                                            for i, j in A.inverse_pairs()) + " ;")
    if key == "generators":
        lines.append(f"  order = {' '.join(A.names)} ;")
    return lines


def format_group(p: Presentation) -> str:
    A = p.alphabet
    lines = ["group {"] + _alphabet_lines(A) + ["  equations {"]
    for u, v in p.equations:
        lines.append(f"    {_word_text(A, u)} = {_word_text(A, v)} ;")
    lines += ["  }", "}"]
    return "\n".join(lines) + "\n"


def format_rules(rs: RewritingSystem) -> str:
    """A rewriting system as a group record whose equations are the rules."""
    A = rs.alphabet
    lines = ["group {"] + _alphabet_lines(A)
    lines.append(f"  confluent = {'true' if rs.confluent else 'false'} ;")
    lines.append(f"  rules = {len(rs)} ;")
    lines.append("  equations {")
    for l, r in rs.rules:
        lines.append(f"    {_word_text(A, l)} = {_word_text(A, r)} ;")
    lines += ["  }", "}"]
    return "\n".join(lines) + "\n"


def read_group(path) -> Presentation:
    return parse_group(_read(path), path)


# ---------------------------------------------------------------------------
# subgroups and HNN data


@dataclass
class SubgroupFile:
    group: Presentation
    generators: list          # words over the group alphabet
    names: list | None = None
    of: str | None = None


def parse_subgroup(text: str, source=None, group: Presentation | None = None) -> SubgroupFile:
    rec = parse_record(text, source)
    _expect_kind(rec, "subgroup", source)
    assign = rec.assignments(source)
    of = None
    if "of" in assign:
        of = _words(assign["of"][1])
    if group is None:
        if of is None:
            raise ParseError("missing 'of = GROUPFILE ;'", rec.tok.line, rec.tok.col, source)
        base = os.path.dirname(source) if source else ""
        group = read_group(os.path.join(base, of))
    A = group.alphabet
    blk = rec.child("generators")
    if blk is None:
        raise ParseError("missing 'generators { ... }'", rec.tok.line, rec.tok.col, source)
    gens = [_parse_word(A, st, source) for st in blk.stmts]
    names = None
    if "names" in assign:
        names = [(a, b) for a, b, _ in _pairs(assign["names"][1], source)]
        if len(names) != len(gens):
            t = assign["names"][0]
            raise ParseError("one name pair per generator", t.line, t.col, source)
    return SubgroupFile(group, gens, names, of)


def format_subgroup(sf: SubgroupFile) -> str:
    A = sf.group.alphabet
    lines = ["subgroup {"]
    if sf.of is not None:
        lines.append(f"  of = {sf.of} ;")
    if sf.names is not None:
        lines.append("  names = " + " ".join(f"{a}:{b}" for a, b in sf.names) + " ;")
    lines.append("  generators {")
    for g in sf.generators:
        lines.append(f"    {_word_text(A, g)} ;")
    lines += ["  }", "}"]
    return "\n".join(lines) + "\n"


def read_subgroup(path, group: Presentation | None = None) -> SubgroupFile:
    return parse_subgroup(_read(path), path, group)


@dataclass
class HnnFile:
    group: Presentation
    subgroup: SubgroupFile
    stable: tuple
    alpha: dict               # B name -> B name
    base: str | None = None
    sub: str | None = None


def parse_hnn(text: str, source=None) -> HnnFile:
    rec = parse_record(text, source)
    _expect_kind(rec, "hnn", source)
    assign = rec.assignments(source)
    here = os.path.dirname(source) if source else ""
    for k in ("base", "sub"):
        if k not in assign:
            raise ParseError(f"missing '{k} = FILE ;'", rec.tok.line, rec.tok.col, source)
    base = _words(assign["base"][1])
    sub = _words(assign["sub"][1])
    group = read_group(os.path.join(here, base))
    sf = read_subgroup(os.path.join(here, sub), group)
    stable = ("z", "Z")
    if "stable" in assign:
        toks = assign["stable"][1]
        if len(toks) == 1:
            s = toks[0].text
            stable = (s, s.swapcase() if s.swapcase() != s else s + "^-1")
        else:
            (a, b, _), = _pairs(toks, source)
            stable = (a, b)
    alpha = {}
    blk = rec.child("alpha")
    if blk is not None:
        for st in blk.stmts:
            for a, b, t in _pairs(st, source):
                if a in alpha:
                    raise ParseError(f"image of '{a}' given twice", t.line, t.col, source)
                alpha[a] = b
    return HnnFile(group, sf, stable, alpha, base, sub)


def format_hnn(hf: HnnFile) -> str:
    lines = ["hnn {", f"  base = {hf.base} ;", f"  sub = {hf.sub} ;",
             f"  stable = {hf.stable[0]}:{hf.stable[1]} ;", "  alpha {"]
    for a, b in hf.alpha.items():
        lines.append(f"    {a} : {b} ;")
    lines += ["  }", "}"]
    return "\n".join(lines) + "\n"


def read_hnn(path) -> HnnFile:
    return parse_hnn(_read(path), path)


# ---------------------------------------------------------------------------
# automata


@dataclass
class AsyncTable:
    """A materialized asynchronous automaton (symbol ``END`` is the last column)."""
    alphabet: Alphabet
    delta: list
    read: list
    initial: int
    accepting: frozenset

    def __eq__(self, other):
        return (isinstance(other, AsyncTable) and self.alphabet == other.alphabet
                and self.delta == other.delta and self.read == other.read
                and self.initial == other.initial and self.accepting == other.accepting)


def _symbol_names(A: Alphabet, pair: bool, end: bool = False) -> list:
    if pair:
        return [A.pair_name(p) for p in range(A.pair_size)]
    names = list(A.names)
    if end:
        names.append(END_NAME)
    return names


def format_fsa(m, label_alphabet=None) -> str:
    """Serialize a Dfa, pair Dfa, labelled Midfa or AsyncTable."""
    A = m.alphabet
    if isinstance(m, AsyncTable):
        kind, pair, inits = "async", False, [m.initial]
    elif isinstance(m, Midfa):
        kind, pair, inits = ("pair-midfa" if m.pair else "midfa"), m.pair, list(m.initials)
    else:
        kind, pair, inits = ("pair" if m.pair else "dfa"), m.pair, [m.initial]
    names = _symbol_names(A, pair, kind == "async")
    lines = ["fsa {", f"  kind = {kind} ;"] + _alphabet_lines(A, "alphabet")
    lines.append(f"  states = {len(m.delta)} ;")
    lines.append("  initial = " + " ".join(str(s + 1) for s in inits) + " ;")
    lines.append("  accepting = " + " ".join(str(s + 1) for s in sorted(m.accepting)) + " ;")
    if isinstance(m, Midfa):
        L = m.label_alphabet or label_alphabet
        if L is not None:
            lines.extend(_alphabet_lines(L, "label_alphabet", "label_inverses"))
        lines.append("  labels {")
        for s, lab in zip(m.initials, m.labels):
            lines.append(f"    {s + 1} : {PAD_NAME if not lab else _word_text(L, lab)} ;")
        lines.append("  }")
    if kind == "async":
        lines.append("  read = " + " ".join(str(r) for r in m.read) + " ;")
    lines.append("  arcs {")
    for s, row in enumerate(m.delta):
        arcs = [f"{s + 1} {names[a]} {t + 1} ;" for a, t in enumerate(row) if t >= 0]
        if arcs:
            lines.append("    " + " ".join(arcs))
    lines += ["  }", "}"]
    return "\n".join(lines) + "\n"


def _ints(toks, source, lo=1, hi=None):
    out = []
    for t in toks:
        try:
            v = int(t.text)
        except ValueError:
            raise ParseError(f"expected a state number, found '{t.text}'",
                             t.line, t.col, source) from None
        if v < lo or (hi is not None and v > hi):
            raise ParseError(f"state {v} out of range", t.line, t.col, source)
        out.append(v)
    return out


def parse_fsa(text: str, source=None):
    rec = parse_record(text, source)
    _expect_kind(rec, "fsa", source)
    assign = rec.assignments(source)
    A = alphabet_from(assign, rec, source, "alphabet")
    arcs = rec.child("arcs")
    kind = _words(assign["kind"][1]) if "kind" in assign else None
    if kind is None:
        pair = arcs is not None and any("," in st[1].text for st in arcs.stmts if len(st) > 1)
        kind = "pair" if pair else "dfa"
        if "read" in assign:
            kind = "async"
        elif "initial" in assign and len(assign["initial"][1]) > 1:
            kind = "midfa"
    if kind not in ("dfa", "pair", "midfa", "pair-midfa", "async"):
        t = assign["kind"][0]
        raise ParseError(f"unknown kind '{kind}'", t.line, t.col, source)
    pair = kind in ("pair", "pair-midfa")
    for k in ("states", "initial"):
        if k not in assign:
            raise ParseError(f"missing '{k} = ...;'", rec.tok.line, rec.tok.col, source)
    (n,) = _ints(assign["states"][1], source, lo=0) or [0]
    inits = [s - 1 for s in _ints(assign["initial"][1], source, hi=n)]
    acc = [s - 1 for s in _ints(assign.get("accepting", (None, []))[1], source, hi=n)]
    labels = None
    label_alphabet = None
    if kind.endswith("midfa"):
        if "label_alphabet" in assign:
            label_alphabet = alphabet_from(assign, rec, source, "label_alphabet",
                                           "label_inverses")
        lb = rec.child("labels")
        if lb is not None:
            pair_lab = {}
            for st in lb.stmts:
                if len(st) < 3 or st[1].text != ":":
                    raise ParseError("expected 'state : word ;'", st[0].line, st[0].col, source)
                (s,) = _ints(st[:1], source, hi=n)
                w = st[2:]
                if len(w) == 1 and w[0].text == PAD_NAME:
                    pair_lab[s - 1] = ()
                elif label_alphabet is None:
                    raise ParseError("labels need a label_alphabet", st[0].line, st[0].col, source)
                else:
                    pair_lab[s - 1] = _parse_word(label_alphabet, w, source)
            labels = [pair_lab.get(s) for s in inits]
    names = _symbol_names(A, pair, kind == "async")
    sym = {name: i for i, name in enumerate(names)}
    width = len(names)
    delta = [[-1] * width for _ in range(n)]
    if arcs is not None:
        for st in arcs.stmts:
            if len(st) % 3:
                raise ParseError("expected 'state symbol state ;'", st[0].line, st[0].col, source)
            for i in range(0, len(st), 3):
                s, a, t = st[i], st[i + 1], st[i + 2]
                (si,) = _ints([s], source, hi=n)
                (ti,) = _ints([t], source, hi=n)
                if a.text not in sym:
                    raise ParseError(f"unknown symbol '{a.text}'", a.line, a.col, source)
                if delta[si - 1][sym[a.text]] >= 0:
                    raise ParseError("two arcs for one state and symbol", a.line, a.col, source)
                delta[si - 1][sym[a.text]] = ti - 1
    try:
        if kind == "async":
            read = _ints(assign["read"][1], source, lo=1, hi=2) if "read" in assign else []
            if len(read) != n:
                raise ParseError("one read value per state", rec.tok.line, rec.tok.col, source)
            return AsyncTable(A, delta, read, inits[0], frozenset(acc))
        if kind.endswith("midfa"):
            return Midfa(A, delta, inits, acc, labels, pair=pair, label_alphabet=label_alphabet)
        if len(inits) != 1:
            raise ParseError("a dfa has one initial state", rec.tok.line, rec.tok.col, source)
        return Dfa(A, delta, inits[0], acc, pair=pair)
    except FsaError as e:
        raise ParseError(str(e), rec.tok.line, rec.tok.col, source) from None


def read_fsa(path):
    return parse_fsa(_read(path), path)


def write_text(path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
