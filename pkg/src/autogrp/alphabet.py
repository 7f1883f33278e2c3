"""Generator alphabets with formal inverses, and words over them.

Words are tuples of symbol indices.  The padding symbol used by two-tape
automata has index ``alphabet.size`` and is never part of the alphabet.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Word = tuple  # tuple[int, ...]

PAD_NAME = "_"


class AlphabetError(ValueError):
    pass


class Alphabet:
    """An ordered list of symbol names together with an involution.

    The order of ``names`` is the order used for shortlex comparison and
    for enumeration.
    """

    __slots__ = ("names", "inv", "_index", "size", "pad")

    def __init__(self, names: Sequence[str], inverses=None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise AlphabetError(f"duplicate symbol names in {names!r}")
        for s in names:
            if not s or s == PAD_NAME or any(c in s for c in " \t\n;,#{}:=") :
                raise AlphabetError(f"illegal symbol name {s!r}")
        index = {s: i for i, s in enumerate(names)}
        if inverses is None:
            inv = list(range(len(names)))
        elif isinstance(inverses, dict):
            inv = [None] * len(names)
            for s, t in inverses.items():
                if s not in index or t not in index:
                    raise AlphabetError(f"unknown symbol in inverse pair {s}:{t}")
                i, j = index[s], index[t]
                for a, b in ((i, j), (j, i)):
                    if inv[a] is not None and inv[a] != b:
                        raise AlphabetError(
                            f"inverses are not an involution at {names[a]!r}")
                    inv[a] = b
            missing = [names[i] for i, v in enumerate(inv) if v is None]
            if missing:
                raise AlphabetError(f"no inverse given for {' '.join(missing)}")
        else:
            inv = list(inverses)
            if len(inv) != len(names) or any(inv[inv[i]] != i for i in range(len(inv))):
                raise AlphabetError("inverse map is not an involution")
        self.names = names
        self.inv = tuple(inv)
        self._index = index
        self.size = len(names)
        self.pad = len(names)

    # -- identity -------------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, Alphabet) and self.names == other.names
                and self.inv == other.inv)

    def __hash__(self):
        return hash((self.names, self.inv))

    def __repr__(self):
        return f"Alphabet({' '.join(self.names)})"

    def __len__(self):
        return self.size

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlphabetError(f"unknown symbol {name!r}") from None

    def inverse_pairs(self):
        """Each inverse pair once, in alphabet order of the first member."""
        seen = set()
        out = []
        for i, j in enumerate(self.inv):
            if i not in seen:
                seen.update((i, j))
                out.append((i, j))
        return out

    # -- words ------------------------------------------------------------
    def parse_word(self, text: str | Iterable[str]) -> Word:
        """Parse ``"a b A"`` or, if all names are single characters, ``"abA"``.

        ``"_"`` and the empty string both denote the empty word.
        """
        if not isinstance(text, str):
            return tuple(self.index(t) for t in text)
        text = text.strip()
        if text in ("", PAD_NAME, "e", "1") and text not in self._index:
            return ()
        parts = text.split()
        if len(parts) == 1 and parts[0] not in self._index:
            if all(len(n) == 1 for n in self.names):
                return tuple(self.index(c) for c in parts[0])
        out = []
        for p in parts:
            if p in self._index:
                out.append(self._index[p])
            elif all(len(n) == 1 for n in self.names):
                out.extend(self.index(c) for c in p)
            else:
                raise AlphabetError(f"unknown symbol {p!r}")
        return tuple(out)

    def format_word(self, w: Sequence[int], sep: str | None = None) -> str:
        if not w:
            return PAD_NAME if sep is None else ""
        if sep is None:
            sep = "" if all(len(n) == 1 for n in self.names) else " "
        return sep.join(self.names[i] for i in w)

    def invert(self, w: Sequence[int]) -> Word:
        inv = self.inv
        return tuple(inv[i] for i in reversed(w))

    def free_reduce(self, w: Iterable[int]) -> Word:
        inv = self.inv
        out: list = []
        for a in w:
            if out and out[-1] == inv[a]:
                out.pop()
            else:
                out.append(a)
        return tuple(out)

    # -- padded pairs -------------------------------------------------------
    @property
    def pair_size(self) -> int:
        n1 = self.size + 1
        return n1 * n1 - 1

    def pair(self, i: int, j: int) -> int:
        return i * (self.size + 1) + j

    def unpair(self, p: int):
        return divmod(p, self.size + 1)

    def pair_name(self, p: int) -> str:
        i, j = self.unpair(p)
        n = self.names
        return f"{n[i] if i < self.size else PAD_NAME},{n[j] if j < self.size else PAD_NAME}"

    def parse_pair(self, text: str) -> int:
        try:
            s, t = text.split(",")
        except ValueError:
            raise AlphabetError(f"malformed pair symbol {text!r}") from None
        i = self.pad if s == PAD_NAME else self.index(s)
        j = self.pad if t == PAD_NAME else self.index(t)
        if i == self.pad and j == self.pad:
            raise AlphabetError("the pair (_,_) is not a symbol")
        return self.pair(i, j)

    def padded_pair(self, w: Sequence[int], x: Sequence[int]) -> Word:
        """The padded-pair string of ``(w, x)`` as pair-symbol indices."""
        n = max(len(w), len(x))
        pad = self.pad
        n1 = self.size + 1
        return tuple((w[t] if t < len(w) else pad) * n1 + (x[t] if t < len(x) else pad)
                     for t in range(n))


def shortlex_key(w: Sequence[int]):
    return (len(w), tuple(w))


def shortlex_compare(u: Sequence[int], v: Sequence[int]) -> int:
    """-1, 0 or 1 as ``u`` is shortlex-less, equal or greater than ``v``."""
    if len(u) != len(v):
        return -1 if len(u) < len(v) else 1
    u, v = tuple(u), tuple(v)
    if u == v:
        return 0
    return -1 if u < v else 1
