"""Word arithmetic for the group of binary rooted-tree automorphisms
generated by the four involutions a, b, c, d.

The generators act on vertices (binary strings, root = "") by

    a: 0s -> 1s, 1s -> 0s          (swap the two subtrees)
    b: 0s -> 0 a(s), 1s -> 1 c(s)
    c: 0s -> 0 a(s), 1s -> 1 d(s)
    d: 0s -> 0 s,    1s -> 1 b(s)

Elements are stored as reduced words: a's and letters from {b, c, d}
alternate, because a*a = 1, x*x = 1 and any two of b, c, d multiply to the
third.  Words compose as functions acting on the left,

    act(multiply(g, h), v) == act(g, act(h, v)),

so in a word the rightmost letter acts first.  Equal reduced words denote
equal automorphisms; the converse is decided by ``equal`` (the word
problem), never by word comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

from .errors import InputError, InternalError

LETTERS = "abcd"
_LETTER_SET = frozenset(LETTERS)
_BCD = frozenset("bcd")
_THIRD = {
    frozenset("bc"): "d",
    frozenset("bd"): "c",
    frozenset("cd"): "b",
}
# first-level sections of the torsion generators: x = (left, right)
_SECTIONS = {"b": ("a", "c"), "c": ("a", "d"), "d": ("", "b")}


def reduce_letters(raw: Iterable[str]) -> str:
    """Reduced form of a letter sequence (aa -> 1, xx -> 1, Klein merges)."""
    out: list[str] = []
    for ch in raw:
        if ch not in _LETTER_SET:
            raise InputError(f"invalid letter {ch!r}; expected one of a, b, c, d")
        while True:
            if not out:
                out.append(ch)
                break
            top = out[-1]
            if top == "a" and ch == "a":
                out.pop()
                break
            if top in _BCD and ch in _BCD:
                out.pop()
                if top == ch:
                    break
                ch = _THIRD[frozenset((top, ch))]
                continue
            out.append(ch)
            break
    return "".join(out)


@dataclass(frozen=True)
class Word:
    """An element of the group, held in canonical reduced form."""

    letters: str

    def __post_init__(self):
        reduced = reduce_letters(self.letters)
        if reduced != self.letters:
            object.__setattr__(self, "letters", reduced)

    def __str__(self) -> str:
        return self.letters

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def twisted(self) -> bool:
        """True iff the element swaps the two level-1 subtrees."""
        return self.letters.count("a") % 2 == 1


IDENTITY = Word("")
A, B, C, D = (Word(x) for x in LETTERS)
GENERATORS = (A, B, C, D)


class SectionTriple(NamedTuple):
    left: Word
    right: Word
    twisted: bool


def reduce(raw: str | Iterable[str]) -> Word:
    return Word(reduce_letters(raw))


_POWER_RE = re.compile(r"\^(\d+)")


def parse(text: str) -> Word:
    """Parse CLI word syntax: letters a-d, parenthesized powers like
    "(ab)^16", and "1" or "" for the identity."""
    s = text.replace(" ", "")
    if s == "1":
        return IDENTITY
    letters, _ = _parse_seq(s, 0, toplevel=True)
    return reduce(letters)


def _parse_seq(s: str, i: int, toplevel: bool) -> tuple[str, int]:
    out: list[str] = []
    while i < len(s):
        ch = s[i]
        if ch in LETTERS:
            out.append(ch)
            i += 1
        elif ch == "(":
            inner, i = _parse_seq(s, i + 1, toplevel=False)
            if i >= len(s) or s[i] != ")":
                raise InputError(f"unbalanced parenthesis in {s!r}")
            i += 1
            m = _POWER_RE.match(s, i)
            if m:
                inner = inner * int(m.group(1))
                i = m.end()
            out.append(inner)
        elif ch == ")":
            if toplevel:
                raise InputError(f"unbalanced parenthesis in {s!r}")
            break
        else:
            raise InputError(f"cannot parse {s!r} at position {i}")
    return "".join(out), i


def multiply(g: Word, h: Word) -> Word:
    return reduce(g.letters + h.letters)


def invert(g: Word) -> Word:
    # every generator is an involution, so the inverse is the reversed word
    return Word(g.letters[::-1])


def conjugate(g: Word, x: Word) -> Word:
    """x^-1 g x."""
    return reduce(x.letters[::-1] + g.letters + x.letters)


def first_level(g: Word) -> SectionTriple:
    """Sections (g|_0, g|_1) and the level-1 twist of g.

    Extends the generator table multiplicatively: appending a letter y with
    sections (y0, y1) to an accumulated (p0, p1, t) yields sections
    (p_{s(0)} y0, p_{s(1)} y1) where s is y's level-1 permutation.
    """
    p0: list[str] = []
    p1: list[str] = []
    twist = False
    for ch in g.letters:
        if ch == "a":
            p0, p1 = p1, p0
            twist = not twist
        else:
            lo, hi = _SECTIONS[ch]
            if lo:
                p0.append(lo)
            p1.append(hi)
    return SectionTriple(reduce(p0), reduce(p1), twist)


def section(g: Word, vertex: str) -> Word:
    """Restriction g|_v, iterating first_level along the vertex string."""
    _check_vertex(vertex)
    for bit in vertex:
        left, right, _ = first_level(g)
        g = left if bit == "0" else right
    return g


def act(g: Word, vertex: str) -> str:
    """Image of a vertex under g, by direct letter-by-letter evaluation."""
    _check_vertex(vertex)
    for ch in reversed(g.letters):
        vertex = _act_letter(ch, vertex)
    return vertex


def _act_letter(ch: str, v: str) -> str:
    out = []
    while v:
        if ch == "":
            out.append(v)
            break
        if ch == "a":
            out.append("1" if v[0] == "0" else "0")
            out.append(v[1:])
            break
        lo, hi = _SECTIONS[ch]
        out.append(v[0])
        ch = lo if v[0] == "0" else hi
        v = v[1:]
    return "".join(out)


def _check_vertex(v: str):
    if v.strip("01"):
        raise InputError(f"vertex must be a binary string, got {v!r}")


@lru_cache(maxsize=1 << 18)
def _is_trivial(letters: str) -> bool:
    if len(letters) <= 1:
        return letters == ""
    g = Word(letters)
    if g.twisted:
        return False
    left, right, _ = first_level(g)
    # length contraction makes both sections strictly shorter here
    return _is_trivial(left.letters) and _is_trivial(right.letters)


def is_trivial(g: Word) -> bool:
    """Word problem: does g act trivially on the whole tree?"""
    return _is_trivial(g.letters)


def equal(g: Word, h: Word) -> bool:
    return _is_trivial(multiply(g, invert(h)).letters)


def length(g: Word) -> int:
    return len(g.letters)


def in_stab(g: Word, n: int) -> bool:
    """Membership in the n-th level stabilizer."""
    if n < 0:
        raise InputError("stabilizer level must be >= 0")
    if n == 0:
        return True
    if g.twisted:
        return False
    left, right, _ = first_level(g)
    return in_stab(left, n - 1) and in_stab(right, n - 1)


ORDER_CAP = 1 << 24


def order(g: Word) -> int:
    """Order of g; always a power of two since the group is a 2-group."""
    k = 1
    x = g
    while not is_trivial(x):
        x = multiply(x, x)
        k *= 2
        if k > ORDER_CAP:
            raise InternalError(
                "order exceeded 2^24; this indicates a broken convention"
            )
    return k
