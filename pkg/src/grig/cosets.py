"""The 16-coset algebra of the branching subgroup K and its tower.

K is the normal closure of (ab)^2; it has index 16, satisfies
Stab(3) <= K <= Stab(1), and K x K lies inside the image of K under the
section map on Stab(1).  Its sixteen cosets z_0 .. z_15 carry a Schreier
graph over the generating set {a, b, d} (c walks as bd) and a partial
lifting map: an element of Stab(1) whose sections lie in cosets (z_j, z_k)
lies in a coset determined by (j, k), and only 32 of the 256 pairs occur.

Both tables are embedded as static data (derived once from the depth-3 and
depth-4 quotients) and re-derived by ``verify_lift_table`` /
``verify_schreier`` at test time; the embedded copies are authoritative at
runtime.

Cosets of the tower K_0 = K, K_{m+1} = (sections in K_m x K_m) are
represented by recursive descriptors: a twist bit plus an ordered pair of
level-(m-1) descriptors, with a K-coset at the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import InputError, ResourceLimitError
from .words import Word, first_level
from . import quotient as qt

#: representative words for the cosets z_0 .. z_15
COSET_REPS = (
    "", "d", "da", "dad", "adad", "ada", "ad", "a",
    "b", "c", "ca", "cad", "badad", "bada", "bad", "ab",
)

#: Schreier transitions under right multiplication by a, b, d
SCHREIER = (
    {"a": 7, "b": 8, "d": 1},
    {"a": 2, "b": 9, "d": 0},
    {"a": 1, "b": 10, "d": 3},
    {"a": 4, "b": 11, "d": 2},
    {"a": 3, "b": 12, "d": 5},
    {"a": 6, "b": 13, "d": 4},
    {"a": 5, "b": 14, "d": 7},
    {"a": 0, "b": 15, "d": 6},
    {"a": 15, "b": 0, "d": 9},
    {"a": 10, "b": 1, "d": 8},
    {"a": 9, "b": 2, "d": 11},
    {"a": 12, "b": 3, "d": 10},
    {"a": 11, "b": 4, "d": 13},
    {"a": 14, "b": 5, "d": 12},
    {"a": 13, "b": 6, "d": 15},
    {"a": 8, "b": 7, "d": 14},
)

#: lifting map: (coset of g|_0, coset of g|_1) -> coset of g, for g in Stab(1)
LIFT_TABLE = {
    (0, 0): 0, (8, 0): 5, (4, 4): 0, (12, 4): 5,
    (0, 8): 1, (8, 8): 4, (4, 12): 1, (12, 12): 4,
    (1, 7): 13, (9, 7): 8, (5, 3): 13, (13, 3): 8,
    (1, 15): 12, (9, 15): 9, (5, 11): 12, (13, 11): 9,
    (2, 6): 4, (10, 6): 1, (6, 2): 4, (14, 2): 1,
    (2, 14): 5, (10, 14): 0, (6, 10): 5, (14, 10): 0,
    (3, 5): 9, (11, 5): 12, (7, 1): 9, (15, 1): 12,
    (3, 13): 8, (11, 13): 13, (7, 9): 8, (15, 9): 13,
}

K_GENERATOR_WORDS = ("abab", "badabada", "abadabad")

A_COSET = 7  # z_7 = Ka


def coset_label(i: int) -> str:
    return f"z{i}"


def coset_of(g: Word) -> int:
    """Coset of g, by walking the Schreier graph from z_0 (c walks as bd)."""
    z = 0
    for ch in g.letters:
        for step in ("bd" if ch == "c" else ch):
            z = SCHREIER[z][step]
    return z


@lru_cache(maxsize=1)
def _cayley() -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """16x16 multiplication and inverse tables, derived from the depth-3
    quotient by labelling all 128 elements with their coset."""
    q = qt.enumerate_quotient(3)
    k3 = qt.subgroup_closure(
        q, [q.index_of_word(Word(w)) for w in K_GENERATOR_WORDS]
    )
    rep_idx = [q.index_of_word(Word(r)) for r in COSET_REPS]
    label = {}
    for i in range(q.order):
        for j, r in enumerate(rep_idx):
            if q.compose(i, q.inverse(r)) in k3:
                label[i] = j
                break
        else:
            raise InputError("element not covered by the coset representatives")
    mul = tuple(
        tuple(label[q.compose(rep_idx[i], rep_idx[j])] for j in range(16))
        for i in range(16)
    )
    inv = tuple(label[q.inverse(rep_idx[i])] for i in range(16))
    return mul, inv


def kcoset_mul(x: int, y: int) -> int:
    return _cayley()[0][x][y]


def kcoset_inv(x: int) -> int:
    return _cayley()[1][x]


def lift(j: int, k: int) -> Optional[int]:
    """The unique coset lifting the section-coset pair, or None."""
    return LIFT_TABLE.get((j, k))


@dataclass(frozen=True)
class LiftVerification:
    depth: int
    witnessed: frozenset
    missing: frozenset
    contradictions: tuple
    extraneous: tuple

    @property
    def passed(self) -> bool:
        return not (self.missing or self.contradictions or self.extraneous)

    def summary(self) -> str:
        total = len(self.witnessed) + len(self.missing)
        return (
            f"{len(self.witnessed)}/{total} entries verified, "
            f"{len(self.contradictions)} contradictions, "
            f"{len(self.extraneous)} extraneous triples"
        )


def k_decomposition(n: int) -> qt.CosetDecomposition:
    """Coset decomposition of the depth-n quotient with respect to K."""
    q = qt.enumerate_quotient(n)
    return qt.coset_decomposition(
        n,
        qt.subgroup_closure(
            q, [q.index_of_word(Word(w)) for w in K_GENERATOR_WORDS]
        ),
    )


def kcoset_labels_for_quotient(q: qt.FiniteQuotient) -> np.ndarray:
    """z-index of every element of a quotient at depth >= 3."""
    dec = k_decomposition(q.n)
    rep_label = {dec.label_of_word(Word(r)): j for j, r in enumerate(COSET_REPS)}
    rows = qt.restrict_rows(q.elements, q.n, dec.level)
    raw = dec.label_rows(rows)
    out = np.empty(q.order, dtype=np.int8)
    for i, lab in enumerate(raw):
        out[i] = rep_label[int(lab)]
    return out


def verify_lift_table(depth: int = 4, table: Optional[dict] = None) -> LiftVerification:
    """Re-derive the lifting map from Stab(1)/Stab(depth) and compare.

    Every element of Stab(1) in the depth quotient (one representative
    word each) contributes the triple (coset of g|_0, coset of g|_1,
    coset of g).  All triples must match the embedded table, no triple
    outside it may occur, and - at depth 4, where the section cosets
    separate all of Stab(1)'s pair classes - every entry is witnessed.
    """
    if depth < 3:
        raise InputError("lift verification needs depth >= 3")
    table = LIFT_TABLE if table is None else table
    q = qt.enumerate_quotient(depth)
    tw = q.twisted_mask()
    derived: dict[tuple[int, int], int] = {}
    contradictions = []
    extraneous = []
    for i, w in enumerate(qt.element_words(q)):
        if tw[i]:
            continue
        g = Word(w)
        left, right, _ = first_level(g)
        j, k, z = coset_of(left), coset_of(right), coset_of(g)
        expect = table.get((j, k))
        if expect is None:
            if ((j, k), z) not in extraneous:
                extraneous.append(((j, k), z))
            continue
        if expect != z:
            if ((j, k), expect, z) not in contradictions:
                contradictions.append(((j, k), expect, z))
        derived.setdefault((j, k), z)
    witnessed = frozenset(p for p in table if p in derived)
    missing = frozenset(p for p in table if p not in derived)
    return LiftVerification(
        depth=depth,
        witnessed=witnessed,
        missing=missing,
        contradictions=tuple(contradictions),
        extraneous=tuple(extraneous),
    )


def schreier_dot() -> str:
    """DOT digraph of the Schreier graph (16 nodes, labelled edges)."""
    lines = ["digraph schreier {", '  rankdir=LR;']
    for i, rep in enumerate(COSET_REPS):
        word = rep if rep else "1"
        lines.append(f'  z{i} [label="z{i} = K{word}"];')
    for i in range(16):
        for ch in "abd":
            lines.append(f'  z{i} -> z{SCHREIER[i][ch]} [label="{ch}"];')
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# cosets of the tower subgroups K_m


KM_LEVEL_GUARD = 4


@dataclass(frozen=True)
class KmCoset:
    """Coset of K_m, as a twist bit over an ordered pair of K_{m-1}-cosets.

    For a twisted element the children describe the sections of g*a, so the
    pair is always realized by an element of Stab(1) and must be liftable.
    Structural equality of descriptors is coset equality.
    """

    level: int
    base: Optional[int] = None
    twist: Optional[bool] = None
    children: Optional[tuple] = None

    @staticmethod
    def of_base(i: int) -> "KmCoset":
        if not 0 <= i < 16:
            raise InputError(f"coset index {i} out of range")
        return KmCoset(level=0, base=i)

    @staticmethod
    def node(twist: bool, c0: "KmCoset", c1: "KmCoset") -> "KmCoset":
        if c0.level != c1.level:
            raise InputError("children must live at the same level")
        if lift(c0.base_coset(), c1.base_coset()) is None:
            raise InputError("descriptor pair is not realizable by any element")
        return KmCoset(level=c0.level + 1, twist=twist, children=(c0, c1))

    def base_coset(self) -> int:
        """Projection of this coset down to a coset of K (a z-index)."""
        return _base_coset(self)

    def to_json(self):
        if self.level == 0:
            return {"level": 0, "z": self.base}
        return {
            "level": self.level,
            "twist": bool(self.twist),
            "children": [c.to_json() for c in self.children],
        }

    @staticmethod
    def from_json(data) -> "KmCoset":
        if data.get("level") == 0:
            return KmCoset.of_base(int(data["z"]))
        c0, c1 = (KmCoset.from_json(c) for c in data["children"])
        return KmCoset.node(bool(data["twist"]), c0, c1)


@lru_cache(maxsize=1 << 20)
def _base_coset(d: KmCoset) -> int:
    if d.level == 0:
        return d.base
    c0, c1 = d.children
    z = lift(_base_coset(c0), _base_coset(c1))
    if z is None:
        raise InputError("unrealizable descriptor")
    return kcoset_mul(z, A_COSET) if d.twist else z


def _z_of_rows(rows: np.ndarray, k: int) -> np.ndarray:
    """z-index of each level-k permutation row (k >= 3)."""
    dec = k_decomposition(3)
    rep_label = {dec.label_of_word(Word(r)): j for j, r in enumerate(COSET_REPS)}
    small = qt.restrict_rows(rows, k, 3)
    raw = dec.label_rows(small)
    return np.array([rep_label[int(x)] for x in raw], dtype=np.int8)


def descriptor_of_row(row: np.ndarray, n: int, m: int) -> KmCoset:
    """K_m-coset descriptor of an element given by its level-n permutation.

    Needs n - m >= 3 so that the base cosets are visible at depth 3.
    """
    if n - m < 3:
        raise InputError("descriptor extraction needs depth at least m + 3")
    if m == 0:
        return KmCoset.of_base(int(_z_of_rows(row[None, :], n)[0]))
    half = 1 << (n - 1)
    twisted = row[0] >= half
    if twisted:
        # pass to g*a, whose sections are the descriptor children
        row = np.concatenate([row[half:], row[:half]])
    left, right = qt.split_sections(row[None, :], n)
    return KmCoset(
        level=m,
        twist=bool(twisted),
        children=(
            descriptor_of_row(left[0], n - 1, m - 1),
            descriptor_of_row(right[0], n - 1, m - 1),
        ),
    )


def km_member_mask(q: qt.FiniteQuotient, m: int) -> np.ndarray:
    """Boolean mask of the elements of K_m inside a quotient of depth >= m+3."""

    def rec(rows: np.ndarray, k: int, level: int) -> np.ndarray:
        if level == 0:
            return _z_of_rows(rows, k) == 0
        half = 1 << (k - 1)
        untw = rows[:, 0] < half
        out = np.zeros(len(rows), dtype=bool)
        if untw.any():
            sub = rows[untw]
            left, right = qt.split_sections(sub, k)
            out[untw] = rec(left, k - 1, level - 1) & rec(right, k - 1, level - 1)
        return out

    if q.n - m < 3:
        raise InputError("membership mask needs depth at least m + 3")
    return rec(q.elements, q.n, m)


def km_identity(m: int) -> KmCoset:
    d = KmCoset.of_base(0)
    for _ in range(m):
        d = KmCoset.node(False, d, d)
    return d


def km_coset_of(g: Word, m: int, max_level: int | None = None) -> KmCoset:
    """Descriptor of the K_m-coset of g."""
    guard = KM_LEVEL_GUARD if max_level is None else max_level
    if m < 0:
        raise InputError("tower level must be >= 0")
    if m > guard:
        raise ResourceLimitError(f"tower level {m} exceeds the guard ({guard})")
    if m == 0:
        return KmCoset.of_base(coset_of(g))
    left, right, twisted = first_level(g)
    if twisted:
        # children are the sections of g*a, an element of Stab(1)
        left, right = right, left
    d = KmCoset.node(
        twisted, km_coset_of(left, m - 1, guard), km_coset_of(right, m - 1, guard)
    )
    return d


def km_mul(x: KmCoset, y: KmCoset) -> KmCoset:
    """Product coset; mirrors (u1 a^s)(u2 a^t) = u1 (a^s u2 a^s) a^(s+t)."""
    if x.level != y.level:
        raise InputError("cannot multiply descriptors of different levels")
    if x.level == 0:
        return KmCoset.of_base(kcoset_mul(x.base, y.base))
    y0, y1 = y.children
    if x.twist:
        y0, y1 = y1, y0
    return KmCoset(
        level=x.level,
        twist=bool(x.twist) ^ bool(y.twist),
        children=(km_mul(x.children[0], y0), km_mul(x.children[1], y1)),
    )


def km_inv(x: KmCoset) -> KmCoset:
    if x.level == 0:
        return KmCoset.of_base(kcoset_inv(x.base))
    c0, c1 = x.children
    if x.twist:
        return KmCoset(level=x.level, twist=True,
                       children=(km_inv(c1), km_inv(c0)))
    return KmCoset(level=x.level, twist=False,
                   children=(km_inv(c0), km_inv(c1)))


def km_project(x: KmCoset) -> KmCoset:
    """The coset of the next tower subgroup up containing this one
    (K_m-cosets refine K_{m-1}-cosets)."""
    if x.level == 0:
        raise InputError("level-0 cosets have nothing above them in the tower")
    if x.level == 1:
        return KmCoset.of_base(x.base_coset())
    return KmCoset(
        level=x.level - 1,
        twist=x.twist,
        children=(km_project(x.children[0]), km_project(x.children[1])),
    )
