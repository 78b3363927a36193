"""Finite congruence quotients of the group as permutation groups.

The quotient at depth n consists of the permutations the group induces on
the 2^n level-n vertices (vertex 0b0101 -> index 5, leftmost bit first).
Permutations are stored as flat image arrays, composition is array
indexing, and the whole quotient is enumerated once by BFS over the four
generators with a deterministic ordering (BFS layer, then lexicographic
images).  Quotients are immutable after construction and cached per depth.

These quotients back every brute-force oracle in the package: conjugacy
tests, Q-set computations, and subgroup closures.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, ResourceLimitError
from .words import Word


def depth_guard() -> int:
    return int(os.environ.get("GRIG_MAX_DEPTH", "5"))


def _dtype(n: int):
    return np.uint8 if n <= 8 else np.uint16


@lru_cache(maxsize=None)
def _letter_perm(ch: str, n: int) -> np.ndarray:
    if n == 0:
        P = np.zeros(1, dtype=_dtype(n))
        P.setflags(write=False)
        return P
    half = 1 << (n - 1)
    if ch == "a":
        P = np.concatenate(
            [np.arange(half, 2 * half), np.arange(half)]
        ).astype(_dtype(n))
    elif ch == "":
        P = np.arange(2 * half, dtype=_dtype(n))
    else:
        lo, hi = {"b": ("a", "c"), "c": ("a", "d"), "d": ("", "b")}[ch]
        P = np.concatenate(
            [_letter_perm(lo, n - 1), _letter_perm(hi, n - 1) + half]
        ).astype(_dtype(n))
    P.setflags(write=False)
    return P


@lru_cache(maxsize=1 << 16)
def _word_perm(letters: str, n: int) -> np.ndarray:
    P = np.arange(1 << n, dtype=_dtype(n))
    for ch in letters:
        P = P[_letter_perm(ch, n)]  # append on the right: acc o letter
    P.setflags(write=False)
    return P


@dataclass(frozen=True)
class LevelPermutation:
    """The permutation an element induces on level-n vertices."""

    n: int
    images: np.ndarray

    def __eq__(self, other):
        return (
            isinstance(other, LevelPermutation)
            and self.n == other.n
            and self.images.tobytes() == other.images.tobytes()
        )

    def __hash__(self):
        return hash((self.n, self.images.tobytes()))

    def is_identity(self) -> bool:
        return bool((self.images == np.arange(1 << self.n)).all())

    def restrict(self, k: int) -> "LevelPermutation":
        """The induced permutation on length-k prefixes (k <= n)."""
        if not 0 <= k <= self.n:
            raise InputError(f"cannot restrict level-{self.n} data to level {k}")
        return LevelPermutation(k, restrict_rows(self.images[None, :], self.n, k)[0])


def restrict_rows(rows: np.ndarray, n: int, k: int) -> np.ndarray:
    step = 1 << (n - k)
    return (rows[:, ::step] // step).astype(_dtype(k))


def split_sections(rows: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """First-level sections of level-n permutation rows, at level n-1.

    For an element fixing level 1, the left half of the row is the image of
    subtree 0 inside itself; for a twisted element it lands in subtree 1.
    """
    half = 1 << (n - 1)
    tw = rows[:, 0] >= half
    left = rows[:, :half].astype(np.int64)
    right = rows[:, half:].astype(np.int64)
    left[tw] -= half
    right[~tw] -= half
    return left.astype(_dtype(n - 1)), right.astype(_dtype(n - 1))


def project(g: Word, n: int) -> LevelPermutation:
    if n < 0:
        raise InputError("depth must be >= 0")
    return LevelPermutation(n, _word_perm(g.letters, n))


class FiniteQuotient:
    """The quotient at depth n, enumerated as an indexed set of permutations."""

    def __init__(self, n: int, elements: np.ndarray, gen_index: dict):
        self.n = n
        self.elements = elements
        self.gen_index = gen_index
        self.identity_index = 0
        self._index: dict | None = None
        self._coset_cache: dict = {}
        self._words: list | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def width(self) -> int:
        return 1 << self.n

    def _index_map(self) -> dict:
        if self._index is None:
            self._index = {
                row.tobytes(): i for i, row in enumerate(self.elements)
            }
        return self._index

    def index_of(self, perm: LevelPermutation) -> int:
        if perm.n != self.n:
            raise InputError("depth mismatch")
        try:
            return self._index_map()[np.ascontiguousarray(perm.images).tobytes()]
        except KeyError:
            raise InputError("permutation does not belong to the quotient")

    def index_of_word(self, g: Word) -> int:
        return self.index_of(project(g, self.n))

    def element(self, i: int) -> LevelPermutation:
        return LevelPermutation(self.n, self.elements[i])

    def compose(self, i: int, j: int) -> int:
        row = self.elements[i][self.elements[j]]
        return self._index_map()[row.tobytes()]

    def inverse(self, i: int) -> int:
        row = np.argsort(self.elements[i]).astype(self.elements.dtype)
        return self._index_map()[row.tobytes()]

    def twisted_mask(self) -> np.ndarray:
        """True where the element swaps the two level-1 subtrees."""
        return self.elements[:, 0] >= (self.width >> 1)

    def stab_mask(self, k: int) -> np.ndarray:
        """True where the element fixes every vertex of depth <= k."""
        ident = np.arange(1 << k, dtype=_dtype(k))
        return (restrict_rows(self.elements, self.n, k) == ident).all(axis=1)

    def section_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Level-(n-1) images of both first-level sections, for all elements."""
        return split_sections(self.elements, self.n)


_QUOTIENTS: dict[int, FiniteQuotient] = {}


def enumerate_quotient(n: int, max_depth: int | None = None) -> FiniteQuotient:
    """BFS closure of the four generator permutations at depth n (cached)."""
    if n < 1:
        raise InputError("depth must be >= 1")
    guard = depth_guard() if max_depth is None else max_depth
    if n > guard:
        raise ResourceLimitError(
            f"depth {n} exceeds the guard ({guard}); "
            "set GRIG_MAX_DEPTH to raise it"
        )
    if n in _QUOTIENTS:
        return _QUOTIENTS[n]

    width = 1 << n
    gens = np.stack([_letter_perm(ch, n) for ch in "abcd"])
    ident = np.arange(width, dtype=_dtype(n))
    chunks = [ident[None, :]]
    seen = {ident.tobytes()}
    frontier = ident[None, :]
    total = 1
    while len(frontier):
        cands = frontier[:, gens.reshape(-1)].reshape(len(frontier) * 4, width)
        cands = np.unique(cands, axis=0)  # sorted, so layer order is canonical
        fresh = [row for row in cands if row.tobytes() not in seen]
        for row in fresh:
            seen.add(row.tobytes())
        if fresh:
            layer = np.array(fresh, dtype=_dtype(n))
            chunks.append(layer)
            total += len(layer)
            frontier = layer
        else:
            frontier = np.empty((0, width), dtype=_dtype(n))
    elements = np.concatenate(chunks)
    elements.setflags(write=False)

    gen_index = {}
    keys = {g.tobytes(): ch for ch, g in zip("abcd", gens)}
    for i, row in enumerate(elements):
        ch = keys.get(row.tobytes())
        if ch is not None:
            gen_index[ch] = i
        if len(gen_index) == 4:
            break

    q = FiniteQuotient(n, elements, gen_index)
    _QUOTIENTS[n] = q
    return q


_WORDS_DEPTH_CAP = 4


def element_words(q: FiniteQuotient) -> list:
    """A shortest representative word for every quotient element, aligned
    with element indices.  BFS order guarantees the stored strings are
    already reduced.  Guarded to small depths (the array is dense)."""
    if q.n > _WORDS_DEPTH_CAP:
        raise ResourceLimitError(
            f"element words are only materialized up to depth {_WORDS_DEPTH_CAP}"
        )
    if q._words is None:
        words: list = [None] * q.order
        words[q.identity_index] = ""
        queue = [q.identity_index]
        while queue:
            nxt = []
            for i in queue:
                for ch in "abcd":
                    j = q.compose(i, q.gen_index[ch])
                    if words[j] is None:
                        words[j] = words[i] + ch
                        nxt.append(j)
            queue = nxt
        q._words = words
    return q._words


def subgroup_closure(q: FiniteQuotient, seeds) -> frozenset:
    """Indices of the subgroup generated by the seed indices inside q."""
    seeds = list(seeds)
    for s in seeds:
        if not 0 <= s < q.order:
            raise InputError(f"seed index {s} out of range")
    gens = set(seeds) | {q.inverse(s) for s in seeds}
    seen = {q.identity_index} | gens
    frontier = list(seen)
    while frontier:
        new = []
        for i in frontier:
            for g in gens:
                k = q.compose(i, g)
                if k not in seen:
                    seen.add(k)
                    new.append(k)
        frontier = new
    return frozenset(seen)


def solve_conjugators(q: FiniteQuotient, g: Word, h: Word) -> np.ndarray:
    """Indices of all x in the quotient with x^-1 g x = h there.

    Works column by column on the equivalent condition g∘x == x∘h so that
    almost all candidates are discarded after one vertex.
    """
    Pg = project(g, q.n).images
    Ph = project(h, q.n).images
    X = q.elements
    idx = np.arange(q.order)
    for v in range(q.width):
        keep = Pg[X[idx, v]] == X[idx, Ph[v]]
        idx = idx[keep]
        if idx.size == 0:
            break
    return idx


class CosetDecomposition:
    """Coset labelling of a quotient with respect to a subgroup N >= Stab(k).

    Because N contains a level stabilizer, the N-coset of an element only
    depends on its restriction to level k; labels are therefore computed on
    the (small) depth-k quotient and shared by every caller.  A label is the
    smallest depth-k element index in the coset.
    """

    def __init__(self, q: FiniteQuotient, n_elements: frozenset):
        self.q = q
        self.n_elements = n_elements
        k = self._restriction_level(q, n_elements)
        self.level = k
        qk = enumerate_quotient(k, max_depth=max(k, depth_guard()))
        self.qk = qk
        rows = restrict_rows(q.elements[sorted(n_elements)], q.n, k)
        rows = np.unique(rows, axis=0)
        image = {qk._index_map()[row.tobytes()] for row in rows}
        labels = np.full(qk.order, -1, dtype=np.int64)
        for rep in range(qk.order):
            if labels[rep] >= 0:
                continue
            for u in image:
                labels[qk.compose(rep, u)] = rep
        self._labels = labels

    @staticmethod
    def _restriction_level(q: FiniteQuotient, n_elements: frozenset) -> int:
        for k in range(1, q.n + 1):
            stab = np.flatnonzero(q.stab_mask(k))
            if all(int(i) in n_elements for i in stab):
                return k
        raise InputError("N does not contain any level stabilizer of the quotient")

    def label_of_row(self, row: np.ndarray) -> int:
        """Label for a single depth-k permutation row."""
        return int(self._labels[self.qk._index_map()[row.tobytes()]])

    def label_rows(self, rows: np.ndarray) -> np.ndarray:
        imap = self.qk._index_map()
        out = np.empty(len(rows), dtype=np.int64)
        for i, row in enumerate(rows):
            out[i] = self._labels[imap[row.tobytes()]]
        return out

    def label_of_index(self, i: int) -> int:
        return self.label_of_row(
            restrict_rows(self.q.elements[i][None, :], self.q.n, self.level)[0]
        )

    def label_of_word(self, g: Word) -> int:
        return self.label_of_row(project(g, self.level).images)

    def labels_for(self, indices: np.ndarray) -> frozenset:
        rows = restrict_rows(self.q.elements[indices], self.q.n, self.level)
        rows = np.unique(rows, axis=0)
        return frozenset(int(x) for x in self.label_rows(rows))


def coset_decomposition(n: int, n_elements: frozenset) -> CosetDecomposition:
    q = enumerate_quotient(n)
    key = n_elements
    if key not in q._coset_cache:
        q._coset_cache[key] = CosetDecomposition(q, n_elements)
    return q._coset_cache[key]


def brute_Q(n: int, g: Word, h: Word, n_elements: frozenset) -> frozenset:
    """All N-cosets of solutions of x^-1 g x = h in the depth-n quotient.

    N must contain Stab(n) (caller promise).  Returned labels are those of
    ``coset_decomposition(n, n_elements)``.
    """
    q = enumerate_quotient(n)
    dec = coset_decomposition(n, n_elements)
    sols = solve_conjugators(q, g, h)
    if sols.size == 0:
        return frozenset()
    return dec.labels_for(sols)


def brute_conjugate(n: int, g: Word, h: Word) -> bool:
    """Conjugacy in the depth-n quotient, by exhaustive search."""
    q = enumerate_quotient(n)
    return solve_conjugators(q, g, h).size > 0
