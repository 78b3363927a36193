"""The conjugacy decision core.

For the branching subgroup K the set Q_n(g, h) of K-cosets of elements
conjugating g to h modulo Stab(n) satisfies a two-case recursion over the
first-level sections:

* g, h both untwisted: pair up section conjugators componentwise and lift,
  once plainly and once through a twisted conjugator;
* g, h both twisted: one section conjugator coset is free (constrained to
  Q of the section products), the other is determined inside the coset
  algebra;
* twist mismatch: empty.

The recursion bottoms out at depth 3, where Q is computed by brute force
over the 128-element quotient.  The exact set Q(g, h) equals Q_n(g, h)
once n reaches 4*ceil(log2(2r)) + 10 for r = max word length, with cheaper
depths 6 and 10 for lengths <= 1 and <= 2.  The same recursion runs over
descriptor sets for the tower subgroups K_m, with the depth bound
4*ceil(log2(2(r+m))) + 10 + m.

All Q-sets of K-cosets are held as 16-bit masks internally; the public
surface exposes frozensets.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import InputError, ResourceLimitError
from .words import Word, first_level, multiply, length
from . import quotient as qt
from . import cosets as cs
from .cosets import KmCoset


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass(frozen=True)
class QSet:
    """A finite set of K_m-cosets; no group structure is assumed."""

    level: int
    cosets: frozenset

    def __bool__(self) -> bool:
        return bool(self.cosets)

    def labels(self) -> list:
        if self.level == 0:
            return [cs.coset_label(i) for i in sorted(self.cosets)]
        return [d.to_json() for d in sorted(self.cosets, key=_descriptor_key)]


def _descriptor_key(d: KmCoset):
    if d.level == 0:
        return (0, d.base)
    return (1, d.twist, _descriptor_key(d.children[0]), _descriptor_key(d.children[1]))


@dataclass(frozen=True)
class ConjugacyResult:
    conjugate: bool
    level: int
    witnesses: QSet
    depth_used: int

    def to_json(self):
        return {
            "conjugate": self.conjugate,
            "level": self.level,
            "witness_cosets": self.witnesses.labels(),
            "depth_used": self.depth_used,
        }


@dataclass(frozen=True)
class StabilizationReport:
    depth: int
    bound: int
    within_bound: bool
    max_depth: int


@dataclass
class SplitNode:
    depth_label: int
    g: Word
    h: Word
    case: str  # "leaf", "plain", "twisted"
    children: tuple = ()

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=-1)


class _LRU:
    """Bounded memo cache; locked so concurrent read-through inserts from
    service worker threads behave as if the cache were absent."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            try:
                self._data.move_to_end(key)
                return self._data[key]
            except KeyError:
                return None

    def put(self, key, value):
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            if len(self._data) > self.capacity:
                self._data.popitem(last=False)

    def __len__(self):
        return len(self._data)


def exact_depth_bound(r: int, m: int = 0) -> int:
    """Depth at which Q_n is known to agree with Q, for lengths <= r at
    tower level m."""
    r = max(r, 1)
    if m == 0:
        if r <= 1:
            return 6
        if r <= 2:
            return 10
        return 4 * math.ceil(math.log2(2 * r)) + 10
    return 4 * math.ceil(math.log2(2 * (r + m))) + 10 + m


class ConjugacyEngine:
    """Holds the memo caches; all results are pure functions of the inputs."""

    def __init__(
        self,
        memo_capacity: int = 1 << 20,
        km_level_guard: int = cs.KM_LEVEL_GUARD,
        set_size_cap: int = 1 << 20,
    ):
        self._memo = _LRU(memo_capacity)
        self._memo_km = _LRU(memo_capacity)
        self.km_level_guard = km_level_guard
        self.set_size_cap = set_size_cap
        self._base_labels = None

    # ------------------------------------------------------------------
    # Q^K_n as 16-bit masks

    def _base_case(self, g: Word, h: Word) -> int:
        q = qt.enumerate_quotient(3)
        if self._base_labels is None:
            self._base_labels = cs.kcoset_labels_for_quotient(q)
        mask = 0
        for i in qt.solve_conjugators(q, g, h):
            mask |= 1 << int(self._base_labels[i])
        return mask

    def q_fin_mask(self, g: Word, h: Word, n: int) -> int:
        if n < 3:
            raise InputError("the recursion floor is depth 3")
        key = (g.letters, h.letters, n)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if n == 3:
            res = self._base_case(g, h)
        elif g.twisted != h.twisted:
            res = 0
        elif not g.twisted:
            g0, g1, _ = first_level(g)
            h0, h1, _ = first_level(h)
            res = 0
            A = self.q_fin_mask(g0, h0, n - 1)
            if A:
                B = self.q_fin_mask(g1, h1, n - 1)
                for p in _bits(A):
                    for q_ in _bits(B):
                        z = cs.lift(p, q_)
                        if z is not None:
                            res |= 1 << z
            C = self.q_fin_mask(g0, h1, n - 1)
            if C:
                D = self.q_fin_mask(g1, h0, n - 1)
                # twisted conjugator x = (x0, x1): x0 conjugates g1 to h0,
                # x1 conjugates g0 to h1, and x*a has sections (x1, x0)
                for beta in _bits(C):
                    for alpha in _bits(D):
                        z = cs.lift(beta, alpha)
                        if z is not None:
                            res |= 1 << cs.kcoset_mul(z, cs.A_COSET)
        else:
            g0, g1, _ = first_level(g)
            h0, h1, _ = first_level(h)
            zg0, zg1 = cs.coset_of(g0), cs.coset_of(g1)
            zh1 = cs.coset_of(h1)
            res = 0
            # untwisted conjugator: x0 free in Q(g1 g0, h1 h0), x1 = g1^-1 x0 h1
            for x0 in _bits(
                self.q_fin_mask(multiply(g1, g0), multiply(h1, h0), n - 1)
            ):
                x1 = cs.kcoset_mul(cs.kcoset_mul(cs.kcoset_inv(zg1), x0), zh1)
                z = cs.lift(x0, x1)
                if z is not None:
                    res |= 1 << z
            # twisted conjugator: x0 free in Q(g0 g1, h1 h0), x1 = g0^-1 x0 h1
            for x0 in _bits(
                self.q_fin_mask(multiply(g0, g1), multiply(h1, h0), n - 1)
            ):
                x1 = cs.kcoset_mul(cs.kcoset_mul(cs.kcoset_inv(zg0), x0), zh1)
                z = cs.lift(x1, x0)
                if z is not None:
                    res |= 1 << cs.kcoset_mul(z, cs.A_COSET)
        self._memo.put(key, res)
        return res

    def q_fin(self, g: Word, h: Word, n: int) -> QSet:
        return QSet(0, frozenset(_bits(self.q_fin_mask(g, h, n))))

    def q_exact(self, g: Word, h: Word) -> ConjugacyResult:
        n = exact_depth_bound(max(length(g), length(h)))
        mask = self.q_fin_mask(g, h, n)
        return ConjugacyResult(
            conjugate=bool(mask),
            level=0,
            witnesses=QSet(0, frozenset(_bits(mask))),
            depth_used=n,
        )

    def is_conjugate(self, g: Word, h: Word) -> tuple[bool, QSet]:
        res = self.q_exact(g, h)
        return res.conjugate, res.witnesses

    def stabilization_depth(self, g: Word, h: Word, n_max: int) -> StabilizationReport:
        if n_max < 4:
            raise InputError("n_max must be >= 4")
        masks = {n: self.q_fin_mask(g, h, n) for n in range(3, n_max + 1)}
        n = n_max
        while n > 3 and masks[n - 1] == masks[n_max]:
            n -= 1
        bound = exact_depth_bound(max(length(g), length(h)))
        return StabilizationReport(
            depth=n, bound=bound, within_bound=n <= bound, max_depth=n_max
        )

    # ------------------------------------------------------------------
    # the tower: Q^{K_m}_n as descriptor sets

    def _check_level(self, m: int):
        if m < 0:
            raise InputError("tower level must be >= 0")
        if m > self.km_level_guard:
            raise ResourceLimitError(
                f"tower level {m} exceeds the guard ({self.km_level_guard})"
            )

    def _cap(self, s: set) -> set:
        if len(s) > self.set_size_cap:
            raise ResourceLimitError(
                f"Q-set exceeded the size cap ({self.set_size_cap})"
            )
        return s

    def _maybe_node(self, twist: bool, c0: KmCoset, c1: KmCoset) -> Optional[KmCoset]:
        if cs.lift(c0.base_coset(), c1.base_coset()) is None:
            return None
        return KmCoset(level=c0.level + 1, twist=twist, children=(c0, c1))

    def q_km_set(self, g: Word, h: Word, m: int, n: int) -> frozenset:
        """Q^{K_m}_n(g, h) as a frozenset of level-m descriptors."""
        if m == 0:
            return frozenset(
                KmCoset.of_base(i) for i in _bits(self.q_fin_mask(g, h, n))
            )
        key = (g.letters, h.letters, m, n)
        hit = self._memo_km.get(key)
        if hit is not None:
            return hit
        if g.twisted != h.twisted:
            res = frozenset()
        elif not g.twisted:
            g0, g1, _ = first_level(g)
            h0, h1, _ = first_level(h)
            out: set = set()
            A = self.q_km_set(g0, h0, m - 1, n - 1)
            if A:
                B = self.q_km_set(g1, h1, m - 1, n - 1)
                for d0 in A:
                    for d1 in B:
                        node = self._maybe_node(False, d0, d1)
                        if node is not None:
                            out.add(node)
            C = self.q_km_set(g0, h1, m - 1, n - 1)
            if C:
                D = self.q_km_set(g1, h0, m - 1, n - 1)
                for beta in C:
                    for alpha in D:
                        node = self._maybe_node(True, beta, alpha)
                        if node is not None:
                            out.add(node)
            res = frozenset(self._cap(out))
        else:
            g0, g1, _ = first_level(g)
            h0, h1, _ = first_level(h)
            inv_g1 = cs.km_inv(cs.km_coset_of(g1, m - 1))
            inv_g0 = cs.km_inv(cs.km_coset_of(g0, m - 1))
            d_h1 = cs.km_coset_of(h1, m - 1)
            out = set()
            for d0 in self.q_km_set(multiply(g1, g0), multiply(h1, h0), m - 1, n - 1):
                d1 = cs.km_mul(cs.km_mul(inv_g1, d0), d_h1)
                node = self._maybe_node(False, d0, d1)
                if node is not None:
                    out.add(node)
            for d0 in self.q_km_set(multiply(g0, g1), multiply(h1, h0), m - 1, n - 1):
                d1 = cs.km_mul(cs.km_mul(inv_g0, d0), d_h1)
                node = self._maybe_node(True, d1, d0)
                if node is not None:
                    out.add(node)
            res = frozenset(self._cap(out))
        self._memo_km.put(key, res)
        return res

    def q_exact_km(self, g: Word, h: Word, m: int) -> ConjugacyResult:
        self._check_level(m)
        if m == 0:
            return self.q_exact(g, h)
        n = exact_depth_bound(max(length(g), length(h)), m)
        s = self.q_km_set(g, h, m, n)
        return ConjugacyResult(
            conjugate=bool(s), level=m, witnesses=QSet(m, s), depth_used=n
        )

    def subgroup_image(self, generators: Iterable[Word], m: int) -> frozenset:
        """Image of the subgroup generated by the given words in the
        quotient by K_m, as a set of descriptors (closure under products)."""
        self._check_level(m)
        gens = set()
        for w in generators:
            d = cs.km_coset_of(w, m)
            gens.add(d)
            gens.add(cs.km_inv(d))
        seen = {cs.km_identity(m)} | gens
        frontier = list(seen)
        while frontier:
            new = []
            for d in frontier:
                for e in gens:
                    p = cs.km_mul(d, e)
                    if p not in seen:
                        seen.add(p)
                        new.append(p)
            if len(seen) > self.set_size_cap:
                raise ResourceLimitError(
                    f"subgroup image exceeded the size cap ({self.set_size_cap})"
                )
            frontier = new
        return frozenset(seen)

    def is_conjugate_in_subgroup(
        self, g: Word, h: Word, generators: Iterable[Word], m: int
    ) -> ConjugacyResult:
        """Conjugacy in the subgroup H generated by the given words.

        The declaration that K_m <= H is trusted (the package has no coset
        enumeration to check it); g, h are assumed to lie in H.
        """
        image = self.subgroup_image(generators, m)
        if m == 0:
            image = frozenset(d.base for d in image)
        res = self.q_exact_km(g, h, m)
        common = frozenset(res.witnesses.cosets) & image
        return ConjugacyResult(
            conjugate=bool(common),
            level=m,
            witnesses=QSet(m, common),
            depth_used=res.depth_used,
        )

    # ------------------------------------------------------------------
    # splitting trees

    def build_splitting_tree(self, g: Word, h: Word, m: int) -> SplitNode:
        if m < 3:
            raise InputError("splitting trees need a root depth >= 3")
        return self._split(g, h, m)

    def _split(self, g: Word, h: Word, n: int) -> SplitNode:
        if n <= 3 or g.twisted != h.twisted:
            return SplitNode(n, g, h, "leaf")
        g0, g1, _ = first_level(g)
        h0, h1, _ = first_level(h)
        if not g.twisted:
            kids = (
                self._split(g0, h0, n - 1),
                self._split(g1, h1, n - 1),
                self._split(g0, h1, n - 1),
                self._split(g1, h0, n - 1),
            )
            return SplitNode(n, g, h, "plain", kids)
        kids = (
            self._split(multiply(g1, g0), multiply(h1, h0), n - 1),
            self._split(multiply(g0, g1), multiply(h1, h0), n - 1),
        )
        return SplitNode(n, g, h, "twisted", kids)


def export_dot(tree: SplitNode) -> str:
    """DOT digraph of a splitting tree, nodes labelled (n; g, h)."""
    lines = ["digraph splitting_tree {", "  node [shape=box];"]
    counter = [0]

    def emit(node: SplitNode) -> int:
        my_id = counter[0]
        counter[0] += 1
        g = node.g.letters or "1"
        h = node.h.letters or "1"
        lines.append(f'  n{my_id} [label="({node.depth_label}; {g}, {h})"];')
        for c in node.children:
            cid = emit(c)
            lines.append(f"  n{my_id} -> n{cid};")
        return my_id

    emit(tree)
    lines.append("}")
    return "\n".join(lines)


DEFAULT_ENGINE = ConjugacyEngine()


def q_fin(g: Word, h: Word, n: int) -> QSet:
    return DEFAULT_ENGINE.q_fin(g, h, n)


def q_exact(g: Word, h: Word) -> QSet:
    return DEFAULT_ENGINE.q_exact(g, h).witnesses


def is_conjugate(g: Word, h: Word) -> tuple[bool, QSet]:
    return DEFAULT_ENGINE.is_conjugate(g, h)


def q_exact_km(g: Word, h: Word, m: int) -> QSet:
    return DEFAULT_ENGINE.q_exact_km(g, h, m).witnesses


def is_conjugate_in_subgroup(g: Word, h: Word, generators, m: int) -> bool:
    return DEFAULT_ENGINE.is_conjugate_in_subgroup(g, h, generators, m).conjugate


def build_splitting_tree(g: Word, h: Word, m: int) -> SplitNode:
    return DEFAULT_ENGINE.build_splitting_tree(g, h, m)


def stabilization_depth(g: Word, h: Word, n_max: int) -> StabilizationReport:
    return DEFAULT_ENGINE.stabilization_depth(g, h, n_max)
