"""Finite wreath products A wr B and exhaustive centralizer verification.

An element is a pair (f, b) with f: B -> A (stored as a tuple indexed by
B-element index) and b in B.  B acts on coordinates by left translation,
(b.f)(x) = f(bx), so the product is

    (f, b)(g, c) = (x -> f(x) g(bx), bc).

The lab cross-checks three descriptions of the centralizer of fb:

* the four Meldrum conditions (any A);
* the simplified two conditions for abelian A and reduced fb (support in
  distinct right <b>-cosets);
* plain brute force over the whole product.

plus the structural bookkeeping around them: C_B(f,b), the support
permutation set, the coset-action exact sequence, the order formula
|C(fb)| = |A|^(#cosets) * |C_B(f,b)| for finite B, the projection
A wr B -> A wr (B/N) with its kernel, and the base-factoring search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import InputError, ResourceLimitError

BRUTE_SIZE_CAP = 100_000


class FiniteGroup:
    """A finite group given by its Cayley table on 0..n-1."""

    def __init__(self, name: str, table, names=None, validate: bool = True):
        self.name = name
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.names = tuple(names) if names else tuple(str(i) for i in range(self.order))
        if validate:
            self._validate()
        self.identity = self._find_identity()
        inverse = []
        for i in range(self.order):
            row = self.table[i]
            try:
                inverse.append(row.index(self.identity))
            except ValueError:
                raise InputError(f"element {i} has no inverse in the Cayley table")
        self.inverse_table = tuple(inverse)
        self.is_abelian = all(
            self.table[i][j] == self.table[j][i]
            for i in range(self.order)
            for j in range(i)
        )

    def _validate(self):
        n = self.order
        for row in self.table:
            if len(row) != n or any(not 0 <= x < n for x in row):
                raise InputError("Cayley table is not square over 0..n-1")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.table[self.table[i][j]][k] != self.table[i][self.table[j][k]]:
                        raise InputError("Cayley table is not associative")
        self._find_identity()

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(
                self.table[e][x] == x == self.table[x][e] for x in range(self.order)
            ):
                return e
        raise InputError("Cayley table has no identity")

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        return self.inverse_table[i]

    def order_of(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity:
            x = self.mul(x, i)
            k += 1
        return k

    def cyclic_subgroup(self, i: int) -> frozenset:
        out = {self.identity}
        x = i
        while x not in out:
            out.add(x)
            x = self.mul(x, i)
        return frozenset(out)

    def centralizer(self, i: int) -> frozenset:
        return frozenset(
            c for c in range(self.order) if self.mul(c, i) == self.mul(i, c)
        )

    def conjugate_in(self, x: int, y: int) -> bool:
        """Exhaustive conjugacy test inside the group."""
        return any(
            self.mul(self.mul(self.inv(t), x), t) == y for t in range(self.order)
        )

    def subgroup_closure(self, seeds: Iterable[int]) -> frozenset:
        out = {self.identity}
        frontier = list({*seeds})
        out.update(frontier)
        while frontier:
            new = []
            for x in frontier:
                for s in list(out):
                    for y in (self.mul(x, s), self.mul(s, x), self.inv(x)):
                        if y not in out:
                            out.add(y)
                            new.append(y)
            frontier = new
        return frozenset(out)

    def all_subgroups(self) -> list:
        subs = {frozenset({self.identity})}
        frontier = [frozenset({self.identity})]
        while frontier:
            new = []
            for H in frontier:
                for x in range(self.order):
                    if x in H:
                        continue
                    bigger = self.subgroup_closure(H | {x})
                    if bigger not in subs:
                        subs.add(bigger)
                        new.append(bigger)
            frontier = new
        return sorted(subs, key=lambda s: (len(s), sorted(s)))

    def is_normal(self, H: frozenset) -> bool:
        return all(
            self.mul(self.mul(g, h), self.inv(g)) in H
            for g in range(self.order)
            for h in H
        )

    def normal_subgroups(self) -> list:
        return [H for H in self.all_subgroups() if self.is_normal(H)]

    def to_cayley_json(self) -> dict:
        return {
            "order": self.order,
            "table": [list(row) for row in self.table],
            "names": list(self.names),
        }

    @classmethod
    def from_cayley_json(cls, data: dict, name: str = "custom") -> "FiniteGroup":
        if "table" not in data:
            raise InputError('Cayley JSON needs a "table" field')
        table = data["table"]
        if "order" in data and int(data["order"]) != len(table):
            raise InputError("declared order does not match the table")
        return cls(name, table, data.get("names"))

    @classmethod
    def from_cayley_csv(cls, text: str, name: str = "custom") -> "FiniteGroup":
        """n lines of n comma-separated indices."""
        try:
            table = [
                [int(cell) for cell in line.split(",")]
                for line in text.strip().splitlines()
                if line.strip()
            ]
        except ValueError as exc:
            raise InputError(f"Cayley CSV cell is not an integer: {exc}")
        return cls(name, table)


_CONSTRUCTOR_ORDER_CAP = 24


def cyclic(n: int) -> FiniteGroup:
    if not 1 <= n <= _CONSTRUCTOR_ORDER_CAP:
        raise InputError(f"cyclic group order must be in 1..{_CONSTRUCTOR_ORDER_CAP}")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(f"C{n}", table, [str(i) for i in range(n)], validate=False)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; element r^i s^e encoded as i + n*e."""
    if not 2 <= n or 2 * n > _CONSTRUCTOR_ORDER_CAP:
        raise InputError(f"dihedral group order 2n must be in 4..{_CONSTRUCTOR_ORDER_CAP}")

    def mul(x, y):
        i, e = x % n, x // n
        j, f = y % n, y // n
        # (r^i s^e)(r^j s^f) = r^(i + j or i - j) s^(e xor f)
        return ((i + j) % n if e == 0 else (i - j) % n) + n * (e ^ f)

    table = [[mul(x, y) for y in range(2 * n)] for x in range(2 * n)]
    names = [f"r{i}" for i in range(n)] + [f"sr{i}" for i in range(n)]
    return FiniteGroup(f"D{n}", table, names, validate=False)


def symmetric(n: int) -> FiniteGroup:
    import math

    if math.factorial(n) > _CONSTRUCTOR_ORDER_CAP:
        raise InputError(f"symmetric group order must be at most {_CONSTRUCTOR_ORDER_CAP}")
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [
        [index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms
    ]
    names = ["".join(map(str, p)) for p in perms]
    return FiniteGroup(f"S{n}", table, names, validate=False)


GROUP_CONSTRUCTORS = {"C": cyclic, "D": dihedral, "S": symmetric}


def named_group(name: str) -> FiniteGroup:
    """Parse group names like C4, D4, S3."""
    kind, num = name[:1].upper(), name[1:]
    if kind not in GROUP_CONSTRUCTORS or not num.isdigit():
        raise InputError(f"unknown group {name!r}; expected Cn, Dn or Sn")
    return GROUP_CONSTRUCTORS[kind](int(num))


class WreathProduct:
    """The restricted (here: finite) wreath product A wr B."""

    def __init__(self, A: FiniteGroup, B: FiniteGroup):
        self.A = A
        self.B = B
        self.size = A.order ** B.order * B.order
        self.identity = (tuple([A.identity] * B.order), B.identity)

    @property
    def name(self) -> str:
        return f"{self.A.name} wr {self.B.name}"

    def _check_brute(self):
        if self.size > BRUTE_SIZE_CAP:
            raise ResourceLimitError(
                f"|{self.name}| = {self.size} exceeds the brute-force cap "
                f"({BRUTE_SIZE_CAP})"
            )

    def elements(self):
        self._check_brute()
        for f in itertools.product(range(self.A.order), repeat=self.B.order):
            for b in range(self.B.order):
                yield (f, b)

    def functions(self):
        self._check_brute()
        yield from itertools.product(range(self.A.order), repeat=self.B.order)

    def mul(self, w1, w2):
        (f, b), (g, c) = w1, w2
        prod = tuple(
            self.A.mul(f[x], g[self.B.mul(b, x)]) for x in range(self.B.order)
        )
        return (prod, self.B.mul(b, c))

    def inv(self, w):
        f, b = w
        binv = self.B.inv(b)
        return (
            tuple(self.A.inv(f[self.B.mul(binv, x)]) for x in range(self.B.order)),
            binv,
        )

    def conjugate(self, w, u):
        return self.mul(self.mul(self.inv(u), w), u)

    def support(self, f) -> frozenset:
        return frozenset(x for x in range(self.B.order) if f[x] != self.A.identity)

    def b_coset(self, b: int, x: int) -> frozenset:
        """The right coset <b>x, i.e. the orbit of x under left multiplication."""
        out = set()
        y = x
        while y not in out:
            out.add(y)
            y = self.B.mul(b, y)
        return frozenset(out)

    def is_reduced(self, w) -> bool:
        f, b = w
        seen = set()
        for s in self.support(f):
            c = self.b_coset(b, s)
            if c in seen:
                return False
            seen.add(c)
        return True

    def brute_centralizer(self, w) -> frozenset:
        self._check_brute()
        return frozenset(
            u for u in self.elements() if self.mul(u, w) == self.mul(w, u)
        )

    def fbar(self, h, d: int, x: int) -> int:
        """Ordered product h(x) h(dx) ... h(d^(n-1) x) with n = ord(d)."""
        out = self.A.identity
        y = x
        for _ in range(self.B.order_of(d)):
            out = self.A.mul(out, h[y])
            y = self.B.mul(d, y)
        return out

    # ------------------------------------------------------------------
    # centralizer criteria

    def centralizer_meldrum(self, w) -> frozenset:
        """All gc satisfying the four commutation conditions for fb."""
        self._check_brute()
        f, b = w
        A, B = self.A, self.B
        bar = {x: self.fbar(f, b, x) for x in range(B.order)}
        out = []
        for c in B.centralizer(b):
            if not all(A.conjugate_in(bar[B.mul(c, x)], bar[x]) for x in range(B.order)):
                continue
            for g in self.functions():
                ok = all(
                    bar[B.mul(c, x)] == A.mul(A.mul(A.inv(g[x]), bar[x]), g[x])
                    for x in range(B.order)
                ) and all(
                    g[B.mul(b, x)]
                    == A.mul(A.mul(A.inv(f[x]), g[x]), f[B.mul(c, x)])
                    for x in range(B.order)
                )
                if ok:
                    out.append((g, c))
        return frozenset(out)

    def cplus(self, f, b: int) -> frozenset:
        """Elements whose translation preserves <b>-cosets of each level set."""
        B = self.B
        level_sets = {}
        for s in self.support(f):
            level_sets.setdefault(f[s], set()).add(s)
        coset_sets = {
            a: frozenset().union(*(self.b_coset(b, s) for s in pts))
            for a, pts in level_sets.items()
        }
        out = []
        for c in range(B.order):
            if all(
                frozenset(B.mul(c, y) for y in cset) == cset
                for cset in coset_sets.values()
            ):
                out.append(c)
        return frozenset(out)

    def cbfb(self, f, b: int) -> frozenset:
        return self.cplus(f, b) & self.B.centralizer(b)

    def sigma(self, f, b: int) -> frozenset:
        """Support permutations sigma with <b>f^-1(a) = <b>sigma(f^-1(a))
        for every nontrivial value a."""
        supp = sorted(self.support(f))
        level_sets = {}
        for s in supp:
            level_sets.setdefault(f[s], []).append(s)
        coset_union = {
            a: frozenset().union(*(self.b_coset(b, s) for s in pts))
            for a, pts in level_sets.items()
        }
        out = []
        for images in itertools.permutations(supp):
            sig = dict(zip(supp, images))
            if all(
                frozenset().union(*(self.b_coset(b, sig[s]) for s in pts))
                == coset_union[a]
                for a, pts in level_sets.items()
            ):
                out.append(tuple(images))
        return frozenset(out)

    def centralizer_abelian(self, w) -> frozenset:
        """The simplified criterion; needs abelian A and reduced fb."""
        self._check_brute()
        if not self.A.is_abelian:
            raise InputError("the simplified criterion needs an abelian base group")
        if not self.is_reduced(w):
            raise InputError("the simplified criterion needs a reduced element")
        f, b = w
        A, B = self.A, self.B
        out = []
        for c in self.cbfb(f, b):
            for g in self.functions():
                if all(
                    g[B.mul(b, x)]
                    == A.mul(A.mul(g[x], A.inv(f[x])), f[B.mul(c, x)])
                    for x in range(B.order)
                ):
                    out.append((g, c))
        return frozenset(out)

    # ------------------------------------------------------------------
    # normal forms and structure

    def reduce_element(self, w):
        """An A^B-conjugate of w whose support meets each right <b>-coset at
        most once, together with the conjugating function u (as (u, 1)).

        Along each <b>-orbit the values of f are pushed into the orbit's
        base point, where they accumulate to the orbit product.
        """
        f, b = w
        if not self.A.is_abelian:
            raise InputError("reduction needs an abelian base group")
        if b == self.B.identity:
            raise InputError("reduction needs b != 1")
        A, B = self.A, self.B
        u = [A.identity] * B.order
        done = set()
        for x in range(B.order):
            if x in done:
                continue
            orbit = [x]
            y = B.mul(b, x)
            while y != x:
                orbit.append(y)
                y = B.mul(b, y)
            done.update(orbit)
            # u(y_{j+1}) = u(y_j) f(y_j)^-1 for j >= 1 zeroes out all of the
            # orbit except the base point, which collects the orbit product
            for j in range(1, len(orbit)):
                u[orbit[(j + 1) % len(orbit)]] = A.mul(
                    u[orbit[j]], A.inv(f[orbit[j]])
                )
        uw = (tuple(u), B.identity)
        reduced = self.conjugate(w, uw)
        return reduced, uw

    def coset_action_report(self, f, b: int) -> dict:
        """Kernel and image of C_B(f,b) acting on the support cosets."""
        supp = sorted(self.support(f))
        C = self.cbfb(f, b)
        cosets = [self.b_coset(b, s) for s in supp]
        kernel = set()
        image = set()
        for c in C:
            # C_B(f,b) permutes the support cosets, so index() cannot fail
            perm = tuple(
                cosets.index(frozenset(self.B.mul(c, y) for y in cs))
                for cs in cosets
            )
            image.add(perm)
            if perm == tuple(range(len(supp))):
                kernel.add(c)
        sigma = self.sigma(f, b)
        sigma_perms = {
            tuple(supp.index(t) for t in images) for images in sigma
        }
        b_cyclic = self.B.cyclic_subgroup(b)
        return {
            "cbfb_order": len(C),
            "kernel": frozenset(kernel),
            "kernel_is_cyclic_b": frozenset(kernel) == b_cyclic,
            "image_order": len(image),
            "sigma_order": len(sigma),
            "orders_factor": len(C) == len(kernel) * len(image),
            "image_inside_sigma": image <= sigma_perms,
            "image_equals_sigma": image == sigma_perms,
        }

    def particular_solution(self, f, b: int, c: int):
        """A function g' with g'(bx) = g'(x) f(x)^-1 f(cx) for all x, or None.

        Exists for every c in C_B(f,b) when fb is reduced; built by
        propagating from an anchor along each <b>-orbit and checking the
        wrap-around.
        """
        A, B = self.A, self.B
        g = [None] * B.order
        for x in range(B.order):
            if g[x] is not None:
                continue
            orbit = [x]
            y = B.mul(b, x)
            while y != x:
                orbit.append(y)
                y = B.mul(b, y)
            g[x] = A.identity
            for j, z in enumerate(orbit):
                nxt = orbit[(j + 1) % len(orbit)]
                val = A.mul(A.mul(g[z], A.inv(f[z])), f[B.mul(c, z)])
                if g[nxt] is None:
                    g[nxt] = val
                elif g[nxt] != val:
                    return None
        return tuple(g)


@dataclass(frozen=True)
class CentralizerReport:
    element: tuple
    predicted: frozenset
    brute: frozenset
    match: bool
    order_b: int
    sigma_order: int
    cbfb_order: int
    centralizer_order: int
    order_identity: bool
    factorization_ok: bool

    def to_json(self):
        return {
            "match": self.match,
            "order_identity": self.order_identity,
            "factorization_ok": self.factorization_ok,
            "orders": {
                "cyclic_b": self.order_b,
                "sigma": self.sigma_order,
                "cbfb": self.cbfb_order,
                "centralizer": self.centralizer_order,
            },
        }


def check_centralizer_structure(ctx: WreathProduct, w) -> CentralizerReport:
    """Verify the finite-order centralizer description for reduced fb.

    Predicted members: for each c in C_B(f,b) a particular solution g'
    shifted by every function constant on right <b>-cosets; the order is
    then |A|^(#cosets) * |C_B(f,b)|.
    """
    if not ctx.A.is_abelian:
        raise InputError("the structure check needs an abelian base group")
    if not ctx.is_reduced(w):
        raise InputError("the structure check needs a reduced element")
    f, b = w
    A, B = ctx.A, ctx.B
    cosets = []
    seen = set()
    for x in range(B.order):
        if x not in seen:
            cs = ctx.b_coset(b, x)
            seen.update(cs)
            cosets.append(sorted(cs))
    predicted = set()
    factorization_ok = True
    for c in ctx.cbfb(f, b):
        gp = ctx.particular_solution(f, b, c)
        if gp is None:
            factorization_ok = False
            continue
        for values in itertools.product(range(A.order), repeat=len(cosets)):
            h = [A.identity] * B.order
            for v, cs in zip(values, cosets):
                for y in cs:
                    h[y] = v
            g = tuple(A.mul(h[x], gp[x]) for x in range(B.order))
            predicted.add((g, c))
    brute = ctx.brute_centralizer(w)
    cbfb = ctx.cbfb(f, b)
    expected_order = A.order ** len(cosets) * len(cbfb)
    return CentralizerReport(
        element=w,
        predicted=frozenset(predicted),
        brute=brute,
        match=frozenset(predicted) == brute,
        order_b=B.order_of(b),
        sigma_order=len(ctx.sigma(f, b)),
        cbfb_order=len(cbfb),
        centralizer_order=len(brute),
        order_identity=len(brute) == expected_order,
        factorization_ok=factorization_ok and frozenset(predicted) == brute,
    )


@dataclass(frozen=True)
class ProjectionReport:
    homomorphism_ok: bool
    kernel_matches: bool
    kernel_order: int
    expected_kernel_order: int

    @property
    def passed(self) -> bool:
        return self.homomorphism_ok and self.kernel_matches


def quotient_group(B: FiniteGroup, N: frozenset) -> tuple[FiniteGroup, dict]:
    """B/N for a normal subgroup N, plus the index-level projection map."""
    if not B.is_normal(N):
        raise InputError("the subgroup is not normal")
    cosets = []
    coset_of = {}
    for x in range(B.order):
        if x in coset_of:
            continue
        cs = frozenset(B.mul(x, n) for n in N)
        idx = len(cosets)
        cosets.append(cs)
        for y in cs:
            coset_of[y] = idx
    table = [
        [coset_of[B.mul(min(cosets[i]), min(cosets[j]))] for j in range(len(cosets))]
        for i in range(len(cosets))
    ]
    Q = FiniteGroup(f"{B.name}/N", table, validate=False)
    return Q, coset_of


def project_abelian(
    A: FiniteGroup, B: FiniteGroup, N: frozenset
) -> tuple[WreathProduct, WreathProduct, "callable", ProjectionReport]:
    """The projection A wr B -> A wr (B/N) that sums f over N-cosets.

    Returns source, target, the map, and the verification report
    (homomorphism on all pairs, kernel = {coset products trivial} x N).
    """
    if not A.is_abelian:
        raise InputError("the projection needs an abelian base group")
    Q, coset_of = quotient_group(B, N)
    src = WreathProduct(A, B)
    dst = WreathProduct(A, Q)
    members = [[y for y in range(B.order) if coset_of[y] == i] for i in range(Q.order)]

    def pi(w):
        f, b = w
        F = []
        for i in range(Q.order):
            v = A.identity
            for y in members[i]:
                v = A.mul(v, f[y])
            F.append(v)
        return (tuple(F), coset_of[b])

    src._check_brute()
    ok = True
    elems = list(src.elements())
    if len(elems) ** 2 > 10_000_000:
        raise ResourceLimitError("projection verification would need too many pairs")
    for w1 in elems:
        for w2 in elems:
            if pi(src.mul(w1, w2)) != dst.mul(pi(w1), pi(w2)):
                ok = False
                break
        if not ok:
            break
    kernel = frozenset(w for w in elems if pi(w) == dst.identity)
    expected = frozenset(
        (f, n)
        for f in src.functions()
        if all(
            _coset_product(A, f, members[i]) == A.identity for i in range(Q.order)
        )
        for n in N
    )
    report = ProjectionReport(
        homomorphism_ok=ok,
        kernel_matches=kernel == expected,
        kernel_order=len(kernel),
        expected_kernel_order=len(expected),
    )
    return src, dst, pi, report


def _coset_product(A: FiniteGroup, f, members) -> int:
    v = A.identity
    for y in members:
        v = A.mul(v, f[y])
    return v


def factor_through_base(
    A: FiniteGroup, B: FiniteGroup, K: frozenset, p: Optional[int] = None
) -> Optional[frozenset]:
    """Largest normal K_A <= A with (K_A)^B <= K and |A/K_A| a p-power.

    K is a set of elements of A wr B (normal subgroup, caller promise).
    Returns None when no such subgroup exists (no valid instance produces
    that outcome).
    """
    ctx = WreathProduct(A, B)
    best = None
    for KA in sorted(A.normal_subgroups(), key=len, reverse=True):
        if p is not None:
            index = A.order // len(KA)
            while index % p == 0:
                index //= p
            if index != 1:
                continue
        if len(KA) ** B.order > BRUTE_SIZE_CAP:
            raise ResourceLimitError("the base subgroup is too large to enumerate")
        ok = all(
            (f, B.identity) in K
            for f in itertools.product(sorted(KA), repeat=B.order)
        )
        if ok:
            best = KA
            break
    return best


def random_reduced_element(ctx: WreathProduct, rng) -> tuple:
    """A random reduced element with nontrivial f and b."""
    B, A = ctx.B, ctx.A
    while True:
        b = rng.randrange(1, B.order) if B.order > 1 else B.identity
        if b == B.identity:
            continue
        reps = []
        seen = set()
        for x in range(B.order):
            if x not in seen:
                cs = ctx.b_coset(b, x)
                seen.update(cs)
                reps.append(rng.choice(sorted(cs)))
        f = [A.identity] * B.order
        for r in reps:
            if rng.random() < 0.6:
                f[r] = rng.randrange(A.order)
        w = (tuple(f), b)
        if ctx.support(w[0]):
            return w
