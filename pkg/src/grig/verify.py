"""Table-verification suites.

Each suite re-derives one block of embedded or recursively computed data
from an independent brute-force source and reports pass/fail with details.
``verify_all`` strings them together and is the CI entry point behind
``grig verify all``.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .words import Word, parse
from . import quotient as qt
from . import cosets as cs
from . import conjugacy as cj
from . import wreath as wr


@dataclass
class VerifyReport:
    name: str
    passed: bool
    details: dict
    seconds: float

    def to_json(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "details": self.details,
        }


def _timed(name, fn) -> VerifyReport:
    t0 = time.perf_counter()
    passed, details = fn()
    return VerifyReport(name, passed, details, time.perf_counter() - t0)


# ---------------------------------------------------------------------------


def verify_lift_table(depth: int = 4) -> VerifyReport:
    def run():
        v = cs.verify_lift_table(depth)
        return v.passed, {
            "summary": v.summary(),
            "witnessed": len(v.witnessed),
            "table_size": len(cs.LIFT_TABLE),
            "missing": sorted(v.missing),
            "contradictions": list(v.contradictions),
            "extraneous": list(v.extraneous),
        }

    return _timed("lift-table", run)


def verify_schreier() -> VerifyReport:
    """Re-derive the Schreier transitions from the depth-3 quotient."""

    def run():
        labels = {}
        q = qt.enumerate_quotient(3)
        zl = cs.kcoset_labels_for_quotient(q)
        rep_ok = True
        mismatches = []
        for j, rep in enumerate(cs.COSET_REPS):
            lab = int(zl[q.index_of_word(Word(rep))])
            labels[j] = lab
            if lab != j:
                rep_ok = False
        for j, rep in enumerate(cs.COSET_REPS):
            for ch in "abd":
                expect = int(zl[q.index_of_word(Word(rep + ch))])
                got = cs.SCHREIER[j][ch]
                if expect != got:
                    mismatches.append((j, ch, got, expect))
        # the walk must agree with the group-theoretic coset for c too
        for j, rep in enumerate(cs.COSET_REPS):
            expect = int(zl[q.index_of_word(Word(rep + "c"))])
            if cs.coset_of(Word(rep + "c")) != expect:
                mismatches.append((j, "c", cs.coset_of(Word(rep + "c")), expect))
        return rep_ok and not mismatches, {
            "representatives_distinct": rep_ok,
            "mismatches": mismatches,
            "dot_nodes": 16,
        }

    return _timed("schreier", run)


BASE_CONG_EXPECTED = {
    ("a", "a"): frozenset({0, 3, 4, 7}),
    ("b", "b"): frozenset({0, 1, 8, 9}),
    ("c", "c"): frozenset({0, 1, 8, 9}),
    ("d", "d"): frozenset({0, 1, 4, 5, 8, 9, 12, 13}),
    ("", ""): frozenset(range(16)),
}


def verify_base_cong(engine: cj.ConjugacyEngine | None = None) -> VerifyReport:
    """q_exact on all pairs from {1, a, b, c, d} against the known sets."""

    def run():
        eng = engine or cj.DEFAULT_ENGINE
        failures = []
        for x, y in itertools.product(["", "a", "b", "c", "d"], repeat=2):
            got = frozenset(eng.q_exact(Word(x), Word(y)).witnesses.cosets)
            want = BASE_CONG_EXPECTED.get((x, y), frozenset())
            if got != want:
                failures.append((x or "1", y or "1", sorted(got), sorted(want)))
        return not failures, {"pairs": 25, "failures": failures}

    return _timed("base-cong", run)


def verify_q_agreement(engine: cj.ConjugacyEngine | None = None) -> VerifyReport:
    """Stabilization depth <= 6 for lengths <= 1 and <= 10 for lengths <= 2."""

    def run():
        eng = engine or cj.DEFAULT_ENGINE
        s1 = [Word(x) for x in ("", "a", "b", "c", "d")]
        s2 = s1 + [parse(w) for w in ("ab", "ba", "ac", "ca", "ad", "da")]
        worst1 = worst2 = 0
        failures = []
        for g, h in itertools.product(s1, repeat=2):
            d = eng.stabilization_depth(g, h, 14).depth
            worst1 = max(worst1, d)
            if d > 6:
                failures.append((g.letters, h.letters, d, 6))
        for g, h in itertools.product(s2, repeat=2):
            d = eng.stabilization_depth(g, h, 14).depth
            worst2 = max(worst2, d)
            if d > 10:
                failures.append((g.letters, h.letters, d, 10))
        return not failures, {
            "worst_depth_len1": worst1,
            "worst_depth_len2": worst2,
            "failures": failures,
        }

    return _timed("q-agreement", run)


def verify_structure() -> VerifyReport:
    """Index-16 of K, the commutator subgroup, and the stabilizer sandwich."""

    def run():
        q3 = qt.enumerate_quotient(3)
        q4 = qt.enumerate_quotient(4)
        k3 = qt.subgroup_closure(
            q3, [q3.index_of_word(Word(w)) for w in cs.K_GENERATOR_WORDS]
        )
        index_k = q3.order // len(k3)

        # derived subgroup of the quotient = image of the commutator subgroup
        comms = {
            q3.compose(
                q3.compose(q3.inverse(i), q3.inverse(j)), q3.compose(i, j)
            )
            for i in range(q3.order)
            for j in range(q3.order)
        }
        derived = qt.subgroup_closure(q3, comms)
        index_comm = q3.order // len(derived)
        adad = q3.index_of_word(parse("(ad)^2"))
        k_union = set(k3) | {q3.compose(i, adad) for i in k3}
        comm_matches = k_union == set(derived)

        k4 = qt.subgroup_closure(
            q4, [q4.index_of_word(Word(w)) for w in cs.K_GENERATOR_WORDS]
        )
        stab3_in_k = all(
            int(i) in k4 for i in np.flatnonzero(q4.stab_mask(3))
        )
        k_in_stab1 = not q4.twisted_mask()[sorted(k4)].any()

        passed = (
            index_k == 16
            and index_comm == 8
            and comm_matches
            and stab3_in_k
            and k_in_stab1
        )
        return passed, {
            "index_K": index_k,
            "index_commutator": index_comm,
            "commutator_equals_K_union_Kadad": comm_matches,
            "stab3_inside_K": stab3_in_k,
            "K_inside_stab1": k_in_stab1,
        }

    return _timed("structure", run)


WREATH_SUITE = (("C2", "C2"), ("C2", "C3"), ("C4", "C2"), ("S3", "C2"), ("S3", "C3"))


def verify_wreath(groups=None, workers: int = 1) -> VerifyReport:
    """Meldrum and simplified centralizers against brute force, for every
    element of each listed product (simplified only where A is abelian,
    on reduced elements)."""

    def run():
        suite = groups or WREATH_SUITE
        failures = []
        counts = {}
        for a_name, b_name in suite:
            A, B = wr.named_group(a_name), wr.named_group(b_name)
            ctx = wr.WreathProduct(A, B)
            elements = list(ctx.elements())

            def check(w):
                brute = ctx.brute_centralizer(w)
                if ctx.centralizer_meldrum(w) != brute:
                    return (ctx.name, w, "meldrum")
                if A.is_abelian and ctx.is_reduced(w):
                    if ctx.centralizer_abelian(w) != brute:
                        return (ctx.name, w, "abelian")
                return None

            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(check, elements))
            else:
                results = [check(w) for w in elements]
            bad = [r for r in results if r is not None]
            failures.extend(str(b) for b in bad)
            counts[ctx.name] = len(elements)
        return not failures, {"elements_checked": counts, "failures": failures}

    return _timed("wreath", run)


ALL_SUITES = ("lift-table", "schreier", "base-cong", "q-agreement", "structure", "wreath")


def verify_suite(name: str, workers: int = 1, groups=None) -> VerifyReport:
    if name == "lift-table":
        return verify_lift_table()
    if name == "schreier":
        return verify_schreier()
    if name == "base-cong":
        return verify_base_cong()
    if name == "q-agreement":
        return verify_q_agreement()
    if name == "structure":
        return verify_structure()
    if name == "wreath":
        return verify_wreath(groups=groups, workers=workers)
    raise InputError(f"unknown verification suite {name!r}")


def verify_all(workers: int = 1) -> list[VerifyReport]:
    return [verify_suite(name, workers=workers) for name in ALL_SUITES]
