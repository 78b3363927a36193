import random

import pytest

from grig.errors import InputError, ResourceLimitError
from grig.words import Word, conjugate, first_level, parse
from grig import conjugacy as cj
from grig import cosets as cs
from grig import quotient as qt
from conftest import random_word

ENGINE = cj.DEFAULT_ENGINE


def k_indices(q):
    return qt.subgroup_closure(
        q, [q.index_of_word(Word(w)) for w in cs.K_GENERATOR_WORDS]
    )


# ----------------------------------------------------------------- q_fin


def test_q_fin_identity_pair_is_everything():
    for n in (3, 4, 6):
        assert ENGINE.q_fin(Word(""), Word(""), n).cosets == frozenset(range(16))


def test_q_fin_known_values():
    assert ENGINE.q_fin(Word("a"), Word("a"), 4).cosets == {0, 3, 4, 7}
    assert ENGINE.q_fin(Word("b"), Word("c"), 5).cosets == frozenset()


def test_q_fin_floor():
    with pytest.raises(InputError):
        ENGINE.q_fin(Word("a"), Word("a"), 2)


def test_q_fin_containment_chain():
    rng = random.Random(73)
    for _ in range(40):
        g, h = random_word(rng, 6), random_word(rng, 6)
        prev = None
        for n in range(3, 9):
            cur = ENGINE.q_fin(g, h, n).cosets
            if prev is not None:
                assert cur <= prev
            prev = cur


def test_q_fin_matches_brute_at_depth_4(q4):
    rng = random.Random(79)
    k4 = k_indices(q4)
    dec = qt.coset_decomposition(4, k4)
    to_label = {z: dec.label_of_word(Word(r)) for z, r in enumerate(cs.COSET_REPS)}
    for _ in range(60):
        g, h = random_word(rng, 6), random_word(rng, 6)
        mine = {to_label[z] for z in ENGINE.q_fin(g, h, 4).cosets}
        assert mine == qt.brute_Q(4, g, h, k4)


# --------------------------------------------------------------- q_exact


def test_q_exact_base_table():
    assert ENGINE.q_exact(Word("a"), Word("a")).witnesses.cosets == {0, 3, 4, 7}
    assert ENGINE.q_exact(Word("b"), Word("b")).witnesses.cosets == {0, 1, 8, 9}
    assert ENGINE.q_exact(Word("c"), Word("c")).witnesses.cosets == {0, 1, 8, 9}
    assert ENGINE.q_exact(Word("d"), Word("d")).witnesses.cosets == {
        0, 1, 4, 5, 8, 9, 12, 13,
    }
    assert ENGINE.q_exact(Word("a"), Word("d")).witnesses.cosets == frozenset()


def test_q_exact_depth_rule():
    assert ENGINE.q_exact(Word("a"), Word("b")).depth_used == 6
    assert ENGINE.q_exact(parse("ab"), parse("ba")).depth_used == 10
    assert ENGINE.q_exact(parse("abadac"), parse("ab")).depth_used == 4 * 4 + 10


def test_is_conjugate_reflexive_with_identity_witness():
    rng = random.Random(83)
    for _ in range(20):
        g = random_word(rng, 8)
        ok, witnesses = ENGINE.is_conjugate(g, g)
        assert ok and 0 in witnesses.cosets


def test_is_conjugate_finds_conjugator_coset():
    rng = random.Random(89)
    for _ in range(60):
        g, x = random_word(rng, 8), random_word(rng, 8)
        h = conjugate(g, x)
        ok, witnesses = ENGINE.is_conjugate(g, h)
        assert ok
        assert cs.coset_of(x) in witnesses.cosets


def test_is_conjugate_negative_pair():
    ok, witnesses = ENGINE.is_conjugate(Word("b"), Word("c"))
    assert not ok and not witnesses.cosets


def test_witness_cosets_pass_depth4_necessary_condition(q4):
    rng = random.Random(97)
    k4 = k_indices(q4)
    dec = qt.coset_decomposition(4, k4)
    to_label = {z: dec.label_of_word(Word(r)) for z, r in enumerate(cs.COSET_REPS)}
    for _ in range(25):
        g, x = random_word(rng, 6), random_word(rng, 6)
        h = conjugate(g, x)
        brute = qt.brute_Q(4, g, h, k4)
        for z in ENGINE.q_exact(g, h).witnesses.cosets:
            assert to_label[z] in brute


def test_q_exact_symmetry():
    rng = random.Random(101)
    for _ in range(40):
        g, h = random_word(rng, 6), random_word(rng, 6)
        fwd = ENGINE.q_exact(g, h).witnesses.cosets
        bwd = ENGINE.q_exact(h, g).witnesses.cosets
        assert bwd == {cs.kcoset_inv(z) for z in fwd}


def test_q_exact_conjugation_invariance():
    rng = random.Random(103)
    for _ in range(30):
        g, h, w = random_word(rng, 5), random_word(rng, 5), random_word(rng, 5)
        assert bool(ENGINE.q_exact(g, h).conjugate) == bool(
            ENGINE.q_exact(conjugate(g, w), h).conjugate
        )


def test_fresh_engine_agrees_with_default():
    eng = cj.ConjugacyEngine(memo_capacity=64)
    for g, h in ((Word("d"), Word("d")), (parse("abad"), parse("daba"))):
        assert eng.q_exact(g, h).witnesses == ENGINE.q_exact(g, h).witnesses


# ------------------------------------------------------------- the tower


def test_q_exact_km_level0_is_q_exact():
    g, h = parse("ab"), parse("ba")
    assert ENGINE.q_exact_km(g, h, 0).witnesses == ENGINE.q_exact(g, h).witnesses


def test_q_exact_km_identity_pair_is_whole_quotient():
    res = ENGINE.q_exact_km(Word(""), Word(""), 1)
    assert len(res.witnesses.cosets) == 64  # the index of the level-1 subgroup


def test_q_exact_km_level_guard():
    with pytest.raises(ResourceLimitError):
        ENGINE.q_exact_km(Word("b"), Word("b"), 9)


def test_q_exact_km_within_finite_depth_approximation(q4):
    # Q^{K_1}(g,h) is contained in the depth-4 brute approximation Q^{K_1}_4
    rng = random.Random(107)
    for _ in range(15):
        g, h = random_word(rng, 3), random_word(rng, 3)
        mine = ENGINE.q_exact_km(g, h, 1).witnesses.cosets
        sols = qt.solve_conjugators(q4, g, h)
        brute = {cs.descriptor_of_row(q4.elements[i], 4, 1) for i in sols}
        assert set(mine) <= brute


def test_km_project_compatible_with_words():
    rng = random.Random(211)
    for _ in range(60):
        g = random_word(rng, 8)
        for m in (1, 2, 3):
            assert cs.km_project(cs.km_coset_of(g, m)) == cs.km_coset_of(g, m - 1)


def test_q_exact_km_projects_between_levels():
    # both levels are images of the same conjugator set, so projecting the
    # finer coset set yields the coarser one exactly
    rng = random.Random(223)
    for _ in range(12):
        g, h = random_word(rng, 3), random_word(rng, 3)
        lvl1 = set(ENGINE.q_exact_km(g, h, 1).witnesses.cosets)
        lvl2 = set(ENGINE.q_exact_km(g, h, 2).witnesses.cosets)
        assert {cs.km_project(d) for d in lvl2} == lvl1
        assert {d.base_coset() for d in lvl1} == set(
            ENGINE.q_exact(g, h).witnesses.cosets
        )


def brute_km2_descriptors(q5, g, h):
    """Level-2 coset descriptors of every depth-5 conjugator, after a
    vectorized dedup (the descriptor only depends on the twist bit and the
    two depth-4 section rows)."""
    import numpy as np

    sols = qt.solve_conjugators(q5, g, h)
    if sols.size == 0:
        return set()
    rows = q5.elements[sols].astype(np.int64)
    tw = rows[:, 0] >= 16
    shifted = np.where(tw[:, None], np.roll(rows, 16, axis=1), rows)
    left, right = shifted[:, :16].copy(), shifted[:, 16:] - 16
    combos = np.unique(
        np.concatenate([tw[:, None].astype(np.int64), left, right], axis=1), axis=0
    )
    out = set()
    for c in combos:
        twisted = bool(c[0])
        l_row, r_row = c[1:17].astype(np.uint8), c[17:].astype(np.uint8)
        out.add(
            cs.KmCoset.node(
                twisted,
                cs.descriptor_of_row(l_row, 4, 1),
                cs.descriptor_of_row(r_row, 4, 1),
            )
        )
    return out


def test_q_exact_km_level2_against_depth5_brute(q5):
    # depth 5 is the exact floor for level-2 membership, so the brute set
    # is the depth-5 approximation: an exact superset that projects onto
    # the same level-1 sets
    rng = random.Random(227)
    for _ in range(8):
        g, h = random_word(rng, 3), random_word(rng, 3)
        mine = set(ENGINE.q_exact_km(g, h, 2).witnesses.cosets)
        brute = brute_km2_descriptors(q5, g, h)
        assert mine <= brute
        assert {cs.km_project(d) for d in brute} == {
            cs.km_project(d) for d in mine
        } == set(ENGINE.q_exact_km(g, h, 1).witnesses.cosets)


def test_q_exact_km_descriptor_realizability():
    rng = random.Random(109)
    for _ in range(10):
        g, x = random_word(rng, 4), random_word(rng, 4)
        h = conjugate(g, x)
        res = ENGINE.q_exact_km(g, h, 1)
        assert res.conjugate
        assert cs.km_coset_of(x, 1) in res.witnesses.cosets
        for d in res.witnesses.cosets:
            assert cs.lift(d.children[0].base_coset(), d.children[1].base_coset()) is not None


# --------------------------------------------- conjugacy inside subgroups


def test_subgroup_whole_group_reduces_to_plain_conjugacy():
    gens = [Word(x) for x in "abcd"]
    rng = random.Random(113)
    for _ in range(20):
        g, h = random_word(rng, 6), random_word(rng, 6)
        sub = ENGINE.is_conjugate_in_subgroup(g, h, gens, 0)
        assert sub.conjugate == ENGINE.q_exact(g, h).conjugate


STAB1_GENS = [parse(w) for w in ("b", "c", "d", "aba", "aca", "ada")]


def test_subgroup_image_of_level_stabilizer():
    image = ENGINE.subgroup_image(STAB1_GENS, 0)
    assert {d.base for d in image} == {0, 1, 4, 5, 8, 9, 12, 13}


def test_conjugacy_in_level_stabilizer():
    # b and aba are conjugate in the whole group (by a), but every witness
    # coset of the pair is twisted, so they are not conjugate in Stab(1)
    g, h = Word("b"), parse("aba")
    assert ENGINE.q_exact(g, h).conjugate
    res = ENGINE.is_conjugate_in_subgroup(g, h, STAB1_GENS, 0)
    assert res.conjugate is False
    # consistency with the exhaustive finite-depth view: no untwisted coset
    # ever conjugates b to aba modulo any stabilizer
    untwisted = {z for z in range(16) if not Word(cs.COSET_REPS[z]).twisted}
    for n in (4, 6, 8):
        assert not (ENGINE.q_fin(g, h, n).cosets & untwisted)


def test_conjugacy_in_level_stabilizer_brute(q5):
    # exhaustive depth-5 search: no element of Stab(1) conjugates b to aba
    sols = qt.solve_conjugators(q5, Word("b"), parse("aba"))
    assert sols.size > 0
    assert bool(q5.twisted_mask()[sols].all())


def test_disjoint_case_false_for_every_subgroup():
    g, h = Word("b"), Word("c")
    for m in (0, 1):
        res = ENGINE.is_conjugate_in_subgroup(g, h, STAB1_GENS, m)
        assert not res.conjugate


def test_subgroup_image_cap():
    eng = cj.ConjugacyEngine(set_size_cap=4)
    with pytest.raises(ResourceLimitError):
        eng.subgroup_image([Word(x) for x in "abcd"], 1)


# -------------------------------------------------------- splitting trees


def test_splitting_tree_mismatched_root_is_leaf():
    t = ENGINE.build_splitting_tree(Word("a"), Word("b"), 5)
    assert t.case == "leaf" and t.children == ()


def test_splitting_tree_case1_children():
    t = ENGINE.build_splitting_tree(Word("b"), Word("b"), 5)
    assert t.case == "plain"
    labels = [(c.depth_label, c.g.letters, c.h.letters) for c in t.children]
    assert labels == [
        (4, "a", "a"), (4, "c", "c"), (4, "a", "c"), (4, "c", "a"),
    ]


def test_splitting_tree_depth_bound():
    rng = random.Random(127)
    for _ in range(20):
        g, h = random_word(rng, 6), random_word(rng, 6)
        m = rng.randint(3, 9)
        t = ENGINE.build_splitting_tree(g, h, m)
        assert t.depth() <= m - 3


def test_splitting_tree_root_depth_guard():
    with pytest.raises(InputError):
        ENGINE.build_splitting_tree(Word("b"), Word("b"), 2)


def eval_tree(node: cj.SplitNode) -> int:
    """Recompute the coset sets along a splitting tree, independently of
    the engine's own recursion order."""
    if node.case == "leaf":
        if node.depth_label <= 3:
            return ENGINE.q_fin_mask(node.g, node.h, 3)
        return 0
    if node.case == "plain":
        A, B, C, D = (eval_tree(c) for c in node.children)
        out = 0
        for p in range(16):
            if not A & (1 << p):
                continue
            for q in range(16):
                if B & (1 << q):
                    z = cs.lift(p, q)
                    if z is not None:
                        out |= 1 << z
        for beta in range(16):
            if not C & (1 << beta):
                continue
            for alpha in range(16):
                if D & (1 << alpha):
                    z = cs.lift(beta, alpha)
                    if z is not None:
                        out |= 1 << cs.kcoset_mul(z, cs.A_COSET)
        return out
    P, Q = (eval_tree(c) for c in node.children)
    g0, g1, _ = first_level(node.g)
    h1 = first_level(node.h)[1]
    zg0, zg1, zh1 = cs.coset_of(g0), cs.coset_of(g1), cs.coset_of(h1)
    out = 0
    for x0 in range(16):
        if P & (1 << x0):
            x1 = cs.kcoset_mul(cs.kcoset_mul(cs.kcoset_inv(zg1), x0), zh1)
            z = cs.lift(x0, x1)
            if z is not None:
                out |= 1 << z
    for x0 in range(16):
        if Q & (1 << x0):
            x1 = cs.kcoset_mul(cs.kcoset_mul(cs.kcoset_inv(zg0), x0), zh1)
            z = cs.lift(x1, x0)
            if z is not None:
                out |= 1 << cs.kcoset_mul(z, cs.A_COSET)
    return out


def test_splitting_tree_evaluation_reproduces_q_fin():
    rng = random.Random(131)
    for _ in range(25):
        g, h = random_word(rng, 6), random_word(rng, 6)
        m = rng.randint(4, 8)
        t = ENGINE.build_splitting_tree(g, h, m)
        assert eval_tree(t) == ENGINE.q_fin_mask(g, h, m)


def test_export_dot():
    t = ENGINE.build_splitting_tree(Word("b"), Word("b"), 4)
    dot = cj.export_dot(t)
    assert dot.startswith("digraph")
    assert '(4; b, b)' in dot
    assert dot.count("->") == len(list(t.walk())) - 1


# ----------------------------------------------------------- stabilization


def test_stabilization_depths():
    assert ENGINE.stabilization_depth(Word("a"), Word("a"), 14).depth <= 4
    assert ENGINE.stabilization_depth(Word("d"), Word("d"), 14).depth <= 6
    rng = random.Random(137)
    for _ in range(20):
        g, h = random_word(rng, 2), random_word(rng, 2)
        rep = ENGINE.stabilization_depth(g, h, 14)
        assert rep.depth <= 10 and rep.within_bound


def test_stabilization_floor():
    with pytest.raises(InputError):
        ENGINE.stabilization_depth(Word("a"), Word("a"), 3)
