import random

import pytest

from grig.errors import InputError, ResourceLimitError
from grig.words import Word, first_level, invert, multiply, parse
from grig import cosets as cs
from grig import quotient as qt
from conftest import random_word


def test_coset_of_examples():
    assert cs.coset_of(Word("")) == 0
    assert cs.coset_of(Word("d")) == 1
    assert cs.coset_of(parse("ab")) == 15


def test_coset_of_all_representatives():
    for j, rep in enumerate(cs.COSET_REPS):
        assert cs.coset_of(Word(rep)) == j


def test_coset_of_matches_quotient_identification(q3):
    labels = cs.kcoset_labels_for_quotient(q3)
    for i, w in enumerate(qt.element_words(q3)):
        assert cs.coset_of(Word(w)) == int(labels[i])


def test_kcoset_mul_examples():
    for i in range(16):
        assert cs.kcoset_mul(0, i) == i
    assert cs.kcoset_mul(7, 7) == 0
    assert cs.kcoset_mul(1, 7) == cs.coset_of(parse("da"))


def test_kcoset_mul_matches_word_products():
    rng = random.Random(47)
    for _ in range(200):
        g, h = random_word(rng, 8), random_word(rng, 8)
        assert cs.kcoset_mul(cs.coset_of(g), cs.coset_of(h)) == cs.coset_of(
            multiply(g, h)
        )
        assert cs.kcoset_inv(cs.coset_of(g)) == cs.coset_of(invert(g))


def test_lift_examples():
    assert cs.lift(0, 8) == 1
    assert cs.lift(7, 1) == 9
    assert cs.lift(0, 1) is None


def test_lift_values_are_level_stabilizer_cosets():
    stab1_cosets = {z for z in range(16) if not Word(cs.COSET_REPS[z]).twisted}
    assert set(cs.LIFT_TABLE.values()) == stab1_cosets
    assert len(cs.LIFT_TABLE) == 32


def test_verify_lift_table_passes(q4):
    v = cs.verify_lift_table(4)
    assert v.passed
    assert len(v.witnessed) == 32
    assert not v.contradictions and not v.extraneous and not v.missing


def test_verify_lift_table_fault_injection(q4):
    corrupted = dict(cs.LIFT_TABLE)
    corrupted[(0, 8)] = 5  # truth is 1
    v = cs.verify_lift_table(4, table=corrupted)
    assert not v.passed
    assert any(entry == (0, 8) for entry, _, _ in v.contradictions)


def test_verify_lift_table_depth3(q3):
    v = cs.verify_lift_table(3)
    assert not v.contradictions
    assert not v.extraneous
    assert len(v.witnessed) <= 32


def test_schreier_dot_contains_all_nodes_and_edges():
    dot = cs.schreier_dot()
    assert dot.startswith("digraph")
    for i in range(16):
        assert f"z{i} " in dot
    assert dot.count("->") == 48


# ----------------------------------------------------------- the tower


def test_km_coset_of_examples():
    triv = cs.km_coset_of(Word(""), 2)
    assert triv == cs.km_identity(2)

    d1 = cs.km_coset_of(Word("d"), 1)
    assert d1.twist is False
    assert d1.children[0] == cs.KmCoset.of_base(0)
    assert d1.children[1] == cs.KmCoset.of_base(8)

    g = parse("ab")
    left, right, twisted = first_level(multiply(g, Word("a")))
    assert not twisted
    ab1 = cs.km_coset_of(g, 1)
    assert ab1.twist is True
    assert ab1.children == (
        cs.km_coset_of(left, 0),
        cs.km_coset_of(right, 0),
    )


def test_km_coset_guard():
    with pytest.raises(ResourceLimitError):
        cs.km_coset_of(Word("b"), 7)
    with pytest.raises(InputError):
        cs.km_coset_of(Word("b"), -1)


def test_km_mul_is_homomorphism():
    rng = random.Random(53)
    for _ in range(100):
        g, h = random_word(rng, 8), random_word(rng, 8)
        for m in (1, 2, 3):
            assert cs.km_mul(
                cs.km_coset_of(g, m), cs.km_coset_of(h, m)
            ) == cs.km_coset_of(multiply(g, h), m)


def test_km_identity_absorbs_and_inv_involutes():
    rng = random.Random(59)
    for _ in range(50):
        g = random_word(rng, 8)
        for m in (1, 2):
            d = cs.km_coset_of(g, m)
            e = cs.km_identity(m)
            assert cs.km_mul(d, e) == d
            assert cs.km_mul(e, d) == d
            assert cs.km_inv(cs.km_inv(d)) == d
            assert cs.km_mul(d, cs.km_inv(d)) == e


def test_km_mul_level_mismatch():
    with pytest.raises(InputError):
        cs.km_mul(cs.km_coset_of(Word("b"), 1), cs.km_coset_of(Word("b"), 2))


def test_descriptor_equality_is_coset_equality():
    # (ab)^16 is trivial, so it shares every tower coset with the identity
    g = parse("(ab)^16")
    for m in (0, 1, 2):
        assert cs.km_coset_of(g, m) == cs.km_identity(m)
    # (ab)^8 is nontrivial but lies in deep stabilizers; its K-coset is z0
    h = parse("(ab)^8")
    assert cs.km_coset_of(h, 0) == cs.KmCoset.of_base(0)


def test_descriptor_of_row_matches_km_coset_of(q4):
    rng = random.Random(61)
    for _ in range(60):
        g = random_word(rng, 8)
        row = qt.project(g, 4).images
        assert cs.descriptor_of_row(row, 4, 1) == cs.km_coset_of(g, 1)
        assert cs.descriptor_of_row(row, 4, 0) == cs.km_coset_of(g, 0)


def test_descriptor_realizability_enforced():
    with pytest.raises(InputError):
        cs.KmCoset.node(False, cs.KmCoset.of_base(0), cs.KmCoset.of_base(1))


def test_descriptor_json_roundtrip():
    d = cs.km_coset_of(parse("abadab"), 2)
    assert cs.KmCoset.from_json(d.to_json()) == d


def test_base_coset_projection():
    rng = random.Random(67)
    for _ in range(80):
        g = random_word(rng, 8)
        for m in (1, 2):
            assert cs.km_coset_of(g, m).base_coset() == cs.coset_of(g)


COMMUTATOR_COSETS = frozenset({0, 4})  # K and K(ad)^2


def commutator_class(z: int) -> frozenset:
    return frozenset(cs.kcoset_mul(c, z) for c in COMMUTATOR_COSETS)


def test_section_products_follow_commutator_classes():
    # for twisted g the section products move one step along the cycle
    # [G,G]a -> [G,G], [G,G]ab -> [G,G]ac, [G,G]ac -> [G,G]ad, [G,G]ad -> [G,G]b
    targets = {
        commutator_class(cs.coset_of(Word("a"))): commutator_class(0),
        commutator_class(cs.coset_of(parse("ab"))): commutator_class(
            cs.coset_of(parse("ac"))
        ),
        commutator_class(cs.coset_of(parse("ac"))): commutator_class(
            cs.coset_of(parse("ad"))
        ),
        commutator_class(cs.coset_of(parse("ad"))): commutator_class(
            cs.coset_of(Word("b"))
        ),
    }
    rng = random.Random(71)
    checked = 0
    while checked < 200:
        g = random_word(rng, 12)
        if not g.twisted:
            continue
        cls = commutator_class(cs.coset_of(g))
        want = targets[cls]
        g0, g1, _ = first_level(g)
        assert cs.coset_of(multiply(g0, g1)) in want
        assert cs.coset_of(multiply(g1, g0)) in want
        checked += 1
