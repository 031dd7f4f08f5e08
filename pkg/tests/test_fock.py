import random
from fractions import Fraction

import pytest

from fermifock.fock import (
    VACUUM,
    FockVector,
    HSpace,
    apply_mode,
    apply_modes,
    d_op,
    grading_op,
    parity,
    random_state,
    random_word,
    theta,
    weight,
    weight2,
)

SPACE = HSpace(2)
E1, E2, F1, F2 = 0, 1, 2, 3


def test_pairing_polarized_defaults():
    assert SPACE.pair(E1, F1) == 1
    assert SPACE.pair(E1, E2) == 0
    assert SPACE.pair(F1, F2) == 0
    rng = random.Random(7)
    for _ in range(20):
        a, b = rng.randrange(4), rng.randrange(4)
        assert SPACE.pair(a, b) == SPACE.pair(b, a)


def test_pairing_index_errors_and_bad_gram():
    with pytest.raises(IndexError):
        SPACE.pair(0, 4)
    with pytest.raises(ValueError):
        HSpace(1, [[0, 1], [2, 0]])  # asymmetric
    with pytest.raises(ValueError):
        HSpace(1, [[0, 0], [0, 0]])  # degenerate


def test_custom_gram_and_empty_space():
    sp = HSpace(1, [[2, 1], [1, 0]])
    assert sp.pair(0, 0) == 2
    empty = HSpace(0)
    assert empty.dim == 0


def test_weights_and_parity():
    assert weight(VACUUM) == 0
    assert weight(((E1, -1),)) == Fraction(1, 2)
    assert weight(((E1, -2), (F1, -1))) == 2  # 3/2 + 1/2
    assert weight2(((E1, -2), (F1, -1))) == 4
    assert parity(VACUUM) == 0
    assert parity(((E1, -1),)) == 1


def test_apply_mode_contraction():
    v = FockVector.word(((F1, -1),))
    out = apply_mode(SPACE, (E1, 0), v)
    assert out == FockVector.vacuum()


def test_apply_mode_annihilates_vacuum():
    assert apply_mode(SPACE, (E1, 0), FockVector.vacuum()) == FockVector()


def test_apply_mode_creation_is_unreduced():
    v = FockVector.word(((E1, -1),))
    out = apply_mode(SPACE, (E1, -1), v)
    assert out == FockVector.word(((E1, -1), (E1, -1)))


def test_apply_mode_cancelling_contractions():
    # two equal odd modes: the two contraction routes cancel
    v = FockVector.word(((F1, -1), (F1, -1)))
    assert apply_mode(SPACE, (E1, 0), v) == FockVector()


def test_apply_modes_identity_and_pairing():
    v = random_state(random.Random(3), SPACE, 4)
    assert apply_modes(SPACE, [], v) == v
    for a in range(4):
        for b in range(4):
            got = apply_modes(SPACE, [(a, 0), (b, -1)], FockVector.vacuum())
            assert got == FockVector.vacuum(SPACE.pair(a, b))


def test_apply_modes_matches_single_step_fold():
    rng = random.Random(11)
    for _ in range(25):
        v = random_state(rng, SPACE, 5)
        modes = []
        for _ in range(rng.randint(1, 4)):
            modes.append((rng.randrange(4), rng.randint(-3, 2)))
        folded = v
        for m in reversed(modes):
            folded = apply_mode(SPACE, m, folded)
        assert apply_modes(SPACE, modes, v) == folded


def test_positive_modes_anticommute():
    rng = random.Random(5)
    for _ in range(40):
        v = random_state(rng, SPACE, 8)
        a, b = rng.randrange(4), rng.randrange(4)
        m, n = rng.randint(0, 3), rng.randint(0, 3)
        lhs = apply_modes(SPACE, [(a, m), (b, n)], v) + apply_modes(SPACE, [(b, n), (a, m)], v)
        assert lhs == FockVector()


def test_mixed_anticommutator_is_pairing_scalar():
    rng = random.Random(6)
    for _ in range(40):
        v = random_state(rng, SPACE, 6)
        a, b = rng.randrange(4), rng.randrange(4)
        m, n = rng.randint(0, 2), rng.randint(0, 2)
        lhs = apply_modes(SPACE, [(a, m), (b, -n - 1)], v) + apply_modes(
            SPACE, [(b, -n - 1), (a, m)], v
        )
        expected = v.scale(SPACE.pair(a, b)) if m == n else FockVector()
        assert lhs == expected


def test_weight_shift_of_modes():
    rng = random.Random(9)
    for _ in range(30):
        word = random_word(rng, SPACE, 6)
        v = FockVector.word(word)
        n = rng.randint(-3, 3)
        out = apply_mode(SPACE, (rng.randrange(4), n), v)
        for w in out.terms:
            assert weight2(w) == weight2(word) + (-2 * n - 1)


def test_theta_involution_and_sign_rule():
    assert theta(FockVector.vacuum()) == FockVector.vacuum()
    v1 = FockVector.word(((E1, -1),))
    assert theta(v1) == v1.scale(-1)
    rng = random.Random(2)
    for _ in range(20):
        v = random_state(rng, SPACE, 6, nterms=3)
        assert theta(theta(v)) == v


def test_theta_anticommutes_with_single_modes():
    rng = random.Random(4)
    for _ in range(30):
        v = random_state(rng, SPACE, 6)
        mode = (rng.randrange(4), rng.randint(-3, 2))
        assert theta(apply_mode(SPACE, mode, v)) == apply_mode(SPACE, mode, theta(v)).scale(-1)


def test_d_op_examples():
    assert d_op(FockVector.vacuum()) == FockVector()
    assert d_op(FockVector.word(((E1, -1),))) == FockVector.word(((E1, -2),))
    two = FockVector.word(((E1, -1), (F1, -1)))
    assert d_op(two) == FockVector.word(((E1, -2), (F1, -1))) + FockVector.word(
        ((E1, -1), (F1, -2))
    )


def test_d_commutator_with_modes():
    # [D, h(m+1/2)] = -m h(m-1/2) as operators
    rng = random.Random(8)
    for _ in range(40):
        v = random_state(rng, SPACE, 6)
        g = rng.randrange(4)
        m = rng.randint(-3, 3)
        lhs = d_op(apply_mode(SPACE, (g, m), v)) - apply_mode(SPACE, (g, m), d_op(v))
        rhs = apply_mode(SPACE, (g, m - 1), v).scale(-m)
        assert lhs == rhs


def test_grading_op():
    assert grading_op(FockVector.vacuum()) == FockVector()
    v = FockVector.word(((E1, -1),))
    assert grading_op(v) == v.scale(Fraction(1, 2))
    a = FockVector.word(((E1, -2),), 3)
    b = FockVector.word(((F1, -1),), Fraction(1, 2))
    assert grading_op(a + b) == a.scale(Fraction(3, 2)) + b.scale(Fraction(1, 2))


def test_canonical_term_order():
    v = FockVector(
        {
            ((E2, -1), (E1, -1)): Fraction(1),
            ((E1, -1),): Fraction(1),
            ((E1, -2),): Fraction(1),
        }
    )
    words = [w for w, _ in v.items()]
    assert words == [((E1, -2),), ((E1, -1),), ((E2, -1), (E1, -1))]


def test_empty_space_collapses_to_vacuum_multiples():
    empty = HSpace(0)
    v = FockVector.vacuum(Fraction(3, 2))
    assert apply_modes(empty, [], v) == v
    assert set(random_state(random.Random(0), empty, 4).terms) == {()}
    assert grading_op(v) == FockVector()
