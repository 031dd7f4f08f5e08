import random
from fractions import Fraction

import pytest

from fermifock.delta import (
    DeltaCoeffs,
    bracket,
    check_exp_delta_neg_comm,
    delta_apply,
    delta_power_over_factorial,
    exp_delta,
    t_number,
    t_number_alt,
    t_number_pairings,
)
from fermifock.fock import FockVector, HSpace, apply_mode, random_state

SPACE = HSpace(2)
E1, E2, F1, F2 = 0, 1, 2, 3
C01 = DeltaCoeffs.default()


def _random_coeffs(rng, max_level=3, nentries=3):
    entries = {}
    for _ in range(nentries):
        m, n = rng.randint(0, max_level), rng.randint(0, max_level)
        if m == n:
            continue
        val = Fraction(rng.randint(-3, 3))
        if val and (m, n) not in entries and (n, m) not in entries:
            entries[(m, n)] = val
    return DeltaCoeffs(entries)


def _random_gram_space(rng, M=2):
    while True:
        dim = 2 * M
        g = [[Fraction(0)] * dim for _ in range(dim)]
        for i in range(dim):
            for j in range(i, dim):
                g[i][j] = g[j][i] = Fraction(rng.randint(-2, 2))
        try:
            return HSpace(M, g)
        except ValueError:
            continue


def test_delta_coeffs_validation():
    c = DeltaCoeffs({(0, 1): Fraction(1)})
    assert c(0, 1) == 1 and c(1, 0) == -1 and c(2, 2) == 0
    with pytest.raises(ValueError):
        DeltaCoeffs({(1, 1): Fraction(1)})
    with pytest.raises(ValueError):
        DeltaCoeffs({(0, 1): Fraction(1), (1, 0): Fraction(1)})
    assert DeltaCoeffs.from_list([(0, 1, Fraction(2))])(1, 0) == -2


def test_delta_apply_short_words():
    assert delta_apply(SPACE, C01, FockVector.vacuum()) == {}
    assert delta_apply(SPACE, C01, FockVector.word(((E1, -1),))) == {}
    # two-mode word: single pair, sign (-1)^(1+2) = -1
    w = FockVector.word(((E1, -1), (F1, -2)))  # levels n = 0, 1
    got = delta_apply(SPACE, C01, w)
    assert got == {-2: FockVector.vacuum(-C01(0, 1) * SPACE.pair(E1, F1))}


def _delta_via_commutators(space, C, word):
    """Oracle: telescope the quadratic series through the word one slot at
    a time using its commutator with a single creation mode."""
    out = {}
    for p in range(len(word)):
        g, level = word[p]
        n = -level - 1
        suffix = FockVector.word(word[p + 1 :])
        for m in space_levels(C):
            c = C(m, n)
            if not c:
                continue
            hit = apply_mode(space, (g, m), suffix)
            if not hit:
                continue
            exp = -m - n - 1
            vec = FockVector({word[:p] + wd: cc * c for wd, cc in hit.terms.items()})
            cur = out.get(exp, FockVector())
            s = cur + vec
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
    return out


def space_levels(C):
    return C.levels()


def test_delta_apply_matches_commutator_oracle():
    rng = random.Random(61)
    for _ in range(25):
        C = _random_coeffs(rng)
        space = _random_gram_space(rng)
        r = rng.randint(2, 5)
        word = tuple((rng.randrange(space.dim), -rng.randint(1, 4)) for _ in range(r))
        got = delta_apply(space, C, FockVector.word(word))
        want = _delta_via_commutators(space, C, word)
        assert got == want


def test_delta_single_mode_commutator():
    # commuting past one creation mode leaves a one-sided mode series
    rng = random.Random(67)
    for _ in range(20):
        C = _random_coeffs(rng)
        space = _random_gram_space(rng)
        v = random_state(rng, space, 5)
        g = rng.randrange(space.dim)
        n = rng.randint(0, 3)
        mode = (g, -n - 1)
        lhs = {}
        for e, w in delta_apply(space, C, apply_mode(space, mode, v)).items():
            lhs[e] = w
        for e, w in delta_apply(space, C, v).items():
            cur = lhs.get(e, FockVector())
            s = cur - apply_mode(space, mode, w)
            if s:
                lhs[e] = s
            else:
                lhs.pop(e, None)
        rhs = {}
        for m in C.levels():
            c = C(m, n)
            if not c:
                continue
            hit = apply_mode(space, (g, m), v).scale(c)
            if hit:
                rhs[-m - n - 1] = rhs.get(-m - n - 1, FockVector()) + hit
        rhs = {e: w for e, w in rhs.items() if w}
        assert lhs == rhs


def test_t_number_base_and_worked_expansion():
    gens = [E1, F1, E2, F2]
    levels = [0, 1, 2, 3]
    rng = random.Random(71)
    for _ in range(10):
        C = _random_coeffs(rng)
        space = _random_gram_space(rng)
        b = lambda i, j: bracket(space, C, gens[i], levels[i], gens[j], levels[j])
        assert t_number(space, C, gens, levels, (0, 1)) == b(0, 1)
        four = t_number(space, C, gens, levels, (0, 1, 2, 3))
        assert four == b(0, 1) * b(2, 3) - b(0, 2) * b(1, 3) + b(0, 3) * b(1, 2)


def test_t_number_zero_coeffs():
    assert t_number(SPACE, DeltaCoeffs(), [E1, F1], [0, 1], (0, 1)) == 0


def test_t_number_rejects_odd_or_unsorted():
    with pytest.raises(ValueError):
        t_number(SPACE, C01, [E1, F1, E2], [0, 1, 2], (0, 1, 2))
    with pytest.raises(ValueError):
        t_number(SPACE, C01, [E1, F1], [0, 1], (1, 0))


def test_t_number_three_routes_agree():
    rng = random.Random(73)
    for _ in range(12):
        C = _random_coeffs(rng, max_level=4, nentries=5)
        space = _random_gram_space(rng)
        r = 8
        gens = [rng.randrange(space.dim) for _ in range(r)]
        levels = [rng.randint(0, 4) for _ in range(r)]
        for size in (2, 4, 6, 8):
            idx = tuple(sorted(rng.sample(range(r), size)))
            a = t_number(space, C, gens, levels, idx)
            b = t_number_alt(space, C, gens, levels, idx)
            c = t_number_pairings(space, C, gens, levels, idx)
            assert a == b == c


def test_exp_delta_vacuum_and_pair():
    assert exp_delta(SPACE, C01, FockVector.vacuum()) == {0: FockVector.vacuum()}
    word = ((E1, -1), (F1, -2))  # levels 0, 1
    got = exp_delta(SPACE, C01, FockVector.word(word))
    t12 = bracket(SPACE, C01, E1, 0, F1, 1)
    assert got == {
        0: FockVector.word(word),
        -2: FockVector.vacuum(-t12),
    }


def test_exp_delta_closed_form_matches_iterated_powers():
    rng = random.Random(79)
    for _ in range(12):
        C = _random_coeffs(rng)
        space = _random_gram_space(rng)
        r = rng.randint(0, 6)
        word = tuple((rng.randrange(space.dim), -rng.randint(1, 3)) for _ in range(r))
        v = FockVector.word(word)
        want = {}
        for t in range(r // 2 + 1):
            for e, w in delta_power_over_factorial(space, C, v, t).items():
                cur = want.get(e, FockVector())
                s = cur + w
                if s:
                    want[e] = s
                else:
                    want.pop(e, None)
        assert exp_delta(space, C, v) == want


def test_delta_nilpotency():
    rng = random.Random(83)
    for _ in range(10):
        C = _random_coeffs(rng)
        space = _random_gram_space(rng)
        r = rng.randint(0, 6)
        word = tuple((rng.randrange(space.dim), -rng.randint(1, 3)) for _ in range(r))
        v = FockVector.word(word)
        assert delta_power_over_factorial(space, C, v, r // 2 + 1) == {}


def test_delta_basis_independence():
    # e' = (e1, e1+e2), f' = (f1 - f2, f2) preserves the dual pairing
    C = DeltaCoeffs({(0, 1): Fraction(1), (0, 2): Fraction(-2)})
    prim_e = [[(Fraction(1), E1)], [(Fraction(1), E1), (Fraction(1), E2)]]
    prim_f = [[(Fraction(1), F1), (Fraction(-1), F2)], [(Fraction(1), F2)]]

    def apply_comb(comb, level, v):
        out = FockVector()
        for c, g in comb:
            out = out + apply_mode(SPACE, (g, level), v).scale(c)
        return out

    rng = random.Random(89)
    for _ in range(10):
        v = random_state(rng, SPACE, 6, nterms=3)
        want = delta_apply(SPACE, C, v)
        got = {}
        for i in range(2):
            for (m, n), val in C.entries.items():
                inner = apply_comb(prim_f[i], n, v)
                outer = apply_comb(prim_e[i], m, inner).scale(val)
                if outer:
                    e = -m - n - 1
                    cur = got.get(e, FockVector())
                    s = cur + outer
                    if s:
                        got[e] = s
                    else:
                        got.pop(e, None)
        assert got == want


def test_exp_delta_negative_commutator_check():
    rng = random.Random(97)
    samples = [random_state(rng, SPACE, 4) for _ in range(4)]
    report = check_exp_delta_neg_comm(SPACE, DeltaCoeffs(), E1, 0, samples, ((-4, 4), (-4, 4)))
    assert report["status"] == "pass"
    for m in (0, 1):
        report = check_exp_delta_neg_comm(SPACE, C01, E1, m, samples, ((-4, 4), (-4, 4)))
        assert report["status"] == "pass", report
    for _ in range(5):
        C = _random_coeffs(rng)
        space = _random_gram_space(rng)
        samples = [random_state(rng, space, 4) for _ in range(3)]
        report = check_exp_delta_neg_comm(
            space, C, rng.randrange(space.dim), rng.randint(0, 2), samples, ((-4, 4), (-4, 4))
        )
        assert report["status"] == "pass", report
