"""Normal ordering, vertex operators, and the structural identity checks.

A state u = h_1(-m_1-1/2)...h_r(-m_r-1/2)|0> acts through the
normal-ordered product of the divided-derivative generating series
h_i^(m_i)(x).  Coefficient extraction expands each factor into modes,
splits every factor into its creation/annihilation part (a 2-shuffle with
its permutation sign), and delegates the mode action to the Fock module.
All series values are exact inside an explicitly certified exponent box;
nothing is approximated, and comparisons refuse cells outside the box.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, List, NamedTuple, Sequence, Tuple

from .fock import FockVector, HSpace, Mode, Word, d_op, grading_op, weight2
from .laurent import Box
from .scalars import binom

Cell = Tuple[int, ...]

# a factor is (generator, divided-derivative order, variable slot)
Factor = Tuple[int, int, int]


class Shuffle(NamedTuple):
    """A 2-shuffle: two complementary increasing sequences in {1..r}."""

    left: Tuple[int, ...]
    right: Tuple[int, ...]
    sign: int


def _shuffle_sign(left_positions: Sequence[int]) -> int:
    """Permutation parity of the shuffle with 1-based left block positions."""
    inv = sum(p - t for t, p in enumerate(left_positions, start=1))
    return -1 if inv & 1 else 1


def enumerate_shuffles(r: int, eta: int) -> List[Shuffle]:
    """All C(r, eta) 2-shuffles splitting {1..r} into blocks of size eta, r-eta."""
    if not 0 <= eta <= r:
        raise ValueError("block size out of range")
    out = []
    universe = range(1, r + 1)
    for left in combinations(universe, eta):
        right = tuple(p for p in universe if p not in left)
        out.append(Shuffle(left, right, _shuffle_sign(left)))
    return out


def normal_order_modes(modes: Sequence[Mode]) -> Tuple[int, Tuple[Mode, ...]]:
    """Stable split of a mode product: negative levels left, sign attached.

    The sign is the parity of the unique 2-shuffle realizing the split;
    internal orders on each side are preserved.
    """
    neg_positions = [i + 1 for i, m in enumerate(modes) if m[1] < 0]
    sign = _shuffle_sign(neg_positions)
    neg = tuple(m for m in modes if m[1] < 0)
    pos = tuple(m for m in modes if m[1] >= 0)
    return sign, neg + pos


def series_into(
    space: HSpace,
    factors: Sequence[Factor],
    vec: FockVector,
    intervals: Sequence[Tuple[int, int]],
    table: Dict[Cell, Dict[Word, Fraction]],
    scale=1,
) -> None:
    """Accumulate a normal-ordered factor product applied to vec into table.

    Factor (g, m, var) stands for h_g^(m)(z_var); cells (one exponent slot
    per variable) are complete on the given closed intervals.  Path
    coefficients stay integer until the final scale-in of each target
    word's coefficient.

    Termination: annihilation modes must contract against creation modes
    already present in vec, which pins their levels; creation levels are
    capped by the upper window edges since each contributes exponent
    n - m >= 0 (the divided derivative kills n < m).
    """
    nv = len(intervals)
    los = tuple(lo for lo, _ in intervals)
    his = tuple(hi for _, hi in intervals)
    pair = space.pair
    # a factor may charge its exponent to several slots at once (used by
    # re-centered evaluations to carry joint window budgets)
    norm = tuple(
        (g, m, (var,) if isinstance(var, int) else tuple(var)) for g, m, var in factors
    )
    r = len(norm)

    for word_v, cv in vec.terms.items():
        cv = cv * scale
        if not cv:
            continue
        for mask in range(1 << r):
            cre = [norm[i] for i in range(r) if mask >> i & 1]
            ann = [norm[i] for i in range(r) if not mask >> i & 1]
            sign = _shuffle_sign([i + 1 for i in range(r) if mask >> i & 1])
            ncre = len(cre)
            # annihilation stage: rightmost factor acts first; a contraction
            # at word position idx fixes the mode level and carries (-1)^idx.
            # Totals above hi can only be pruned once no annihilator remains
            # at that slot (annihilators push down, creations push up).
            states = [(word_v, sign, (0,) * nv)]
            for pos in range(len(ann) - 1, -1, -1):
                gen, m, slots = ann[pos]
                open_slots = set()
                for f in ann[:pos]:
                    open_slots.update(f[2])
                closed = [s for s in slots if s not in open_slots]
                nxt = []
                for w, c, exps in states:
                    psign = 1
                    for idx, (g2, level) in enumerate(w):
                        p = pair(gen, g2)
                        if p:
                            coeff = binom(level, m)  # C(-n-1, m) with n = -level-1
                            if coeff:
                                delta = level - m  # -n-m-1
                                if len(slots) == 1:
                                    s0 = slots[0]
                                    ev = exps[s0] + delta
                                    if closed and ev > his[s0]:
                                        psign = -psign
                                        continue
                                    e2 = exps[:s0] + (ev,) + exps[s0 + 1 :]
                                else:
                                    es = list(exps)
                                    for s in slots:
                                        es[s] += delta
                                    if any(es[s] > his[s] for s in closed):
                                        psign = -psign
                                        continue
                                    e2 = tuple(es)
                                nxt.append(
                                    (w[:idx] + w[idx + 1 :], c * p * psign * coeff, e2)
                                )
                        psign = -psign
                states = nxt
                if not states:
                    break
            if not states:
                continue
            # creation stage: levels n = e + m with e >= 0, coefficient C(n, m)
            for w, c, exps in states:
                if any(exps[i] > his[i] for i in range(nv)):
                    continue
                stack = [(0, (), c, exps)]
                while stack:
                    t, prefix, cc, exps_t = stack.pop()
                    if t == ncre:
                        if all(los[i] <= exps_t[i] for i in range(nv)):
                            row = table.setdefault(exps_t, {})
                            word = prefix + w
                            s = row.get(word, 0) + cv * cc
                            if s:
                                row[word] = s
                            else:
                                row.pop(word, None)
                        continue
                    gen, m, slots = cre[t]
                    budget = min(his[s] - exps_t[s] for s in slots)
                    for e in range(budget + 1):
                        n = e + m
                        if len(slots) == 1:
                            s0 = slots[0]
                            e2 = exps_t[:s0] + (exps_t[s0] + e,) + exps_t[s0 + 1 :]
                        else:
                            es = list(exps_t)
                            for s in slots:
                                es[s] += e
                            e2 = tuple(es)
                        stack.append(
                            (t + 1, prefix + ((gen, -n - 1),), cc * binom(n, m), e2)
                        )


def wrap_table(table: Dict[Cell, Dict[Word, Fraction]]) -> Dict[Cell, FockVector]:
    out: Dict[Cell, FockVector] = {}
    for cell, row in table.items():
        if row:
            fv = FockVector.__new__(FockVector)
            fv.terms = row
            out[cell] = fv
    return out


def ordered_factor_series(
    space: HSpace,
    factors: Sequence[Factor],
    vec: FockVector,
    intervals: Sequence[Tuple[int, int]],
) -> Dict[Cell, FockVector]:
    """Windowed grid of a normal-ordered factor product applied to vec."""
    table: Dict[Cell, Dict[Word, Fraction]] = {}
    series_into(space, factors, vec, intervals, table)
    return wrap_table(table)


class WindowedSeries:
    """Exact coefficients of a formal series inside a certified box."""

    __slots__ = ("window", "coeffs")

    def __init__(self, window: Box, coeffs: Dict[Cell, FockVector] | None = None):
        self.window = window
        self.coeffs = {}
        if coeffs:
            for cell, v in coeffs.items():
                if v:
                    if not window.contains(cell):
                        raise ValueError(f"cell {cell} outside certified window")
                    self.coeffs[tuple(cell)] = v

    def coefficient(self, cell: Cell) -> FockVector:
        if not self.window.contains(tuple(cell)):
            raise ValueError(f"cell {cell} outside certified window {self.window}")
        return self.coeffs.get(tuple(cell), FockVector())

    def __eq__(self, other):
        return (
            isinstance(other, WindowedSeries)
            and self.window == other.window
            and self.coeffs == other.coeffs
        )

    def compare_on(self, other: "WindowedSeries", box: Box | None = None):
        """Cells of disagreement within the (intersected) certified region."""
        region = self.window.intersect(other.window)
        if box is not None:
            region = region.intersect(box)
        bad = []
        for cell in set(self.coeffs) | set(other.coeffs):
            if region.contains(cell) and self.coeffs.get(cell, FockVector()) != other.coeffs.get(
                cell, FockVector()
            ):
                bad.append(cell)
        return sorted(bad)


def _word_factors(word: Word, var: int = 0) -> Tuple[Factor, ...]:
    return tuple((g, -level - 1, var) for g, level in word)


def _as_vector(u) -> FockVector:
    if isinstance(u, FockVector):
        return u
    return FockVector.word(tuple(u))


def y_series(space: HSpace, u, v, lo: int, hi: int, var: str = "x") -> WindowedSeries:
    """Windowed coefficients of the vertex operator of u acting on v."""
    u = _as_vector(u)
    v = _as_vector(v)
    table: Dict[Cell, Dict[Word, Fraction]] = {}
    for word, c in u.terms.items():
        series_into(space, _word_factors(word), v, ((lo, hi),), table, scale=c)
    return WindowedSeries(Box((var,), ((lo, hi),)), wrap_table(table))


def y_coeff(space: HSpace, u, k: int, v) -> FockVector:
    """The exact coefficient of x^k in the vertex operator of u acting on v."""
    return y_series(space, u, v, k, k).coefficient((k,))


def product_series(space: HSpace, u1, u2, v, box: Box) -> WindowedSeries:
    """Coefficients of x^k1 y^k2 in the two-operator product acting on v."""
    (lo1, hi1), (lo2, hi2) = box.intervals
    inner = y_series(space, u2, v, lo2, hi2)
    acc: Dict[Cell, FockVector] = {}
    for (k2,), w in inner.coeffs.items():
        outer = y_series(space, u1, w, lo1, hi1)
        for (k1,), vec in outer.coeffs.items():
            acc[(k1, k2)] = vec
    return WindowedSeries(box, acc)


def iterate_series(space: HSpace, u1, u2, v, box: Box) -> WindowedSeries:
    """Coefficients of x0^k1 x2^k2 of the iterated vertex operator on v."""
    (lo1, hi1), (lo2, hi2) = box.intervals
    inner = y_series(space, u1, _as_vector(u2), lo1, hi1)
    acc: Dict[Cell, FockVector] = {}
    for (k1,), a in inner.coeffs.items():
        outer = y_series(space, a, v, lo2, hi2)
        for (k2,), vec in outer.coeffs.items():
            acc[(k1, k2)] = vec
    return WindowedSeries(box, acc)


def _wt2_max(v: FockVector) -> int:
    if not v.terms:
        return 0
    return max(weight2(w) for w in v.terms)


def check_weak_associativity(space: HSpace, u1_word: Word, u2, w, box: Box) -> dict:
    """Compare (x0+x2)^P * product against (x0+x2)^P * iterate on a box.

    The product side substitutes x0+x2 for the first operator variable,
    expanded in nonnegative powers of x2; P clears every pole in x0+x2
    and is independent of u2.
    """
    u2 = _as_vector(u2)
    w = _as_vector(w)
    u1 = FockVector.word(u1_word)
    r = len(u1_word)
    msum = sum(-level - 1 for _, level in u1_word)
    P = (_wt2_max(w) + 2 * msum + 2 * r) // 2

    t2min = -((_wt2_max(u2) + _wt2_max(w)) // 2)  # lower truncation in x2
    (lo1, hi1), (lo2, hi2) = box.intervals

    # product grid c[k1, k2]: only the diagonal band k1 = j1 + j2 - P - k2
    # with j1, j2 in the window and j2 >= k2 is ever read
    prod_grid: Dict[Tuple[int, int], FockVector] = {}
    for k2 in range(t2min, hi2 + 1):
        col = y_coeff(space, u2, k2, w)
        if not col:
            continue
        k1_lo = lo1 + max(lo2, k2) - P - k2
        k1_hi = hi1 + hi2 - P - k2
        if k1_lo > k1_hi:
            continue
        outer = y_series(space, u1, col, k1_lo, k1_hi)
        for (k1,), vec in outer.coeffs.items():
            prod_grid[(k1, k2)] = vec

    # iterate grid d[k1, k2], batched per k1 row
    iter_grid: Dict[Tuple[int, int], FockVector] = {}
    for k1 in range(lo1 - P, hi1 + 1):
        a = y_coeff(space, u1, k1, u2)
        if not a:
            continue
        row = y_series(space, a, w, lo2 - P, hi2)
        for (k2,), vec in row.coeffs.items():
            iter_grid[(k1, k2)] = vec

    mismatches = []
    seen_nonzero = False
    for j1 in range(lo1, hi1 + 1):
        for j2 in range(lo2, hi2 + 1):
            total = j1 + j2 - P
            lhs = FockVector()
            for k2 in range(t2min, j2 + 1):
                c = prod_grid.get((total - k2, k2))
                if c:
                    lhs = lhs + c.scale(binom(total - k2 + P, total - k2 + P - j1))
            rhs = FockVector()
            for i in range(P + 1):
                c = iter_grid.get((j1 - P + i, j2 - i))
                if c:
                    rhs = rhs + c.scale(binom(P, i))
            if lhs or rhs:
                seen_nonzero = True
            if lhs != rhs:
                mismatches.append(((j1, j2), lhs, rhs))
    status = "pass" if not mismatches else "fail"
    if status == "pass" and not seen_nonzero:
        status = "inconclusive"
    return {
        "identity": "weak_associativity",
        "status": status,
        "pole_order": P,
        "window": box.intervals,
        "mismatches": [cell for cell, _, _ in mismatches],
    }


def _trunc2(u: FockVector, v: FockVector) -> int:
    """First exponent at which a coefficient may be nonzero."""
    return -((_wt2_max(u) + _wt2_max(v)) // 2)


def check_axioms(space: HSpace, samples: Sequence[FockVector], lo: int, hi: int) -> dict:
    """Coefficientwise checks of the grading, vacuum and translation axioms."""
    results = {}

    def record(name, failures):
        results[name] = {"status": "pass" if not failures else "fail", "failures": failures}

    pairs = [(samples[i], samples[(i + 1) % len(samples)]) for i in range(len(samples))]

    failures = []
    vac = FockVector.vacuum()
    for _, v in pairs:
        series = y_series(space, vac, v, lo, hi)
        for k in range(lo, hi + 1):
            want = v if k == 0 else FockVector()
            if series.coefficient((k,)) != want:
                failures.append(("identity", k))
    record("identity", failures)

    failures = []
    for u, _ in pairs:
        series = y_series(space, u, vac, lo, hi)
        for k in range(lo, 0):
            if series.coefficient((k,)):
                failures.append(("regular_at_zero", k))
        if lo <= 0 <= hi and series.coefficient((0,)) != u:
            failures.append(("limit_is_state", 0))
    record("creation", failures)

    failures = []
    for u, v in pairs:
        base = y_series(space, u, v, lo, hi)
        on_dv = y_series(space, u, grading_op(v), lo, hi)
        of_du = y_series(space, grading_op(u), v, lo, hi)
        for k in range(lo, hi + 1):
            yk = base.coefficient((k,))
            lhs = grading_op(yk) - on_dv.coefficient((k,))
            rhs = yk.scale(k) + of_du.coefficient((k,))
            if lhs != rhs:
                failures.append((k,))
    record("grading_commutator", failures)

    failures = []
    for u, v in pairs:
        base = y_series(space, u, v, lo, hi + 1)
        via_d = y_series(space, d_op(u), v, lo, hi)
        on_dv = y_series(space, u, d_op(v), lo, hi)
        for k in range(lo, hi + 1):
            deriv = base.coefficient((k + 1,)).scale(k + 1)
            dk = via_d.coefficient((k,))
            comm = d_op(base.coefficient((k,))) - on_dv.coefficient((k,))
            if deriv != dk:
                failures.append(("derivative", k))
            if dk != comm:
                failures.append(("commutator", k))
    record("translation", failures)

    failures = []
    for u, v in pairs:
        bound = _trunc2(u, v)
        if bound <= lo:
            continue
        series = y_series(space, u, v, lo, min(bound - 1, hi))
        for k in range(lo, min(bound, hi + 1)):
            if series.coefficient((k,)):
                failures.append((k,))
    record("lower_truncation", failures)

    results["status"] = "pass" if all(
        r["status"] == "pass" for r in results.values() if isinstance(r, dict)
    ) else "fail"
    return results
