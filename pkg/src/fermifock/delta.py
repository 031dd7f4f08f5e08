"""The quadratic annihilation series, total contraction numbers, and the
closed form of its exponential.

The operator is sum_{i, m, n} C_mn e_i(m+1/2) fbar_i(n+1/2) x^(-m-n-1)
over the polarized basis; antisymmetry C_mn = -C_nm makes it basis
independent.  Acting on a word it deletes one pair of modes per step, so
its exponential is a finite sum whose coefficients are the signed
perfect-matching sums computed here by three independent routes.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Sequence, Tuple

from .fock import FockVector, HSpace, apply_mode
from .scalars import binom

ExpGrid = Dict[int, FockVector]  # exponent of the formal variable -> state


class DeltaCoeffs:
    """Finitely supported antisymmetric coefficient table C_mn."""

    def __init__(self, entries: Dict[Tuple[int, int], Fraction] | None = None):
        table: Dict[Tuple[int, int], Fraction] = {}
        for (m, n), val in (entries or {}).items():
            val = Fraction(val)
            if m < 0 or n < 0:
                raise ValueError("levels must be nonnegative")
            if not val:
                continue
            if (m, n) in table and table[(m, n)] != val:
                raise ValueError(f"conflicting values for C[{m},{n}]")
            if m == n:
                raise ValueError("antisymmetry forces zero diagonal")
            table[(m, n)] = val
            mirror = table.setdefault((n, m), -val)
            if mirror != -val:
                raise ValueError(f"antisymmetry violated at ({m}, {n})")
        self.entries = table

    @classmethod
    def from_list(cls, triples: Iterable[Tuple[int, int, Fraction]]) -> "DeltaCoeffs":
        table: Dict[Tuple[int, int], Fraction] = {}
        for m, n, val in triples:
            val = Fraction(val)
            if (m, n) in table and table[(m, n)] != val:
                raise ValueError(f"conflicting values for C[{m},{n}]")
            table[(m, n)] = val
        return cls(table)

    @classmethod
    def default(cls) -> "DeltaCoeffs":
        return cls({(0, 1): Fraction(1)})

    def __call__(self, m: int, n: int) -> Fraction:
        return self.entries.get((m, n), Fraction(0))

    def __bool__(self):
        return bool(self.entries)

    def levels(self) -> List[int]:
        return sorted({m for m, _ in self.entries})

    def __eq__(self, other):
        return isinstance(other, DeltaCoeffs) and self.entries == other.entries


def bracket(space: HSpace, C: DeltaCoeffs, g1: int, m1: int, g2: int, m2: int) -> Fraction:
    """Contraction scalar of two creation slots: (a, b) C_{m1 m2}."""
    c = C(m1, m2)
    return space.pair(g1, g2) * c if c else Fraction(0)


def delta_apply(space: HSpace, C: DeltaCoeffs, vec: FockVector) -> ExpGrid:
    """One application: sum over position pairs p < q of
    (-1)^(p+q) C_{n_p n_q} (b_p, b_q) x^(-n_p-n_q-1) times the word with
    both modes removed (positions 1-based in the sign)."""
    out: ExpGrid = {}
    for word, cw in vec.terms.items():
        r = len(word)
        for p in range(r):
            gp, lp = word[p]
            np_ = -lp - 1
            for q in range(p + 1, r):
                gq, lq = word[q]
                nq = -lq - 1
                coeff = C(np_, nq)
                if not coeff:
                    continue
                coeff *= space.pair(gp, gq)
                if not coeff:
                    continue
                sign = -1 if (p + q) & 1 else 1  # (-1)^((p+1)+(q+1))
                exp = -np_ - nq - 1
                reduced = word[:p] + word[p + 1 : q] + word[q + 1 :]
                cur = out.get(exp, FockVector())
                nxt = cur + FockVector.word(reduced, cw * coeff * sign)
                if nxt:
                    out[exp] = nxt
                else:
                    out.pop(exp, None)
    return out


def _check_indices(indices: Sequence[int]) -> Tuple[int, ...]:
    idx = tuple(indices)
    if len(idx) % 2:
        raise ValueError("total contraction numbers need an even index count")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError("indices must be strictly increasing")
    return idx


def t_number(
    space: HSpace,
    C: DeltaCoeffs,
    gens: Sequence[int],
    levels: Sequence[int],
    indices: Sequence[int],
) -> Fraction:
    """Total contraction number by the defining first-slot recursion."""
    idx = _check_indices(indices)
    pairs = [(gens[i], levels[i]) for i in idx]

    def rec(items: Tuple[Tuple[int, int], ...]) -> Fraction:
        if not items:
            return Fraction(1)
        (g1, m1) = items[0]
        total = Fraction(0)
        for k in range(1, len(items)):
            gk, mk = items[k]
            b = bracket(space, C, g1, m1, gk, mk)
            if b:
                sign = 1 if (k + 1) % 2 == 0 else -1  # (-1)^k with k 1-based at k+1
                rest = items[1:k] + items[k + 1 :]
                total += sign * b * rec(rest)
        return total

    return rec(tuple(pairs))


def t_number_alt(
    space: HSpace,
    C: DeltaCoeffs,
    gens: Sequence[int],
    levels: Sequence[int],
    indices: Sequence[int],
) -> Fraction:
    """Same value through the all-pairs recursion with the 1/t average."""
    idx = _check_indices(indices)
    pairs = [(gens[i], levels[i]) for i in idx]

    def rec(items: Tuple[Tuple[int, int], ...]) -> Fraction:
        if not items:
            return Fraction(1)
        t = len(items) // 2
        total = Fraction(0)
        for a in range(len(items)):
            for b_ in range(a + 1, len(items)):
                br = bracket(space, C, items[a][0], items[a][1], items[b_][0], items[b_][1])
                if br:
                    sign = 1 if (a + b_) & 1 else -1  # (-1)^(alpha+beta-1), 1-based
                    rest = items[:a] + items[a + 1 : b_] + items[b_ + 1 :]
                    total += sign * br * rec(rest)
        return total / t

    return rec(tuple(pairs))


def _matchings(positions: Tuple[int, ...]):
    if not positions:
        yield ()
        return
    first = positions[0]
    for i in range(1, len(positions)):
        rest = positions[1:i] + positions[i + 1 :]
        for m in _matchings(rest):
            yield ((first, positions[i]),) + m


def t_number_pairings(
    space: HSpace,
    C: DeltaCoeffs,
    gens: Sequence[int],
    levels: Sequence[int],
    indices: Sequence[int],
) -> Fraction:
    """Same value as a sum over perfect matchings, -1 per edge crossing."""
    idx = _check_indices(indices)
    pairs = [(gens[i], levels[i]) for i in idx]
    total = Fraction(0)
    for matching in _matchings(tuple(range(len(pairs)))):
        value = Fraction(1)
        for a, b_ in matching:
            value *= bracket(space, C, pairs[a][0], pairs[a][1], pairs[b_][0], pairs[b_][1])
            if not value:
                break
        if not value:
            continue
        crossings = 0
        for i in range(len(matching)):
            a, b_ = matching[i]
            for j in range(i + 1, len(matching)):
                c, d = matching[j]
                if (a < c < b_ < d) or (c < a < d < b_):
                    crossings += 1
        total += value * (-1 if crossings & 1 else 1)
    return total


def exp_delta(space: HSpace, C: DeltaCoeffs, vec: FockVector) -> ExpGrid:
    """Closed-form exponential: delete 2t positions, weight by the total
    contraction number and (-1)^(sum of 1-based positions)."""
    out: ExpGrid = {}

    def add(exp: int, v: FockVector):
        if not v:
            return
        cur = out.get(exp, FockVector())
        nxt = cur + v
        if nxt:
            out[exp] = nxt
        else:
            out.pop(exp, None)

    for word, cw in vec.terms.items():
        r = len(word)
        gens = [g for g, _ in word]
        levels = [-l - 1 for _, l in word]
        for t in range(r // 2 + 1):
            if t == 0:
                add(0, FockVector.word(word, cw))
                continue
            for idx in combinations(range(r), 2 * t):
                tval = t_number(space, C, gens, levels, idx)
                if not tval:
                    continue
                sign = -1 if (sum(idx) + len(idx)) & 1 else 1  # 1-based position sum
                exp = -sum(levels[i] for i in idx) - t
                keep = tuple(word[i] for i in range(r) if i not in idx)
                add(exp, FockVector.word(keep, cw * tval * sign))
    return out


def delta_power_over_factorial(space: HSpace, C: DeltaCoeffs, vec: FockVector, t: int) -> ExpGrid:
    """Iterative oracle: apply the operator t times and divide by t!."""
    grid: ExpGrid = {0: vec}
    fact = 1
    for step in range(1, t + 1):
        nxt: ExpGrid = {}
        for e, v in grid.items():
            for e2, v2 in delta_apply(space, C, v).items():
                cur = nxt.get(e + e2, FockVector())
                s = cur + v2
                if s:
                    nxt[e + e2] = s
                else:
                    nxt.pop(e + e2, None)
        grid = nxt
        fact *= step
    return {e: v.scale(Fraction(1, fact)) for e, v in grid.items() if v}


def check_exp_delta_neg_comm(
    space: HSpace,
    C: DeltaCoeffs,
    gen: int,
    m: int,
    samples: Sequence[FockVector],
    intervals: Tuple[Tuple[int, int], Tuple[int, int]],
) -> dict:
    """Verify the commutator of the exponential with a regular one-sided
    series: both sides as exact grids over (x, y) on the given box."""
    (lox, hix), (loy, hiy) = intervals
    mismatches = []
    nonzero = 0
    for si, v in enumerate(samples):
        lhs: Dict[Tuple[int, int], FockVector] = {}
        rhs: Dict[Tuple[int, int], FockVector] = {}

        def add(table, ex, ey, vec, coeff):
            if not vec or not coeff:
                return
            if not (lox <= ex <= hix and loy <= ey <= hiy):
                return
            cur = table.get((ex, ey), FockVector())
            s = cur + vec.scale(coeff)
            if s:
                table[(ex, ey)] = s
            else:
                table.pop((ex, ey), None)

        exp_v = exp_delta(space, C, v)
        # exp(D(y)) a^(m)(x)^- v  minus  a^(m)(x)^- exp(D(y)) v
        for alpha in range(max(0, lox + m), hix + m + 1):
            cb = binom(alpha, m)
            if not cb:
                continue
            hit = apply_mode(space, (gen, -alpha - 1), v)
            for ey, w in exp_delta(space, C, hit).items():
                add(lhs, alpha - m, ey, w, cb)
            for ey, w in exp_v.items():
                add(lhs, alpha - m, ey, apply_mode(space, (gen, -alpha - 1), w), -cb)
        # sum_{alpha, beta} C_{beta alpha} a(beta+1/2) y^(-beta-alpha-1) (x^alpha)^(m) exp(D(y)) v
        for (beta, alpha), cba in C.entries.items():
            cb = binom(alpha, m)
            if not cb:
                continue
            for ey, w in exp_v.items():
                add(rhs, alpha - m, ey - beta - alpha - 1, apply_mode(space, (gen, beta), w), cba * cb)
        nonzero += len(lhs) + len(rhs)
        for cell in set(lhs) | set(rhs):
            if lhs.get(cell, FockVector()) != rhs.get(cell, FockVector()):
                mismatches.append((si, cell))
    return {
        "identity": "exp_delta_negative_commutator",
        "status": "pass" if not mismatches else "fail",
        "window": intervals,
        "nonzero_cells": nonzero,
        "mismatches": mismatches,
    }
