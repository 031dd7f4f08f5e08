"""Exact multivariate rational functions with restricted denominators.

Denominators are products of variable powers z_i^a and difference powers
(z_i - z_j)^b; this is the only pole structure correlation functions can
produce here.  Numerators are ordinary polynomials.  Fractions are kept
normalized: no z_i or (z_i - z_j) divides both numerator and denominator,
and difference factors are stored with the canonically earlier variable
first (sign absorbed into the numerator).

Regional expansion (`expand_region`) turns a rational function into the
exact Laurent table of its iterated-series expansion in a declared region
|z_{o1}| > |z_{o2}| > ... , certified on a requested exponent box.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

from .laurent import Box, LaurentPoly
from .scalars import binom, format_rational

Cell = Tuple[int, ...]
Poly = Dict[Cell, Fraction]


def _var_key(name: str):
    return (len(name), name)


def _poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for cell, c in b.items():
        s = out.get(cell, 0) + c
        if s:
            out[cell] = s
        else:
            out.pop(cell, None)
    return out


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for c1, v1 in a.items():
        for c2, v2 in b.items():
            cell = tuple(x + y for x, y in zip(c1, c2))
            s = out.get(cell, 0) + v1 * v2
            if s:
                out[cell] = s
            else:
                out.pop(cell, None)
    return out


def _poly_scale(a: Poly, value: Fraction) -> Poly:
    if not value:
        return {}
    return {cell: c * value for cell, c in a.items()}


def _poly_shift(a: Poly, idx: int, amount: int) -> Poly:
    out = {}
    for cell, c in a.items():
        cell = list(cell)
        cell[idx] += amount
        out[tuple(cell)] = c
    return out


def _diff_poly(nvars: int, i: int, j: int, power: int) -> Poly:
    """(z_i - z_j)^power as a polynomial, power >= 0."""
    base: Poly = {}
    ei = [0] * nvars
    ei[i] = 1
    base[tuple(ei)] = Fraction(1)
    ej = [0] * nvars
    ej[j] = 1
    base[tuple(ej)] = Fraction(-1)
    out: Poly = {(0,) * nvars: Fraction(1)}
    for _ in range(power):
        out = _poly_mul(out, base)
    return out


def _divide_by_var(a: Poly, idx: int) -> Poly | None:
    if not a:
        return None
    if any(cell[idx] == 0 for cell in a):
        return None
    return _poly_shift(a, idx, -1)


def _divide_by_diff(a: Poly, i: int, j: int) -> Poly | None:
    """Exact quotient a / (z_i - z_j), or None when not divisible."""
    if not a:
        return None
    # Long division in z_i: with a = sum_k f_k z_i^k, the quotient q
    # satisfies q_{k-1} = f_k + z_j * q_k, remainder f_0 + z_j * q_0.
    by_deg: Dict[int, Poly] = {}
    for cell, c in a.items():
        k = cell[i]
        rest = list(cell)
        rest[i] = 0
        by_deg.setdefault(k, {})[tuple(rest)] = c
    top = max(by_deg)
    quotient: Poly = {}
    carry: Poly = {}
    for k in range(top, 0, -1):
        layer = _poly_add(by_deg.get(k, {}), carry)
        for cell, c in layer.items():
            cell2 = list(cell)
            cell2[i] += k - 1
            quotient[tuple(cell2)] = c
        carry = {tuple(_bump(cell, j)): c for cell, c in layer.items()}
    remainder = _poly_add(by_deg.get(0, {}), carry)
    if remainder:
        return None
    return quotient


def _bump(cell: Cell, idx: int) -> Cell:
    cell = list(cell)
    cell[idx] += 1
    return tuple(cell)


class RationalFunction:
    """num / (prod z_i^a_i * prod (z_i - z_j)^b_ij), exact and normalized."""

    __slots__ = ("vars", "num", "den_pow", "den_diff")

    def __init__(self, variables: Iterable[str], num: Poly, den_pow=None, den_diff=None):
        self.vars = tuple(variables)
        self.num: Poly = {tuple(c): Fraction(v) for c, v in num.items() if v}
        self.den_pow: Dict[str, int] = dict(den_pow or {})
        self.den_diff: Dict[Tuple[str, str], int] = dict(den_diff or {})
        self._normalize()

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_scalar(cls, value, variables=()) -> "RationalFunction":
        variables = tuple(sorted(variables, key=_var_key))
        value = Fraction(value)
        num = {(0,) * len(variables): value} if value else {}
        return cls(variables, num)

    @classmethod
    def monomial(cls, variables, exps: Dict[str, int], value=1) -> "RationalFunction":
        """value * prod z^e with e of either sign (negative goes downstairs)."""
        variables = tuple(sorted(variables, key=_var_key))
        cell = [0] * len(variables)
        den_pow = {}
        for v, e in exps.items():
            i = variables.index(v)
            if e >= 0:
                cell[i] = e
            else:
                den_pow[v] = -e
        return cls(variables, {tuple(cell): Fraction(value)}, den_pow, {})

    @classmethod
    def diff_inverse(cls, x: str, y: str, power: int, value=1) -> "RationalFunction":
        """value / (x - y)^power with the canonical-order sign absorbed."""
        if x == y:
            raise ValueError("difference factor needs distinct variables")
        if power < 0:
            raise ValueError("power must be nonnegative")
        value = Fraction(value)
        variables = tuple(sorted((x, y), key=_var_key))
        if (x, y) != variables:
            value *= (-1) ** power
        num = {(0, 0): value} if value else {}
        den_diff = {variables: power} if power else {}
        return cls(variables, num, {}, den_diff)

    # -- normalization --------------------------------------------------

    def _normalize(self):
        for pair in list(self.den_diff):
            if self.den_diff[pair] == 0:
                del self.den_diff[pair]
        for v in list(self.den_pow):
            if self.den_pow[v] == 0:
                del self.den_pow[v]
        if not self.num:
            self.den_pow = {}
            self.den_diff = {}
            return
        for v in list(self.den_pow):
            idx = self.vars.index(v)
            while self.den_pow.get(v, 0) > 0:
                q = _divide_by_var(self.num, idx)
                if q is None:
                    break
                self.num = q
                self.den_pow[v] -= 1
            if self.den_pow.get(v) == 0:
                del self.den_pow[v]
        for (x, y) in list(self.den_diff):
            i, j = self.vars.index(x), self.vars.index(y)
            while self.den_diff.get((x, y), 0) > 0:
                q = _divide_by_diff(self.num, i, j)
                if q is None:
                    break
                self.num = q
                self.den_diff[(x, y)] -= 1
            if self.den_diff.get((x, y)) == 0:
                del self.den_diff[(x, y)]

    # -- variable plumbing ----------------------------------------------

    def _embedded(self, variables: Tuple[str, ...]) -> Tuple[Poly, Dict, Dict]:
        """Re-key numerator and denominators over a superset variable tuple."""
        pos = [variables.index(v) for v in self.vars]
        num: Poly = {}
        for cell, c in self.num.items():
            big = [0] * len(variables)
            for p, e in zip(pos, cell):
                big[p] = e
            num[tuple(big)] = c
        return num, dict(self.den_pow), dict(self.den_diff)

    @staticmethod
    def _merge_vars(a: "RationalFunction", b: "RationalFunction") -> Tuple[str, ...]:
        return tuple(sorted(set(a.vars) | set(b.vars), key=_var_key))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other) -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            other = RationalFunction.from_scalar(other)
        variables = self._merge_vars(self, other)
        n1, p1, d1 = self._embedded(variables)
        n2, p2, d2 = other._embedded(variables)
        den_pow = {v: max(p1.get(v, 0), p2.get(v, 0)) for v in set(p1) | set(p2)}
        den_diff = {k: max(d1.get(k, 0), d2.get(k, 0)) for k in set(d1) | set(d2)}
        for v, a in den_pow.items():
            idx = variables.index(v)
            if a - p1.get(v, 0):
                n1 = _poly_shift(n1, idx, a - p1.get(v, 0))
            if a - p2.get(v, 0):
                n2 = _poly_shift(n2, idx, a - p2.get(v, 0))
        for (x, y), b in den_diff.items():
            i, j = variables.index(x), variables.index(y)
            if b - d1.get((x, y), 0):
                n1 = _poly_mul(n1, _diff_poly(len(variables), i, j, b - d1.get((x, y), 0)))
            if b - d2.get((x, y), 0):
                n2 = _poly_mul(n2, _diff_poly(len(variables), i, j, b - d2.get((x, y), 0)))
        return RationalFunction(variables, _poly_add(n1, n2), den_pow, den_diff)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return RationalFunction(self.vars, _poly_scale(self.num, Fraction(-1)), self.den_pow, self.den_diff)

    def __sub__(self, other):
        if not isinstance(other, RationalFunction):
            other = RationalFunction.from_scalar(other)
        return self + (-other)

    def __mul__(self, other) -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return self.scale(other)
        variables = self._merge_vars(self, other)
        n1, p1, d1 = self._embedded(variables)
        n2, p2, d2 = other._embedded(variables)
        den_pow = {v: p1.get(v, 0) + p2.get(v, 0) for v in set(p1) | set(p2)}
        den_diff = {k: d1.get(k, 0) + d2.get(k, 0) for k in set(d1) | set(d2)}
        return RationalFunction(variables, _poly_mul(n1, n2), den_pow, den_diff)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, value) -> "RationalFunction":
        return RationalFunction(self.vars, _poly_scale(self.num, Fraction(value)), self.den_pow, self.den_diff)

    def is_zero(self) -> bool:
        return not self.num

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            other = RationalFunction.from_scalar(other, self.vars)
        return (self - other).is_zero()

    # -- specialization ---------------------------------------------------

    def substitute(self, mapping: Dict[str, str]) -> "RationalFunction":
        """Rename variables (merging allowed) before any re-normalization.

        A difference factor whose two variables map to the same name would
        vanish identically; that is rejected rather than divided by zero.
        """
        new_names = [mapping.get(v, v) for v in self.vars]
        variables = tuple(sorted(set(new_names), key=_var_key))
        pos = [variables.index(n) for n in new_names]
        num: Poly = {}
        for cell, c in self.num.items():
            big = [0] * len(variables)
            for p, e in zip(pos, cell):
                big[p] += e
            key = tuple(big)
            s = num.get(key, 0) + c
            if s:
                num[key] = s
            else:
                num.pop(key, None)
        den_pow: Dict[str, int] = {}
        for v, a in self.den_pow.items():
            nv = mapping.get(v, v)
            den_pow[nv] = den_pow.get(nv, 0) + a
        den_diff: Dict[Tuple[str, str], int] = {}
        sign = 1
        for (x, y), b in self.den_diff.items():
            nx, ny = mapping.get(x, x), mapping.get(y, y)
            if nx == ny:
                raise ValueError(f"substitution collapses difference factor ({x} - {y})")
            key = tuple(sorted((nx, ny), key=_var_key))
            if (nx, ny) != key:
                sign *= (-1) ** b
            den_diff[key] = den_diff.get(key, 0) + b
        if sign == -1:
            num = _poly_scale(num, Fraction(-1))
        return RationalFunction(variables, num, den_pow, den_diff)

    # -- regional expansion ------------------------------------------------

    def monomial_summands(self):
        """Yield (coeff, fixed exponent map, diff factor list) per numerator term.

        Fixed exponents fold the z_i^a denominator in (so they may be
        negative); diff factors are (x, y, power) with x canonically first.
        """
        for cell, c in self.num.items():
            fixed = {}
            for v, e in zip(self.vars, cell):
                e -= self.den_pow.get(v, 0)
                if e:
                    fixed[v] = e
            diffs = [(x, y, b) for (x, y), b in sorted(self.den_diff.items())]
            yield c, fixed, diffs

    def expand_region(self, order: Iterable[str], box_intervals) -> LaurentPoly:
        """Exact Laurent table in the region |o1| > |o2| > ..., on a box.

        `order` must cover all variables of the function; `box_intervals`
        gives one (lo, hi) interval per order entry.  The result is exact
        on that box and contains no cells outside it.
        """
        order = tuple(order)
        if set(self.vars) - set(order):
            raise ValueError("region order must cover all variables")
        box = Box(order, box_intervals)
        out = LaurentPoly(order)
        for coeff, fixed, diffs in self.monomial_summands():
            out = out + _expand_monomial(order, box, coeff, fixed, diffs)
        return out.crop(box)

    # -- rendering ----------------------------------------------------------

    def render(self) -> str:
        if not self.num:
            return "0"
        terms = []
        for cell, c in sorted(self.num.items(), reverse=True):
            mono = " ".join(f"{v}^{e}" if e != 1 else v for v, e in zip(self.vars, cell) if e)
            coeff = format_rational(c)
            if mono:
                if c == 1:
                    terms.append(mono)
                elif c == -1:
                    terms.append(f"-{mono}")
                else:
                    terms.append(f"{coeff} {mono}")
            else:
                terms.append(coeff)
        num = " + ".join(terms).replace("+ -", "- ")
        dens = []
        for v in self.vars:
            a = self.den_pow.get(v, 0)
            if a:
                dens.append(f"{v}^{a}" if a > 1 else v)
        for (x, y), b in sorted(self.den_diff.items()):
            dens.append(f"({x} - {y})" + (f"^{b}" if b > 1 else ""))
        if not dens:
            return f"({num})"
        return f"({num}) / " + "*".join(dens)

    def __repr__(self):
        return self.render()


def _expand_monomial(order, box, coeff, fixed, diffs) -> LaurentPoly:
    """Region-expand coeff * prod z^fixed / prod (x - y)^b onto a box.

    Each difference factor is a geometric series in its inner (smaller)
    variable; truncation budgets are resolved from the last region
    variable backwards, which bounds every admissible choice exactly.
    """
    npos = {v: i for i, v in enumerate(order)}
    factors = []
    for (x, y, b) in diffs:
        if b == 0:
            continue
        outer, inner = x, y
        if npos[x] > npos[y]:
            # (x - y)^-b = (-1)^b (y - x)^-b, expanded with y as the outer variable
            outer, inner = y, x
        factors.append({
            "outer": npos[outer],
            "inner": npos[inner],
            "power": b,
            "sign": 1 if outer == x else (-1) ** b,
        })
    fixed_vec = [fixed.get(v, 0) for v in order]
    his = [hi for _, hi in box.intervals]
    table: Dict[Tuple[int, ...], Fraction] = {}

    by_inner: Dict[int, List[int]] = {}
    for idx, f in enumerate(factors):
        by_inner.setdefault(f["inner"], []).append(idx)

    ks = [0] * len(factors)

    def descend(pos: int):
        if pos < 0:
            cell = list(fixed_vec)
            value = Fraction(coeff)
            for f, k in zip(factors, ks):
                cell[f["inner"]] += k
                cell[f["outer"]] -= f["power"] + k
                value *= f["sign"] * binom(f["power"] + k - 1, k)
            cell = tuple(cell)
            if box.contains(cell):
                s = table.get(cell, 0) + value
                if s:
                    table[cell] = s
                else:
                    table.pop(cell, None)
            return
        budget = his[pos] - fixed_vec[pos]
        for f, k in zip(factors, ks):
            if f["outer"] == pos:
                budget += f["power"] + k
        members = by_inner.get(pos, [])
        if budget < 0:
            # even zero inner degree overshoots hi at this position
            return

        def assign(mi: int, remaining: int):
            if mi == len(members):
                descend(pos - 1)
                return
            idx = members[mi]
            for k in range(remaining + 1):
                ks[idx] = k
                assign(mi + 1, remaining - k)
            ks[idx] = 0

        assign(0, budget)

    descend(len(order) - 1)
    return LaurentPoly(order, table)


def f_mn(m: int, n: int, x: str, y: str) -> RationalFunction:
    """Divided-derivative contraction kernel C(-n-1, m) / (x - y)^(m+n+1)."""
    if m < 0 or n < 0:
        raise ValueError("derivative orders must be nonnegative")
    return RationalFunction.diff_inverse(x, y, m + n + 1, binom(-n - 1, m))
