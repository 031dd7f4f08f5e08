"""Sparse Laurent polynomials with exact coefficients, and exponent boxes.

A LaurentPoly is a finite table mapping integer exponent tuples to nonzero
Fraction coefficients over a fixed ordered tuple of variables.  Exponents
may be negative.  Truncated expansions carry their certified exponent box
alongside (see Box); consumers must stay inside it.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Tuple

from .scalars import binom

Cell = Tuple[int, ...]


class Box:
    """Closed integer exponent box: one [lo, hi] interval per variable."""

    __slots__ = ("vars", "intervals")

    def __init__(self, variables: Iterable[str], intervals: Iterable[Tuple[int, int]]):
        self.vars = tuple(variables)
        self.intervals = tuple((int(lo), int(hi)) for lo, hi in intervals)
        if len(self.vars) != len(self.intervals):
            raise ValueError("one interval per variable required")
        for lo, hi in self.intervals:
            if lo > hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")

    def contains(self, cell: Cell) -> bool:
        return all(lo <= c <= hi for c, (lo, hi) in zip(cell, self.intervals))

    def cells(self):
        """Iterate all cells of the box in lexicographic order."""

        def rec(prefix, idx):
            if idx == len(self.intervals):
                yield tuple(prefix)
                return
            lo, hi = self.intervals[idx]
            for e in range(lo, hi + 1):
                prefix.append(e)
                yield from rec(prefix, idx + 1)
                prefix.pop()

        yield from rec([], 0)

    def intersect(self, other: "Box") -> "Box":
        if self.vars != other.vars:
            raise ValueError("boxes over different variables")
        ivs = [(max(a, c), min(b, d)) for (a, b), (c, d) in zip(self.intervals, other.intervals)]
        return Box(self.vars, ivs)

    def __eq__(self, other):
        return isinstance(other, Box) and self.vars == other.vars and self.intervals == other.intervals

    def __repr__(self):
        parts = ", ".join(f"{v}:[{lo},{hi}]" for v, (lo, hi) in zip(self.vars, self.intervals))
        return f"Box({parts})"


class LaurentPoly:
    """Finite exact Laurent table over an ordered variable tuple."""

    __slots__ = ("vars", "coeffs")

    def __init__(self, variables: Iterable[str], coeffs: Dict[Cell, Fraction] | None = None):
        self.vars = tuple(variables)
        table: Dict[Cell, Fraction] = {}
        if coeffs:
            for cell, c in coeffs.items():
                c = Fraction(c)
                if c:
                    table[tuple(cell)] = c
        self.coeffs = table

    @classmethod
    def constant(cls, variables, value) -> "LaurentPoly":
        value = Fraction(value)
        variables = tuple(variables)
        if not value:
            return cls(variables)
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def monomial(cls, variables, cell: Cell, value=1) -> "LaurentPoly":
        return cls(variables, {tuple(cell): Fraction(value)})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, LaurentPoly)
            and self.vars == other.vars
            and self.coeffs == other.coeffs
        )

    def __getitem__(self, cell: Cell) -> Fraction:
        return self.coeffs.get(tuple(cell), Fraction(0))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if self.vars != other.vars:
            raise ValueError("variable mismatch")
        out = dict(self.coeffs)
        for cell, c in other.coeffs.items():
            s = out.get(cell, 0) + c
            if s:
                out[cell] = s
            else:
                out.pop(cell, None)
        return LaurentPoly(self.vars, out)

    def __neg__(self):
        return LaurentPoly(self.vars, {cell: -c for cell, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, value) -> "LaurentPoly":
        value = Fraction(value)
        if not value:
            return LaurentPoly(self.vars)
        return LaurentPoly(self.vars, {cell: c * value for cell, c in self.coeffs.items()})

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if self.vars != other.vars:
            raise ValueError("variable mismatch")
        out: Dict[Cell, Fraction] = {}
        for c1, v1 in self.coeffs.items():
            for c2, v2 in other.coeffs.items():
                cell = tuple(a + b for a, b in zip(c1, c2))
                s = out.get(cell, 0) + v1 * v2
                if s:
                    out[cell] = s
                else:
                    out.pop(cell, None)
        return LaurentPoly(self.vars, out)

    def crop(self, box: Box) -> "LaurentPoly":
        if box.vars != self.vars:
            raise ValueError("variable mismatch")
        return LaurentPoly(self.vars, {c: v for c, v in self.coeffs.items() if box.contains(c)})

    def items(self):
        return sorted(self.coeffs.items())

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for cell, c in self.items():
            mono = "*".join(
                f"{v}^{e}" for v, e in zip(self.vars, cell) if e
            )
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def iota_expand(t: int, x: str, y: str, max_inner_degree: int) -> LaurentPoly:
    """Truncated geometric expansion of (x - y)^(-t) in the region |x| > |y|.

    Returns sum_{i=0..N} C(t+i-1, i) x^(-t-i) y^i with N = max_inner_degree;
    exact on the box {x: any, y: [0, N]}.
    """
    if t < 1:
        raise ValueError("pole order must be positive")
    if max_inner_degree < 0:
        raise ValueError("truncation order must be nonnegative")
    table = {}
    for i in range(max_inner_degree + 1):
        table[(-t - i, i)] = Fraction(binom(t + i - 1, i))
    return LaurentPoly((x, y), table)
