"""Tensor-algebra straightening onto the normal-form basis.

Tensor words mix modes a (x) t^(n+1/2) of either sign with the central
symbol k.  The rewriting moves negative levels left, positive levels to
the middle and k's to the right:

  (a (x) t^(m+1/2))(b (x) t^(n+1/2))
      -> -(b (x) t^(n+1/2))(a (x) t^(m+1/2)) + m (a,b) [m+n+1 = 0] k
                                            (for m >= 0 > n)
  k (x) (a (x) t^(n+1/2))  ->  (a (x) t^(n+1/2)) (x) k

Each step either lowers the defect (the number of wrong-order pairs) or
shortens the word, so rewriting terminates; the straightening map is
independent of the order in which redexes are picked.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Tuple, Union

from .fock import HSpace

K = "k"
Entry = Union[str, Tuple[int, int]]  # K or (gen, level)
TensorWord = Tuple[Entry, ...]


def _is_mode(entry: Entry) -> bool:
    return entry != K


def _word_key(word: TensorWord):
    return tuple((1,) if e == K else (0, e[0], e[1]) for e in word)


def defect(word: TensorWord) -> int:
    """Number of wrong-order pairs: positive level before negative level,
    or k before any mode."""
    count = 0
    for i in range(len(word)):
        for j in range(i + 1, len(word)):
            a, b = word[i], word[j]
            if a == K:
                if _is_mode(b):
                    count += 1
            elif _is_mode(b) and a[1] >= 0 > b[1]:
                count += 1
    return count


def redexes(word: TensorWord) -> List[int]:
    """Positions i where (word[i], word[i+1]) is an adjacent wrong-order pair."""
    out = []
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a == K:
            if _is_mode(b):
                out.append(i)
        elif _is_mode(b) and a[1] >= 0 > b[1]:
            out.append(i)
    return out


def rewrite_at(space: HSpace, word: TensorWord, i: int) -> List[Tuple[Fraction, TensorWord]]:
    """One straightening step at redex position i."""
    a, b = word[i], word[i + 1]
    if a == K:
        return [(Fraction(1), word[:i] + (b, a) + word[i + 2 :])]
    (g1, n1), (g2, n2) = a, b
    out = [(Fraction(-1), word[:i] + (b, a) + word[i + 2 :])]
    if n1 + n2 + 1 == 0:
        coeff = n1 * space.pair(g1, g2)
        if coeff:
            out.append((Fraction(coeff), word[:i] + (K,) + word[i + 2 :]))
    return out


def pbw_normal_form(
    space: HSpace, word: TensorWord, rng: random.Random | None = None
) -> Dict[TensorWord, Fraction]:
    """Straighten a tensor word into the defect-zero basis.

    When an rng is given the redex picked at each step is randomized;
    the result is the same either way (the map is well defined).
    """
    pending: Dict[TensorWord, Fraction] = {tuple(word): Fraction(1)}
    done: Dict[TensorWord, Fraction] = {}
    while pending:
        if rng is None:
            w, c = pending.popitem()
        else:
            w = rng.choice(sorted(pending, key=_word_key))
            c = pending.pop(w)
        spots = redexes(w)
        if not spots:
            s = done.get(w, 0) + c
            if s:
                done[w] = s
            else:
                done.pop(w, None)
            continue
        spot = spots[0] if rng is None else rng.choice(spots)
        for c2, w2 in rewrite_at(space, w, spot):
            s = pending.get(w2, 0) + c * c2
            if s:
                pending[w2] = s
            else:
                pending.pop(w2, None)
    return done
