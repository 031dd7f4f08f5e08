"""Command-line front end: algebra configs, verification suites,
correlation functions, regional expansions, and the exponential operator.

Machine-readable JSON lines go to stdout; a short human summary goes to
stderr.  Exit codes: 0 all checks pass, 1 an identity failed, 2 bad
usage, config, or state expression.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
from fractions import Fraction
from typing import List, Sequence, Tuple

from .delta import (
    DeltaCoeffs,
    check_exp_delta_neg_comm,
    delta_power_over_factorial,
    exp_delta,
    t_number,
    t_number_alt,
    t_number_pairings,
)
from .fock import AlgebraConfig, FockVector, HSpace, Word, random_state, random_word, word_str
from .laurent import Box
from .scalars import format_rational, parse_rational
from .straightening import defect, pbw_normal_form
from .vertex import check_axioms, check_weak_associativity, iterate_series, product_series
from .wick import correlation, noexpr_apply, wick_iterate, wick_product


class UsageError(Exception):
    pass


# -- config ------------------------------------------------------------------


def load_config(path: str | None) -> Tuple[AlgebraConfig, DeltaCoeffs]:
    if path is None:
        return AlgebraConfig(HSpace(2)), DeltaCoeffs.default()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config: {e}")
    try:
        M = int(raw["M"])
        gram = raw.get("gram")
        if gram is not None:
            gram = [[parse_rational(str(x)) for x in row] for row in gram]
        space = HSpace(M, gram)
        central = parse_rational(str(raw.get("l", "1")))
        triples = [
            (int(m), int(n), parse_rational(str(val)))
            for m, n, val in raw.get("delta_coeffs", [[0, 1, "1"]])
        ]
        coeffs = DeltaCoeffs.from_list(triples)
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError(f"bad config: {e}")
    return AlgebraConfig(space, central), coeffs


# -- state expressions ---------------------------------------------------------

_TOKEN = re.compile(r"\|0>|[ef]\d+|-?\d+/\d+|-?\d+|[()*+]")


def parse_state(space: HSpace, text: str) -> FockVector:
    """Parse a sum of `coeff * gen(-m-1/2) ... |0>` terms."""
    tokens = _TOKEN.findall(text)
    if "".join(tokens).replace("|0>", "") != re.sub(r"\s+", "", text).replace("|0>", ""):
        raise UsageError(f"cannot tokenize state expression {text!r}")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    out = FockVector()
    while peek() is not None:
        if peek() == "+":
            take()
        coeff = Fraction(1)
        tok = peek()
        if tok is not None and re.fullmatch(r"-?\d+(/\d+)?", tok):
            coeff = parse_rational(take())
            if peek() == "*":
                take()
        modes: List[Tuple[int, int]] = []
        while peek() is not None and re.fullmatch(r"[ef]\d+", peek()):
            name = take()
            try:
                gen = space.parse_gen(name)
            except ValueError as e:
                raise UsageError(str(e))
            if take() != "(":
                raise UsageError(f"expected '(' after {name}")
            num = take()
            if num is None or not re.fullmatch(r"-?\d+/\d+|-?\d+", num):
                raise UsageError(f"bad mode level after {name}")
            level_frac = parse_rational(num)
            if take() != ")":
                raise UsageError("expected ')' after mode level")
            n = level_frac - Fraction(1, 2)
            if n.denominator != 1 or n >= 0:
                raise UsageError(f"mode level {num} is not a negative half-odd integer")
            modes.append((gen, int(n)))
        if take() != "|0>":
            raise UsageError("every term must end with |0>")
        out = out + FockVector.word(tuple(modes), coeff)
    if pos != len(tokens):
        raise UsageError("trailing tokens in state expression")
    return out


def render_state(space: HSpace, vec: FockVector) -> str:
    if not vec.terms:
        return "0"
    parts = []
    for w, c in vec.items():
        body = word_str(space, w)
        if c == 1:
            parts.append(body)
        else:
            parts.append(f"{format_rational(c)} * {body}")
    return " + ".join(parts)


def parse_insertion(space: HSpace, text: str) -> Tuple[Word, Fraction, str]:
    """Parse 'STATE @ var' where STATE is a single scaled word."""
    if "@" not in text:
        raise UsageError(f"insertion {text!r} needs the form 'STATE @ var'")
    state_text, var = text.rsplit("@", 1)
    var = var.strip()
    if not re.fullmatch(r"[A-Za-z]\w*", var):
        raise UsageError(f"bad variable name {var!r}")
    vec = parse_state(space, state_text.strip())
    if len(vec.terms) != 1:
        raise UsageError("each insertion must be a single word")
    word, coeff = next(iter(vec.terms.items()))
    return word, coeff, var


def _parse_window(text: str, count: int) -> Tuple[Tuple[int, int], ...]:
    try:
        nums = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad window {text!r}")
    if len(nums) != 2 * count:
        raise UsageError(f"window needs {2 * count} integers")
    pairs = tuple((nums[2 * i], nums[2 * i + 1]) for i in range(count))
    for lo, hi in pairs:
        if lo > hi:
            raise UsageError(f"empty window interval [{lo}, {hi}]")
    return pairs


# -- reporting -----------------------------------------------------------------


class Reporter:
    def __init__(self, json_only: bool):
        self.json_only = json_only
        self.failed = 0
        self.passed = 0

    def emit(self, record: dict):
        print(json.dumps(record, sort_keys=True))
        status = record.get("status")
        if status == "fail":
            self.failed += 1
        elif status == "pass":
            self.passed += 1

    def summary(self):
        if not self.json_only:
            print(
                f"{self.passed} identities passed, {self.failed} failed",
                file=sys.stderr,
            )
        return 1 if self.failed else 0


# -- suites --------------------------------------------------------------------


def _suite_axioms(rep, space, rng, max_weight2, window):
    samples = [random_state(rng, space, max_weight2) for _ in range(8)]
    lo, hi = window[0]
    report = check_axioms(space, samples, lo, hi)
    for name, res in report.items():
        if isinstance(res, dict):
            rep.emit(
                {
                    "suite": "axioms",
                    "identity": name,
                    "status": res["status"],
                    "counterexample": res["failures"][:1],
                }
            )


def _word_with_length(rng, space, r, max_m=2):
    return tuple((rng.randrange(space.dim), -rng.randint(1, max_m + 1)) for _ in range(r))


def _suite_wick(rep, space, rng, max_weight2, window, rmax, smax):
    box = Box(("x", "y"), window)
    for r in range(rmax + 1):
        for s in range(smax + 1):
            u1 = _word_with_length(rng, space, r)
            u2 = _word_with_length(rng, space, s)
            v = random_state(rng, space, max_weight2)
            series = product_series(space, FockVector.word(u1), FockVector.word(u2), v, box)
            closed = noexpr_apply(space, wick_product(space, u1, u2), v, ("x", "y"), box.intervals)
            bad = [
                cell
                for cell in box.cells()
                if series.coefficient(cell) != closed.get(cell, FockVector())
            ]
            rep.emit(
                {
                    "suite": "wick",
                    "identity": f"product_closed_form_r{r}_s{s}",
                    "status": "pass" if not bad else "fail",
                    "counterexample": bad[:1],
                }
            )
            series = iterate_series(space, FockVector.word(u1), FockVector.word(u2), v, box)
            closed = noexpr_apply(space, wick_iterate(space, u1, u2), v, ("x", "y"), box.intervals)
            bad = [
                cell
                for cell in box.cells()
                if series.coefficient(cell) != closed.get(cell, FockVector())
            ]
            rep.emit(
                {
                    "suite": "wick",
                    "identity": f"iterate_closed_form_r{r}_s{s}",
                    "status": "pass" if not bad else "fail",
                    "counterexample": bad[:1],
                }
            )
    for trial in range(3):
        u1 = random_word(rng, space, max_weight2)
        u2 = FockVector.word(random_word(rng, space, max_weight2))
        w = random_state(rng, space, max_weight2)
        res = check_weak_associativity(space, u1, u2, w, Box(("x0", "x2"), window))
        rep.emit(
            {
                "suite": "wick",
                "identity": f"weak_associativity_{trial}",
                "status": "pass" if res["status"] in ("pass", "inconclusive") else "fail",
                "counterexample": res["mismatches"][:1],
            }
        )


def _suite_delta(rep, space, coeffs, rng, max_weight2, window):
    gens = [rng.randrange(space.dim) if space.dim else 0 for _ in range(8)]
    levels = [rng.randint(0, 3) for _ in range(8)]
    bad = []
    for size in (2, 4, 6, 8):
        idx = tuple(sorted(rng.sample(range(8), size)))
        a = t_number(space, coeffs, gens, levels, idx)
        if a != t_number_alt(space, coeffs, gens, levels, idx) or a != t_number_pairings(
            space, coeffs, gens, levels, idx
        ):
            bad.append(idx)
    rep.emit(
        {
            "suite": "delta",
            "identity": "contraction_number_routes",
            "status": "pass" if not bad else "fail",
            "counterexample": bad[:1],
        }
    )
    bad = []
    for _ in range(6):
        word = _word_with_length(rng, space, rng.randint(0, 6), max_m=2)
        v = FockVector.word(word)
        closed = exp_delta(space, coeffs, v)
        want = {}
        for t in range(len(word) // 2 + 1):
            for e, vecs in delta_power_over_factorial(space, coeffs, v, t).items():
                cur = want.get(e, FockVector())
                s = cur + vecs
                if s:
                    want[e] = s
                else:
                    want.pop(e, None)
        if closed != want:
            bad.append(word)
    rep.emit(
        {
            "suite": "delta",
            "identity": "exp_closed_vs_iterative",
            "status": "pass" if not bad else "fail",
            "counterexample": [word_str(space, w) for w in bad[:1]],
        }
    )
    samples = [random_state(rng, space, max_weight2) for _ in range(4)]
    res = check_exp_delta_neg_comm(
        space, coeffs, rng.randrange(space.dim) if space.dim else 0, rng.randint(0, 1), samples, window
    )
    rep.emit(
        {
            "suite": "delta",
            "identity": "exp_negative_commutator",
            "status": "pass" if res["status"] in ("pass", "inconclusive") else "fail",
            "counterexample": res["mismatches"][:1],
        }
    )


def _suite_pbw(rep, space, rng, trials=60):
    from .straightening import K

    bad = []
    for trial in range(trials):
        while True:
            n = rng.randint(2, 6)
            entries = []
            for _ in range(n):
                if rng.random() < 0.15:
                    entries.append(K)
                else:
                    entries.append((rng.randrange(space.dim) if space.dim else 0, rng.randint(-3, 2)))
            word = tuple(entries)
            if 0 < defect(word) <= 4:
                break
        a = pbw_normal_form(space, word, random.Random(rng.randrange(1 << 30)))
        b = pbw_normal_form(space, word, random.Random(rng.randrange(1 << 30)))
        if a != b:
            bad.append(word)
    rep.emit(
        {
            "suite": "pbw",
            "identity": "straightening_confluence",
            "status": "pass" if not bad else "fail",
            "counterexample": bad[:1],
        }
    )


def cmd_check(args) -> int:
    config, coeffs = load_config(args.config)
    space = config.space
    rep = Reporter(args.json)
    rng = random.Random(args.seed)
    max_w2 = 2 * args.max_weight
    if not args.window:
        window2 = ((-6, 6), (-6, 6))
    elif args.window.count(",") == 1:
        interval = _parse_window(args.window, 1)[0]
        window2 = (interval, interval)
    else:
        window2 = _parse_window(args.window, 2)
    suites = [args.suite] if args.suite != "all" else ["axioms", "wick", "delta", "pbw"]
    for suite in suites:
        if suite == "axioms":
            _suite_axioms(rep, space, rng, max_w2, window2)
        elif suite == "wick":
            _suite_wick(rep, space, rng, max_w2, window2, args.r, args.s)
        elif suite == "delta":
            _suite_delta(rep, space, coeffs, rng, max_w2, window2)
        elif suite == "pbw":
            _suite_pbw(rep, space, rng)
    return rep.summary()


def cmd_correlate(args) -> int:
    space = load_config(args.config)[0].space
    scale = Fraction(1)
    insertions = []
    for text in args.insertions:
        word, coeff, var = parse_insertion(space, text)
        scale *= coeff
        insertions.append((word, var))
    names = [v for _, v in insertions]
    if len(set(names)) != len(names):
        raise UsageError("insertion variables must be distinct")
    rf = correlation(space, insertions).scale(scale)
    print(json.dumps({"correlation": rf.render()}))
    if not args.json:
        print(rf.render(), file=sys.stderr)
    return 0


def cmd_expand(args) -> int:
    space = load_config(args.config)[0].space
    insertions = []
    scale = Fraction(1)
    for text in args.insertions:
        word, coeff, var = parse_insertion(space, text)
        scale *= coeff
        insertions.append((word, var))
    order = [v.strip() for v in args.order.split(",")]
    if sorted(order) != sorted(v for _, v in insertions):
        raise UsageError("--order must list exactly the insertion variables")
    window = _parse_window(args.window, len(order))
    rf = correlation(space, insertions).scale(scale)
    table = rf.expand_region(order, window)
    for cell, value in table.items():
        print(json.dumps({"cell": list(cell), "value": format_rational(value)}))
    if not args.json:
        print(
            f"{len(table.coeffs)} nonzero coefficients on the window (order {', '.join(order)})",
            file=sys.stderr,
        )
    return 0


def cmd_expdelta(args) -> int:
    config, coeffs = load_config(args.config)
    space = config.space
    vec = parse_state(space, args.state)
    closed = exp_delta(space, coeffs, vec)
    rmax = max((len(w) for w in vec.terms), default=0)
    iterative = {}
    for t in range(rmax // 2 + 1):
        for e, w in delta_power_over_factorial(space, coeffs, vec, t).items():
            cur = iterative.get(e, FockVector())
            s = cur + w
            if s:
                iterative[e] = s
            else:
                iterative.pop(e, None)
    agree = closed == iterative
    for e in sorted(closed, reverse=True):
        print(json.dumps({"exponent": e, "state": render_state(space, closed[e])}))
    print(json.dumps({"closed_matches_iterative": agree}))
    if not args.json:
        print(
            f"{len(closed)} exponents; closed form{' ' if agree else ' dis'}agrees with iterated powers",
            file=sys.stderr,
        )
    return 0 if agree else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermifock",
        description="Exact checks and correlation functions for the "
        "non-anticommutative fermionic Fock space",
    )
    parser.add_argument("--config", help="JSON algebra config", default=None)
    parser.add_argument("--json", action="store_true", help="suppress the stderr summary")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run a verification suite")
    p.add_argument("--suite", choices=["axioms", "wick", "delta", "pbw", "all"], default="all")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--max-weight", type=int, default=2)
    p.add_argument("--window", default=None, help="a,b[,c,d] exponent window")
    p.add_argument("--r", type=int, default=2, help="max first-slot word length (wick suite)")
    p.add_argument("--s", type=int, default=2, help="max second-slot word length (wick suite)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("correlate", help="closed-form vacuum correlation function")
    p.add_argument("insertions", nargs="+", help="'STATE @ var' with STATE a single word")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("expand", help="regional Laurent expansion of a correlation")
    p.add_argument("insertions", nargs="+")
    p.add_argument("--order", required=True, help="comma-separated region order, largest first")
    p.add_argument("--window", required=True, help="lo,hi per region variable")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("expdelta", help="apply the exponential pair-deletion operator")
    p.add_argument("state", help="state expression")
    p.set_defaults(func=cmd_expdelta)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
