#!/usr/bin/env python3
"""Sweep the minimal normal form over all short unimodular equations.

Enumerates the freely and cyclically reduced words over a, b, t (and
inverses) with t-exponent sum +-1 up to a given length, one per rotation
class, computes the minimal (m, n) expression for each over F(a) * F(b)
with H = F(a), and cross-checks the pinch-reduction result against the
exhaustive rotation/shift minimizer.

Usage: python3 scripts/normal_form_sweep.py [--max-len 6] [--no-oracle]
"""

import argparse
import itertools
import sys
import time
from collections import Counter

from groupeq.backends import FreeGroup, FreeProductGroup
from groupeq.equations import Equation, Split, bruteforce_min_form6, normal_form_6
from groupeq.errors import EquationOverFactorError


def enumerate_equations(G, a, b, max_len):
    letters = {"a": a, "A": ~a, "b": b, "B": ~b}
    seen = set()
    for length in range(1, max_len + 1):
        for combo in itertools.product("aAbBtT", repeat=length):
            sigma = sum(1 if c == "t" else -1 if c == "T" else 0 for c in combo)
            if abs(sigma) != 1:
                continue
            inv = str.swapcase
            if any(combo[i] == inv(combo[i + 1]) for i in range(length - 1)):
                continue
            if length > 1 and combo[-1] == inv(combo[0]):
                continue
            key = min(combo[i:] + combo[:i] for i in range(length))
            if key in seen:
                continue
            seen.add(key)
            terms, coef = [], G.identity()
            for c in combo:
                if c in letters:
                    coef = coef * letters[c]
                else:
                    terms.append((coef, 1 if c == "t" else -1))
                    coef = G.identity()
            if not terms:
                continue
            if not coef.is_identity:
                g0, e0 = terms[0]
                terms[0] = (coef * g0, e0)
            yield "".join(combo), Equation(G, tuple(terms))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-len", type=int, default=6)
    ap.add_argument("--no-oracle", action="store_true")
    args = ap.parse_args()

    fa, fb = FreeGroup(("a",)), FreeGroup(("b",))
    G = FreeProductGroup((fa, fb))
    a, b = G.embed(0, fa.gen("a")), G.embed(1, fb.gen("b"))
    split = Split.of(G, [0])

    start = time.monotonic()
    dist: Counter = Counter()
    over_h = mismatches = 0
    examples = {}
    for word, e in enumerate_equations(G, a, b, args.max_len):
        try:
            res = normal_form_6(e, split)
        except EquationOverFactorError:
            over_h += 1
            continue
        got = (
            (res.length_one.m, 0)
            if res.kind == "length-one"
            else (res.form6.m, res.form6.n)
        )
        if not args.no_oracle:
            oracle = bruteforce_min_form6(e, split)
            if oracle != got:
                mismatches += 1
                print(f"MISMATCH {word}: reduction {got} oracle {oracle}")
        dist[got] += 1
        examples.setdefault(got, word)

    elapsed = time.monotonic() - start
    total = sum(dist.values())
    print(f"{total} rotation classes processed in {elapsed:.1f}s "
          f"({over_h} rejected as equations over H)")
    print(f"{'(m, n)':>8}  {'count':>6}  example")
    for key in sorted(dist):
        label = f"{key}" + ("  [t = u]" if key[1] == 0 else "")
        print(f"{str(key):>8}  {dist[key]:>6}  {examples[key]}{'  (length-one)' if key[1] == 0 else ''}")
    if not args.no_oracle:
        print(f"oracle mismatches: {mismatches}")
        return 1 if mismatches else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
