"""Finite-subset unique-product machinery.

Censuses are exact: products are keyed by canonical forms, never hashed
probabilistically.  The witness search targets the fours group but runs on
any backend with decidable equality.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .backends import Group, GroupElement
from .config import DEFAULT_CAPS, Caps
from .errors import GroupMismatchError


def _as_sorted_set(group: Group, xs: Iterable[GroupElement], name: str) -> tuple[GroupElement, ...]:
    out = []
    for x in xs:
        if x.group != group:
            raise GroupMismatchError(f"{name} contains elements of another group")
        if x not in out:
            out.append(x)
    if not out:
        raise ValueError(f"{name} must be nonempty")
    return tuple(sorted(out, key=group.sort_key))


@dataclass(frozen=True)
class UPReport:
    """Census of X*Y: every product with its factor pairs."""

    x: tuple[GroupElement, ...]
    y: tuple[GroupElement, ...]
    products: tuple[tuple[GroupElement, tuple[tuple[GroupElement, GroupElement], ...]], ...]
    unique_elements: tuple[GroupElement, ...]

    @property
    def unique_count(self) -> int:
        return len(self.unique_elements)

    @property
    def has_unique_product(self) -> bool:
        return bool(self.unique_elements)

    @property
    def total_factorizations(self) -> int:
        return sum(len(pairs) for _, pairs in self.products)

    def distinct_y_count(self) -> int:
        ys = []
        lookup = dict(self.products)
        for v in self.unique_elements:
            (_, yv), = lookup[v]
            if yv not in ys:
                ys.append(yv)
        return len(ys)


def up_check(X: Iterable[GroupElement], Y: Iterable[GroupElement]) -> UPReport:
    """Exact factorization census of X*Y; UP holds iff a unique element exists."""
    xs = list(X)
    if not xs:
        raise ValueError("X must be nonempty")
    group = xs[0].group
    xt = _as_sorted_set(group, xs, "X")
    yt = _as_sorted_set(group, Y, "Y")
    census: dict[GroupElement, list] = {}
    for x in xt:
        for y in yt:
            census.setdefault(x * y, []).append((x, y))
    products = tuple(
        (v, tuple(census[v])) for v in sorted(census, key=group.sort_key)
    )
    unique = tuple(v for v, pairs in products if len(pairs) == 1)
    return UPReport(xt, yt, products, unique)


@dataclass(frozen=True)
class StrongUPResult:
    holds: bool
    witness: Optional[tuple[tuple[GroupElement, GroupElement], tuple[GroupElement, GroupElement]]]
    report: UPReport


def strong_up_check(X: Iterable[GroupElement], Y: Iterable[GroupElement]) -> StrongUPResult:
    """Two uniquely decomposable elements with distinct Y-factors, or fails."""
    report = up_check(X, Y)
    if len(report.y) < 2:
        raise ValueError("the strong UP property needs |Y| >= 2")
    lookup = dict(report.products)
    by_y: dict[GroupElement, tuple[GroupElement, GroupElement]] = {}
    for v in report.unique_elements:
        (xv, yv), = lookup[v]
        if yv not in by_y:
            by_y[yv] = (xv, yv)
        if len(by_y) >= 2:
            w = sorted(by_y.values(), key=lambda p: report.x[0].group.sort_key(p[1]))
            return StrongUPResult(True, (w[0], w[1]), report)
    return StrongUPResult(False, None, report)


@dataclass(frozen=True)
class UP4Result:
    holds: bool
    witness: Optional[tuple[GroupElement, tuple[GroupElement, GroupElement, GroupElement, GroupElement]]]
    total_quadruples: int


def up4_check(
    A: Iterable[GroupElement],
    B: Iterable[GroupElement],
    C: Iterable[GroupElement],
    D: Iterable[GroupElement],
) -> UP4Result:
    """A product abcd with exactly one factorization, or fails."""
    sets = [list(s) for s in (A, B, C, D)]
    if any(not s for s in sets):
        raise ValueError("all four subsets must be nonempty")
    group = sets[0][0].group
    a4, b4, c4, d4 = (_as_sorted_set(group, s, nm) for s, nm in zip(sets, "ABCD"))
    census: dict[GroupElement, list] = {}
    for a in a4:
        ab = a
        for b in b4:
            ab2 = ab * b
            for c in c4:
                abc = ab2 * c
                for d in d4:
                    census.setdefault(abc * d, []).append((a, b, c, d))
    total = len(a4) * len(b4) * len(c4) * len(d4)
    for v in sorted(census, key=group.sort_key):
        if len(census[v]) == 1:
            return UP4Result(True, (v, census[v][0]), total)
    return UP4Result(False, None, total)


@dataclass(frozen=True)
class UP4ImplicationReport:
    applicable: bool
    note: str
    strong: StrongUPResult
    up4: Optional[UP4Result]
    consistent: bool


def verify_up4_implies_strong(X: Iterable[GroupElement], Y: Iterable[GroupElement]) -> UP4ImplicationReport:
    """When strong UP fails on (X, Y), the product X Y Y^-1 X^-1 must have no
    uniquely decomposable element; checks that implication by brute force."""
    strong = strong_up_check(X, Y)
    if strong.holds:
        return UP4ImplicationReport(False, "strong UP holds; implication not applicable", strong, None, True)
    xt, yt = strong.report.x, strong.report.y
    y_inv = tuple(~y for y in yt)
    x_inv = tuple(~x for x in xt)
    up4 = up4_check(xt, yt, y_inv, x_inv)
    return UP4ImplicationReport(
        True,
        "strong UP fails, so X Y Y^-1 X^-1 must have no unique quadruple product",
        strong,
        up4,
        consistent=not up4.holds,
    )


@dataclass(frozen=True)
class StrojnowskiReport:
    certified: bool
    reason: str
    unique_count: Optional[int]
    bound_met: Optional[bool]


def strojnowski_check(X: Iterable[GroupElement], Y: Iterable[GroupElement]) -> StrojnowskiReport:
    """At least two uniquely decomposable elements for nonsingleton subsets
    of a certified-orderable backend; skipped (and reported) otherwise."""
    xs = list(X)
    if not xs:
        raise ValueError("X must be nonempty")
    group = xs[0].group
    cert = group.orderable_certificate()
    if cert is None:
        return StrojnowskiReport(False, f"backend {group.kind} is not certified orderable", None, None)
    report = up_check(xs, Y)
    if len(report.x) < 2 or len(report.y) < 2:
        raise ValueError("the Strojnowski bound needs nonsingleton subsets")
    return StrojnowskiReport(True, cert, report.unique_count, report.unique_count >= 2)


# ---------------------------------------------------------------------------
# witness search


@dataclass(frozen=True)
class WitnessSearchResult:
    witness: Optional[tuple[GroupElement, ...]]
    verified: bool
    sizes_exhausted: tuple[int, ...]
    sizes_truncated: tuple[int, ...]
    subsets_tested: int
    elapsed_ms: int

    @property
    def found(self) -> bool:
        return self.witness is not None


def naive_no_unique_product(S: Sequence[GroupElement]) -> bool:
    """Plain-dictionary census, independent of the accelerated search path."""
    counts: dict[GroupElement, int] = {}
    for x in S:
        for y in S:
            v = x * y
            counts[v] = counts.get(v, 0) + 1
    return all(c >= 2 for c in counts.values())


def search_nonup_witness(
    group: Group,
    radius: int,
    maxsize: int,
    gens: Optional[Sequence[GroupElement]] = None,
    caps: Caps = DEFAULT_CAPS,
) -> WitnessSearchResult:
    """Search symmetric subsets S = S^-1 of ball(radius) with up to `maxsize`
    elements such that S*S has no uniquely decomposable element.

    Breadth-first over subset size; subsets are unions of inverse pairs (plus
    optionally the identity), enumerated in lexicographic order of the sorted
    atom list, so the first witness is deterministic.  Any witness found is
    re-verified with an independent naive census.
    """
    start = time.monotonic()
    budget = caps.budget_ms / 1000.0
    ball = sorted(group.ball(radius, gens, caps), key=group.sort_key)
    big = sorted(group.ball(2 * radius, gens, caps.with_overrides(radius=2 * radius)), key=group.sort_key)
    index = {e: i for i, e in enumerate(big)}
    n = len(ball)
    table = np.empty((n, n), dtype=np.int32)
    for i, x in enumerate(ball):
        for j, y in enumerate(ball):
            table[i, j] = index[x * y]
    ident = group.identity()
    atoms: list[tuple[int, ...]] = []
    used = set()
    for e in ball:
        if e == ident or e in used:
            continue
        inv = ~e
        used.add(e)
        used.add(inv)
        if inv == e:
            atoms.append((ball.index(e),))
        else:
            atoms.append((ball.index(e), ball.index(inv)))
    ident_idx = ball.index(ident)

    tested = 0
    exhausted: list[int] = []
    truncated: list[int] = []

    def out_of_time() -> bool:
        return time.monotonic() - start > budget

    minlen = len(big)

    for size in range(2, maxsize + 1):
        if out_of_time():
            truncated.append(size)
            continue
        hit_deadline = False
        for with_ident in (False, True):
            pair_budget = size - (1 if with_ident else 0)
            if pair_budget < 0:
                continue
            for combo in _atom_combinations(atoms, pair_budget):
                if tested % 2048 == 0 and out_of_time():
                    hit_deadline = True
                    break
                idx = [ident_idx] if with_ident else []
                for a in combo:
                    idx.extend(a)
                tested += 1
                sub = table[np.ix_(idx, idx)]
                counts = np.bincount(sub.ravel(), minlength=minlen)
                if not np.any(counts[sub] == 1):
                    witness = tuple(ball[i] for i in idx)
                    ok = naive_no_unique_product(witness)
                    elapsed = int((time.monotonic() - start) * 1000)
                    return WitnessSearchResult(
                        witness, ok, tuple(exhausted), tuple(truncated), tested, elapsed
                    )
            if hit_deadline:
                break
        if hit_deadline:
            truncated.append(size)
        else:
            exhausted.append(size)
    elapsed = int((time.monotonic() - start) * 1000)
    return WitnessSearchResult(None, False, tuple(exhausted), tuple(truncated), tested, elapsed)


def _atom_combinations(atoms: list[tuple[int, ...]], budget: int):
    """Atom subsets whose sizes sum to `budget`, in lexicographic order."""

    def rec(start: int, left: int, acc: list):
        if left == 0:
            yield tuple(acc)
            return
        for i in range(start, len(atoms)):
            a = atoms[i]
            if len(a) <= left:
                acc.append(a)
                yield from rec(i + 1, left - len(a), acc)
                acc.pop()

    yield from rec(0, budget, [])
