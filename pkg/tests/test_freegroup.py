import itertools
import random

import pytest
from hypothesis import given, strategies as st

from groupeq.backends import FreeGroup, cyclic_group
from groupeq.errors import EquationError
from groupeq.freegroup import (
    MultiVarEquation,
    corollary_precheck,
    exponent_sums,
    proper_power,
)

from conftest import random_free_word


@pytest.fixture(scope="module")
def F():
    return FreeGroup(("a", "b"))


def test_proper_power_examples(F):
    a, b = F.gens()
    d = proper_power(a * b * a * b)
    assert (d.exponent, d.root) == (2, a * b)
    d2 = proper_power(a * b * ~a * ~b)
    assert d2.exponent == 1
    d3 = proper_power(a)
    assert d3.exponent == 1 and d3.root == a


def test_proper_power_identity_on_input(F, rng):
    for _ in range(300):
        w = random_free_word(rng, F, 8)
        if w.is_identity:
            continue
        d = proper_power(w)
        assert d.root ** d.exponent == w
        assert d.conjugator * d.core_root ** d.exponent * ~d.conjugator == w


def test_proper_power_empty_rejected(F):
    with pytest.raises(EquationError):
        proper_power(F.identity())


def _reduced_words(F, length):
    letters = [(0, 1), (0, -1), (1, 1), (1, -1)]
    for combo in itertools.product(letters, repeat=length):
        ok = all(
            combo[i][0] != combo[i + 1][0] or combo[i][1] == combo[i + 1][1]
            for i in range(length - 1)
        )
        if ok:
            w = F.word([(F.names[g], s) for g, s in combo])
            yield w


def _strip_borders(F, w):
    letters = list(FreeGroup.letters(w))
    while len(letters) >= 2 and letters[0] == (letters[-1][0], -letters[-1][1]):
        letters = letters[1:-1]
    return F.word([(F.names[g], s) for g, s in letters])


def _core_power_table(F, max_len=8):
    """Independent oracle table: powers u^k of every candidate root of
    length up to max_len / 2 (roots of a cyclically reduced word are
    cyclically reduced, so |u^k| = k|u| and the length bound is exact)."""
    table = {}
    for rl in range(1, max_len // 2 + 1):
        for u in _reduced_words(F, rl):
            for k in range(2, max_len // rl + 1):
                p = u ** k
                if FreeGroup.length(p) != k * rl:
                    continue  # u was not cyclically reduced
                prev = table.get(p.payload, 1)
                if k > prev:
                    table[p.payload] = k
    return table


def test_proper_power_matches_bruteforce_oracle(F):
    table = _core_power_table(F, 8)
    count = 0
    for length in range(1, 9):
        for w in _reduced_words(F, length):
            d = proper_power(w)
            core = _strip_borders(F, w)
            oracle_exp = table.get(core.payload, 1)
            assert d.exponent == oracle_exp, f"{w}: {d.exponent} vs {oracle_exp}"
            count += 1
    assert count == sum(4 * 3 ** (length - 1) for length in range(1, 9))


def test_proper_power_of_powers(F, rng):
    # exponent of w^k is k times the exponent of the cyclic core of w
    for _ in range(150):
        w = random_free_word(rng, F, 4)
        if w.is_identity:
            continue
        base = proper_power(w)
        for k in range(2, 6):
            d = proper_power(w ** k)
            # w^k is conjugate to core^k, whose exponent is k * base.exponent
            assert d.exponent == k * base.exponent


def test_proper_power_conjugation_invariant(F, rng):
    for _ in range(200):
        w = random_free_word(rng, F, 5)
        if w.is_identity:
            continue
        z = random_free_word(rng, F, 4)
        d1 = proper_power(w)
        d2 = proper_power(z * w * ~z)
        assert d1.exponent == d2.exponent


def test_exponent_sums_examples(F):
    a, b = F.gens()
    assert exponent_sums(a * b * ~a * ~b) == (0, 0)
    assert exponent_sums(a ** 2 * ~b) == (2, -1)


def test_exponent_sums_homomorphism_and_conjugation(F, rng):
    for _ in range(1000):
        u = random_free_word(rng, F, 5)
        v = random_free_word(rng, F, 5)
        su, sv = exponent_sums(u), exponent_sums(v)
        assert exponent_sums(u * v) == tuple(x + y for x, y in zip(su, sv))
        assert exponent_sums(v * u * ~v) == su


@given(st.lists(st.tuples(st.integers(0, 1), st.sampled_from([-2, -1, 1, 2])), max_size=6))
def test_exponent_sums_invariant_under_reduction(items):
    F2 = FreeGroup(("a", "b"))
    w = F2.word([(F2.names[g], e) for g, e in items])
    raw = [0, 0]
    for g, e in items:
        raw[g] += e
    assert exponent_sums(w) == tuple(raw)


def test_corollary_precheck_examples():
    C3 = cyclic_group(3)
    g = C3.element(1)
    comm = MultiVarEquation(
        C3, ("x1", "x2"),
        ((g, "x1", 1), (g, "x2", 1), (g, "x1", -1), (g, "x2", -1)),
    )
    rep = corollary_precheck(comm)
    assert rep.status == "corollary-applies"
    assert rep.decomposition.exponent == 1

    sq = MultiVarEquation(C3, ("x1",), ((g, "x1", 2),))
    rep2 = corollary_precheck(sq)
    assert rep2.status == "corollary-silent"
    assert rep2.decomposition.exponent == 2
    assert str(rep2.decomposition.root) == "x1"

    degenerate = MultiVarEquation(C3, ("x1",), ((g, "x1", 1), (g, "x1", -1)))
    assert corollary_precheck(degenerate).status == "degenerate"


def test_multivar_equation_validates():
    C3 = cyclic_group(3)
    g = C3.element(1)
    with pytest.raises(EquationError):
        MultiVarEquation(C3, ("x1",), ((g, "zz", 1),))
