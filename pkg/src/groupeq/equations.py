"""Ordinary equations over a group: classification and the minimal normal form.

An equation is a coefficient-exponent sequence over a backend G; its word
lives in G * <t>.  Over a split G = H * K the unimodular normal form

    c t b_1 t^-1 a_1 t ... b_n t^-1 a_n t = 1

is computed with m (the K-copy window) minimal first and n minimal second.
The construction works in G * <t> viewed as an HNN extension with stable
letter t over the base H-bar * K_0 * ... * K_m: cyclic pinch reduction
("window shifting plus merging") yields the canonical t-pattern, whose shape
decides between the length-one case t = u and the normal form, and whose
pieces are the c, a_i, b_i.  An independent rotation/shift minimizer is
provided as the desk-scale verification oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .backends import FreeProductGroup, Group, GroupElement
from .config import DEFAULT_CAPS, Caps
from .errors import (
    EquationError,
    EquationOverFactorError,
    GroupMismatchError,
    InternalError,
    SigmaError,
    SymbolClashError,
    WindowError,
)
from .words import (
    Ambient,
    FPWord,
    Presentation,
    conjugate_into,
    conjugate_words,
    is_conjugate_to_constant,
    presentation_of,
)

T_LETTER = "t"

SINGULAR = "singular"
NONSINGULAR = "nonsingular"
UNIMODULAR = "unimodular"


# ---------------------------------------------------------------------------
# equations and classification


@dataclass(frozen=True)
class Equation:
    """g_1 t^{e_1} ... g_n t^{e_n} = 1 with constants from one backend."""

    group: Group
    terms: tuple[tuple[GroupElement, int], ...]

    def __post_init__(self):
        if not self.terms:
            raise EquationError("an equation needs at least one term")
        for g, e in self.terms:
            if g.group != self.group:
                raise GroupMismatchError("coefficient outside the equation's group")
            if e == 0:
                raise EquationError("exponents must be nonzero")

    def ambient(self) -> Ambient:
        return Ambient((self.group,), (T_LETTER,))

    def word(self) -> FPWord:
        items = []
        for g, e in self.terms:
            items.append((0, g))
            items.append((T_LETTER, e))
        return FPWord.build(self.ambient(), items)

    def refined_ambient(self) -> Ambient:
        if not isinstance(self.group, FreeProductGroup):
            raise EquationError("refined words need a free-product coefficient group")
        return Ambient(self.group.factors, (T_LETTER,))

    def refined_word(self) -> FPWord:
        """The word with G-coefficients split into their factor syllables."""
        amb = self.refined_ambient()
        items = []
        for g, e in self.terms:
            items.extend(g.payload)
            items.append((T_LETTER, e))
        return FPWord.build(amb, items)

    def exponent_sum(self) -> int:
        return sum(e for _, e in self.terms)

    def inverted(self) -> "Equation":
        """A conjugate of the inverse word, back in coefficient-exponent form:
        (g_1^-1, -e_n), (g_n^-1, -e_{n-1}), ..., (g_2^-1, -e_1)."""
        rebuilt = [(~self.terms[0][0], -self.terms[-1][1])]
        for j in range(len(self.terms) - 1, 0, -1):
            rebuilt.append((~self.terms[j][0], -self.terms[j - 1][1]))
        return Equation(self.group, tuple(rebuilt))


@dataclass(frozen=True)
class Classification:
    length: int
    exponent_sum: int
    kind: str
    trivial: bool


def classify(e: Equation) -> Classification:
    w = e.word()
    sigma = e.exponent_sum()
    length = w.letter_length(T_LETTER)
    if sigma == 0:
        kind = SINGULAR
    elif sigma in (1, -1):
        kind = UNIMODULAR
    else:
        kind = NONSINGULAR
    return Classification(length, sigma, kind, is_conjugate_to_constant(w, 0))


def universal_solution_group(e: Equation) -> Presentation:
    """Presentation of U = G * <t>_infty / <<w>>."""
    pres = presentation_of(e.group)
    if T_LETTER in pres.generators:
        raise SymbolClashError("the coefficient group already uses the letter t")
    gens = pres.generators + (T_LETTER,)
    out = Presentation(gens, (), pres.backing)
    amb = out.ambient()
    rels = [FPWord.build(amb, r.syllables) for r in pres.relators]
    items: list[tuple[str, int]] = []
    for g, exp in e.terms:
        items.extend(e.group.express(g))
        items.append((T_LETTER, exp))
    rels.append(FPWord.build(amb, items))
    return Presentation(gens, tuple(rels), pres.backing)


# ---------------------------------------------------------------------------
# splits and leveled words


@dataclass(frozen=True)
class Split:
    """Partition of the factors of G = H * K by factor index."""

    h: frozenset[int]
    k: frozenset[int]

    @staticmethod
    def of(group: FreeProductGroup, h: Sequence[int], k: Optional[Sequence[int]] = None) -> "Split":
        all_idx = set(range(len(group.factors)))
        hs = frozenset(h)
        ks = frozenset(k) if k is not None else frozenset(all_idx - hs)
        if hs | ks != all_idx or hs & ks:
            raise EquationError("split must partition the factor indices")
        if not ks:
            raise EquationError("the K side of the split must be nonempty")
        return Split(hs, ks)


@dataclass(frozen=True)
class LeveledWord:
    """Element of the normal closure of G in G*<t>: syllables x at level l
    stand for t^-l x t^l, adjacent syllables differ in (level, factor)."""

    group: FreeProductGroup
    syllables: tuple[tuple[int, int, GroupElement], ...] = ()

    @staticmethod
    def build(group: FreeProductGroup, items: Sequence[tuple[int, int, GroupElement]]) -> "LeveledWord":
        stack: list[tuple[int, int, GroupElement]] = []
        for lvl, fi, el in items:
            if el.is_identity:
                continue
            if stack and stack[-1][0] == lvl and stack[-1][1] == fi:
                prod = stack[-1][2] * el
                stack.pop()
                if not prod.is_identity:
                    stack.append((lvl, fi, prod))
            else:
                stack.append((lvl, fi, el))
        return LeveledWord(group, tuple(stack))

    def __mul__(self, other: "LeveledWord") -> "LeveledWord":
        return LeveledWord.build(self.group, self.syllables + other.syllables)

    def __invert__(self) -> "LeveledWord":
        return LeveledWord(self.group, tuple((l, fi, ~el) for l, fi, el in reversed(self.syllables)))

    def shift(self, d: int) -> "LeveledWord":
        return LeveledWord(self.group, tuple((l + d, fi, el) for l, fi, el in self.syllables))

    @property
    def is_identity(self) -> bool:
        return not self.syllables

    def k_levels(self, split: Split) -> list[int]:
        return [l for l, fi, _ in self.syllables if fi in split.k]

    def h_levels(self, split: Split) -> list[int]:
        return [l for l, fi, _ in self.syllables if fi in split.h]

    def expand(self, ambient: Ambient) -> FPWord:
        items: list = []
        for l, fi, el in self.syllables:
            items.append((T_LETTER, -l))
            items.append((fi, el))
            items.append((T_LETTER, l))
        return FPWord.build(ambient, items)

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        return " ".join(
            f"{self.group.factors[fi].format_element(el)}@{l}" for l, fi, el in self.syllables
        )


def _in_window(word: LeveledWord, split: Split, lo: int, hi: int) -> bool:
    """Membership in H-bar * K_lo * ... * K_hi (syllable inspection)."""
    return all(lo <= l <= hi for l in word.k_levels(split))


# ---------------------------------------------------------------------------
# the cyclic HNN word and its pinch reduction


class _CyclicHNN:
    """Cyclic word t^{d_0} p_0 t^{d_1} p_1 ... with base pieces, over the
    base H-bar * K_0..K_m and associated subgroups A = H-bar * K_0..K_{m-1},
    B = A^t."""

    def __init__(self, letters: list[int], pieces: list[LeveledWord], split: Split, m: int):
        if len(letters) != len(pieces):
            raise InternalError("letters and pieces must alternate")
        self.letters = letters
        self.pieces = pieces
        self.split = split
        self.m = m

    def _in_a(self, p: LeveledWord) -> bool:
        return _in_window(p, self.split, 0, self.m - 1)

    def _in_b(self, p: LeveledWord) -> bool:
        return _in_window(p, self.split, 1, self.m)

    def reduce(self) -> None:
        while True:
            r = len(self.letters)
            if r <= 1:
                return
            hit = None
            for j in range(r):
                nxt = (j + 1) % r
                if self.letters[j] == -1 and self.letters[nxt] == 1 and self._in_a(self.pieces[j]):
                    hit = (j, nxt, +1)
                    break
                if self.letters[j] == 1 and self.letters[nxt] == -1 and self._in_b(self.pieces[j]):
                    hit = (j, nxt, -1)
                    break
            if hit is None:
                return
            j, nxt, d = hit
            prev = (j - 1) % len(self.letters)
            if prev == nxt:
                raise InternalError("pinch on a two-letter word; exponent sum parity broken")
            merged = self.pieces[prev] * self.pieces[j].shift(d) * self.pieces[nxt]
            self.pieces[prev] = merged
            for idx in sorted((j, nxt), reverse=True):
                del self.letters[idx]
                del self.pieces[idx]

    def pattern_shape(self) -> str:
        """'length-one' | 'form6' | 'other' for the cyclic letter pattern."""
        r = len(self.letters)
        if r == 1:
            return "length-one"
        pp = sum(
            1 for j in range(r) if self.letters[j] == 1 and self.letters[(j + 1) % r] == 1
        )
        mm = sum(
            1 for j in range(r) if self.letters[j] == -1 and self.letters[(j + 1) % r] == -1
        )
        return "form6" if pp == 1 and mm == 0 else "other"


def _initial_hnn(core: FPWord) -> tuple[list[int], list[list], tuple]:
    sylls = core.syllables
    ti = next((i for i, (s, _) in enumerate(sylls) if s == T_LETTER), None)
    if ti is None:
        raise InternalError("core word has no t letters")
    rot = sylls[ti:] + sylls[:ti]
    letters: list[int] = []
    pieces: list[list] = []
    for src, val in rot:
        if src == T_LETTER:
            s = 1 if val > 0 else -1
            for _ in range(abs(val)):
                letters.append(s)
                pieces.append([])
        else:
            pieces[-1].append((0, src, val))
    return letters, pieces, rot


@dataclass(frozen=True)
class SideConditions:
    length_at_least_two: bool
    a_outside_smaller_window: tuple[bool, ...]
    b_outside_shifted_window: tuple[bool, ...]
    transcendence_note: str

    @property
    def all_pass(self) -> bool:
        return (
            self.length_at_least_two
            and all(self.a_outside_smaller_window)
            and all(self.b_outside_shifted_window)
        )


@dataclass(frozen=True)
class Form6:
    """Minimal expression c t prod_i b_i t^-1 a_i t of a unimodular equation."""

    m: int
    n: int
    c: LeveledWord
    pairs: tuple[tuple[LeveledWord, LeveledWord], ...]  # (b_i, a_i)
    split: Split
    equation: Equation
    sigma_inverted: bool
    side_conditions: SideConditions

    def expand(self) -> FPWord:
        amb = self.equation.refined_ambient()
        t = FPWord.letter(amb, T_LETTER)
        out = self.c.expand(amb) * t
        for b, a in self.pairs:
            out = out * b.expand(amb) * (~t) * a.expand(amb) * t
        return out

    def c_word(self) -> FPWord:
        return self.c.expand(self.equation.refined_ambient())

    def pair_words(self) -> tuple[tuple[FPWord, FPWord], ...]:
        amb = self.equation.refined_ambient()
        return tuple((b.expand(amb), a.expand(amb)) for b, a in self.pairs)


@dataclass(frozen=True)
class LengthOneForm:
    """The degenerate branch: the equation rewrites as t = u over H-bar * K."""

    m: int
    u: LeveledWord
    equation: Equation
    sigma_inverted: bool

    def u_word(self) -> FPWord:
        return self.u.expand(self.equation.refined_ambient())


@dataclass(frozen=True)
class NormalFormResult:
    kind: str  # "form6" | "length-one"
    form6: Optional[Form6] = None
    length_one: Optional[LengthOneForm] = None


def _prepare(e: Equation, split: Split) -> tuple[Equation, bool, FPWord]:
    sigma = e.exponent_sum()
    if sigma == -1:
        e, inverted = e.inverted(), True
    elif sigma == 1:
        inverted = False
    else:
        raise SigmaError(f"normal form needs exponent sum +-1, got {sigma}")
    if not isinstance(e.group, FreeProductGroup):
        raise EquationError("normal form needs a free-product coefficient group")
    if split.h | split.k != set(range(len(e.group.factors))):
        raise EquationError("split does not match the group's factors")
    w = e.refined_word()
    allowed = set(split.h) | {T_LETTER}
    if conjugate_into(w, allowed):
        raise EquationOverFactorError("the word is conjugate into H * <t>")
    return e, inverted, w


def _leveled_span(rot: Sequence, split: Split) -> int:
    cum = 0
    lvls = []
    for src, val in rot:
        if src == T_LETTER:
            cum += val
        elif src in split.k:
            lvls.append(-cum)
    if not lvls:
        raise InternalError("no K syllables after the over-H check")
    return max(lvls) - min(lvls)


def normal_form_6(
    e: Equation,
    split: Split,
    caps: Caps = DEFAULT_CAPS,
    verify: bool = False,
) -> NormalFormResult:
    """Minimal (m, then n) expression of a unimodular equation over H * K.

    Returns the length-one certificate t = u when the reduced expression has
    a single t, and the Form6 data otherwise.  Minimality over all conjugate
    expressions follows from the invariance of the reduced cyclic t-pattern;
    the `verify` flag cross-checks against the exhaustive minimizer.
    """
    e, inverted, w = _prepare(e, split)
    group: FreeProductGroup = e.group  # type: ignore[assignment]
    core, _ = w.cyclic_reduce()
    letters0, pieces0, rot = _initial_hnn(core)
    if sum(letters0) != 1:
        raise InternalError("exponent sum deviated from +1")
    span = _leveled_span(rot, split)

    result: Optional[NormalFormResult] = None
    for m in range(span + 1):
        letters = list(letters0)
        pieces = [LeveledWord.build(group, p) for p in pieces0]
        word = _CyclicHNN(letters, pieces, split, m)
        word.reduce()
        shape = word.pattern_shape()
        if shape == "length-one":
            if m != 0:
                raise InternalError("length-one pattern first appeared with m > 0")
            u = ~word.pieces[0]
            lf = LengthOneForm(m, u, e, inverted)
            _check_expansion_length_one(lf)
            result = NormalFormResult("length-one", length_one=lf)
            break
        if shape == "form6":
            result = NormalFormResult("form6", form6=_extract_form6(word, e, split, inverted, m))
            break
    if result is None:
        raise InternalError("no expressible window up to the leveled span")
    if verify:
        _verify_against_oracle(e, split, result, caps)
    return result


def _extract_form6(word: _CyclicHNN, e: Equation, split: Split, inverted: bool, m: int) -> Form6:
    letters, pieces = word.letters, word.pieces
    r = len(letters)
    n = (r - 1) // 2
    anchor = next(
        j for j in range(r) if letters[j] == 1 and letters[(j + 1) % r] == 1
    )
    c = pieces[anchor]
    pairs = []
    pos = (anchor + 1) % r
    for _ in range(n):
        b = pieces[pos]
        a = pieces[(pos + 1) % r]
        if letters[pos] != 1 or letters[(pos + 1) % r] != -1:
            raise InternalError("pattern extraction misaligned")
        pairs.append((b, a))
        pos = (pos + 2) % r
    a_ok = tuple(not _in_window(a, split, 0, m - 1) for _, a in pairs)
    b_ok = tuple(not _in_window(b, split, 1, m) for b, _ in pairs)
    side = SideConditions(
        length_at_least_two=n >= 1,
        a_outside_smaller_window=a_ok,
        b_outside_shifted_window=b_ok,
        transcendence_note="implied by the membership conditions",
    )
    if not side.all_pass:
        raise InternalError("reduced pieces violate the membership conditions")
    f = Form6(m, n, c, tuple(pairs), split, e, inverted, side)
    if not conjugate_words(f.expand(), e.refined_word()):
        raise InternalError("expansion is not conjugate to the input word")
    return f


def _check_expansion_length_one(lf: LengthOneForm) -> None:
    amb = lf.equation.refined_ambient()
    t = FPWord.letter(amb, T_LETTER)
    expansion = t * ~lf.u.expand(amb)
    if not conjugate_words(expansion, lf.equation.refined_word()):
        raise InternalError("length-one expansion is not conjugate to the input word")


def _verify_against_oracle(e: Equation, split: Split, result: NormalFormResult, caps: Caps) -> None:
    oracle = bruteforce_min_form6(e, split, caps.oracle_m, caps.oracle_n)
    if oracle is None:
        raise InternalError("oracle found no expression inside its caps")
    om, on = oracle
    if result.kind == "length-one":
        got = (result.length_one.m, 0)
    else:
        got = (result.form6.m, result.form6.n)
    if got != (om, on):
        raise InternalError(f"minimizer disagreement: reduction {got}, oracle {oracle}")


# ---------------------------------------------------------------------------
# the exhaustive desk-scale minimizer (independent oracle)


def _rotation_strings(e: Equation, split: Split) -> list[list[tuple[int, int, GroupElement]]]:
    """Leveled strings of t^-1 * (rotation of the cyclic core), one per
    factor-syllable anchor; t-anchored rotations are shift-equivalent."""
    w = e.refined_word()
    core, _ = w.cyclic_reduce()
    sylls = core.syllables
    out = []
    for i, (src, _) in enumerate(sylls):
        if src == T_LETTER:
            continue
        rot = sylls[i:] + sylls[:i]
        cum = 0
        string = []
        for s, v in rot:
            if s == T_LETTER:
                cum += v
            else:
                string.append((-cum, s, v))
        out.append(string)
    return out


def _min_blocks(string: list, split: Split, delta: int, m: int) -> Optional[int]:
    """Minimal number of S-minus runs over block assignments, or None."""
    INF = 10 ** 9
    dp0, dp1 = 0, 1  # start in c (cost 0) or with empty c in b_1 (cost 1)
    for lvl, fi, _ in string:
        l = lvl + delta
        adm0 = fi in split.h or 0 <= l <= m
        adm1 = fi in split.h or -1 <= l <= m - 1
        n0 = min(dp0, dp1) if adm0 else INF
        n1 = min(dp1, dp0 + 1) if adm1 else INF
        dp0, dp1 = n0, n1
        if dp0 >= INF and dp1 >= INF:
            return None
    best = min(dp0, dp1)
    return best if best < INF else None


def bruteforce_min_form6(
    e: Equation,
    split: Split,
    max_m: int = 4,
    max_n: int = 8,
) -> Optional[tuple[int, int]]:
    """Exhaustive lexicographic minimum of (m, n) over all expressions.

    Enumerates every rotation of the cyclic word, every window shift, and
    every block assignment of syllables to the c/a_i (window [0, m]) and
    b_i^(t^-1) (window [-1, m-1]) slots; (m, 0) encodes the length-one case.
    """
    e2, _, _ = _prepare(e, split)
    strings = _rotation_strings(e2, split)
    if not strings:
        return None
    for m in range(max_m + 1):
        best: Optional[int] = None
        for string in strings:
            klv = [l for l, fi, _ in string if fi in split.k]
            if not klv:
                continue
            klo, khi = min(klv), max(klv)
            for delta in range(-1 - klo, m - khi + 1):
                got = _min_blocks(string, split, delta, m)
                if got is not None and (best is None or got < best):
                    best = got
        if best is not None and best <= max_n:
            return (m, best)
    return None


# ---------------------------------------------------------------------------
# system (7)


def _copy_names(group: FreeProductGroup, indices: Sequence[int]) -> dict[int, tuple[str, ...]]:
    mangled = group._mangled()
    return {fi: mangled[fi] for fi in indices}


def emit_system_7(f: Form6, window: int = 8, var: str = "x") -> Presentation:
    """The shift-plus-equation system over the windowed copies of H and K.

    Generators: one copy of each H-factor generator per level in
    [-window, window], one copy of each K-factor generator per level in
    [0, m], plus the unknown.  Relators: the shift conjugations
    x^-1 g@i x = g@(i+1) (H levels below the window top, K levels below m)
    and the main equation c x prod b_i x^-1 a_i x.
    """
    group: FreeProductGroup = f.equation.group  # type: ignore[assignment]
    if f.n < 1:
        raise EquationError("system (7) needs n >= 1")
    h_levels = [l for w in _pieces_of(f) for l in w.h_levels(f.split)]
    if any(abs(l) > window for l in h_levels):
        raise WindowError(f"window {window} does not contain the H levels {sorted(set(h_levels))}")
    mangled = group._mangled()

    def copy_name(fi: int, base: str, lvl: int) -> str:
        ren = dict(zip(group.factors[fi].presentation_data().names, mangled[fi]))
        return f"{ren[base]}@{lvl}"

    gens: list[str] = [var]
    for fi in sorted(f.split.h):
        for nm in group.factors[fi].presentation_data().names:
            for lvl in range(-window, window + 1):
                gens.append(copy_name(fi, nm, lvl))
    for fi in sorted(f.split.k):
        for nm in group.factors[fi].presentation_data().names:
            for lvl in range(0, f.m + 1):
                gens.append(copy_name(fi, nm, lvl))
    pres = Presentation(tuple(gens), ())
    amb = pres.ambient()
    x = FPWord.letter(amb, var)
    rels: list[FPWord] = []
    for fi in sorted(f.split.h):
        for nm in group.factors[fi].presentation_data().names:
            for lvl in range(-window, window):
                g_i = FPWord.letter(amb, copy_name(fi, nm, lvl))
                g_next = FPWord.letter(amb, copy_name(fi, nm, lvl + 1))
                rels.append((~x) * g_i * x * (~g_next))
    for fi in sorted(f.split.k):
        for nm in group.factors[fi].presentation_data().names:
            for lvl in range(0, f.m):
                g_i = FPWord.letter(amb, copy_name(fi, nm, lvl))
                g_next = FPWord.letter(amb, copy_name(fi, nm, lvl + 1))
                rels.append((~x) * g_i * x * (~g_next))

    def piece_word(w: LeveledWord) -> FPWord:
        items: list[tuple[str, int]] = []
        for lvl, fi, el in w.syllables:
            for nm, e in group.factors[fi].express(el):
                items.append((copy_name(fi, nm, lvl), e))
        return FPWord.build(amb, items)

    main = piece_word(f.c) * x
    for b, a in f.pairs:
        main = main * piece_word(b) * (~x) * piece_word(a) * x
    rels.append(main)
    return Presentation(tuple(gens), tuple(rels))


def _pieces_of(f: Form6) -> list[LeveledWord]:
    out = [f.c]
    for b, a in f.pairs:
        out.extend((b, a))
    return out
