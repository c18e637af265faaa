"""Generalized equations g_1 t_1 ... g_n t_n = 1 with a variable group T.

Covers the unimodularity verdict (infinite order of the total product,
normality of the cyclic subgroup it generates, strong unique products in the
quotient), the coset rewriting t prod_i g_i^{c_{x_i} t^{k_i}} = 1, the
conjugated family, the K_Y presentations, the windowed solution-group
presentation, and the reduction to an ordinary equation over G x T or G * T.

Variable groups must support coset representatives of <t>; the shipped
backends are free and free abelian groups.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .backends import (
    DirectProductGroup,
    FreeAbelianGroup,
    FreeGroup,
    FreeProductGroup,
    Group,
    GroupElement,
    QuotientFreeAbelianGroup,
)
from .config import DEFAULT_CAPS, Caps
from .errors import (
    EquationError,
    GroupMismatchError,
    InternalError,
    NormalityError,
    UnsupportedBackendError,
    WindowError,
)
from .equations import Equation
from .up import strong_up_check, up_check
from .words import Ambient, FPWord, Presentation, presentation_of

T_LETTER = "t"


@dataclass(frozen=True)
class GeneralizedEquation:
    group: Group
    vargroup: Group
    pairs: tuple[tuple[GroupElement, GroupElement], ...]

    def __post_init__(self):
        if not self.pairs:
            raise EquationError("a generalized equation needs at least one pair")
        for g, t in self.pairs:
            if g.group != self.group:
                raise GroupMismatchError("coefficient outside G")
            if t.group != self.vargroup:
                raise GroupMismatchError("variable entry outside T")

    def ambient(self) -> Ambient:
        return Ambient((self.group, self.vargroup), ())

    def word(self) -> FPWord:
        """The defining word in G * T."""
        amb = self.ambient()
        items = []
        for g, t in self.pairs:
            items.append((0, g))
            items.append((1, t))
        return FPWord.build(amb, items)


def total_product(ge: GeneralizedEquation) -> GroupElement:
    out = ge.vargroup.identity()
    for _, t in ge.pairs:
        out = out * t
    return out


# ---------------------------------------------------------------------------
# the unimodularity verdict (Definition 1)


@dataclass(frozen=True)
class Condition:
    status: str  # "yes" | "no" | "unknown"
    detail: str = ""
    witness: Optional[tuple] = None

    @property
    def holds(self) -> bool:
        return self.status == "yes"

    @property
    def fails(self) -> bool:
        return self.status == "no"


@dataclass(frozen=True)
class UnimodularVerdict:
    order_infinite: Condition
    subgroup_normal: Condition
    quotient_strong_up: Condition
    quotient_torsion_free: Condition  # the weak variant
    overall: str        # "unimodular" | "not-unimodular" | "unknown"
    weak_overall: str   # same statuses for the weak variant


def _require_coset_backend(T: Group) -> None:
    if not isinstance(T, (FreeGroup, FreeAbelianGroup)):
        raise UnsupportedBackendError(
            f"variable group backend {T.kind} has no <t>-coset support"
        )


def cyclic_subgroup_normal(T: Group, t: GroupElement) -> Condition:
    """Is <t> normal in T?  Checked on generators and their inverses."""
    if isinstance(T, FreeAbelianGroup):
        return Condition("yes", "abelian variable group")
    for s in T.generators():
        for z in (s, ~s):
            if T.power_solve(t.conj(z), t) is None:
                return Condition(
                    "no",
                    "witness generator conjugates t outside <t>",
                    witness=(z, t.conj(z)),
                )
    return Condition("yes", "all generator conjugates stay in <t>")


def _quotient_of(T: Group, t: GroupElement) -> QuotientFreeAbelianGroup:
    if isinstance(T, FreeAbelianGroup):
        return QuotientFreeAbelianGroup(T, t.payload)
    if isinstance(T, FreeGroup) and T.rank == 1:
        k = T.power_solve(t, T.gens()[0])
        if k is None:
            raise InternalError("rank-1 free group element is always a power")
        return QuotientFreeAbelianGroup(FreeAbelianGroup(1), (k,))
    raise UnsupportedBackendError(f"no quotient construction for {T.kind}")


def quotient_strong_up_condition(T: Group, t: GroupElement) -> tuple[Condition, Condition]:
    """(strong-UP condition, torsion-free condition) for T/<t>.

    Certification is structural: a torsion-free quotient of these backends is
    free abelian (or trivial), hence right orderable, hence strong UP.
    Falsification exhibits the finite cyclic torsion subgroup as X = Y and
    verifies by census that strong UP fails on it.
    """
    if isinstance(T, FreeGroup) and T.rank > 1:
        return (
            Condition("unknown", "quotient is not a group when <t> is not normal"),
            Condition("unknown", "quotient is not a group when <t> is not normal"),
        )
    q = _quotient_of(T, t)
    if q.content == 1:
        reason = q.orderable_certificate() or "torsion-free quotient"
        return (
            Condition("yes", f"certified structurally: {reason}"),
            Condition("yes", reason),
        )
    cyc = q.torsion_witness_sets()
    res = strong_up_check(cyc, cyc)
    if res.holds:
        raise InternalError("finite cyclic subgroup cannot have strong UP")
    strong = Condition(
        "no",
        f"torsion of order {q.content}: X = Y = cyclic subgroup has no "
        "two uniquely decomposable products with distinct Y-factors",
        witness=(cyc, cyc),
    )
    tor = Condition(
        "no",
        f"quotient has an element of order {q.content}",
        witness=(cyc[1],),
    )
    return strong, tor


def unimodular_verdict(ge: GeneralizedEquation, caps: Caps = DEFAULT_CAPS) -> UnimodularVerdict:
    T = ge.vargroup
    _require_coset_backend(T)
    t = total_product(ge)
    order = T.element_order(t)
    if order.is_infinite:
        cond1 = Condition("yes", "total product has infinite order")
    elif order.kind == "finite":
        cond1 = Condition("no", f"total product has order {order.value}", witness=(order.value,))
    else:
        cond1 = Condition("unknown", "order undecided by this backend")
    cond2 = cyclic_subgroup_normal(T, t) if not t.is_identity else Condition(
        "yes", "trivial subgroup is normal"
    )
    if t.is_identity:
        cond3 = Condition("unknown", "degenerate equation: total product is trivial")
        cond3t = Condition("unknown", "degenerate equation: total product is trivial")
    elif cond2.holds:
        cond3, cond3t = quotient_strong_up_condition(T, t)
    else:
        cond3 = Condition("unknown", "quotient is not a group when <t> is not normal")
        cond3t = Condition("unknown", "quotient is not a group when <t> is not normal")

    def overall(third: Condition) -> str:
        if cond1.holds and cond2.holds and third.holds:
            return "unimodular"
        if cond1.fails or cond2.fails or third.fails:
            return "not-unimodular"
        return "unknown"

    return UnimodularVerdict(cond1, cond2, cond3, cond3t, overall(cond3), overall(cond3t))


# ---------------------------------------------------------------------------
# coset rewriting (equation (2))


@dataclass(frozen=True)
class RewrittenEquation:
    """t^sign prod_i g_i^{c_{x_i} t^{k_i}} = 1 with coset labels x_i.

    Coset labels are the canonical representatives themselves; the identity
    coset is represented by 1.
    """

    group: Group
    vargroup: Group
    t: GroupElement
    terms: tuple[tuple[GroupElement, GroupElement, int], ...]  # (g_i, c_{x_i}, k_i)
    sign: int = 1

    def ambient(self) -> Ambient:
        return Ambient((self.group, self.vargroup), ())

    def coset_reps(self) -> tuple[GroupElement, ...]:
        seen: list[GroupElement] = []
        for _, c, _ in self.terms:
            if c not in seen:
                seen.append(c)
        return tuple(sorted(seen, key=self.vargroup.sort_key))

    def expansion(self) -> FPWord:
        amb = self.ambient()
        out = FPWord.factor(amb, 1, self.t ** self.sign)
        for g, c, k in self.terms:
            e = c * self.t ** k
            out = out * FPWord.factor(amb, 1, ~e) * FPWord.factor(amb, 0, g) * FPWord.factor(amb, 1, e)
        return out


def _merged_pairs(ge: GeneralizedEquation) -> list[tuple[GroupElement, GroupElement]]:
    """Merge interior pairs with identity t_i into the next coefficient.

    A trailing identity entry is kept as its own pair: its suffix product is
    trivial, so it lands in the identity coset with exponent 0 and the
    expansion identity stays exact.
    """
    pairs: list[tuple[GroupElement, GroupElement]] = []
    carry = ge.group.identity()
    for g, t in ge.pairs:
        g = carry * g
        carry = ge.group.identity()
        if t.is_identity:
            carry = g
        else:
            pairs.append((g, t))
    if not pairs:
        raise EquationError("degenerate generalized equation: every t_i is trivial")
    if not carry.is_identity:
        pairs.append((carry, ge.vargroup.identity()))
    return pairs


def coset_rewrite(ge: GeneralizedEquation) -> RewrittenEquation:
    """Rewrite g_1 t_1 ... g_n t_n = 1 as t prod_i g_i^{c_{x_i} t^{k_i}} = 1.

    Uses the suffix products s_i = t_i ... t_n and the backend's canonical
    coset representatives; the expansion identity is exact in G * T.
    """
    T = ge.vargroup
    _require_coset_backend(T)
    t = total_product(ge)
    if t.is_identity:
        raise EquationError("coset rewriting needs a nontrivial total product")
    pairs = _merged_pairs(ge)
    suffix = [T.identity()]
    for _, ti in reversed(pairs):
        suffix.append(ti * suffix[-1])
    suffix = list(reversed(suffix[1:]))  # suffix[i] = t_i ... t_n
    terms = []
    for (g, _), s in zip(pairs, suffix):
        c, k = T.coset_decompose(s, t)
        terms.append((g, c, k))
    re = RewrittenEquation(ge.group, T, t, tuple(terms))
    if re.expansion() != ge.word():
        raise InternalError("coset rewriting failed the expansion identity")
    return re


def rewrite_conjugate(re: RewrittenEquation, x: GroupElement) -> RewrittenEquation:
    """The member w_x of the conjugated family, for a coset label x."""
    T = re.vargroup
    c_x, _ = T.coset_decompose(x, re.t)
    u = re.t.conj(c_x)
    if u == re.t:
        eps = 1
    elif u == ~re.t:
        eps = -1
    else:
        raise NormalityError("conjugation by the label twists t outside {t, t^-1}")
    terms = []
    for g, c, k in re.terms:
        e = c * re.t ** k * c_x
        c_f, l = T.coset_decompose(e, re.t)
        if c_f * re.t ** l != e:
            raise InternalError("coset decomposition failed")
        terms.append((g, c_f, l))
    return RewrittenEquation(re.group, T, re.t, tuple(terms), sign=eps * re.sign)


def conjugate_family(re: RewrittenEquation, xs: Sequence[GroupElement]) -> tuple[RewrittenEquation, ...]:
    """Conjugate the rewritten equation by each coset label in xs.

    Requires <t> normal in T (otherwise the twist exponent is undefined).
    """
    norm = cyclic_subgroup_normal(re.vargroup, re.t)
    if not norm.holds:
        raise NormalityError("the conjugated family needs <t> normal in T")
    return tuple(rewrite_conjugate(re, x) for x in xs)


# ---------------------------------------------------------------------------
# presentations: K_Y and the windowed solution group


def _label(T: Group, c: GroupElement) -> str:
    return T.format_element(c).replace(" ", "")


def _coset_mul(T: Group, t: GroupElement, a: GroupElement, b: GroupElement) -> GroupElement:
    c, _ = T.coset_decompose(a * b, t)
    return c


def _copy_gen_names(G: Group, c_label: str) -> dict[str, str]:
    data = G.presentation_data()
    return {nm: f"{nm}@{c_label}" for nm in data.names}


def emit_ky(
    re: RewrittenEquation,
    Y: Sequence[GroupElement],
    witness_var: str = "t~",
) -> Presentation:
    """K_Y: one copy of G per coset in X_1 Y, one letter, one relator per y."""
    T, G = re.vargroup, re.group
    family = conjugate_family(re, list(Y))
    x1 = re.coset_reps()
    copies: list[GroupElement] = []
    for y in Y:
        c_y, _ = T.coset_decompose(y, re.t)
        for c in x1:
            cf = _coset_mul(T, re.t, c, c_y)
            if cf not in copies:
                copies.append(cf)
    copies.sort(key=T.sort_key)
    gens: list[str] = []
    gdata = G.presentation_data()
    for c in copies:
        ren = _copy_gen_names(G, _label(T, c))
        gens.extend(ren[nm] for nm in gdata.names)
    gens.append(witness_var)
    pres = Presentation(tuple(gens), ())
    amb = pres.ambient()
    tt = FPWord.letter(amb, witness_var)
    rels: list[FPWord] = []
    for w_y in family:
        word = tt ** w_y.sign
        for g, c, k in w_y.terms:
            ren = _copy_gen_names(G, _label(T, c))
            items = [(ren[nm], e) for nm, e in G.express(g)]
            body = FPWord.build(amb, items)
            word = word * (tt ** (-k)) * body * (tt ** k)
        rels.append(word)
    return Presentation(tuple(gens), tuple(rels))


def emit_solution_group(
    re: RewrittenEquation,
    Y: Sequence[GroupElement],
    window: int = 1,
    witness_var: str = "t~",
) -> Presentation:
    """Windowed presentation of (T x| K) / <t~ t^-1>.

    Generators: T's presentation generators, the G-copies of K_Y, and the
    extra letter.  Relators: T's relators, the K_Y relators, the action
    relators for T's generators (window >= 1; window 0 drops them), and
    t~ t^-1.  Raises WindowError when the action leaves the emitted copies.
    """
    T, G = re.vargroup, re.group
    ky = emit_ky(re, Y, witness_var)
    tpres = presentation_of(T)
    clash = set(tpres.generators) & set(ky.generators)
    if clash:
        raise WindowError(f"generator names clash between T and the copies: {clash}")
    gens = tpres.generators + ky.generators
    pres = Presentation(tuple(gens), ())
    amb = pres.ambient()
    rels = [FPWord.build(amb, r.syllables) for r in tpres.relators]
    rels += [FPWord.build(amb, r.syllables) for r in ky.relators]
    tt = FPWord.letter(amb, witness_var)
    copies = []
    for nm in ky.generators:
        if nm != witness_var and "@" in nm:
            lbl = nm.rsplit("@", 1)[1]
            if lbl not in copies:
                copies.append(lbl)
    label_to_rep = {}
    x1 = re.coset_reps()
    reps_used: list[GroupElement] = []
    for y in Y:
        c_y, _ = T.coset_decompose(y, re.t)
        for c in x1:
            cf = _coset_mul(T, re.t, c, c_y)
            if cf not in reps_used:
                reps_used.append(cf)
    for c in reps_used:
        label_to_rep[_label(T, c)] = c
    gdata = G.presentation_data()
    if window >= 1:
        for y in T.generators():
            y_items = [(nm, e) for nm, e in T.express(y)]
            y_word = FPWord.build(amb, y_items)
            u = re.t.conj(y)
            if u == re.t:
                eps = 1
            elif u == ~re.t:
                eps = -1
            else:
                raise NormalityError("the action needs <t> normal in T")
            rels.append((~y_word) * tt * y_word * (tt ** (-eps)))
            for lbl in copies:
                c = label_to_rep[lbl]
                cf, k = T.coset_decompose(c * y, re.t)
                f_lbl = _label(T, cf)
                if f_lbl not in copies:
                    raise WindowError(
                        f"action moves copy {lbl} to {f_lbl}, outside the emitted window"
                    )
                for nm in gdata.names:
                    g_x = FPWord.letter(amb, f"{nm}@{lbl}")
                    g_f = FPWord.letter(amb, f"{nm}@{f_lbl}")
                    rels.append((~y_word) * g_x * y_word * ~((tt ** (-k)) * g_f * (tt ** k)))
    t_items = [(nm, e) for nm, e in T.express(re.t)]
    t_word = FPWord.build(amb, t_items)
    rels.append(tt * ~t_word)
    return Presentation(tuple(gens), tuple(rels))


# ---------------------------------------------------------------------------
# reduction to an ordinary equation


def reduce_to_ordinary(ge: GeneralizedEquation, ambient_choice: str = "free-product") -> Equation:
    """The Levin reduction: v(G_1, t) = w(G_1, t^-1 T t) over G_1.

    G_1 is G x T or G * T; the t_i become constants and the single variable t
    Conjugates them, so the terms alternate (g_i, -1), (t_i, +1).
    """
    if ambient_choice == "free-product":
        G1: Group = FreeProductGroup((ge.group, ge.vargroup))
        embed_g = lambda g: G1.embed(0, g)  # noqa: E731
        embed_t = lambda t: G1.embed(1, t)  # noqa: E731
    elif ambient_choice == "direct-product":
        G1 = DirectProductGroup((ge.group, ge.vargroup))
        embed_g = lambda g: G1.embed(0, g)  # noqa: E731
        embed_t = lambda t: G1.embed(1, t)  # noqa: E731
    else:
        raise ValueError("ambient_choice must be 'free-product' or 'direct-product'")
    terms: list[tuple[GroupElement, int]] = []
    for g, t in ge.pairs:
        terms.append((embed_g(g), -1))
        terms.append((embed_t(t), +1))
    return Equation(G1, tuple(terms))


def induced_ordinary(ge: GeneralizedEquation) -> Equation:
    """For an infinite-cyclic variable group, the ordinary equation obtained
    by identifying each t_i with a power of the single variable.

    This is the identification under which generalized solvability coincides
    with ordinary solvability, and generalized unimodularity with |sigma| = 1.
    """
    T = ge.vargroup
    if isinstance(T, FreeGroup) and T.rank == 1:
        gen = T.gens()[0]
    elif isinstance(T, FreeAbelianGroup) and T.rank == 1:
        gen = T.generators()[0]
    else:
        raise UnsupportedBackendError("induced ordinary form needs T infinite cyclic")
    terms: list[tuple[GroupElement, int]] = []
    pending = ge.group.identity()
    for g, t in ge.pairs:
        k = T.power_solve(t, gen)
        if k is None:
            raise InternalError("rank-1 element is always a power of the generator")
        if k == 0:
            pending = pending * g
            continue
        terms.append((pending * g, k))
        pending = ge.group.identity()
    if not terms:
        raise EquationError("degenerate generalized equation: every t_i is trivial")
    if not pending.is_identity:
        g0, e0 = terms[0]
        terms[0] = (pending * g0, e0)
    return Equation(ge.group, tuple(terms))
