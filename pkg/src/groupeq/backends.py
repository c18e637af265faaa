"""Concrete group backends with exact arithmetic and decidable equality.

Every element is stored in a canonical normal form, so ``==`` on payloads is
equality in the group and hashing is consistent with it.  All values are
immutable; every operation is a pure function.

Shipped backends: finite multiplication tables, symmetric groups, free
groups, free abelian groups, the fours group (the torsion-free non-UP
crystallographic group on two generators), free products and direct products
of the above, and an internal quotient of a free abelian group by a cyclic
subgroup (used for variable-group verdicts).
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import gcd, lcm
from typing import Any, Iterable, Optional, Sequence

from .config import DEFAULT_CAPS, Caps
from .errors import (
    CapExceededError,
    GroupEqError,
    GroupMismatchError,
    UnsupportedBackendError,
)

# ---------------------------------------------------------------------------
# orders


@dataclass(frozen=True)
class ElementOrder:
    kind: str  # "finite" | "infinite" | "unknown"
    value: Optional[int] = None

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinite"

    def __str__(self) -> str:
        return str(self.value) if self.kind == "finite" else self.kind


INFINITE_ORDER = ElementOrder("infinite")
UNKNOWN_ORDER = ElementOrder("unknown")


def finite_order(n: int) -> ElementOrder:
    return ElementOrder("finite", n)


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class GroupElement:
    """Backend-tagged element; payload is the backend's canonical form."""

    group: "Group"
    payload: Any

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.mul(self, other)

    def __invert__(self) -> "GroupElement":
        return self.group.inv(self)

    def __pow__(self, n: int) -> "GroupElement":
        if n == 0:
            return self.group.identity()
        if n < 0:
            return (~self) ** (-n)
        half = self ** (n // 2)
        sq = half * half
        return sq * self if n % 2 else sq

    def conj(self, y: "GroupElement") -> "GroupElement":
        """x^y = y^-1 x y."""
        return (~y) * self * y

    @property
    def is_identity(self) -> bool:
        return self.payload == self.group.identity().payload

    def order(self) -> ElementOrder:
        return self.group.element_order(self)

    def __repr__(self) -> str:
        return self.group.format_element(self)


class Group(ABC):
    """Abstract backend.  Subclasses are value objects: equality by parameters."""

    kind: str = "?"

    # -- identity of the group object itself

    @abstractmethod
    def _key(self) -> tuple:
        ...

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Group) and self.kind == other.kind and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((self.kind, self._key()))

    # -- core arithmetic

    @abstractmethod
    def identity(self) -> GroupElement:
        ...

    @abstractmethod
    def _mul(self, a: Any, b: Any) -> Any:
        ...

    @abstractmethod
    def _inv(self, a: Any) -> Any:
        ...

    def mul(self, x: GroupElement, y: GroupElement) -> GroupElement:
        if x.group != self or y.group != self:
            raise GroupMismatchError(f"elements of {x.group} and {y.group} multiplied in {self}")
        return GroupElement(self, self._mul(x.payload, y.payload))

    def inv(self, x: GroupElement) -> GroupElement:
        if x.group != self:
            raise GroupMismatchError(f"element of {x.group} inverted in {self}")
        return GroupElement(self, self._inv(x.payload))

    # -- structure queries

    @abstractmethod
    def element_order(self, x: GroupElement) -> ElementOrder:
        ...

    @abstractmethod
    def generators(self) -> tuple[GroupElement, ...]:
        ...

    def torsion_free(self) -> Optional[bool]:
        """True/False when known, None when the backend cannot tell."""
        return None

    def orderable_certificate(self) -> Optional[str]:
        """Reason string when the backend is certified right orderable."""
        return None

    def elements(self) -> tuple[GroupElement, ...]:
        raise UnsupportedBackendError(f"{self.kind} backend cannot enumerate elements")

    def are_conjugate(self, x: GroupElement, y: GroupElement) -> bool:
        raise UnsupportedBackendError(f"{self.kind} backend has no conjugacy test")

    # -- canonical printing / parsing / ordering

    def sort_key(self, x: GroupElement) -> tuple:
        return (self._payload_key(x.payload),)

    def _payload_key(self, payload: Any) -> Any:
        return payload

    @abstractmethod
    def format_element(self, x: GroupElement) -> str:
        ...

    def parse_element(self, text: str) -> GroupElement:
        raise UnsupportedBackendError(f"{self.kind} backend has no element literals")

    def describe(self) -> str:
        return self.kind

    def __repr__(self) -> str:
        return self.describe()

    # -- presentations (None-returning backends raise)

    def presentation_data(self) -> "PresentationData":
        raise UnsupportedBackendError(f"{self.kind} backend has no known presentation")

    def express(self, x: GroupElement) -> tuple[tuple[str, int], ...]:
        """Write x as a word in the presentation generators."""
        raise UnsupportedBackendError(f"{self.kind} backend has no known presentation")

    # -- cosets of a cyclic subgroup (variable-group support)

    def coset_decompose(self, s: GroupElement, t: GroupElement) -> tuple[GroupElement, int]:
        """Canonical (c, k) with s = c * t**k; the identity coset gets c = 1."""
        raise UnsupportedBackendError(f"{self.kind} backend has no <t>-coset support")

    def power_solve(self, s: GroupElement, t: GroupElement) -> Optional[int]:
        """Integer k with s = t**k, or None."""
        raise UnsupportedBackendError(f"{self.kind} backend has no <t>-coset support")

    # -- balls

    def ball(
        self,
        radius: int,
        gens: Optional[Sequence[GroupElement]] = None,
        caps: Caps = DEFAULT_CAPS,
    ) -> frozenset[GroupElement]:
        """All products of at most `radius` factors from gens and inverses."""
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        if radius > caps.radius:
            raise CapExceededError(f"radius {radius} exceeds cap {caps.radius}")
        base = tuple(gens) if gens is not None else self.generators()
        if not base:
            raise ValueError("ball needs a nonempty generating set")
        for g in base:
            if g.group != self:
                raise GroupMismatchError("ball generators must live in this group")
        syms: list[GroupElement] = []
        for g in base:
            for h in (g, ~g):
                if h not in syms:
                    syms.append(h)
        seen = {self.identity()}
        layer = set(seen)
        for _ in range(radius):
            nxt = {x * s for x in layer for s in syms} - seen
            seen |= nxt
            layer = nxt
            if len(seen) > caps.ball_size:
                raise CapExceededError(f"ball size exceeds cap {caps.ball_size}")
            if not layer:
                break
        return frozenset(seen)


@dataclass(frozen=True)
class PresentationData:
    """Generators plus relators given as (name, exponent) words."""

    names: tuple[str, ...]
    relators: tuple[tuple[tuple[str, int], ...], ...]


# ---------------------------------------------------------------------------
# finite multiplication tables


class FiniteTableGroup(Group):
    kind = "finite-table"

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        names: Optional[Sequence[str]] = None,
        _presentation: Optional[tuple] = None,
        caps: Caps = DEFAULT_CAPS,
    ):
        tbl = tuple(tuple(int(v) for v in row) for row in table)
        n = len(tbl)
        if n == 0:
            raise ValueError("empty multiplication table")
        if n > caps.table_size:
            raise CapExceededError(f"table size {n} exceeds cap {caps.table_size}")
        for row in tbl:
            if len(row) != n or any(not (0 <= v < n) for v in row):
                raise ValueError("table is not a closed square table")
        # identity
        ident = None
        for e in range(n):
            if all(tbl[e][x] == x and tbl[x][e] == x for x in range(n)):
                ident = e
                break
        if ident is None:
            raise ValueError("table has no identity element")
        # inverses
        for x in range(n):
            if not any(tbl[x][y] == ident and tbl[y][x] == ident for y in range(n)):
                raise ValueError(f"element {x} has no inverse")
        # associativity, all triples
        for a in range(n):
            for b in range(n):
                ab = tbl[a][b]
                row_a = tbl[a]
                for c in range(n):
                    if tbl[ab][c] != row_a[tbl[b][c]]:
                        raise ValueError("table is not associative")
        self.table = tbl
        self.size = n
        self.ident = ident
        self.names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(n))
        if len(self.names) != n or len(set(self.names)) != n:
            raise ValueError("names must be distinct and match the table size")
        self._pres = _presentation

    def _key(self) -> tuple:
        return (self.table, self.names)

    def identity(self) -> GroupElement:
        return GroupElement(self, self.ident)

    def _mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def _inv(self, a: int) -> int:
        for b in range(self.size):
            if self.table[a][b] == self.ident:
                return b
        raise GroupEqError("unreachable: table verified at construction")

    def element_order(self, x: GroupElement) -> ElementOrder:
        k, cur = 1, x.payload
        while cur != self.ident:
            cur = self.table[cur][x.payload]
            k += 1
        return finite_order(k)

    def generators(self) -> tuple[GroupElement, ...]:
        return tuple(GroupElement(self, i) for i in range(self.size) if i != self.ident)

    def torsion_free(self) -> Optional[bool]:
        return self.size == 1

    def elements(self) -> tuple[GroupElement, ...]:
        return tuple(GroupElement(self, i) for i in range(self.size))

    def are_conjugate(self, x: GroupElement, y: GroupElement) -> bool:
        return any((~GroupElement(self, z)) * x * GroupElement(self, z) == y for z in range(self.size))

    def element(self, i: int) -> GroupElement:
        if not 0 <= i < self.size:
            raise ValueError(f"index {i} out of range")
        return GroupElement(self, i)

    def format_element(self, x: GroupElement) -> str:
        return self.names[x.payload]

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if text in self.names:
            return GroupElement(self, self.names.index(text))
        try:
            return self.element(int(text))
        except ValueError:
            pass
        raise ValueError(f"unknown element literal {text!r}")

    def presentation_data(self) -> PresentationData:
        if self._pres is not None:
            return self._pres[0]
        names = tuple(f"x{i}" for i in range(self.size) if i != self.ident)
        rels = []
        idx = {i: f"x{i}" for i in range(self.size) if i != self.ident}
        for a in range(self.size):
            for b in range(self.size):
                if a == self.ident or b == self.ident:
                    continue
                c = self.table[a][b]
                word = [(idx[a], 1), (idx[b], 1)]
                if c != self.ident:
                    word.append((idx[c], -1))
                rels.append(tuple(word))
        return PresentationData(names, tuple(rels))

    def express(self, x: GroupElement) -> tuple[tuple[str, int], ...]:
        if self._pres is not None:
            return self._pres[1](x.payload)
        if x.payload == self.ident:
            return ()
        return ((f"x{x.payload}", 1),)

    def describe(self) -> str:
        return f"finite({self.size})"


def cyclic_group(n: int) -> FiniteTableGroup:
    """C_n presented as <a | a^n>."""
    if n < 1:
        raise ValueError("order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    names = tuple("1" if i == 0 else (f"a^{i}" if i > 1 else "a") for i in range(n))
    pres = PresentationData(("a",), ((("a", n),),))

    def express(i: int) -> tuple[tuple[str, int], ...]:
        return () if i == 0 else (("a", i),)

    return FiniteTableGroup(table, names, _presentation=(pres, express))


def klein_four_group() -> FiniteTableGroup:
    """The Klein four group as an XOR table."""
    table = [[i ^ j for j in range(4)] for i in range(4)]
    return FiniteTableGroup(table, names=("1", "u", "v", "uv"))


def table_from_group(g: Group, names: Optional[Sequence[str]] = None) -> FiniteTableGroup:
    """Multiplication table of any finite, enumerable backend."""
    elems = list(g.elements())
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[a * b] for b in elems] for a in elems]
    if names is None:
        names = tuple(g.format_element(e) for e in elems)
    return FiniteTableGroup(table, names=names)


# ---------------------------------------------------------------------------
# symmetric groups


class PermutationGroup(Group):
    """S_degree acting on {0..degree-1}; products compose left to right."""

    kind = "permutation"

    def __init__(self, degree: int, gens: Optional[Sequence[tuple[int, ...]]] = None):
        if degree < 1:
            raise ValueError("degree must be positive")
        self.degree = degree
        self._gens = tuple(tuple(p) for p in gens) if gens else None
        if self._gens:
            for p in self._gens:
                self._check(p)

    def _check(self, p: tuple[int, ...]) -> None:
        if sorted(p) != list(range(self.degree)):
            raise ValueError(f"{p} is not a permutation of degree {self.degree}")

    def _key(self) -> tuple:
        return (self.degree, self._gens)

    def identity(self) -> GroupElement:
        return GroupElement(self, tuple(range(self.degree)))

    def _mul(self, a: tuple, b: tuple) -> tuple:
        # apply a first, then b
        return tuple(b[a[i]] for i in range(self.degree))

    def _inv(self, a: tuple) -> tuple:
        out = [0] * self.degree
        for i, v in enumerate(a):
            out[v] = i
        return tuple(out)

    def element(self, images: Sequence[int]) -> GroupElement:
        p = tuple(int(v) for v in images)
        self._check(p)
        return GroupElement(self, p)

    def from_cycles(self, cycles: Sequence[Sequence[int]], one_based: bool = True) -> GroupElement:
        images = list(range(self.degree))
        for cyc in cycles:
            pts = [int(v) - (1 if one_based else 0) for v in cyc]
            if any(not 0 <= v < self.degree for v in pts):
                raise ValueError(f"cycle {cyc} out of range for degree {self.degree}")
            if len(set(pts)) != len(pts):
                raise ValueError(f"cycle {cyc} repeats a point")
            for i, v in enumerate(pts):
                images[v] = pts[(i + 1) % len(pts)]
        return self.element(images)

    def cycles(self, x: GroupElement) -> list[tuple[int, ...]]:
        seen, out = set(), []
        p = x.payload
        for i in range(self.degree):
            if i in seen:
                continue
            cyc = [i]
            seen.add(i)
            j = p[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = p[j]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def element_order(self, x: GroupElement) -> ElementOrder:
        lens = [len(c) for c in self.cycles(x)]
        return finite_order(lcm(*lens) if lens else 1)

    def generators(self) -> tuple[GroupElement, ...]:
        if self._gens:
            return tuple(GroupElement(self, p) for p in self._gens)
        n = self.degree
        if n == 1:
            return ()
        swap = self.from_cycles([(1, 2)])
        if n == 2:
            return (swap,)
        return (swap, self.from_cycles([tuple(range(1, n + 1))]))

    def torsion_free(self) -> Optional[bool]:
        return self.degree == 1

    def elements(self, caps: Caps = DEFAULT_CAPS) -> tuple[GroupElement, ...]:
        count = 1
        for i in range(2, self.degree + 1):
            count *= i
        if count > caps.perms_per_degree:
            raise CapExceededError(f"S_{self.degree} enumeration exceeds cap")
        return tuple(GroupElement(self, p) for p in itertools.permutations(range(self.degree)))

    def are_conjugate(self, x: GroupElement, y: GroupElement) -> bool:
        ct = sorted(len(c) for c in self.cycles(x))
        return ct == sorted(len(c) for c in self.cycles(y))

    def format_element(self, x: GroupElement) -> str:
        cycs = self.cycles(x)
        if not cycs:
            return "()"
        return "".join("(" + " ".join(str(v + 1) for v in c) + ")" for c in cycs)

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if text in ("()", "1", ""):
            return self.identity()
        cycles, i = [], 0
        while i < len(text):
            if text[i].isspace():
                i += 1
                continue
            if text[i] != "(":
                raise ValueError(f"bad permutation literal {text!r}")
            j = text.index(")", i)
            body = text[i + 1 : j].replace(",", " ").split()
            cycles.append([int(v) for v in body])
            i = j + 1
        return self.from_cycles(cycles)

    def presentation_data(self) -> PresentationData:
        n = self.degree
        names = tuple(f"s{i}" for i in range(1, n))
        rels: list[tuple[tuple[str, int], ...]] = []
        for i in range(1, n):
            rels.append(((f"s{i}", 2),))
        for i in range(1, n - 1):
            rels.append(((f"s{i}", 1), (f"s{i+1}", 1)) * 3)
        for i in range(1, n):
            for j in range(i + 2, n):
                rels.append(((f"s{i}", 1), (f"s{j}", 1)) * 2)
        return PresentationData(names, tuple(rels))

    def express(self, x: GroupElement) -> tuple[tuple[str, int], ...]:
        # peel adjacent transpositions: p = v1 * v2 * ... (v1 applied first)
        word: list[tuple[str, int]] = []
        cur = list(x.payload)
        while True:
            desc = next((i for i in range(self.degree - 1) if cur[i] > cur[i + 1]), None)
            if desc is None:
                break
            cur[desc], cur[desc + 1] = cur[desc + 1], cur[desc]
            word.append((f"s{desc+1}", 1))
        # cur = s * cur' for each recorded swap, so p is the product of the
        # recorded swaps applied first to last
        return tuple(word)

    def describe(self) -> str:
        return f"perm({self.degree})"


# ---------------------------------------------------------------------------
# free groups


class FreeGroup(Group):
    """Free group on named generators; elements are reduced (gen, exp) words."""

    kind = "free"

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if not names or len(set(names)) != len(names):
            raise ValueError("generator names must be nonempty and distinct")
        for nm in names:
            if not nm or any(ch.isspace() for ch in nm) or "^" in nm:
                raise ValueError(f"bad generator name {nm!r}")
        self.names = names
        self.rank = len(names)

    def _key(self) -> tuple:
        return self.names

    def identity(self) -> GroupElement:
        return GroupElement(self, ())

    @staticmethod
    def _reduce(word: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
        out: list[list[int]] = []
        for g, e in word:
            if e == 0:
                continue
            if out and out[-1][0] == g:
                out[-1][1] += e
                if out[-1][1] == 0:
                    out.pop()
            else:
                out.append([g, e])
        return tuple((g, e) for g, e in out)

    def _mul(self, a: tuple, b: tuple) -> tuple:
        return self._reduce(itertools.chain(a, b))

    def _inv(self, a: tuple) -> tuple:
        return tuple((g, -e) for g, e in reversed(a))

    def word(self, items: Sequence[tuple[str, int]]) -> GroupElement:
        idx = {nm: i for i, nm in enumerate(self.names)}
        try:
            raw = [(idx[nm], int(e)) for nm, e in items]
        except KeyError as exc:
            raise ValueError(f"unknown generator {exc.args[0]!r}") from exc
        return GroupElement(self, self._reduce(raw))

    def gens(self) -> tuple[GroupElement, ...]:
        return tuple(GroupElement(self, ((i, 1),)) for i in range(self.rank))

    generators = gens

    def gen(self, name: str) -> GroupElement:
        return self.word([(name, 1)])

    def element_order(self, x: GroupElement) -> ElementOrder:
        return finite_order(1) if not x.payload else INFINITE_ORDER

    def torsion_free(self) -> Optional[bool]:
        return True

    @staticmethod
    def letters(x: GroupElement) -> tuple[tuple[int, int], ...]:
        """Expand to single letters (gen, +-1)."""
        out = []
        for g, e in x.payload:
            s = 1 if e > 0 else -1
            out.extend([(g, s)] * abs(e))
        return tuple(out)

    @staticmethod
    def length(x: GroupElement) -> int:
        return sum(abs(e) for _, e in x.payload)

    def cyclically_reduce(self, x: GroupElement) -> tuple[GroupElement, GroupElement]:
        """(core, z) with x = z * core * z^-1 and core cyclically reduced."""
        core = x
        z = self.identity()
        while True:
            w = core.payload
            if len(w) >= 2 and w[0][0] == w[-1][0]:
                head = GroupElement(self, (w[0],))
                core = (~head) * core * head
                z = z * head
            else:
                return core, z

    def are_conjugate(self, x: GroupElement, y: GroupElement) -> bool:
        cx, _ = self.cyclically_reduce(x)
        cy, _ = self.cyclically_reduce(y)
        lx, ly = self.letters(cx), self.letters(cy)
        if len(lx) != len(ly):
            return False
        if not lx:
            return True
        return any(ly[i:] + ly[:i] == lx for i in range(len(ly)))

    def sort_key(self, x: GroupElement) -> tuple:
        letters = self.letters(x)
        return (len(letters), tuple((g, 0 if s > 0 else 1) for g, s in letters))

    def format_element(self, x: GroupElement) -> str:
        if not x.payload:
            return "1"
        return " ".join(nm if e == 1 else f"{nm}^{e}" for g, e in x.payload for nm in [self.names[g]])

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if text == "1":
            return self.identity()
        items = []
        for tok in text.split():
            if "^" in tok:
                nm, _, exp = tok.partition("^")
                items.append((nm, int(exp)))
            else:
                items.append((tok, 1))
        return self.word(items)

    def presentation_data(self) -> PresentationData:
        return PresentationData(self.names, ())

    def express(self, x: GroupElement) -> tuple[tuple[str, int], ...]:
        return tuple((self.names[g], e) for g, e in x.payload)

    # shortlex-canonical coset representatives of <t>

    def coset_decompose(self, s: GroupElement, t: GroupElement) -> tuple[GroupElement, int]:
        if t.is_identity:
            raise ValueError("coset decomposition needs t != 1")
        best = (self.sort_key(s), s, 0)
        for sign in (1, -1):
            k = sign
            while True:
                cand = s * t ** (-k)
                key = self.sort_key(cand)
                if key < best[0]:
                    best = (key, cand, k)
                # once t^k alone is longer than |s| + |best|, no improvement can come
                if FreeGroup.length(t ** k) > FreeGroup.length(s) + best[0][0]:
                    break
                k += sign
        return best[1], best[2]

    def power_solve(self, s: GroupElement, t: GroupElement) -> Optional[int]:
        if t.is_identity:
            return 0 if s.is_identity else None
        if s.is_identity:
            return 0
        bound = FreeGroup.length(s) + FreeGroup.length(t) + 1
        for sign in (1, -1):
            p = t if sign == 1 else ~t
            cur = self.identity()
            for k in range(1, bound + 1):
                cur = cur * p
                if cur == s:
                    return sign * k
        return None

    def describe(self) -> str:
        return f"free({', '.join(self.names)})"


# ---------------------------------------------------------------------------
# free abelian groups


class FreeAbelianGroup(Group):
    """Z^rank with lexicographic (bi-invariant) order certificate."""

    kind = "free-abelian"

    def __init__(self, rank: int, names: Optional[Sequence[str]] = None):
        if rank < 1:
            raise ValueError("rank must be positive")
        self.rank = rank
        self.names = tuple(names) if names else tuple(f"e{i+1}" for i in range(rank))
        if len(self.names) != rank:
            raise ValueError("need one name per coordinate")

    def _key(self) -> tuple:
        return (self.rank, self.names)

    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * self.rank)

    def _mul(self, a: tuple, b: tuple) -> tuple:
        return tuple(x + y for x, y in zip(a, b))

    def _inv(self, a: tuple) -> tuple:
        return tuple(-x for x in a)

    def vector(self, coords: Sequence[int]) -> GroupElement:
        v = tuple(int(c) for c in coords)
        if len(v) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates")
        return GroupElement(self, v)

    def generators(self) -> tuple[GroupElement, ...]:
        return tuple(
            GroupElement(self, tuple(1 if j == i else 0 for j in range(self.rank)))
            for i in range(self.rank)
        )

    def element_order(self, x: GroupElement) -> ElementOrder:
        return finite_order(1) if x.is_identity else INFINITE_ORDER

    def torsion_free(self) -> Optional[bool]:
        return True

    def orderable_certificate(self) -> Optional[str]:
        return "lexicographic order on Z^r is a bi-invariant total order"

    def order_key(self, x: GroupElement) -> tuple:
        return x.payload

    def are_conjugate(self, x: GroupElement, y: GroupElement) -> bool:
        return x == y

    def format_element(self, x: GroupElement) -> str:
        if self.rank == 1:
            return str(x.payload[0])
        return "(" + ", ".join(str(v) for v in x.payload) + ")"

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if text.startswith("(") and text.endswith(")"):
            body = text[1:-1].strip()
            coords = [int(v) for v in body.split(",")] if body else []
            return self.vector(coords)
        if self.rank == 1:
            return self.vector([int(text)])
        raise ValueError(f"bad vector literal {text!r}")

    def presentation_data(self) -> PresentationData:
        rels = []
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                a, b = self.names[i], self.names[j]
                rels.append(((a, 1), (b, 1), (a, -1), (b, -1)))
        return PresentationData(self.names, tuple(rels))

    def express(self, x: GroupElement) -> tuple[tuple[str, int], ...]:
        return tuple((self.names[i], v) for i, v in enumerate(x.payload) if v != 0)

    def coset_decompose(self, s: GroupElement, t: GroupElement) -> tuple[GroupElement, int]:
        v = t.payload
        if all(c == 0 for c in v):
            raise ValueError("coset decomposition needs t != 1")
        p = next(i for i, c in enumerate(v) if c != 0)
        k = s.payload[p] // v[p]
        rep = tuple(x - k * y for x, y in zip(s.payload, v))
        return GroupElement(self, rep), k

    def power_solve(self, s: GroupElement, t: GroupElement) -> Optional[int]:
        v, w = t.payload, s.payload
        if all(c == 0 for c in v):
            return 0 if s.is_identity else None
        p = next(i for i, c in enumerate(v) if c != 0)
        if w[p] % v[p] != 0:
            return None
        k = w[p] // v[p]
        return k if all(x == k * y for x, y in zip(w, v)) else None

    def describe(self) -> str:
        return f"zn({self.rank})"


# ---------------------------------------------------------------------------
# the fours group

# Affine realization on R^3: elements (D, v) with D a +-1 sign-diagonal
# matrix from the Klein four point group and v in (1/2 Z)^3, acting as
# x |-> Dx + v.  Translations are doubled so all arithmetic is integral.
_FOURS_PARITY = {
    (1, 1, 1): (0, 0, 0),
    (1, -1, -1): (1, 1, 0),
    (-1, 1, -1): (0, 1, 1),
    (-1, -1, 1): (1, 0, 1),
}


class FoursGroup(Group):
    """<a, b | a^-1 b^2 a = b^-2, b^-1 a^2 b = a^-2>, Promislow's group.

    Both defining relations are verified by direct affine multiplication at
    construction time; membership of a payload in the group is the parity
    condition linking the sign matrix to the translation vector.
    """

    kind = "fours-group"

    A_PAYLOAD = ((1, -1, -1), (1, 1, 0))
    B_PAYLOAD = ((-1, 1, -1), (0, 1, 1))

    def __init__(self):
        a = GroupElement(self, self.A_PAYLOAD)
        b = GroupElement(self, self.B_PAYLOAD)
        if (~a) * b * b * a * b * b != self.identity():
            raise GroupEqError("fours relation a^-1 b^2 a b^2 failed")
        if (~b) * a * a * b * a * a != self.identity():
            raise GroupEqError("fours relation b^-1 a^2 b a^2 failed")

    def _key(self) -> tuple:
        return ()

    def identity(self) -> GroupElement:
        return GroupElement(self, ((1, 1, 1), (0, 0, 0)))

    def _validate(self, payload: tuple) -> None:
        signs, v = payload
        if signs not in _FOURS_PARITY:
            raise ValueError(f"{signs} is not in the fours point group")
        par = _FOURS_PARITY[signs]
        if any(c % 2 != p for c, p in zip(v, par)):
            raise ValueError("translation parity does not match the point part")

    def _mul(self, x: tuple, y: tuple) -> tuple:
        (d1, v1), (d2, v2) = x, y
        return (
            tuple(a * b for a, b in zip(d1, d2)),
            tuple(a * c + b for a, b, c in zip(d1, v1, v2)),
        )

    def _inv(self, x: tuple) -> tuple:
        d, v = x
        return (d, tuple(-a * b for a, b in zip(d, v)))

    def a(self) -> GroupElement:
        return GroupElement(self, self.A_PAYLOAD)

    def b(self) -> GroupElement:
        return GroupElement(self, self.B_PAYLOAD)

    def generators(self) -> tuple[GroupElement, ...]:
        return (self.a(), self.b())

    def element(self, signs: tuple, doubled: tuple) -> GroupElement:
        payload = (tuple(signs), tuple(doubled))
        self._validate(payload)
        return GroupElement(self, payload)

    def is_translation(self, x: GroupElement) -> bool:
        return x.payload[0] == (1, 1, 1)

    def translation_vector(self, x: GroupElement) -> tuple[int, int, int]:
        """Integer lattice vector of a pure translation."""
        if not self.is_translation(x):
            raise ValueError("not a translation")
        d = x.payload[1]
        return (d[0] // 2, d[1] // 2, d[2] // 2)

    def element_order(self, x: GroupElement) -> ElementOrder:
        # square of every element is a translation; nonzero translations
        # have infinite order, and the parity condition forbids g^2 = 1
        # for g != 1
        if x.is_identity:
            return finite_order(1)
        return INFINITE_ORDER

    def torsion_free(self) -> Optional[bool]:
        return True

    def format_element(self, x: GroupElement) -> str:
        stack: list[list] = []
        for nm, e in self.express(x):
            if stack and stack[-1][0] == nm:
                stack[-1][1] += e
                if stack[-1][1] == 0:
                    stack.pop()
            else:
                stack.append([nm, e])
        if not stack:
            return "1"
        return " ".join(nm if e == 1 else f"{nm}^{e}" for nm, e in stack)

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if text == "1":
            return self.identity()
        cur = self.identity()
        table = {"a": self.a(), "b": self.b()}
        for tok in text.split():
            if "^" in tok:
                nm, _, exp = tok.partition("^")
                cur = cur * table[nm] ** int(exp)
            else:
                cur = cur * table[tok]
        return cur

    def presentation_data(self) -> PresentationData:
        return PresentationData(
            ("a", "b"),
            (
                (("a", -1), ("b", 2), ("a", 1), ("b", 2)),
                (("b", -1), ("a", 2), ("b", 1), ("a", 2)),
            ),
        )

    def express(self, x: GroupElement) -> tuple[tuple[str, int], ...]:
        signs = x.payload[0]
        coset = {
            (1, 1, 1): (),
            (1, -1, -1): (("a", 1),),
            (-1, 1, -1): (("b", 1),),
            (-1, -1, 1): (("a", 1), ("b", 1)),
        }[signs]
        rep = self.identity()
        for nm, e in coset:
            rep = rep * (self.a() if nm == "a" else self.b()) ** e
        tx, ty, tz = self.translation_vector((~rep) * x)
        word = list(coset)
        if tx:
            word.append(("a", 2 * tx))
        if ty:
            word.append(("b", 2 * ty))
        for _ in range(abs(tz)):
            # (ab)^2 is the translation by (0, 0, -1)
            s = -1 if tz > 0 else 1
            word.extend([("a", s), ("b", s)] * 2 if s == 1 else [("b", -1), ("a", -1)] * 2)
        return tuple(word)

    def describe(self) -> str:
        return "fours"


# ---------------------------------------------------------------------------
# free products


def _freeproduct_reduce(factors, sylls):
    out: list[tuple[int, GroupElement]] = []
    for i, el in sylls:
        if el.is_identity:
            continue
        if out and out[-1][0] == i:
            prod = out[-1][1] * el
            out.pop()
            if not prod.is_identity:
                out.append((i, prod))
        else:
            out.append((i, el))
    return tuple(out)


def _freeproduct_cyclic_reduce(g: "FreeProductGroup", x: GroupElement):
    """(core, z) with x = z * core * z^-1, core cyclically reduced."""
    core, z = x, g.identity()
    while True:
        w = core.payload
        if len(w) >= 2 and w[0][0] == w[-1][0]:
            head = GroupElement(g, (w[0],))
            core = (~head) * core * head
            z = z * head
        else:
            return core, z


class FreeProductGroup(Group):
    """Free product of backends; elements are alternating syllable words."""

    kind = "free-product"

    def __init__(self, factors: Sequence[Group]):
        factors = tuple(factors)
        if not factors:
            raise ValueError("free product needs at least one factor")
        self.factors = factors

    def _key(self) -> tuple:
        return self.factors

    def identity(self) -> GroupElement:
        return GroupElement(self, ())

    def _mul(self, a: tuple, b: tuple) -> tuple:
        return _freeproduct_reduce(self.factors, itertools.chain(a, b))

    def _inv(self, a: tuple) -> tuple:
        return tuple((i, ~el) for i, el in reversed(a))

    def embed(self, i: int, el: GroupElement) -> GroupElement:
        if el.group != self.factors[i]:
            raise GroupMismatchError("embed: element does not live in that factor")
        return GroupElement(self, () if el.is_identity else ((i, el),))

    def word(self, sylls: Sequence[tuple[int, GroupElement]]) -> GroupElement:
        for i, el in sylls:
            if el.group != self.factors[i]:
                raise GroupMismatchError("syllable element in wrong factor")
        return GroupElement(self, _freeproduct_reduce(self.factors, sylls))

    def generators(self) -> tuple[GroupElement, ...]:
        out = []
        for i, f in enumerate(self.factors):
            out.extend(self.embed(i, g) for g in f.generators())
        return tuple(out)

    def element_order(self, x: GroupElement) -> ElementOrder:
        core, _ = _freeproduct_cyclic_reduce(self, x)
        w = core.payload
        if not w:
            return finite_order(1)
        if len(w) == 1:
            return self.factors[w[0][0]].element_order(w[0][1])
        return INFINITE_ORDER

    def torsion_free(self) -> Optional[bool]:
        flags = [f.torsion_free() for f in self.factors]
        if all(fl is True for fl in flags):
            return True
        if any(fl is False for fl in flags):
            return False
        return None

    def are_conjugate(self, x: GroupElement, y: GroupElement) -> bool:
        cx, _ = _freeproduct_cyclic_reduce(self, x)
        cy, _ = _freeproduct_cyclic_reduce(self, y)
        wx, wy = cx.payload, cy.payload
        if len(wx) != len(wy):
            return False
        if not wx:
            return True
        if len(wx) == 1:
            (i, a), (j, b) = wx[0], wy[0]
            return i == j and self.factors[i].are_conjugate(a, b)
        for r in range(len(wy)):
            if wy[r:] + wy[:r] == wx:
                return True
        return False

    def sort_key(self, x: GroupElement) -> tuple:
        return (len(x.payload), tuple((i, self.factors[i].sort_key(el)) for i, el in x.payload))

    def _payload_key(self, payload):
        return self.sort_key(GroupElement(self, payload))

    def format_element(self, x: GroupElement) -> str:
        if not x.payload:
            return "1"
        return " ".join(self.factors[i].format_element(el) for i, el in x.payload)

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if text == "1":
            return self.identity()
        sylls = []
        for tok in text.split():
            if tok == "1":
                continue  # the identity; zn factors must use "(1)" for a vector
            if ":" in tok and tok.split(":", 1)[0].isdigit():
                fi, lit = tok.split(":", 1)
                el = self.factors[int(fi)].parse_element(lit)
                sylls.append((int(fi), el))
                continue
            matches = []
            for i, f in enumerate(self.factors):
                try:
                    matches.append((i, f.parse_element(tok)))
                except (ValueError, GroupEqError):
                    continue
            if not matches:
                raise ValueError(f"token {tok!r} matches no factor")
            if len(matches) > 1:
                raise ValueError(f"token {tok!r} is ambiguous; qualify as i:literal")
            sylls.append(matches[0])
        return self.word(sylls)

    def _mangled(self) -> tuple[tuple[str, ...], ...]:
        all_names = [f.presentation_data().names for f in self.factors]
        flat = [nm for names in all_names for nm in names]
        if len(set(flat)) == len(flat):
            return tuple(all_names)
        return tuple(
            tuple(f"{nm}.{i}" for nm in names) for i, names in enumerate(all_names)
        )

    def presentation_data(self) -> PresentationData:
        mangled = self._mangled()
        names, rels = [], []
        for i, f in enumerate(self.factors):
            data = f.presentation_data()
            ren = dict(zip(data.names, mangled[i]))
            names.extend(mangled[i])
            rels.extend(tuple((ren[nm], e) for nm, e in rel) for rel in data.relators)
        return PresentationData(tuple(names), tuple(rels))

    def express(self, x: GroupElement) -> tuple[tuple[str, int], ...]:
        mangled = self._mangled()
        out: list[tuple[str, int]] = []
        for i, el in x.payload:
            data = self.factors[i].presentation_data()
            ren = dict(zip(data.names, mangled[i]))
            out.extend((ren[nm], e) for nm, e in self.factors[i].express(el))
        return tuple(out)

    def describe(self) -> str:
        return " * ".join(f.describe() for f in self.factors)


# ---------------------------------------------------------------------------
# direct products (used by the Levin reduction)


class DirectProductGroup(Group):
    kind = "direct-product"

    def __init__(self, factors: Sequence[Group]):
        self.factors = tuple(factors)
        if not self.factors:
            raise ValueError("direct product needs at least one factor")

    def _key(self) -> tuple:
        return self.factors

    def identity(self) -> GroupElement:
        return GroupElement(self, tuple(f.identity() for f in self.factors))

    def _mul(self, a: tuple, b: tuple) -> tuple:
        return tuple(x * y for x, y in zip(a, b))

    def _inv(self, a: tuple) -> tuple:
        return tuple(~x for x in a)

    def embed(self, i: int, el: GroupElement) -> GroupElement:
        comps = [f.identity() for f in self.factors]
        if el.group != self.factors[i]:
            raise GroupMismatchError("embed: element does not live in that factor")
        comps[i] = el
        return GroupElement(self, tuple(comps))

    def generators(self) -> tuple[GroupElement, ...]:
        out = []
        for i, f in enumerate(self.factors):
            out.extend(self.embed(i, g) for g in f.generators())
        return tuple(out)

    def element_order(self, x: GroupElement) -> ElementOrder:
        orders = [f.element_order(c) for f, c in zip(self.factors, x.payload)]
        if any(o.is_infinite for o in orders):
            return INFINITE_ORDER
        if any(o.kind == "unknown" for o in orders):
            return UNKNOWN_ORDER
        return finite_order(lcm(*[o.value for o in orders]))

    def torsion_free(self) -> Optional[bool]:
        flags = [f.torsion_free() for f in self.factors]
        nontrivial_torsion = any(fl is False for fl in flags)
        if nontrivial_torsion:
            return False
        if all(fl is True for fl in flags):
            return True
        return None

    def sort_key(self, x: GroupElement) -> tuple:
        return tuple(f.sort_key(c) for f, c in zip(self.factors, x.payload))

    def format_element(self, x: GroupElement) -> str:
        return "(" + " | ".join(f.format_element(c) for f, c in zip(self.factors, x.payload)) + ")"

    def describe(self) -> str:
        return " x ".join(f.describe() for f in self.factors)


# ---------------------------------------------------------------------------
# quotient of a free abelian group by a central cyclic subgroup


class QuotientFreeAbelianGroup(Group):
    """Z^r / <v>, elements stored as canonical coset representatives.

    Representatives fix the first nonzero coordinate of v as pivot and reduce
    by floor division there, so multiplication is rep(x + y).
    """

    kind = "quotient-free-abelian"

    def __init__(self, base: FreeAbelianGroup, modulus: Sequence[int]):
        self.base = base
        self.modulus = tuple(int(c) for c in modulus)
        if len(self.modulus) != base.rank or all(c == 0 for c in self.modulus):
            raise ValueError("modulus must be a nonzero vector of matching rank")
        self.pivot = next(i for i, c in enumerate(self.modulus) if c != 0)
        self.content = gcd(*[abs(c) for c in self.modulus])

    def _key(self) -> tuple:
        return (self.base, self.modulus)

    def _rep(self, coords: tuple[int, ...]) -> tuple[int, ...]:
        k = coords[self.pivot] // self.modulus[self.pivot]
        return tuple(x - k * v for x, v in zip(coords, self.modulus))

    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * self.base.rank)

    def _mul(self, a: tuple, b: tuple) -> tuple:
        return self._rep(tuple(x + y for x, y in zip(a, b)))

    def _inv(self, a: tuple) -> tuple:
        return self._rep(tuple(-x for x in a))

    def project(self, x: GroupElement) -> GroupElement:
        if x.group != self.base:
            raise GroupMismatchError("project expects a base-group element")
        return GroupElement(self, self._rep(x.payload))

    def generators(self) -> tuple[GroupElement, ...]:
        return tuple(self.project(g) for g in self.base.generators())

    def element_order(self, x: GroupElement) -> ElementOrder:
        w, v = x.payload, self.modulus
        if all(c == 0 for c in w):
            return finite_order(1)
        # finite order iff w is parallel to v; then order is the reduced denominator
        for i in range(len(w)):
            for j in range(len(w)):
                if w[i] * v[j] != w[j] * v[i]:
                    return INFINITE_ORDER
        p = self.pivot
        g = gcd(abs(w[p]), abs(v[p]))
        return finite_order(abs(v[p]) // g)

    def torsion_free(self) -> Optional[bool]:
        return self.content == 1

    def orderable_certificate(self) -> Optional[str]:
        if self.content == 1:
            if self.base.rank == 1:
                return "trivial quotient"
            return "quotient by a primitive vector is free abelian, hence orderable"
        return None

    def torsion_witness_sets(self) -> tuple[GroupElement, ...]:
        """The cyclic torsion subgroup generated by the primitive direction."""
        d = self.content
        unit = tuple(c // d for c in self.modulus)
        out = []
        for i in range(d):
            out.append(GroupElement(self, self._rep(tuple(i * u for u in unit))))
        return tuple(out)

    def sort_key(self, x: GroupElement) -> tuple:
        return x.payload

    def format_element(self, x: GroupElement) -> str:
        inner = ", ".join(str(v) for v in x.payload)
        return f"[{inner}]"

    def describe(self) -> str:
        return f"zn({self.base.rank})/<{self.modulus}>"
