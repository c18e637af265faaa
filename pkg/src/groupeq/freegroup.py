"""Free-group utilities: proper-power detection and exponent sums.

A reduced word is a proper power iff its cyclically reduced core has a
period d < |c| dividing |c| with respect to single letters (generator, sign);
the smallest such period is found with a border (failure) array, so the root
is primitive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .backends import FreeGroup, GroupElement
from .errors import EquationError, GroupMismatchError


def _border_array(seq: Sequence) -> list[int]:
    b = [0] * len(seq)
    for i in range(1, len(seq)):
        j = b[i - 1]
        while j and seq[i] != seq[j]:
            j = b[j - 1]
        b[i] = j + 1 if seq[i] == seq[j] else 0
    return b


@dataclass(frozen=True)
class PowerDecomposition:
    """input = root ** exponent, with the exponent maximal.

    `root` is conjugated back so the identity holds for the input itself;
    `core_root` is the primitive root of the cyclically reduced core and
    `conjugator` the peeled border, input = conjugator core conjugator^-1.
    """

    root: GroupElement
    exponent: int
    core_root: GroupElement
    conjugator: GroupElement

    @property
    def is_proper_power(self) -> bool:
        return self.exponent >= 2


def proper_power(w: GroupElement) -> PowerDecomposition:
    """Primitive root and maximal exponent of a nonempty reduced word."""
    group = w.group
    if not isinstance(group, FreeGroup):
        raise GroupMismatchError("proper-power detection runs on free-group elements")
    if w.is_identity:
        raise EquationError("the empty word has no power decomposition")
    core, z = group.cyclically_reduce(w)
    letters = FreeGroup.letters(core)
    L = len(letters)
    border = _border_array(letters)
    period = L - border[-1]
    if period < L and L % period == 0:
        exponent = L // period
    else:
        period, exponent = L, 1
    core_root = group.word(
        [(group.names[g], s) for g, s in letters[:period]]
    )
    root = z * core_root * ~z
    return PowerDecomposition(root, exponent, core_root, z)


def exponent_sums(w: GroupElement) -> tuple[int, ...]:
    """Abelianization image: one signed sum per generator."""
    group = w.group
    if not isinstance(group, FreeGroup):
        raise GroupMismatchError("exponent sums run on free-group elements")
    out = [0] * group.rank
    for g, e in w.payload:
        out[g] += e
    return tuple(out)


# ---------------------------------------------------------------------------
# the multivariable corollary hypothesis


@dataclass(frozen=True)
class MultiVarEquation:
    """g_1 x_{j_1}^{e_1} ... g_n x_{j_n}^{e_n} = 1 with declared variables."""

    group: object  # coefficient backend
    variables: tuple[str, ...]
    terms: tuple[tuple[GroupElement, str, int], ...]  # (coefficient, variable, exponent)

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise EquationError("variable names must be distinct")
        for _, v, _ in self.terms:
            if v not in self.variables:
                raise EquationError(f"undeclared variable {v!r}")

    def variable_word(self) -> GroupElement:
        """prod x_{j_i}^{e_i} as a reduced word of the free group on the
        declared variables."""
        F = FreeGroup(self.variables)
        return F.word([(v, e) for _, v, e in self.terms if e != 0])


@dataclass(frozen=True)
class CorollaryReport:
    status: str  # "corollary-applies" | "corollary-silent" | "degenerate"
    decomposition: Optional[PowerDecomposition]
    variable_word: Optional[GroupElement]


def corollary_precheck(e: MultiVarEquation) -> CorollaryReport:
    """Sufficient-condition test: the equation is covered when the variable
    word is not a proper power in the free group on the variables."""
    vw = e.variable_word()
    if vw.is_identity:
        return CorollaryReport("degenerate", None, vw)
    dec = proper_power(vw)
    status = "corollary-applies" if dec.exponent == 1 else "corollary-silent"
    return CorollaryReport(status, dec, vw)
