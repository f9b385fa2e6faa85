"""Exact representations of polynomial systems and their support families.

A system is an ordered list of variables plus an ordered list of polynomials.
Each polynomial is a list of terms; a term is a nonzero rational coefficient
(Fraction) attached to an exponent tuple, one non-negative integer per
variable.  Example over (x, y):

    x^2 + x*y^2 - 3   ->   [(1, (2, 0)), (1, (1, 2)), (-3, (0, 0))]

Classification only ever looks at the exponent tuples.  The support family
of a system forgets coefficients, term order, equation order and variable
names: it is a multiset of support sets, each support set a frozenset of
exponent tuples.  Two systems are considered equivalent when some variable
permutation plus equation matching makes their support families identical.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

ExponentTuple = tuple[int, ...]


@dataclass(frozen=True)
class Term:
    """One monomial with its coefficient.  coeff is never zero."""

    coeff: Fraction
    expo: ExponentTuple

    def __post_init__(self) -> None:
        if self.coeff == 0:
            raise ValueError("term coefficient must be nonzero")
        if any(e < 0 for e in self.expo):
            raise ValueError("exponents must be non-negative")


@dataclass(frozen=True)
class Polynomial:
    """A sum of terms with pairwise distinct exponent tuples."""

    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("polynomial must have at least one term")
        expos = [t.expo for t in self.terms]
        if len(set(expos)) != len(expos):
            raise ValueError("duplicate exponent tuple in polynomial")

    def support(self) -> frozenset[ExponentTuple]:
        return frozenset(t.expo for t in self.terms)


@dataclass(frozen=True)
class PolySystem:
    """Ordered variables plus ordered polynomials over them."""

    vars: tuple[str, ...]
    polys: tuple[Polynomial, ...]

    def __post_init__(self) -> None:
        if not self.polys:
            raise ValueError("system must have at least one polynomial")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable name")
        nv = len(self.vars)
        for p in self.polys:
            for t in p.terms:
                if len(t.expo) != nv:
                    raise ValueError(
                        f"exponent tuple {t.expo} does not match {nv} variables"
                    )

    @property
    def nvars(self) -> int:
        return len(self.vars)


@dataclass(frozen=True)
class SupportFamily:
    """Multiset of support sets; the object classification actually compares.

    Duplicate identical polynomials in the input are preserved as duplicate
    support sets (multiset semantics).
    """

    nvars: int
    supports: tuple[frozenset[ExponentTuple], ...]

    def __post_init__(self) -> None:
        for s in self.supports:
            for expo in s:
                if len(expo) != self.nvars:
                    raise ValueError("tuple length does not match nvars")

    def as_multiset(self) -> Counter[frozenset[ExponentTuple]]:
        return Counter(self.supports)

    def __eq__(self, other: object) -> bool:
        # Support sets are a multiset: order of polynomials is irrelevant.
        if not isinstance(other, SupportFamily):
            return NotImplemented
        return self.nvars == other.nvars and Counter(self.supports) == Counter(
            other.supports
        )

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(Counter(self.supports).items())))


def make_polynomial(terms: Iterable[tuple[Fraction | int, ExponentTuple]]) -> Polynomial:
    """Build a polynomial, merging equal exponent tuples and dropping zeros.

    Raises ValueError if everything cancels.
    """
    acc: dict[ExponentTuple, Fraction] = {}
    order: list[ExponentTuple] = []
    for coeff, expo in terms:
        expo = tuple(expo)
        if expo not in acc:
            acc[expo] = Fraction(0)
            order.append(expo)
        acc[expo] += Fraction(coeff)
    merged = tuple(Term(acc[e], e) for e in order if acc[e] != 0)
    if not merged:
        raise ValueError("polynomial has no terms after merging")
    return Polynomial(merged)


def support_family(sys: PolySystem) -> SupportFamily:
    """Forget coefficients: one support set per polynomial."""
    return SupportFamily(
        nvars=sys.nvars,
        supports=tuple(p.support() for p in sys.polys),
    )


def permute_system(
    sys: PolySystem,
    var_perm: Sequence[int],
    eq_perm: Sequence[int],
) -> PolySystem:
    """Apply a variable and an equation permutation.

    var_perm maps old variable position j to new position var_perm[j]; the
    variable name moves with its column.  eq_perm likewise maps old equation
    position i to new position eq_perm[i].  Coefficients are untouched.
    """
    nv, ne = sys.nvars, len(sys.polys)
    if sorted(var_perm) != list(range(nv)):
        raise ValueError(f"var_perm is not a permutation of 0..{nv - 1}")
    if sorted(eq_perm) != list(range(ne)):
        raise ValueError(f"eq_perm is not a permutation of 0..{ne - 1}")

    new_vars = [""] * nv
    for j, name in enumerate(sys.vars):
        new_vars[var_perm[j]] = name

    def remap(expo: ExponentTuple) -> ExponentTuple:
        out = [0] * nv
        for j, e in enumerate(expo):
            out[var_perm[j]] = e
        return tuple(out)

    new_polys: list[Polynomial | None] = [None] * ne
    for i, p in enumerate(sys.polys):
        new_polys[eq_perm[i]] = Polynomial(
            tuple(Term(t.coeff, remap(t.expo)) for t in p.terms)
        )
    return PolySystem(vars=tuple(new_vars), polys=tuple(new_polys))  # type: ignore[arg-type]


def permute_family(fam: SupportFamily, var_perm: Sequence[int]) -> SupportFamily:
    """Reindex every tuple of a family by a variable permutation."""
    if sorted(var_perm) != list(range(fam.nvars)):
        raise ValueError(f"var_perm is not a permutation of 0..{fam.nvars - 1}")

    def remap(expo: ExponentTuple) -> ExponentTuple:
        out = [0] * fam.nvars
        for j, e in enumerate(expo):
            out[var_perm[j]] = e
        return tuple(out)

    return SupportFamily(
        nvars=fam.nvars,
        supports=tuple(frozenset(remap(e) for e in s) for s in fam.supports),
    )


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _format_term(sys_vars: tuple[str, ...], t: Term) -> str:
    factors: list[str] = []
    mag = abs(t.coeff)
    for name, e in zip(sys_vars, t.expo):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    if not factors or mag != 1:
        factors.insert(0, _format_coeff(mag))
    return "*".join(factors)


def format_system(sys: PolySystem) -> str:
    """Render a system in the input grammar; parse(format(s)) == s.

    Always emits the variable header so that declared-but-unused variables
    survive the round trip.
    """
    lines = []
    if sys.vars:
        lines.append("vars: " + ", ".join(sys.vars) + ";")
    for p in sys.polys:
        parts: list[str] = []
        for k, t in enumerate(p.terms):
            rendered = _format_term(sys.vars, t)
            if k == 0:
                parts.append(rendered if t.coeff > 0 else "-" + rendered)
            else:
                parts.append(("+ " if t.coeff > 0 else "- ") + rendered)
        lines.append(" ".join(parts) + ";")
    return "\n".join(lines) + "\n"
