"""Deterministic generators for benchmark families and fuzz systems.

All generators are pure functions of their arguments (and seed); re-running
one always reproduces the identical system, which the classification tests
rely on.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from .core import PolySystem, make_polynomial

_NASH_COEFF_SEED = 0x9A5E  # fixed stream; support structure is what matters


def gen_cyclic(n: int) -> PolySystem:
    """Cyclic n-roots: n equations in x1..xn.

    Equation k (0 <= k <= n-2) sums the n cyclic products of k+1
    consecutive variables; the last equation is x1*...*xn - 1.
    """
    if n < 2:
        raise ValueError("cyclic systems need n >= 2")
    names = tuple(f"x{i + 1}" for i in range(n))
    polys = []
    for k in range(n - 1):
        terms = []
        for i in range(n):
            expo = [0] * n
            for j in range(i, i + k + 1):
                expo[j % n] += 1
            terms.append((1, tuple(expo)))
        polys.append(make_polynomial(terms))
    polys.append(make_polynomial([(1, (1,) * n), (-1, (0,) * n)]))
    return PolySystem(vars=names, polys=tuple(polys))


def gen_nash(n: int) -> PolySystem:
    """Nash-equilibria structure: every equation has the same shape.

    Equation i supports all 2^(n-1) squarefree monomials in the variables
    other than p_i (the constant included), so every variable permutation
    fixes the support family.  Coefficients are generic integers from a
    fixed seeded stream.
    """
    if n < 2:
        raise ValueError("Nash systems need n >= 2")
    rng = random.Random(_NASH_COEFF_SEED + n)
    names = tuple(f"p{i + 1}" for i in range(n))
    polys = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        terms = []
        for size in range(n):
            for subset in combinations(others, size):
                expo = [0] * n
                for j in subset:
                    expo[j] = 1
                terms.append((rng.randint(1, 1000), tuple(expo)))
        polys.append(make_polynomial(terms))
    return PolySystem(vars=names, polys=tuple(polys))


def gen_katsura(n: int) -> PolySystem:
    """Katsura-n: n+1 variables u0..un, n quadratic equations plus one linear.

    Equation m (0 <= m <= n-1) is sum over l in -n..n of u_|l| * u_|m-l|
    minus u_m, dropping products whose index falls outside 0..n; the last
    equation is u0 + 2*(u1 + ... + un) - 1.
    """
    if n < 1:
        raise ValueError("Katsura systems need n >= 1")
    nv = n + 1
    names = tuple(f"u{i}" for i in range(nv))
    polys = []
    for m in range(n):
        terms: list[tuple[Fraction | int, tuple[int, ...]]] = []
        for l in range(-n, n + 1):
            a, b = abs(l), abs(m - l)
            if b > n:
                continue
            expo = [0] * nv
            expo[a] += 1
            expo[b] += 1
            terms.append((1, tuple(expo)))
        expo = [0] * nv
        expo[m] = 1
        terms.append((-1, tuple(expo)))
        polys.append(make_polynomial(terms))
    linear: list[tuple[Fraction | int, tuple[int, ...]]] = []
    for i in range(nv):
        expo = [0] * nv
        expo[i] = 1
        linear.append((1 if i == 0 else 2, tuple(expo)))
    linear.append((-1, (0,) * nv))
    polys.append(make_polynomial(linear))
    return PolySystem(vars=names, polys=tuple(polys))


def gen_random(
    nvars: int,
    neqs: int,
    max_terms: int,
    max_degree: int,
    seed: int,
) -> PolySystem:
    """Seeded random system; never an empty polynomial.

    Each polynomial draws between 1 and max_terms distinct exponent tuples,
    entries uniform in 0..max_degree, duplicates rejected.  Coefficients are
    nonzero integers, so no term can cancel away.
    """
    if nvars < 1 or neqs < 1 or max_terms < 1 or max_degree < 1:
        raise ValueError("all bounds must be >= 1")
    rng = random.Random(seed)
    space = (max_degree + 1) ** nvars
    names = tuple(f"x{i + 1}" for i in range(nvars))
    polys = []
    for _ in range(neqs):
        want = min(rng.randint(1, max_terms), space)
        tuples: set[tuple[int, ...]] = set()
        while len(tuples) < want:
            tuples.add(tuple(rng.randint(0, max_degree) for _ in range(nvars)))
        terms = []
        for expo in sorted(tuples):
            coeff = rng.randint(1, 1000) * rng.choice((1, -1))
            terms.append((coeff, expo))
        polys.append(make_polynomial(terms))
    return PolySystem(vars=names, polys=tuple(polys))
