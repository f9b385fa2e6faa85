"""Brute-force isomorphism ground truth for small instances.

Deliberately naive: exhaustive over all permutations, no shortcuts beyond
invariants that hold trivially (cardinalities).  These functions exist to
validate the canonical-labeling engine differentially; size guards are hard
errors because a silently truncated oracle would be worse than none.
"""

from __future__ import annotations

from collections import Counter
from itertools import permutations

from .core import SupportFamily
from .encode import EncodedGraph

MAX_ORACLE_VARS = 8
MAX_ORACLE_SUPPORTS = 6
MAX_ORACLE_VERTS = 8


def brute_force_family_isomorphic(a: SupportFamily, b: SupportFamily) -> bool:
    """True iff some variable permutation makes the support multisets equal.

    Exhaustive over all nvars! permutations; support sets are matched as a
    multiset, so equation order never matters.
    """
    if a.nvars != b.nvars:
        raise ValueError("families must have the same variable count")
    if a.nvars > MAX_ORACLE_VARS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_VARS} variables")
    if max(len(a.supports), len(b.supports)) > MAX_ORACLE_SUPPORTS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_SUPPORTS} support sets")

    if len(a.supports) != len(b.supports):
        return False
    if sorted(len(s) for s in a.supports) != sorted(len(s) for s in b.supports):
        return False

    target = Counter(b.supports)
    nv = a.nvars
    for sigma in permutations(range(nv)):
        mapped = Counter(
            frozenset(tuple(expo[sigma[j]] for j in range(nv)) for expo in s)
            for s in a.supports
        )
        if mapped == target:
            return True
    return False


def brute_force_graph_isomorphic(g: EncodedGraph, h: EncodedGraph) -> bool:
    """Exhaustive graph isomorphism, honoring self-loop multiplicities."""
    if max(g.nverts, h.nverts) > MAX_ORACLE_VERTS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_VERTS} vertices")
    if g.nverts != h.nverts or len(g.edges) != len(h.edges):
        return False
    if sorted(g.loop_mult.values()) != sorted(h.loop_mult.values()):
        return False

    n = g.nverts
    h_edges = h.edges
    for phi in permutations(range(n)):
        if any(g.loop_mult.get(v, 0) != h.loop_mult.get(phi[v], 0) for v in range(n)):
            continue
        ok = True
        for u, v in g.edges:
            a, b = phi[u], phi[v]
            if (min(a, b), max(a, b)) not in h_edges:
                ok = False
                break
        if ok:
            return True
    return False
