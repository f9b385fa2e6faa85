"""Partition-respecting canonical labeling by individualization-refinement.

The search keeps an ordered partition of the vertices (a sequence of cells;
splits never cross the input cells, so the labeling always respects them).
Starting from the coarsest equitable refinement of the input partition, it
repeatedly picks the first smallest non-singleton cell, branches on each of
its vertices (individualize, then re-refine incrementally), and recurses
until the partition is discrete.  Each discrete partition is a candidate
labeling; the canonical one is the lexicographically smallest serialized
adjacency over all leaves.

Two leaves with identical serializations differ by a graph automorphism.
Discovered automorphisms are returned (projected onto the variables cell)
and used to prune the search: siblings in a known orbit are skipped, and
when a leaf repeats an earlier one the search jumps back to the deepest
branch point it can prove redundant.  Pruning can be disabled for
differential testing; it never changes the canonical result.

Self-loop multiplicities, when present, are folded into the initial
partition (vertices with different loop counts can never correspond) and
into the serialized adjacency, so loop-marked graphs canonize correctly
even though refinement itself only counts proper edges.
"""

from __future__ import annotations

import hashlib
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .core import PolySystem, support_family
from .encode import (
    EncodedGraph,
    TAG_EQUATIONS,
    TAG_MONOMIALS,
    TAG_VARIABLES,
    encode_partitioned,
)

FORMAT_VERSION = "SSC1"
DIGEST_ALGORITHM = "sha256"  # frozen; the store records this name


class CanonizationTimeout(RuntimeError):
    """Raised when a canonization deadline expires mid-search."""


class NodeCounts(NamedTuple):
    n_node_variable: int
    n_node_monomial: int
    n_node_equation: int
    n_node_degree: int


@dataclass(frozen=True)
class CanonicalForm:
    """Frozen canonical serialization plus its digest key and count data."""

    text: str
    key: str
    counts: NodeCounts
    n_degree: int
    degrees: tuple[int, ...]


@dataclass(frozen=True)
class SymmetryGenerators:
    """Variable permutations known to fix the support family.

    Each generator g maps variable position j to g[j].  The set generates a
    subgroup of the family's automorphism group; it is not guaranteed to be
    the whole group.
    """

    generators: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ColoredPartition:
    """Ordered vertex partition; trace records the splits refinement made."""

    cells: tuple[tuple[int, ...], ...]
    trace: tuple = field(default=(), compare=False)

    @classmethod
    def from_graph(cls, g: EncodedGraph) -> "ColoredPartition":
        return cls(tuple(tuple(range(start, stop)) for _, start, stop in g.cells))

    @property
    def is_discrete(self) -> bool:
        return all(len(c) == 1 for c in self.cells)


# --- internal partition state -------------------------------------------
#
# The partition lives in one array:  order  lists the vertices, cells are
# contiguous segments identified by their start position.  Splits rewrite a
# segment in place, so cell start positions are stable handles.


class _PState:
    __slots__ = ("order", "pos", "start_of", "cell_len")

    def __init__(self, order: list[int], pos: list[int], start_of: list[int], cell_len: dict[int, int]):
        self.order = order
        self.pos = pos
        self.start_of = start_of
        self.cell_len = cell_len

    @classmethod
    def from_cells(cls, n: int, cells: Iterable[Iterable[int]]) -> "_PState":
        order: list[int] = []
        start_of = [0] * n
        cell_len: dict[int, int] = {}
        for members in cells:
            members = list(members)
            if not members:
                continue
            s = len(order)
            cell_len[s] = len(members)
            for v in members:
                start_of[len(order)] = s
                order.append(v)
        if len(order) != n:
            raise ValueError("cells do not cover all vertices")
        pos = [0] * n
        for p, v in enumerate(order):
            pos[v] = p
        return cls(order, pos, start_of, cell_len)

    def copy(self) -> "_PState":
        return _PState(self.order[:], self.pos[:], self.start_of[:], dict(self.cell_len))

    def cells(self) -> list[tuple[int, int]]:
        out = []
        s = 0
        n = len(self.order)
        while s < n:
            ln = self.cell_len[s]
            out.append((s, ln))
            s += ln
        return out

    def is_discrete(self) -> bool:
        return all(ln == 1 for ln in self.cell_len.values())


def _refine_state(adj: list[list[int]], st: _PState, queue: Iterable[int]) -> list[tuple]:
    """Coarsest equitable refinement; returns the split trace.

    Splits order fragments by ascending neighbor count, which keeps the
    refinement equivariant under isomorphism.
    """
    order, pos, start_of, cell_len = st.order, st.pos, st.start_of, st.cell_len
    q = deque(queue)
    inq = set(q)
    trace: list[tuple] = []
    while q:
        s = q.popleft()
        inq.discard(s)
        splitter = order[s : s + cell_len[s]]
        cnt: dict[int, int] = {}
        for u in splitter:
            for w in adj[u]:
                cnt[w] = cnt.get(w, 0) + 1
        affected = {start_of[pos[w]] for w in cnt}
        for cs in sorted(affected):
            ln = cell_len[cs]
            if ln == 1:
                continue
            groups: dict[int, list[int]] = {}
            for p in range(cs, cs + ln):
                v = order[p]
                groups.setdefault(cnt.get(v, 0), []).append(v)
            if len(groups) == 1:
                continue
            keys = sorted(groups)
            trace.append((s, cs, tuple((k, len(groups[k])) for k in keys)))
            p = cs
            new_starts = []
            for k in keys:
                new_starts.append(p)
                for v in sorted(groups[k]):
                    order[p] = v
                    pos[v] = p
                    p += 1
            for i, ns in enumerate(new_starts):
                nxt = new_starts[i + 1] if i + 1 < len(new_starts) else cs + ln
                cell_len[ns] = nxt - ns
                for pp in range(ns, nxt):
                    start_of[pp] = ns
                if ns not in inq:
                    q.append(ns)
                    inq.add(ns)
    return trace


def _initial_state(g: EncodedGraph) -> _PState:
    """Input cells, each pre-split by self-loop multiplicity (ascending)."""
    cells: list[list[int]] = []
    for _, start, stop in g.cells:
        if not g.loop_mult:
            cells.append(list(range(start, stop)))
            continue
        by_mult: dict[int, list[int]] = {}
        for v in range(start, stop):
            by_mult.setdefault(g.loop_mult.get(v, 0), []).append(v)
        for m in sorted(by_mult):
            cells.append(by_mult[m])
    return _PState.from_cells(g.nverts, cells)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


class _Search:
    """One canonical-labeling run over a fixed graph."""

    CHECK_EVERY = 64

    def __init__(self, g: EncodedGraph, prune: bool, deadline: float | None):
        self.adj = g.adjacency()
        self.loops = g.loop_mult
        self.n = g.nverts
        self.init = _initial_state(g)
        self.prune = prune
        self.deadline = deadline
        self.gens: list[tuple[int, ...]] = []
        self.gen_set: set[tuple[int, ...]] = set()
        self.zeta: dict | None = None
        self.best: dict | None = None
        self.ticks = 0

    def run(self) -> tuple[list[int], tuple, list[tuple[int, ...]]]:
        st = self.init
        _refine_state(self.adj, st, [s for s, _ in st.cells()])
        self._descend(st, [], 0)
        assert self.best is not None
        return self.best["pos"], self.best["key"], self.gens

    # -- leaves ---------------------------------------------------------

    def _leaf_key(self, st: _PState) -> tuple:
        pos = st.pos
        rows = []
        for i, v in enumerate(st.order):
            row = [pos[w] for w in self.adj[v]]
            m = self.loops.get(v, 0)
            if m:
                row.extend([i] * m)
            row.sort()
            rows.append(tuple(row))
        return tuple(rows)

    def _leaf(self, st: _PState, prefix: list[int]) -> int | None:
        key = self._leaf_key(st)
        entry = {
            "key": key,
            "prefix": tuple(prefix),
            "pos": st.pos[:],
            "order": st.order[:],
        }
        if self.zeta is None:
            self.zeta = entry
            self.best = entry
            return None

        jump: int | None = None
        refs = [self.zeta]
        if self.best is not self.zeta:
            refs.append(self.best)  # type: ignore[arg-type]
        for ref in refs:
            if key != ref["key"]:
                continue
            ref_order = ref["order"]
            pos = entry["pos"]
            gamma = tuple(ref_order[pos[v]] for v in range(self.n))
            if any(gamma[v] != v for v in range(self.n)) and gamma not in self.gen_set:
                self.gen_set.add(gamma)
                self.gens.append(gamma)
            d = _common_prefix_len(entry["prefix"], ref["prefix"])
            # Jumping back to depth d is sound only if gamma really maps the
            # current branch onto the already-explored one.
            if (
                d < len(entry["prefix"])
                and d < len(ref["prefix"])
                and gamma[entry["prefix"][d]] == ref["prefix"][d]
            ):
                jump = d if jump is None else min(jump, d)

        if key < self.best["key"]:  # type: ignore[index]
            self.best = entry
        return jump

    # -- tree -----------------------------------------------------------

    def _descend(self, st: _PState, prefix: list[int], depth: int) -> int | None:
        self.ticks += 1
        if self.deadline is not None and self.ticks % self.CHECK_EVERY == 0:
            if time.monotonic() > self.deadline:
                raise CanonizationTimeout("canonization deadline exceeded")

        target = None
        for s, ln in st.cells():
            if ln > 1 and (target is None or ln < target[1]):
                target = (s, ln)
        if target is None:
            return self._leaf(st, prefix)

        ts, tl = target
        candidates = sorted(st.order[ts : ts + tl])
        explored: list[int] = []
        uf: _UnionFind | None = None
        gens_built = -1
        for v in candidates:
            if self.prune and explored:
                if uf is None or gens_built != len(self.gens):
                    uf = self._orbits_fixing(prefix)
                    gens_built = len(self.gens)
                rv = uf.find(v)
                if any(uf.find(u) == rv for u in explored):
                    continue
            child = st.copy()
            self._individualize(child, v)
            prefix.append(v)
            r = self._descend(child, prefix, depth + 1)
            prefix.pop()
            explored.append(v)
            if r is not None and r < depth:
                return r
        return None

    def _individualize(self, st: _PState, v: int) -> None:
        cs = st.start_of[st.pos[v]]
        ln = st.cell_len[cs]
        rest = sorted(u for u in st.order[cs : cs + ln] if u != v)
        p = cs
        for u in [v] + rest:
            st.order[p] = u
            st.pos[u] = p
            p += 1
        st.cell_len[cs] = 1
        st.start_of[cs] = cs
        st.cell_len[cs + 1] = ln - 1
        for pp in range(cs + 1, cs + ln):
            st.start_of[pp] = cs + 1
        _refine_state(self.adj, st, [cs, cs + 1])

    def _orbits_fixing(self, prefix: list[int]) -> _UnionFind:
        uf = _UnionFind(self.n)
        for g in self.gens:
            if all(g[p] == p for p in prefix):
                for v in range(self.n):
                    uf.union(v, g[v])
        return uf


def _common_prefix_len(a: tuple, b: tuple) -> int:
    d = 0
    for x, y in zip(a, b):
        if x != y:
            break
        d += 1
    return d


def refine(g: EncodedGraph, p: ColoredPartition) -> ColoredPartition:
    """Coarsest equitable refinement of p over g's edges.

    Cells only ever split, so the result respects both p and g's cell
    structure.  Deterministic in (g, p).
    """
    cell_range: dict[int, int] = {}
    for ci, (_, start, stop) in enumerate(g.cells):
        for v in range(start, stop):
            cell_range[v] = ci
    for cell in p.cells:
        if len({cell_range[v] for v in cell}) > 1:
            raise ValueError("partition does not respect the graph's cells")

    st = _PState.from_cells(g.nverts, p.cells)
    trace = _refine_state(g.adjacency(), st, [s for s, _ in st.cells()])
    cells = tuple(
        tuple(st.order[s : s + ln]) for s, ln in st.cells()
    )
    return ColoredPartition(cells, tuple(trace))


def _search_graph(
    g: EncodedGraph, prune: bool = True, deadline: float | None = None
) -> tuple[list[int], tuple, list[tuple[int, ...]]]:
    """Run the labeling search; returns (vertex->label, leaf key, vertex gens)."""
    return _Search(g, prune, deadline).run()


def _render_form(g: EncodedGraph, key: tuple) -> CanonicalForm:
    cells_part = ",".join(f"{tag}:{stop - start}" for tag, start, stop in g.cells)
    exps_part = ",".join(str(e) for e in g.exponent_values)
    adj_part = ";".join(
        f"{i}:" + ",".join(map(str, row)) for i, row in enumerate(key)
    )
    text = f"{FORMAT_VERSION}|cells={cells_part}|exps={exps_part}|adj={adj_part}"
    return _form_with_counts(text, g.cells)


def _form_with_counts(text: str, cells: tuple[tuple[str, int, int], ...]) -> CanonicalForm:
    sizes: dict[str, int] = {}
    for tag, start, stop in cells:
        sizes[tag] = sizes.get(tag, 0) + (stop - start)
    n_degree = 0
    degree_nodes = 0
    degrees = []
    for tag, start, stop in cells:
        if tag.startswith("exponent(") and tag.endswith(")"):
            e = int(tag[len("exponent(") : -1])
            size = stop - start
            degree_nodes += size
            n_degree += e * size
            if e > 0:
                degrees.append(e)
    counts = NodeCounts(
        n_node_variable=sizes.get(TAG_VARIABLES, 0),
        n_node_monomial=sizes.get(TAG_MONOMIALS, 0),
        n_node_equation=sizes.get(TAG_EQUATIONS, 0),
        n_node_degree=degree_nodes,
    )
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return CanonicalForm(
        text=text,
        key=digest,
        counts=counts,
        n_degree=n_degree,
        degrees=tuple(sorted(degrees)),
    )


def form_from_text(text: str) -> CanonicalForm:
    """Recompute a CanonicalForm (digest and counts) from its frozen text."""
    prefix = f"{FORMAT_VERSION}|cells="
    if not text.startswith(prefix):
        raise ValueError(f"canonical text does not start with {prefix!r}")
    body = text[len(prefix) :]
    cells_part, sep, rest = body.partition("|exps=")
    if not sep:
        raise ValueError("canonical text is missing the exps section")
    cells = []
    at = 0
    for item in cells_part.split(","):
        tag, _, size_s = item.rpartition(":")
        size = int(size_s)
        cells.append((tag, at, at + size))
        at += size
    return _form_with_counts(text, tuple(cells))


def canonical_labeling(
    g: EncodedGraph,
    prune: bool = True,
    deadline_s: float | None = None,
) -> tuple[tuple[int, ...], CanonicalForm, SymmetryGenerators]:
    """Canonically label g; also report discovered variable symmetries.

    Returns (perm, form, gens) where perm maps each vertex to its canonical
    label.  gens holds the automorphisms found during the search, projected
    onto the variables cell, deduplicated, identity dropped.
    """
    deadline = time.monotonic() + deadline_s if deadline_s is not None else None
    lab, key, vertex_gens = _search_graph(g, prune=prune, deadline=deadline)
    form = _render_form(g, key)

    var_cells = [(start, stop) for tag, start, stop in g.cells if tag == TAG_VARIABLES]
    projected: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    if var_cells:
        start, stop = var_cells[0]
        nv = stop - start
        for gamma in vertex_gens:
            vp = tuple(gamma[start + j] - start for j in range(nv))
            if any(x < 0 or x >= nv for x in vp):
                raise AssertionError("automorphism left the variables cell")
            if vp not in seen and any(vp[j] != j for j in range(nv)):
                seen.add(vp)
                projected.append(vp)
    return tuple(lab), form, SymmetryGenerators(tuple(projected))


def canonical_form_of_system(
    sys: PolySystem,
    prune: bool = True,
    deadline_s: float | None = None,
) -> tuple[CanonicalForm, SymmetryGenerators]:
    """support family -> partitioned encoding -> canonical labeling."""
    g = encode_partitioned(support_family(sys))
    _, form, gens = canonical_labeling(g, prune=prune, deadline_s=deadline_s)
    return form, gens


def systems_isomorphic(a: PolySystem, b: PolySystem) -> bool:
    """True iff the two systems' support families are isomorphic."""
    if a.nvars != b.nvars or len(a.polys) != len(b.polys):
        return False
    fa, _ = canonical_form_of_system(a)
    fb, _ = canonical_form_of_system(b)
    return fa.key == fb.key
