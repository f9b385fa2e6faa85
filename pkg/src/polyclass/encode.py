"""Graph encodings of support families, and the reverse embedding.

Two encodings are provided:

* ``encode_partitioned`` builds the compact graph used for canonization.
  Vertices come in ordered cells (root, equations, monomials, variables,
  optional constant-unit, then one cell per exponent value ascending).
  A monomial with exponent e > 0 at variable v is wired through a shared
  exponent vertex (v, e); constant monomials are wired through a shared
  zero-exponent vertex attached to a constant-unit vertex.

* ``encode_selfloop`` builds the larger proof-style graph: exponents are
  unary chains of anonymous vertices, and the vertex classes are marked by
  self-loop multiplicities (root 1, equation 2, monomial 3, variable 4,
  constant 5) instead of cells.

``incidence_to_poly`` goes the other way: it turns the incidence matrix of
a plain graph into a one-polynomial system whose support class determines
the graph up to isomorphism, which ``graphs_isomorphic_via_poly`` exploits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import PolySystem, SupportFamily, make_polynomial

TAG_ROOT = "root"
TAG_EQUATIONS = "equations"
TAG_MONOMIALS = "monomials"
TAG_VARIABLES = "variables"
TAG_CONSTANT_UNIT = "constant_unit"
TAG_ALL = "all"


def exponent_tag(e: int) -> str:
    return f"exponent({e})"


@dataclass(frozen=True)
class EncodedGraph:
    """Undirected graph with an ordered vertex partition.

    ``cells`` lists disjoint, contiguous index ranges [start, stop) in
    partition order, each with a tag; together they cover 0..nverts-1.
    ``loop_mult`` maps a vertex to its self-loop multiplicity (vertices
    with no loops are omitted).
    """

    nverts: int
    edges: frozenset[tuple[int, int]]
    cells: tuple[tuple[str, int, int], ...]
    loop_mult: dict[int, int] = field(default_factory=dict)
    exponent_values: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        covered = 0
        for tag, start, stop in self.cells:
            if start != covered or stop <= start:
                raise ValueError("cells must be contiguous, nonempty, in order")
            covered = stop
        if covered != self.nverts:
            raise ValueError("cells must cover all vertices")
        for u, v in self.edges:
            if not (0 <= u < v < self.nverts):
                raise ValueError(f"bad edge ({u}, {v})")
        for v, m in self.loop_mult.items():
            if not (0 <= v < self.nverts) or m <= 0:
                raise ValueError(f"bad loop entry {v}: {m}")

    @property
    def has_loops(self) -> bool:
        return bool(self.loop_mult)

    @property
    def is_plain(self) -> bool:
        return not self.loop_mult and len(self.cells) == 1

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.nverts)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def cell_size(self, tag: str) -> int:
        return sum(stop - start for t, start, stop in self.cells if t == tag)


def plain_graph(nverts: int, edges: set[tuple[int, int]] | frozenset[tuple[int, int]]) -> EncodedGraph:
    """Plain graph: no loops, one trivial cell."""
    norm = frozenset((min(u, v), max(u, v)) for u, v in edges)
    return EncodedGraph(
        nverts=nverts,
        edges=norm,
        cells=((TAG_ALL, 0, nverts),),
    )


def _check_family(fam: SupportFamily) -> None:
    if not fam.supports:
        raise ValueError("family has no support sets")
    for s in fam.supports:
        if not s:
            raise ValueError("empty support set cannot be encoded")


def encode_partitioned(fam: SupportFamily) -> EncodedGraph:
    """Compact partitioned encoding used for canonization.

    Vertex budget: 1 root + one per equation + one per (equation, tuple)
    pair + one per variable + one per occurring (variable, exponent > 0)
    pair + 2 when any constant monomial occurs.
    """
    _check_family(fam)
    nv = fam.nvars
    zero = (0,) * nv
    has_const = any(zero in s for s in fam.supports)

    # (variable, exponent) pairs with e > 0, and the sorted exponent values
    var_exps: set[tuple[int, int]] = set()
    for s in fam.supports:
        for expo in s:
            for v, e in enumerate(expo):
                if e > 0:
                    var_exps.add((v, e))
    exp_values = tuple(sorted({e for _, e in var_exps}))

    cells: list[tuple[str, int, int]] = []
    idx = 0

    def cell(tag: str, count: int) -> int:
        nonlocal idx
        if count == 0:
            return idx
        cells.append((tag, idx, idx + count))
        idx += count
        return idx - count

    root = cell(TAG_ROOT, 1)
    eq0 = cell(TAG_EQUATIONS, len(fam.supports))

    mon_index: dict[tuple[int, tuple[int, ...]], int] = {}
    mon_count = sum(len(s) for s in fam.supports)
    mon0 = cell(TAG_MONOMIALS, mon_count)
    k = mon0
    for i, s in enumerate(fam.supports):
        for expo in sorted(s):
            mon_index[(i, expo)] = k
            k += 1

    var0 = cell(TAG_VARIABLES, nv)
    const_unit = cell(TAG_CONSTANT_UNIT, 1) if has_const else -1
    zero_exp = cell(exponent_tag(0), 1) if has_const else -1

    exp_index: dict[tuple[int, int], int] = {}
    for e in exp_values:
        members = sorted(v for v, ev in var_exps if ev == e)
        start = cell(exponent_tag(e), len(members))
        for off, v in enumerate(members):
            exp_index[(v, e)] = start + off

    edges: set[tuple[int, int]] = set()

    def link(a: int, b: int) -> None:
        edges.add((min(a, b), max(a, b)))

    for i, s in enumerate(fam.supports):
        eq = eq0 + i
        link(root, eq)
        for expo in s:
            mon = mon_index[(i, expo)]
            link(eq, mon)
            if expo == zero:
                link(mon, zero_exp)
            else:
                for v, e in enumerate(expo):
                    if e > 0:
                        link(mon, exp_index[(v, e)])
    for (v, e), xv in exp_index.items():
        link(xv, var0 + v)
    if has_const:
        link(zero_exp, const_unit)

    return EncodedGraph(
        nverts=idx,
        edges=frozenset(edges),
        cells=tuple(cells),
        exponent_values=exp_values,
    )


LOOP_ROOT = 1
LOOP_EQUATION = 2
LOOP_MONOMIAL = 3
LOOP_VARIABLE = 4
LOOP_CONSTANT = 5


def encode_selfloop(fam: SupportFamily) -> EncodedGraph:
    """Proof-style encoding: exponent e becomes a chain of e-1 anonymous
    vertices between monomial and variable; vertex classes are marked by
    self-loop multiplicities rather than cells (the single cell is trivial).

    The constant vertex is present exactly when a constant monomial occurs.
    """
    _check_family(fam)
    nv = fam.nvars
    zero = (0,) * nv
    has_const = any(zero in s for s in fam.supports)

    loop_mult: dict[int, int] = {}
    root = 0
    loop_mult[root] = LOOP_ROOT
    idx = 1

    eq_ids = []
    for _ in fam.supports:
        loop_mult[idx] = LOOP_EQUATION
        eq_ids.append(idx)
        idx += 1

    mon_ids: dict[tuple[int, tuple[int, ...]], int] = {}
    for i, s in enumerate(fam.supports):
        for expo in sorted(s):
            loop_mult[idx] = LOOP_MONOMIAL
            mon_ids[(i, expo)] = idx
            idx += 1

    var_ids = []
    for _ in range(nv):
        loop_mult[idx] = LOOP_VARIABLE
        var_ids.append(idx)
        idx += 1

    const_id = -1
    if has_const:
        const_id = idx
        loop_mult[idx] = LOOP_CONSTANT
        idx += 1

    edges: set[tuple[int, int]] = set()

    def link(a: int, b: int) -> None:
        edges.add((min(a, b), max(a, b)))

    chain_total = 0
    for i, s in enumerate(fam.supports):
        link(root, eq_ids[i])
        for expo in s:
            mon = mon_ids[(i, expo)]
            link(eq_ids[i], mon)
            if expo == zero:
                link(mon, const_id)
                continue
            for v, e in enumerate(expo):
                if e == 0:
                    continue
                prev = mon
                for _ in range(e - 1):
                    # chain vertices carry no loops
                    link(prev, idx)
                    prev = idx
                    idx += 1
                    chain_total += 1
                link(prev, var_ids[v])

    exp_values = tuple(
        sorted({e for s in fam.supports for expo in s for e in expo if e > 0})
    )
    return EncodedGraph(
        nverts=idx,
        edges=frozenset(edges),
        cells=((TAG_ALL, 0, idx),),
        loop_mult=loop_mult,
        exponent_values=exp_values,
    )


@dataclass(frozen=True)
class IncidenceMatrix:
    """0/1 vertex-by-edge matrix; each column has two 1s, or one for a loop."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("incidence matrix has no rows")
        width = len(self.entries[0])
        for row in self.entries:
            if len(row) != width:
                raise ValueError("ragged incidence matrix")
            if any(x not in (0, 1) for x in row):
                raise ValueError("incidence entries must be 0 or 1")
        for j in range(width):
            ones = sum(row[j] for row in self.entries)
            if ones not in (1, 2):
                raise ValueError(f"column {j} has {ones} ones")

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0])


def incidence_matrix(g: EncodedGraph) -> IncidenceMatrix:
    """Incidence matrix of a loop-free graph; columns in sorted edge order."""
    if g.has_loops:
        raise ValueError("incidence matrix requires a loop-free graph")
    cols = sorted(g.edges)
    if not cols:
        raise ValueError("graph has no edges")
    rows = tuple(
        tuple(1 if i in (u, v) else 0 for u, v in cols) for i in range(g.nverts)
    )
    return IncidenceMatrix(rows)


def incidence_to_poly(mat: IncidenceMatrix) -> PolySystem:
    """One variable per row, one monomial per column, coefficients 1.

    Duplicate columns merge into a single term whose coefficient is the
    multiplicity; the support is unaffected.
    """
    names = tuple(f"x{i + 1}" for i in range(mat.nrows))
    terms = []
    for j in range(mat.ncols):
        terms.append((1, tuple(row[j] for row in mat.entries)))
    return PolySystem(vars=names, polys=(make_polynomial(terms),))


def graphs_isomorphic_via_poly(g: EncodedGraph, h: EncodedGraph) -> bool:
    """Decide plain-graph isomorphism by the support-family reduction.

    Each graph becomes a one-polynomial system via its incidence matrix;
    the verdict is equality of the two canonical support-family forms.
    Edgeless graphs have an empty polynomial and cannot take this route,
    so they are compared by vertex count directly.
    """
    for name, graph in (("first", g), ("second", h)):
        if graph.has_loops or len(graph.cells) != 1:
            raise ValueError(f"{name} graph must be plain (no loops, one cell)")
    if not g.edges or not h.edges:
        return g.nverts == h.nverts and not g.edges and not h.edges

    from .canon import systems_isomorphic

    return systems_isomorphic(
        incidence_to_poly(incidence_matrix(g)),
        incidence_to_poly(incidence_matrix(h)),
    )


def dump_graph(g: EncodedGraph) -> str:
    """Deterministic text dump: header, cells, exponents, sorted edges."""
    lines = [f"nverts {g.nverts}"]
    lines.append(
        " ".join(f"{tag}:{start}..{stop - 1}" for tag, start, stop in g.cells)
    )
    lines.append(" ".join(str(e) for e in g.exponent_values))
    entries = [(u, v, 0) for u, v in g.edges]
    entries += [(v, v, m) for v, m in g.loop_mult.items()]
    for u, v, m in sorted(entries):
        lines.append(f"{u} {v} {m}" if u == v else f"{u} {v}")
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> EncodedGraph:
    """Parse the dump format back into an EncodedGraph."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("nverts "):
        raise ValueError("graph dump must start with 'nverts k'")
    nverts = int(lines[0].split()[1])
    cells = []
    for part in lines[1].split():
        tag, _, span = part.rpartition(":")
        start_s, _, stop_s = span.partition("..")
        cells.append((tag, int(start_s), int(stop_s) + 1))
    exp_values = tuple(int(x) for x in lines[2].split()) if len(lines) > 2 else ()
    edges: set[tuple[int, int]] = set()
    loops: dict[int, int] = {}
    for line in lines[3:]:
        if not line.strip():
            continue
        parts = line.split()
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            loops[u] = int(parts[2])
        else:
            edges.add((min(u, v), max(u, v)))
    return EncodedGraph(
        nverts=nverts,
        edges=frozenset(edges),
        cells=tuple(cells),
        loop_mult=loops,
        exponent_values=exp_values,
    )
