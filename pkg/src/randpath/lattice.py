"""Finite graphs for path ensembles: tori, small graphs, reflections, vertex sets.

Vertices of a torus are coordinate tuples in [0, L)^d with nearest-neighbour
edges under periodic wrap.  General graphs carry explicit vertex and edge
lists.  All orderings (vertex, edge, neighbour) are lexicographic and fixed so
that every enumeration built on top is deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class TorusGraph:
    """A finite simple graph; torus mode retains (d, L), general mode has d = L = None.

    vertices : tuple of vertex labels (coordinate tuples for tori)
    edges    : tuple of (i, j) index pairs, i < j, lexicographically sorted
    """

    vertices: tuple
    edges: tuple
    d: int | None = None
    L: int | None = None

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def is_torus(self):
        return self.d is not None

    def index(self, v):
        return self._index[v]

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})
        adj = [[] for _ in self.vertices]
        for a, b in self.edges:
            if a == b:
                raise LatticeError(f"self-loop at vertex index {a}")
            adj[a].append(b)
            adj[b].append(a)
        if len(set(self.edges)) != len(self.edges):
            raise LatticeError("duplicate edges")
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(n)) for n in adj))

    def degree(self, i):
        return len(self.adjacency[i])

    def edge_index(self):
        """Map (i, j) sorted pair -> position in the edge list."""
        return {e: k for k, e in enumerate(self.edges)}

    # -- torus helpers -------------------------------------------------

    def wrap(self, coords):
        return tuple(c % self.L for c in coords)

    def shift(self, v, axis, amount):
        w = list(v)
        w[axis] = (w[axis] + amount) % self.L
        return tuple(w)

    def origin(self):
        return (0,) * self.d

    def axis_vertex(self, k, axis=0):
        """The vertex k*e_axis."""
        v = [0] * self.d
        v[axis] = k % self.L
        return tuple(v)

    def torus_abs(self, c):
        """Distance of a single coordinate from 0 in the torus metric."""
        c %= self.L
        return min(c, self.L - c)

    def torus_norm_inf(self, v):
        return max(self.torus_abs(c) for c in v)

    def translations(self):
        """All translation automorphisms as vertex-index permutations."""
        perms = []
        for t in product(range(self.L), repeat=self.d):
            perm = [0] * self.n_vertices
            for i, v in enumerate(self.vertices):
                w = tuple((a + b) % self.L for a, b in zip(v, t))
                perm[i] = self._index[w]
            perms.append(tuple(perm))
        return perms

    def to_json(self):
        return json.dumps(
            {"vertices": [list(v) if isinstance(v, tuple) else v for v in self.vertices],
             "edges": [[self.vertices[a], self.vertices[b]] for a, b in self.edges]},
            default=list)


def build_torus(d, L):
    """Torus Z^d / L Z^d with nearest-neighbour edges.

    L must be even and at least 4: at L = 2 periodic wrap would create doubled
    edges and the graph would no longer be simple.
    """
    if d < 1:
        raise LatticeError(f"dimension must be >= 1, got {d}")
    if L % 2 != 0:
        raise LatticeError(f"L must be even, got {L}")
    if L < 4:
        raise LatticeError(f"L must be >= 4, got {L}")
    vertices = tuple(product(range(L), repeat=d))
    index = {v: i for i, v in enumerate(vertices)}
    edges = set()
    for v in vertices:
        for ax in range(d):
            w = list(v)
            w[ax] = (w[ax] + 1) % L
            a, b = index[v], index[tuple(w)]
            edges.add((min(a, b), max(a, b)))
    return TorusGraph(vertices=vertices, edges=tuple(sorted(edges)), d=d, L=L)


def general_graph(vertices, edge_pairs):
    """Explicit small graph; vertices sorted, edges given as label pairs."""
    vertices = tuple(sorted(vertices))
    index = {v: i for i, v in enumerate(vertices)}
    edges = set()
    for x, y in edge_pairs:
        a, b = index[x], index[y]
        if a == b:
            raise LatticeError(f"self-loop at {x}")
        edges.add((min(a, b), max(a, b)))
    return TorusGraph(vertices=vertices, edges=tuple(sorted(edges)))


def from_json(text):
    data = json.loads(text)
    verts = [tuple(v) if isinstance(v, list) else v for v in data["vertices"]]
    edges = [(tuple(x) if isinstance(x, list) else x, tuple(y) if isinstance(y, list) else y)
             for x, y in data["edges"]]
    return general_graph(verts, edges)


def path_graph(n):
    """Path on n vertices labelled 0..n-1."""
    return general_graph(range(n), [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return general_graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def grid_graph(rows, cols):
    """rows x cols open grid, vertices are (r, c) tuples."""
    verts = [(r, c) for r in range(rows) for c in range(cols)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            if r + 1 < rows:
                edges.append(((r, c), (r + 1, c)))
            if c + 1 < cols:
                edges.append(((r, c), (r, c + 1)))
    return general_graph(verts, edges)


# -- reflections -------------------------------------------------------

EDGE_KIND = "through-edges"
SITE_KIND = "through-sites"


@dataclass(frozen=True)
class ReflectionPlane:
    """Reflection plane orthogonal to a cartesian axis of a torus.

    axis is 0-based.  For the edge kind the offset u satisfies
    u - 1/2 in Z (no fixed vertices); for the site kind u is an integer
    (the plane contains vertices).
    """

    axis: int
    kind: str
    offset: object  # Fraction/int/float with 2*offset integral

    def __post_init__(self):
        two_u = 2 * self.offset
        if two_u != int(two_u):
            raise LatticeError(f"2*offset must be integral, got {self.offset}")
        if self.kind == EDGE_KIND:
            if int(two_u) % 2 == 0:
                raise LatticeError("edge-kind plane needs half-integer offset")
        elif self.kind == SITE_KIND:
            if int(two_u) % 2 != 0:
                raise LatticeError("site-kind plane needs integer offset")
        else:
            raise LatticeError(f"unknown plane kind {self.kind!r}")


def edge_plane(axis, u):
    return ReflectionPlane(axis=axis, kind=EDGE_KIND, offset=u)


def site_plane(axis, m):
    return ReflectionPlane(axis=axis, kind=SITE_KIND, offset=m)


def all_edge_planes(graph):
    planes = []
    for ax in range(graph.d):
        for p in range(graph.L):
            planes.append(ReflectionPlane(ax, EDGE_KIND, p + 0.5))
    return planes


def all_site_planes(graph):
    return [ReflectionPlane(ax, SITE_KIND, m)
            for ax in range(graph.d) for m in range(graph.L)]


def reflect_vertex(graph, plane, v):
    """Image of a torus vertex: coordinate on the plane's axis maps to 2u - x mod L."""
    k = plane.axis
    two_u = int(2 * plane.offset)
    w = list(v)
    w[k] = (two_u - v[k]) % graph.L
    return tuple(w)


def reflect_index_map(graph, plane):
    """Vertex-index permutation of the reflection."""
    return tuple(graph.index(reflect_vertex(graph, plane, v)) for v in graph.vertices)


def torus_halves(graph, plane):
    """(T+, T-, boundary) as vertex-index sets; boundary is E_R (edge kind,
    index pairs) or T_R (site kind, vertex indices).

    Edge kind: T+ and T- partition the vertices and E_R is the set of edges
    with one endpoint on each side (2 L^{d-1} of them).  Site kind: the two
    halves overlap in the fixed set T_R of cardinality 2 L^{d-1}.
    """
    L = graph.L
    k = plane.axis
    two_u = int(2 * plane.offset)
    if plane.kind == EDGE_KIND:
        p = (two_u - 1) // 2  # plane between coordinates p and p+1
        plus_coords = {(p + 1 + t) % L for t in range(L // 2)}
        plus = {i for i, v in enumerate(graph.vertices) if v[k] % L in plus_coords}
        minus = set(range(graph.n_vertices)) - plus
        boundary = {e for e in graph.edges
                    if (e[0] in plus) != (e[1] in plus)}
        return plus, minus, boundary
    m = two_u // 2
    plus_coords = {(m + t) % L for t in range(L // 2 + 1)}
    minus_coords = {(m + L // 2 + t) % L for t in range(L // 2 + 1)}
    plus = {i for i, v in enumerate(graph.vertices) if v[k] % L in plus_coords}
    minus = {i for i, v in enumerate(graph.vertices) if v[k] % L in minus_coords}
    fixed = plus & minus
    return plus, minus, fixed


# -- geometric vertex sets ---------------------------------------------


def box_set(graph, z):
    """Q_z: torus box with corner z — all x with |x_i| <= |z_i| in the torus
    metric on every axis."""
    zabs = [graph.torus_abs(c) for c in z]
    return {i for i, x in enumerate(graph.vertices)
            if all(graph.torus_abs(c) <= za for c, za in zip(x, zabs))}


def axes_and_bulk_set(graph, include_origin=False):
    """H_L: vertices with all coordinates non-zero, together with the
    cartesian axes.  The literal predicate excludes the origin; the flag
    exposes the alternative reading that keeps it."""
    out = set()
    for i, x in enumerate(graph.vertices):
        nz = sum(1 for c in x if c != 0)
        if nz == len(x) or nz == 1:
            out.add(i)
        elif nz == 0 and include_origin:
            out.add(i)
    return out


def ball_set(graph, r):
    """B_r: sup-norm ball of radius r in the torus metric."""
    return {i for i, x in enumerate(graph.vertices) if graph.torus_norm_inf(x) <= r}


def slab_set(graph, r):
    """S_{r,L}: vertices within distance < r of some coordinate hyperplane
    x_i = 0, approaching from either side.  For integer r the complement has
    exactly (L - 2r)^d vertices."""
    L = graph.L
    return {i for i, x in enumerate(graph.vertices)
            if any(c < r or L - c <= r for c in x)}


def special_sets(graph, z, r):
    """The four vertex sets of the positivity argument, as index sets."""
    return {
        "Q": box_set(graph, z),
        "H": axes_and_bulk_set(graph),
        "B": ball_set(graph, r),
        "S": slab_set(graph, r),
    }
