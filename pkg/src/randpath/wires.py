"""Wire configurations: multigraph link occupations with colours and pairings.

A configuration w = (m, c, pi) has m_e links on each edge e, a colour in
{1..N} per link, and at every vertex a partial matching of the incident link
slots in which paired slots carry equal colours.  A link slot is the pair
(edge index, p) with p < m_e.  Configurations decompose into loops and open
walks; the number of unpaired colour-i slots at x is u^i_x and the visit
count is n^i_x = v^i_x / 2 + u^i_x.

The enumerator streams every structurally valid configuration compatible
with an endpoint constraint exactly once, in a fixed deterministic order;
an optional pruning hook cuts branches whose completed vertices already
carry zero weight.  It is meant for small instances and for cross-validating
the aggregated backends in the engine module.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product


class WireError(ValueError):
    pass


@dataclass(frozen=True)
class WireConfig:
    """m: per-edge multiplicities; colours: per-edge colour tuples;
    pairings: per-vertex sorted tuples of slot pairs ((e1,p1),(e2,p2))."""

    m: tuple
    colours: tuple
    pairings: tuple

    def total_links(self):
        return sum(self.m)


@dataclass(frozen=True)
class LocalCounts:
    n: tuple  # visits per colour
    u: tuple  # unpaired slots (walk endpoints) per colour
    v: tuple  # paired slots per colour
    t: int    # slots paired at the vertex with a parallel slot on the same edge

    @property
    def n_total(self):
        return sum(self.n)


def empty_config(graph):
    ne = graph.n_edges
    return WireConfig(m=(0,) * ne, colours=((),) * ne, pairings=((),) * graph.n_vertices)


def incident_slots(graph, m, x):
    """Slots on edges incident to vertex x, in (edge, p) lexicographic order."""
    out = []
    for k, (a, b) in enumerate(graph.edges):
        if x == a or x == b:
            out.extend((k, p) for p in range(m[k]))
    return out


def validate(graph, w):
    """Raise WireError on any structural violation."""
    ne, nv = graph.n_edges, graph.n_vertices
    if len(w.m) != ne or len(w.colours) != ne or len(w.pairings) != nv:
        raise WireError("field lengths do not match the graph")
    for k in range(ne):
        if w.m[k] < 0:
            raise WireError(f"negative multiplicity on edge {k}")
        if len(w.colours[k]) != w.m[k]:
            raise WireError(f"colour sequence length mismatch on edge {k}")
    for x in range(nv):
        slots = set(incident_slots(graph, w.m, x))
        seen = set()
        for s1, s2 in w.pairings[x]:
            if s1 == s2:
                raise WireError(f"slot paired with itself at vertex {x}")
            for s in (s1, s2):
                if s not in slots:
                    raise WireError(f"pairing at vertex {x} uses non-incident slot {s}")
                if s in seen:
                    raise WireError(f"slot {s} paired twice at vertex {x}")
                seen.add(s)
            if w.colours[s1[0]][s1[1]] != w.colours[s2[0]][s2[1]]:
                raise WireError(f"paired slots of different colours at vertex {x}")
    return True


def local_counts(graph, w, x, n_colours):
    """Exact occupation counts at vertex x."""
    slots = incident_slots(graph, w.m, x)
    paired = {}
    for s1, s2 in w.pairings[x]:
        paired[s1] = s2
        paired[s2] = s1
    u = [0] * n_colours
    v = [0] * n_colours
    t = 0
    for s in slots:
        c = w.colours[s[0]][s[1]] - 1
        if s in paired:
            v[c] += 1
            if paired[s][0] == s[0]:
                t += 1
        else:
            u[c] += 1
    n = tuple(v[i] // 2 + u[i] for i in range(n_colours))
    return LocalCounts(n=n, u=tuple(u), v=tuple(v), t=t)


def colour_one_endpoints(graph, w):
    """Map vertex -> u^1 count, for constraint checking."""
    out = {}
    for x in range(graph.n_vertices):
        paired = set()
        for s1, s2 in w.pairings[x]:
            paired.add(s1)
            paired.add(s2)
        cnt = 0
        for s in incident_slots(graph, w.m, x):
            if s not in paired and w.colours[s[0]][s[1]] == 1:
                cnt += 1
        if cnt:
            out[x] = cnt
    return out


# -- enumeration --------------------------------------------------------


def _partial_matchings(slots, colour_of):
    """All partial matchings of the slot list, smallest-unmatched-first.

    Paired slots must share a colour.  Yields tuples of slot pairs in a
    canonical sorted order, each matching exactly once.
    """
    slots = sorted(slots)

    def rec(remaining):
        if not remaining:
            yield ()
            return
        first, rest = remaining[0], remaining[1:]
        # first stays unpaired
        for tail in rec(rest):
            yield tail
        # first pairs with each later slot of equal colour
        for j, other in enumerate(rest):
            if colour_of(other) == colour_of(first):
                for tail in rec(rest[:j] + rest[j + 1:]):
                    yield ((first, other),) + tail

    for matching in rec(tuple(slots)):
        yield tuple(sorted(matching))


def enumerate_wires(graph, n_colours, edge_cap, constraint=None,
                    weight=None, prune=True):
    """Stream every valid WireConfig with m_e <= edge_cap exactly once.

    constraint: None for no endpoint restriction, else a dict
    {vertex index: required u^1 count} — vertices absent from the dict
    must have u^1 = 0 (so {} is the no-walk sector and {x: 1, y: 1} the
    one-walk sector from x to y).

    weight: optional WeightFunction consulted at completed vertices; with
    prune=True branches whose finished vertices have zero weight are cut.
    Pruning only ever removes zero-weight configurations.
    """
    if edge_cap is None:
        raise WireError("enumeration requires a finite per-edge cap")
    ne, nv = graph.n_edges, graph.n_vertices
    targets = None if constraint is None else {x: constraint.get(x, 0) for x in range(nv)}

    vertex_cap = None
    if weight is not None and prune:
        vertex_cap = weight.vertex_link_cap

    def vertex_ok(x, counts):
        if targets is not None and counts.u[0] != targets[x]:
            return False
        if weight is not None and prune and weight.value(counts) == 0:
            return False
        return True

    edge_slots = [tuple() for _ in range(ne)]

    def m_configs():
        caps = [edge_cap] * ne
        for m in product(*[range(c + 1) for c in caps]):
            if vertex_cap is not None:
                bad = False
                for x in range(nv):
                    tot = sum(m[k] for k, (a, b) in enumerate(graph.edges) if x in (a, b))
                    if tot > vertex_cap:
                        bad = True
                        break
                if bad:
                    continue
            yield m

    for m in m_configs():
        colour_ranges = [list(product(range(1, n_colours + 1), repeat=mk)) for mk in m]
        for colour_combo in product(*colour_ranges):
            colours = tuple(tuple(seq) for seq in colour_combo)

            def colour_of(slot):
                return colours[slot[0]][slot[1]]

            # per-vertex pairings, vertex by vertex with early exit
            per_vertex = []
            for x in range(nv):
                slots = incident_slots(graph, m, x)
                per_vertex.append(list(_partial_matchings(slots, colour_of)))

            def rec(x, acc):
                if x == nv:
                    yield WireConfig(m=m, colours=colours, pairings=tuple(acc))
                    return
                for pairing in per_vertex[x]:
                    w_try = acc + [pairing]
                    cfg = WireConfig(m=m, colours=colours,
                                     pairings=tuple(w_try) + ((),) * (nv - x - 1))
                    counts = local_counts(graph, cfg, x, n_colours)
                    if not vertex_ok(x, counts):
                        continue
                    yield from rec(x + 1, w_try)

            yield from rec(0, [])


# -- restriction / projection / reflection / concatenation ---------------


def restrict(graph, w, domain):
    """Restriction w_D: keep multiplicities and colours on edges meeting D,
    pairings at vertices of D; exterior-boundary vertices keep their links
    unpaired."""
    domain = set(domain)
    m = list(w.m)
    colours = list(w.colours)
    for k, (a, b) in enumerate(graph.edges):
        if a not in domain and b not in domain:
            m[k] = 0
            colours[k] = ()
    pairings = []
    for x in range(graph.n_vertices):
        pairings.append(w.pairings[x] if x in domain else ())
    return WireConfig(m=tuple(m), colours=tuple(colours), pairings=tuple(pairings))


def _edge_indices(graph, edge_set):
    """Normalize a collection of edges (index or endpoint-pair form) to indices."""
    eidx = graph.edge_index()
    out = set()
    for e in edge_set:
        if isinstance(e, tuple) and e in eidx:
            out.add(eidx[e])
        else:
            out.add(int(e))
    return out


def project_boundary(graph, w, boundary_edges):
    """P_R: keep multiplicities/colours on the boundary edge set only and
    erase every pairing."""
    keep = _edge_indices(graph, boundary_edges)
    m = list(w.m)
    colours = list(w.colours)
    for k in range(graph.n_edges):
        if k not in keep:
            m[k] = 0
            colours[k] = ()
    return WireConfig(m=tuple(m), colours=tuple(colours),
                      pairings=((),) * graph.n_vertices)


def reflect_wire(graph, w, plane):
    """Theta w: edge data pulled back through the vertex reflection."""
    from . import lattice as lat

    perm = lat.reflect_index_map(graph, plane)
    eidx = graph.edge_index()
    edge_image = {}
    for k, (a, b) in enumerate(graph.edges):
        ia, ib = perm[a], perm[b]
        edge_image[k] = eidx[(min(ia, ib), max(ia, ib))]
    m = [0] * graph.n_edges
    colours = [()] * graph.n_edges
    for k in range(graph.n_edges):
        src = edge_image[k]  # Theta is an involution on edges; pull data from the image
        m[k] = w.m[src]
        colours[k] = w.colours[src]
    pairings = []
    for x in range(graph.n_vertices):
        src_pairs = w.pairings[perm[x]]
        mapped = []
        for (e1, p1), (e2, p2) in src_pairs:
            s1 = (edge_image[e1], p1)
            s2 = (edge_image[e2], p2)
            mapped.append(tuple(sorted((s1, s2))))
        pairings.append(tuple(sorted(mapped)))
    return WireConfig(m=tuple(m), colours=tuple(colours), pairings=tuple(pairings))


def concatenate(graph, w1, w2, w_prime, plus, minus, boundary_edges):
    """Unique configuration restricting to w1 on T+ and w2 on T- with the
    given boundary projection.  Raises on projection mismatch."""
    p1 = project_boundary(graph, w1, boundary_edges)
    p2 = project_boundary(graph, w2, boundary_edges)
    if p1 != w_prime or p2 != w_prime:
        raise WireError("projection mismatch: halves do not agree on the boundary")
    m = []
    colours = []
    bset = _edge_indices(graph, boundary_edges)
    for k, (a, b) in enumerate(graph.edges):
        if k in bset:
            m.append(w_prime.m[k])
            colours.append(w_prime.colours[k])
        elif a in plus or b in plus:
            m.append(w1.m[k])
            colours.append(w1.colours[k])
        else:
            m.append(w2.m[k])
            colours.append(w2.colours[k])
    pairings = []
    for x in range(graph.n_vertices):
        pairings.append(w1.pairings[x] if x in plus else w2.pairings[x])
    out = WireConfig(m=tuple(m), colours=tuple(colours), pairings=tuple(pairings))
    validate(graph, out)
    return out


# -- path decomposition and serialization --------------------------------


def decompose(graph, w):
    """Split w into its loops and walks.

    Pairings connect slots into paths (walks) and cycles (loops): every slot
    has at most one pairing per endpoint, so the slot graph has maximum
    degree two.  A component is closed iff all of its slots are paired at
    both endpoints.  Returns a list of dicts {colour, closed, length}.
    """
    adjacency = {}
    pair_degree = {}
    all_slots = [(k, p) for k in range(graph.n_edges) for p in range(w.m[k])]
    for s in all_slots:
        adjacency[s] = []
        pair_degree[s] = 0
    for x in range(graph.n_vertices):
        for s1, s2 in w.pairings[x]:
            adjacency[s1].append(s2)
            adjacency[s2].append(s1)
            pair_degree[s1] += 1
            pair_degree[s2] += 1
    seen = set()
    comps = []
    for slot in all_slots:
        if slot in seen:
            continue
        stack = [slot]
        seen.add(slot)
        comp = []
        while stack:
            s = stack.pop()
            comp.append(s)
            for nb in adjacency[s]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        closed = all(pair_degree[s] == 2 for s in comp)
        comps.append({"colour": w.colours[slot[0]][slot[1]],
                      "closed": closed, "length": len(comp)})
    return comps


def to_text(graph, w):
    """Canonical one-line-per-object serialization for golden tests."""
    lines = []
    for k, (a, b) in enumerate(graph.edges):
        if w.m[k]:
            cols = ",".join(str(c) for c in w.colours[k])
            lines.append(f"edge {a}-{b} m={w.m[k]} c={cols}")
    for x in range(graph.n_vertices):
        if w.pairings[x]:
            pairs = " ".join(f"({e1}.{p1})({e2}.{p2})"
                             for (e1, p1), (e2, p2) in w.pairings[x])
            lines.append(f"vertex {x} pi={pairs}")
    return "\n".join(lines) if lines else "empty"
