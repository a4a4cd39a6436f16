"""Exact evaluation of partition sums, two-point tables and field sums.

Backend stack, chosen per (graph, weight) instance:

  stream      literal configuration stream (wires.enumerate_wires), tiny
              instances and cross-validation only.
  components  geometric component growth for the finite-support weights
              (loop/perm/ddimer force every vertex to carry at most two
              links, so configurations are vertex-disjoint unions of cycles,
              single colour-3 links and colour-1 walks).  Exact integer
              histograms over (links, cycles, single edges) make one
              enumeration serve every (N, beta) at once.
  dimers      double-dimer shortcut: the walk/loop ensemble with the
              double-dimer weight is counted exactly by products of perfect
              matching counts; used where the component enumeration is out
              of reach (6x6 torus and up), after the equality of the two
              routes has been certified on small graphs by the test suite.
  factorized  contraction.FactorizedModel for infinite-support weights
              (spin family) on chains, rings and small graphs.
  transfer    exact modular column-transfer DP for 2-d tori (transfer2d),
              values reconstructed from residues; used for the heavy torus
              instances, optionally front-loaded from a frozen value table.

All partition values are exact Fractions.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import permutations, product

from .contraction import FactorizedModel, default_spin_cap, spin_tail_bound
from .weights import ModelResult, exact_result, make_weight, ratio


# -- component-growth enumeration (finite-support weights) -----------------


def component_histogram(graph, mode, endpoint_weight=None, required=(),
                        forbid_empty=False, allow_se=False):
    """DFS over unions of cycles, single colour-3 edges and colour-1 walks.

    mode is only used for sanity ('loop' forbids single-edge components of
    colour 3; 'ddimer' forbids empty vertices).  endpoint_weight maps vertex
    -> weight of a walk endpoint there (Fraction; missing = 0);  `required`
    lists vertices that must end up as walk endpoints exactly once (the u^1
    pattern).  Walks may not pass through `required` vertices.

    Returns {(links, cycles, single_edges): accumulated weight} with weight
    the product of endpoint weights (an integer count when all endpoint
    weights are 1).
    """
    nv = graph.n_vertices
    nbrs = graph.adjacency
    required = set(required)
    if endpoint_weight is None:
        endpoint_weight = {}

    def ew(v):
        if v in required:
            return Fraction(1)
        return Fraction(endpoint_weight.get(v, 0))

    used = [False] * nv
    need = set(required)
    hist = {}

    def first_free(start):
        v = start
        while v < nv and used[v]:
            v += 1
        return v

    def record(m, ncyc, nse, wgt):
        key = (m, ncyc, nse)
        hist[key] = hist.get(key, Fraction(0)) + wgt

    def rec(start, m, ncyc, nse, wgt):
        v = first_free(start)
        if v == nv:
            if not need:
                record(m, ncyc, nse, wgt)
            return
        used[v] = True
        in_req = v in required
        # empty vertex
        if not forbid_empty and not in_req:
            rec(v + 1, m, ncyc, nse, wgt)
        # single colour-3 edge to a free higher neighbour
        if allow_se and not in_req:
            for w in nbrs[v]:
                if w > v and not used[w] and w not in required:
                    used[w] = True
                    rec(v + 1, m + 1, ncyc, nse + 1, wgt)
                    used[w] = False
        # cycle rooted at v (canonical direction: second vertex < last)
        if not in_req:
            def grow_cycle(cur, second, ln):
                for w in nbrs[cur]:
                    if w == v:
                        if ln >= 2 and second < cur:
                            rec(v + 1, m + ln + 1, ncyc + 1, nse, wgt)
                        continue
                    if w <= v or used[w] or w in required:
                        continue
                    used[w] = True
                    grow_cycle(w, second, ln + 1)
                    used[w] = False
            for w in nbrs[v]:
                if w > v and not used[w] and w not in required:
                    used[w] = True
                    grow_cycle(w, w, 1)
                    used[w] = False
        # colour-1 walk whose minimal vertex is v
        ev = ew(v)
        arms = _walk_arms(graph, v, used, required, ew)
        # single arm: v is an endpoint
        if ev != 0:
            if in_req:
                need.discard(v)
            for length, endw, marks in arms:
                for u_ in marks:
                    used[u_] = True
                for u_ in marks:
                    if u_ in required:
                        need.discard(u_)
                rec(v + 1, m + length, ncyc, nse, wgt * ev * endw)
                for u_ in marks:
                    if u_ in required:
                        need.add(u_)
                for u_ in marks:
                    used[u_] = False
            if in_req:
                need.add(v)
        # two arms: v interior (not allowed for required vertices)
        if not in_req:
            for len1, w1, marks1 in arms:
                for u_ in marks1:
                    used[u_] = True
                for u_ in marks1:
                    if u_ in required:
                        need.discard(u_)
                arms2 = _walk_arms(graph, v, used, required, ew,
                                   min_first=marks1[0] + 1)
                for len2, w2, marks2 in arms2:
                    for u_ in marks2:
                        used[u_] = True
                    for u_ in marks2:
                        if u_ in required:
                            need.discard(u_)
                    rec(v + 1, m + len1 + len2, ncyc, nse, wgt * w1 * w2)
                    for u_ in marks2:
                        if u_ in required:
                            need.add(u_)
                    for u_ in marks2:
                        used[u_] = False
                for u_ in marks1:
                    if u_ in required:
                        need.add(u_)
                for u_ in marks1:
                    used[u_] = False
        used[v] = False

    rec(0, 0, 0, 0, Fraction(1))
    return hist


def _walk_arms(graph, v, used, required, ew, min_first=0):
    """All self-avoiding arms from v through free vertices > v, ending at a
    nonzero endpoint weight.  Returns [(length, end_weight, visited_tuple)].

    Arms may not pass through `required` vertices (interior endpoints there
    would violate the pattern) but may terminate on them.
    """
    out = []
    path = []

    def grow(cur):
        for w in graph.adjacency[cur]:
            if w <= v or used[w] or w in path:
                continue
            if not path and w < min_first:
                continue
            wgt = ew(w)
            path.append(w)
            if wgt != 0:
                out.append((len(path), wgt, tuple(path)))
            if w not in required:
                grow(w)
            path.pop()

    grow(v)
    return out


_COLOUR_FACTOR = {"loop": None, "perm": 2, "ddimer": 2}

_HIST_CACHE = {}


def evaluate_histogram(hist, model, N, beta):
    """Exact partition value from a component histogram."""
    beta = Fraction(beta)
    cyc_colours = N if model == "loop" else _COLOUR_FACTOR[model]
    total = Fraction(0)
    for (m, ncyc, nse), wgt in hist.items():
        term = wgt * beta ** m * cyc_colours ** ncyc
        if model == "perm":
            term *= beta ** nse  # endpoint sqrt(beta) pairs of colour-3 links
        total += term
    return total


# -- perfect-matching backend (double-dimer) --------------------------------


def count_matchings(graph, removed=frozenset()):
    """Perfect matchings of graph minus `removed`, by bitmask DFS."""
    nv = graph.n_vertices
    if nv > 62:
        raise ValueError("bitmask matching counter limited to 62 vertices")
    full = 0
    for v in range(nv):
        if v not in removed:
            full |= 1 << v
    nbits = [0] * nv
    for v in range(nv):
        for w in graph.adjacency[v]:
            if w not in removed:
                nbits[v] |= 1 << w

    def rec(mask):
        if mask == 0:
            return 1
        v = (mask & -mask).bit_length() - 1
        total = 0
        avail = mask & nbits[v]
        rest = mask & ~(1 << v)
        while avail:
            wbit = avail & -avail
            avail ^= wbit
            total += rec(rest & ~wbit)
        return total

    return rec(full)


def double_dimer_partition(graph, pattern):
    """Z for the double-dimer weight via matching-count products: removing
    the walk endpoints from one of the two superposed covers.

    Valid for patterns of distinct vertices with unit targets; any doubled
    target is impossible (a vertex visited once cannot host two endpoints).
    """
    if any(t != 1 for t in pattern.values()):
        return Fraction(0)
    A = frozenset(pattern)
    if len(A) % 2 == 1:
        return Fraction(0)
    base = count_matchings(graph)
    if not A:
        return Fraction(base * base)
    return Fraction(count_matchings(graph, A) * base)


# -- pattern canonicalization ----------------------------------------------


def torus_automorphisms(graph):
    """Vertex permutations generated by translations, axis swaps and axis
    reflections of the torus."""
    d, L = graph.d, graph.L
    perms = []
    signs = list(product([1, -1], repeat=d))
    for axes in permutations(range(d)):
        for sgn in signs:
            for shift in product(range(L), repeat=d):
                perm = [0] * graph.n_vertices
                for i, v in enumerate(graph.vertices):
                    w = tuple((sgn[k] * v[axes[k]] + shift[k]) % L
                              for k in range(d))
                    perm[i] = graph.index(w)
                perms.append(tuple(perm))
    return perms


class PatternCache:
    """Memoizes pattern -> Fraction results modulo graph symmetry."""

    def __init__(self, graph):
        self.graph = graph
        self._perms = None
        self.store = {}

    def _sym_perms(self):
        if self._perms is None:
            if self.graph.is_torus:
                self._perms = torus_automorphisms(self.graph)
            else:
                self._perms = [tuple(range(self.graph.n_vertices))]
        return self._perms

    def canonical(self, pattern):
        items = tuple(sorted(pattern.items()))
        best = None
        for perm in self._sym_perms():
            cand = tuple(sorted((perm[v], t) for v, t in items))
            if best is None or cand < best:
                best = cand
        return best

    def get(self, pattern):
        return self.store.get(self.canonical(pattern))

    def put(self, pattern, value):
        self.store[self.canonical(pattern)] = value


# -- the evaluator -----------------------------------------------------------


class Evaluator:
    """Exact partition values for one (graph, model, N, beta) instance.

    fixtures: optional mapping of canonical keys to Fraction values
    (precomputed by the transfer backend on instances too heavy to be
    recomputed on every run; see tests/fixtures).
    """

    STREAM_GUARD = 10  # max edges for the literal stream backend

    def __init__(self, graph, model, N=None, beta=None, m_max=None,
                 fixtures=None):
        self.graph = graph
        self.model = model
        self.weight = make_weight(model, N=N, beta=beta)
        self.N = self.weight.n_colours
        if model == "ddimer":
            beta = 1
        if beta is None:
            raise ValueError("beta is required")
        self.beta = Fraction(beta)
        self.m_max = m_max
        self.fixtures = fixtures or {}
        self.cache = PatternCache(graph)
        self._factorized = None
        self._backend = self._select_backend()

    # backend selection -----------------------------------------------

    def _select_backend(self):
        g = self.graph
        if self.weight.edge_cap == 1:
            if g.is_torus and g.d == 2 and g.L >= 6:
                if self.model == "ddimer":
                    return "dimers"
                return "transfer"
            if g.is_torus and g.d >= 3:
                raise ValueError("d >= 3 tori exceed exact enumeration")
            return "components"
        # spin family
        if g.is_torus and g.d == 2:
            return "transfer"
        if g.is_torus and g.d and g.d >= 3:
            raise ValueError("d >= 3 tori exceed exact enumeration")
        return "factorized"

    @property
    def backend(self):
        return self._backend

    # truncation -------------------------------------------------------

    def _spin_cap(self):
        if self.m_max is not None:
            return self.m_max
        if self.weight.edge_cap is not None:
            return self.weight.edge_cap
        cap = default_spin_cap(self.graph, self.N, self.beta)
        return cap

    def truncation_info(self):
        """(cap, relative tail bound) — (cap, 0.0) for finite support."""
        if self.weight.edge_cap is not None:
            return self.weight.edge_cap, 0.0
        cap = self._spin_cap()
        return cap, spin_tail_bound(self.graph, self.N, self.beta, cap)

    # core pattern sums --------------------------------------------------

    def z_pattern(self, pattern):
        """Z for the u^1 pattern {vertex: count}; {} is the no-walk sector."""
        pattern = {v: t for v, t in pattern.items() if t}
        cached = self.cache.get(pattern)
        if cached is None:
            key = self._fixture_key(pattern)
            if key in self.fixtures:
                cached = Fraction(self.fixtures[key])
            else:
                cached = self._compute_pattern(pattern)
            self.cache.put(pattern, cached)
        cap = self.weight.edge_cap if self.weight.edge_cap is not None \
            else self._spin_cap()
        return ModelResult(value=cached, exact=True, error=0.0,
                           truncation_cap=cap)

    def _fixture_key(self, pattern):
        canon = self.cache.canonical(pattern)
        gkey = f"T{self.graph.L}d{self.graph.d}" if self.graph.is_torus \
            else f"G{self.graph.n_vertices}v{self.graph.n_edges}e"
        cap = ""
        if self.weight.edge_cap is None:
            cap = f"/cap{self._spin_cap()}"
        return f"{self.model}/N{self.N}/beta{self.beta}{cap}/{gkey}/{canon}"

    def _compute_pattern(self, pattern):
        if sum(pattern.values()) % 2 == 1:
            return Fraction(0)
        if self.weight.edge_cap == 1 and any(t > 1 for t in pattern.values()):
            return Fraction(0)  # u^1 = 2 needs two visits, weight is zero
        if self._backend == "components":
            hist = self._pattern_hist(frozenset(pattern))
            return evaluate_histogram(hist, self.model, self.N, self.beta)
        if self._backend == "dimers":
            return double_dimer_partition(self.graph, pattern)
        if self._backend == "factorized":
            return self._get_factorized().partition(pattern=pattern)
        if self._backend == "transfer":
            return self._transfer_value(pattern=pattern)
        raise AssertionError(self._backend)

    def _pattern_hist(self, req):
        # histograms depend on (graph, model, pattern) only, so they are
        # shared across beta and N through a module-level cache
        gkey = self.graph.vertices, self.graph.edges
        key = (gkey, self.model, req)
        if key not in _HIST_CACHE:
            _HIST_CACHE[key] = component_histogram(
                self.graph, self.model, required=req,
                forbid_empty=(self.model == "ddimer"),
                allow_se=(self.model in ("perm", "ddimer")))
        return _HIST_CACHE[key]

    def _get_factorized(self):
        if self._factorized is None:
            cap = self._spin_cap()
            self._factorized = FactorizedModel(self.graph, self.weight,
                                               self.beta, cap)
        return self._factorized

    def _transfer_value(self, pattern=None, field=None):
        from . import transfer2d
        cap = 1 if self.weight.edge_cap is None else self.weight.edge_cap
        if self.weight.edge_cap is None and self.m_max not in (None, 1):
            raise ValueError("torus transfer backend supports spin truncation cap 1 only")
        return transfer2d.torus_value(self.graph, self.weight, self.beta,
                                      pattern=pattern, field=field, cap=cap)

    # public quantities ---------------------------------------------------

    def z_empty(self):
        val = self.z_pattern({})
        if val.value == 0:
            return ModelResult(value=Fraction(1), exact=True,
                               convention_fired=True,
                               truncation_cap=val.truncation_cap)
        return val

    def z_two_point(self, x, y):
        x, y = self._as_indices(x, y)
        if x == y:
            return self.z_pattern({x: 2})
        return self.z_pattern({x: 1, y: 1})

    def g(self, x, y):
        return ratio(self.z_two_point(x, y), self.z_empty())

    def g_pattern(self, pattern):
        return ratio(self.z_pattern(pattern), self.z_empty())

    def g_origin(self, z):
        g = self.graph
        return self.g(g.index(g.origin()), g.index(g.wrap(z)))

    def averaged_g(self, z, axis):
        """(G(o,z) + G(o, (z.e_i) e_i)) / 2."""
        g = self.graph
        z = g.wrap(z)
        proj = g.axis_vertex(z[axis], axis)
        a = self.g_origin(z).value
        b = self.g_origin(proj).value
        return exact_result(Fraction(a + b) / 2)

    def u1_vertex_max(self):
        """Largest possible walk-endpoint count at a single vertex."""
        if self.weight.edge_cap == 1:
            return 1  # one visit means at most one unpaired link
        cap = self._spin_cap()
        deg = max(self.graph.degree(i) for i in range(self.graph.n_vertices))
        return cap * deg

    def z_field(self, h):
        """mu( prod_x h_x^{u^1_x} ) for a field given as dict vertex->value
        or a full sequence.

        Sparse fields expand over the finitely many endpoint patterns inside
        the support, reusing cached pattern sums; dense fields (or weights
        with many endpoint slots per vertex) fall through to the backend's
        native field evaluation.
        """
        hk = self._field_dict(h)
        if len(hk) <= 4 and self.u1_vertex_max() <= 4:
            return exact_result(self._sparse_field(hk))
        if self._backend == "components":
            hist = component_histogram(
                self.graph, self.model, endpoint_weight=hk,
                forbid_empty=(self.model == "ddimer"),
                allow_se=(self.model in ("perm", "ddimer")))
            return exact_result(evaluate_histogram(hist, self.model, self.N,
                                                   self.beta))
        if self._backend == "dimers":
            return exact_result(self._dimer_field(hk))
        if self._backend == "factorized":
            return exact_result(self._get_factorized().partition(h=hk))
        if self._backend == "transfer":
            return exact_result(self._transfer_value(field=hk))
        raise AssertionError(self._backend)

    def _sparse_field(self, hk):
        supp = sorted(v for v, val in hk.items() if val != 0)
        umax = self.u1_vertex_max()
        total = Fraction(0)
        for combo in product(range(umax + 1), repeat=len(supp)):
            if sum(combo) % 2:
                continue
            pattern = {v: t for v, t in zip(supp, combo) if t}
            coeff = Fraction(1)
            for v, t in pattern.items():
                coeff *= Fraction(hk[v]) ** t
            total += coeff * self.z_pattern(pattern).value
        return total

    def _dimer_field(self, hk):
        # u^1 <= 1 per vertex: expand over even endpoint subsets of supp(h)
        supp = sorted(v for v, val in hk.items() if val != 0)
        if len(supp) > 12:
            raise ValueError("dimer-backend field sums need sparse support "
                             f"(got {len(supp)} nonzero entries)")
        total = Fraction(0)
        from itertools import combinations
        for k in range(0, len(supp) + 1, 2):
            for A in combinations(supp, k):
                coeff = Fraction(1)
                for v in A:
                    coeff *= Fraction(hk[v])
                z = self.z_pattern({v: 1 for v in A}).value
                total += coeff * z
        return total

    def z_two(self, h):
        """Quadratic field sum: sum_x Z(x,x) h_x^2 + (1/2) sum_{x != y}
        Z(x,y) h_x h_y, the one-walk coefficient of the field expansion."""
        hk = self._field_dict(h)
        supp = sorted(v for v, val in hk.items() if val != 0)
        total = Fraction(0)
        for i, x in enumerate(supp):
            hx = Fraction(hk[x])
            total += self.z_pattern({x: 2}).value * hx * hx
            for y in supp[i + 1:]:
                total += self.z_pattern({x: 1, y: 1}).value * hx * Fraction(hk[y])
        return exact_result(total)

    def pair_values(self):
        """{canonical displacement: G(o,z)} over all torus sites z."""
        g = self.graph
        out = {}
        for z in g.vertices:
            out[z] = self.g_origin(z)
        return out

    def _as_indices(self, *vs):
        out = []
        for v in vs:
            if isinstance(v, int):
                out.append(v)
            else:
                out.append(self.graph.index(self.graph.wrap(v) if self.graph.is_torus else v))
        return out

    def _field_dict(self, h):
        if isinstance(h, dict):
            return {self._as_indices(v)[0]: Fraction(val) for v, val in h.items()}
        return {i: Fraction(val) for i, val in enumerate(h) if Fraction(val) != 0}


# -- module-level convenience ------------------------------------------------


def partition_z(graph, model, N=None, beta=None, pattern=None, m_max=None):
    ev = Evaluator(graph, model, N=N, beta=beta, m_max=m_max)
    if pattern is None:
        return ev.z_empty()
    return ev.z_pattern(pattern)


def two_point(graph, model, N=None, beta=None, x=None, y=None, m_max=None,
              fixtures=None):
    ev = Evaluator(graph, model, N=N, beta=beta, m_max=m_max, fixtures=fixtures)
    return ev.g(x, y)


def load_fixtures(path):
    with open(path) as fh:
        raw = json.load(fh)
    return {k: Fraction(v) for k, v in raw.items()}


def dump_fixtures(values, path):
    with open(path, "w") as fh:
        json.dump({k: str(v) for k, v in sorted(values.items())}, fh, indent=1)
