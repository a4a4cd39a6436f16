"""Exact factorized sums over colourings and pairings at fixed link numbers.

For a fixed multiplicity vector m the sum over colourings and pairings of
the vertex-weight product factorizes over a factor graph whose variables are
per-edge colour count vectors ("compositions"; the m_e!/prod g_i! colour
sequences and the beta^{m_e}/m_e! measure factor combine into
beta^{m_e}/prod_i g_{e,i}!).  Per-vertex factors sum the weight over all
colour-respecting pairings of the incident links, tracked by the counts
(n, u, t) that the weight function sees.

This is the engine for infinite-support weights (the spin family) on chains,
rings and other very small graphs, where the literal configuration stream
would be astronomically long but the factorized sum is exact and cheap.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial

from .weights import WeightValue


# -- pairing counts -------------------------------------------------------


@lru_cache(maxsize=None)
def _cross_matchings(parts, pairs):
    """Number of ways to form `pairs` disjoint pairs from groups of
    indistinguishable-by-group but labelled links, never pairing within a
    group, leaving the rest unpaired.

    parts: sorted tuple of group sizes.
    """
    parts = tuple(sorted(parts))
    if pairs == 0:
        return 1
    if not parts or parts[-1] == 0:
        return 0
    # peel one link from the largest group
    rest = parts[:-1] + (parts[-1] - 1,)
    total = _cross_matchings(tuple(sorted(rest)), pairs)  # leave it unpaired
    for j in range(len(parts) - 1):
        if parts[j] == 0:
            continue
        nxt = list(rest)
        nxt[j] -= 1
        total += parts[j] * _cross_matchings(tuple(sorted(nxt)), pairs - 1)
    return total


@lru_cache(maxsize=None)
def _same_edge_choices(g, a):
    """Ways to pick `a` disjoint pairs inside one group of g labelled links."""
    if 2 * a > g:
        return 0
    num = 1
    for i in range(2 * a):
        num *= g - i
    return num // (2 ** a * factorial(a))


@lru_cache(maxsize=None)
def pairing_census(groups):
    """All pairing structures of one colour at a vertex.

    groups: tuple of link counts per incident edge (one colour only).
    Returns dict {(n, u, t): count} where n = pairs + unpaired, u = unpaired,
    t = links paired with a parallel link on the same edge (2 per such pair).
    """
    groups = tuple(g for g in groups if g)
    q = sum(groups)
    out = {}
    # choose same-edge pairs per group, then cross pairs on the remainder
    ranges = [range(g // 2 + 1) for g in groups]
    for same in product(*ranges):
        ways_same = 1
        rem = []
        for g, a in zip(groups, same):
            ways_same *= _same_edge_choices(g, a)
            rem.append(g - 2 * a)
        if ways_same == 0:
            continue
        a_tot = sum(same)
        r_tot = sum(rem)
        rem_t = tuple(sorted(rem))
        for b in range(r_tot // 2 + 1):
            ways = ways_same * _cross_matchings(rem_t, b)
            if ways == 0:
                continue
            u = r_tot - 2 * b
            n = a_tot + b + u
            key = (n, u, 2 * a_tot)
            out[key] = out.get(key, 0) + ways
    return out


def vertex_factor(weight_fn, groups_by_colour, u1_target=None, h=None):
    """Sum over pairings at one vertex of U(n, u, t) (times h^{u^1} or the
    u^1 constraint indicator).

    groups_by_colour: tuple (per colour 1..N) of tuples of per-edge link
    counts at this vertex.  Returns a WeightValue (exact; half powers of
    beta arise only for the permutation weight).
    """
    N = weight_fn.n_colours
    censuses = [pairing_census(groups_by_colour[i]) for i in range(N)]
    total_coeff = Fraction(0)
    totals = {}
    for combo in product(*[c.items() for c in censuses]):
        ways = 1
        n = []
        u = []
        t = 0
        for (key, cnt) in combo:
            ways *= cnt
            n.append(key[0])
            u.append(key[1])
            t += key[2]
        if u1_target is not None and u[0] != u1_target:
            continue
        from .wires import LocalCounts
        counts = LocalCounts(n=tuple(n), u=tuple(u),
                             v=tuple(2 * (n[i] - u[i]) for i in range(N)), t=t)
        val = weight_fn.value(counts)
        if val.is_zero():
            continue
        coeff = val.coeff * ways
        if h is not None:
            if h == 0 and u[0] > 0:
                continue
            coeff *= Fraction(h) ** u[0]
        totals[val.half_powers] = totals.get(val.half_powers, Fraction(0)) + coeff
    # built-in weights never mix half-power classes at a single vertex
    if not totals:
        return WeightValue(Fraction(0))
    if len(totals) > 1:
        raise ValueError("vertex factor mixes sqrt(beta) classes; "
                         "factorized backend cannot represent it")
    hp, coeff = next(iter(totals.items()))
    _ = total_coeff
    return WeightValue(coeff, hp)


# -- compositions ----------------------------------------------------------


@lru_cache(maxsize=None)
def compositions(total_max, n_colours):
    """All colour count vectors with sum <= total_max, lexicographic."""
    out = []
    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for g in range(remaining + 1):
            rec(prefix + [g], remaining - g, slots - 1)
    rec([], total_max, n_colours)
    return tuple(sorted(out))


def comp_edge_factor(comp, beta, link_weight=None):
    """beta^{m}/prod_i g_i! for one edge carrying the composition comp.

    link_weight overrides the per-link beta power per colour (used to fold
    the permutation model's endpoint sqrt(beta) pairs onto colour-3 links).
    """
    coeff = Fraction(1)
    for i, g in enumerate(comp):
        w = beta if link_weight is None else link_weight[i]
        coeff *= w ** g / factorial(g)
    return coeff


# -- generic vertex-factor table ------------------------------------------


class FactorizedModel:
    """Factorized exact sums for one (graph, weight, beta, cap) tuple.

    Supports chains, rings and small arbitrary graphs (product over per-edge
    compositions with vertex-factor lookups).  All arithmetic is exact.
    """

    def __init__(self, graph, weight_fn, beta, edge_cap):
        self.graph = graph
        self.weight = weight_fn
        self.beta = Fraction(beta)
        self.cap = edge_cap
        self.N = weight_fn.n_colours
        self.comps = compositions(edge_cap, self.N)
        self.comp_index = {c: i for i, c in enumerate(self.comps)}
        if weight_fn.name == "perm":
            lw = [self.beta] * self.N
            lw[2] = self.beta ** 2
            self.link_weight = tuple(lw)
        else:
            self.link_weight = None
        self._edge_factors = [comp_edge_factor(c, self.beta, self.link_weight)
                              for c in self.comps]
        self._vf_cache = {}

    def _vertex_factor(self, incident_comps, u1_target, h):
        key = (tuple(incident_comps), u1_target, h)
        if key not in self._vf_cache:
            groups = tuple(tuple(c[i] for c in incident_comps)
                           for i in range(self.N))
            val = vertex_factor(self.weight, groups, u1_target, h)
            if val.half_powers:
                if self.weight.name != "perm":
                    raise ValueError("unexpected sqrt(beta) factor")
                # endpoint sqrt(beta) factors already moved onto the links
                val = WeightValue(val.coeff, 0)
            self._vf_cache[key] = val.coeff
        return self._vf_cache[key]

    def partition(self, pattern=None, h=None):
        """Sum of the measure over the sector selected by the u^1 pattern
        (dict vertex->target, default all zero) or weighted by the field h
        (dict/sequence vertex->value; pattern must be None then)."""
        g = self.graph
        if pattern is not None and h is not None:
            raise ValueError("pattern and field are mutually exclusive")

        def u1_of(x):
            if h is not None:
                return None
            return 0 if pattern is None else pattern.get(x, 0)

        def h_of(x):
            if h is None:
                return None
            return h[x] if not isinstance(h, dict) else h.get(x, 0)

        order = self._elimination_order()
        return self._contract(order, u1_of, h_of)

    def _elimination_order(self):
        """Vertices ordered for sequential elimination; chains and rings come
        out in path order, small graphs greedily by current frontier size."""
        g = self.graph
        return list(range(g.n_vertices))

    def _contract(self, order, u1_of, h_of):
        """Sequentially sum vertices out.  State: assignment of compositions
        to 'open' edges (incident to both processed and unprocessed
        vertices).  Exact Fractions throughout."""
        g = self.graph
        edge_at = [[] for _ in range(g.n_vertices)]
        for k, (a, b) in enumerate(g.edges):
            edge_at[a].append(k)
            edge_at[b].append(k)
        pos = {v: i for i, v in enumerate(order)}
        # state: dict {open-edge tuple assignment: weight}
        states = {(): Fraction(1)}
        open_edges: list[int] = []
        for step, x in enumerate(order):
            # edges at x: those already open get consumed or stay; new ones open
            inc = edge_at[x]
            fresh = [k for k in inc if k not in open_edges]
            # edges that become closed after x: both endpoints processed
            def closes(k):
                a, b = g.edges[k]
                other = b if a == x else a
                return pos[other] <= step
            new_open = [k for k in open_edges if k not in inc]
            still_open_inc = [k for k in inc if not closes(k)]
            next_open = new_open + still_open_inc
            new_states = {}
            fresh_ranges = [self.comps for _ in fresh]
            for assign, wgt in states.items():
                comp_of = dict(zip(open_edges, assign))
                for fresh_assign in product(*fresh_ranges):
                    local = dict(comp_of)
                    factor = Fraction(1)
                    for k, c in zip(fresh, fresh_assign):
                        local[k] = c
                        factor *= self._edge_factors[self.comp_index[c]]
                    incident = [local[k] for k in inc]
                    vf = self._vertex_factor(tuple(incident), u1_of(x), h_of(x))
                    if vf == 0:
                        continue
                    w = wgt * factor * vf
                    key = tuple(local[k] for k in next_open)
                    new_states[key] = new_states.get(key, Fraction(0)) + w
            states = new_states
            open_edges = next_open
            if not states:
                return Fraction(0)
        assert open_edges == []
        return states.get((), Fraction(0))


def spin_tail_bound(graph, N, beta, cap):
    """Relative truncation tail for raising every per-edge cap beyond `cap`.

    Ratio-test style: one extra link on an edge costs beta^{cap+1}/(cap+1)!
    relative to the empty edge, can pair with at most D(cap+1) existing links
    per endpoint (D = max degree), and each extra visit multiplies the spin
    vertex weight by at most 1/N.  Geometric in the remaining orders.
    """
    beta = Fraction(beta)
    if beta == 0:
        return 0.0
    D = max(graph.degree(i) for i in range(graph.n_vertices))
    rho = float(beta) / (cap + 2)
    if rho >= 1:
        return float("inf")
    amp = ((D * (cap + 1) + 1) / N) ** 2
    per_edge = amp * float(beta) ** (cap + 1) / factorial(cap + 1) / (1 - rho)
    return graph.n_edges * per_edge


def default_spin_cap(graph, N, beta, tol=1e-10, cap_max=40):
    """Smallest per-edge cap with spin_tail_bound below tol."""
    for cap in range(1, cap_max):
        if spin_tail_bound(graph, N, beta, cap) < tol:
            return cap
    return cap_max
