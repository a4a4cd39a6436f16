"""Independent reference computations for the classical models.

These never touch the path-ensemble engine: spin expectations come from
direct integration over product spheres (exact sign sums for N = 1,
quadrature grids or a Fourier-mode transfer matrix for N = 2, Gauss-Legendre
x uniform grids for N = 3), and the combinatorial models are enumerated
straight from their own definitions (perfect matchings, degree-constrained
subgraphs, permutations with local displacements).
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from . import lattice as lat


class OracleError(ValueError):
    pass


# -- sphere moments ---------------------------------------------------------


def double_factorial(n):
    if n <= 0:
        return 1
    out = 1
    while n > 0:
        out *= n
        n -= 2
    return out


def sphere_moment(N, exponents):
    """Exact moment of the uniform measure on S^{N-1}:
    integral of prod (phi^i)^{n_i}.  Zero when any exponent is odd,
    otherwise Gamma(N/2) prod (n_i-1)!! / (2^{n/2} Gamma((n+N)/2))."""
    if len(exponents) != N:
        raise OracleError("need one exponent per component")
    if any(e < 0 for e in exponents):
        raise OracleError("exponents must be non-negative")
    if any(e % 2 for e in exponents):
        return Fraction(0)
    n = sum(exponents)
    num = 1
    for e in exponents:
        num *= double_factorial(e - 1)
    den = 1
    for j in range(n // 2):
        den *= 2 * j + N
    return Fraction(num, den)


def sphere_moment_quadrature(N, exponents, resolution=64):
    """The same moment by deterministic quadrature, for cross-checks."""
    nodes, wts = one_site_rule(N, resolution)
    vals = np.ones(len(wts))
    for i, e in enumerate(exponents):
        vals = vals * nodes[:, i] ** e
    return float(np.dot(wts, vals))


# -- one-site quadrature rules ----------------------------------------------


def one_site_rule(N, resolution):
    """Nodes (K x N array) and weights (sum 1) for the uniform measure on
    S^{N-1}.  N=1: the exact two-point sum; N=2: uniform angle grid;
    N=3: Gauss-Legendre in cos(theta) times a uniform azimuthal grid."""
    if N == 1:
        return np.array([[1.0], [-1.0]]), np.array([0.5, 0.5])
    if N == 2:
        k = resolution
        ang = 2 * np.pi * np.arange(k) / k
        nodes = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return nodes, np.full(k, 1.0 / k)
    if N == 3:
        nt = resolution
        nphi = 2 * resolution
        x, wx = np.polynomial.legendre.leggauss(nt)  # cos(theta) in [-1, 1]
        phi = 2 * np.pi * np.arange(nphi) / nphi
        ct = np.repeat(x, nphi)
        st = np.sqrt(1 - ct ** 2)
        ph = np.tile(phi, nt)
        nodes = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=1)
        wts = np.repeat(wx / 2.0, nphi) / nphi
        return nodes, wts
    raise OracleError("quadrature rules implemented for N in {1, 2, 3}")


# -- spin expectations -------------------------------------------------------


def _ising_expectation(graph, beta, insertions):
    """Exact +-1 sums, vectorized; exact up to float rounding."""
    nv = graph.n_vertices
    if nv > 22:
        raise OracleError("exact sign sum limited to 22 vertices")
    states = np.arange(2 ** nv, dtype=np.int64)
    spins = np.empty((2 ** nv, nv), dtype=np.float64)
    for v in range(nv):
        spins[:, v] = 1.0 - 2.0 * ((states >> v) & 1)
    energy = np.zeros(2 ** nv)
    for a, b in graph.edges:
        energy += spins[:, a] * spins[:, b]
    w = np.exp(beta * (energy - energy.max()))
    obs = np.ones(2 ** nv)
    for v, p in insertions.items():
        obs *= spins[:, v] ** p
    return float(np.dot(w, obs) / w.sum())


def _grid_expectation(graph, N, beta, insertions, resolution):
    """Product quadrature contracted with einsum over the site indices."""
    if graph.n_vertices > 8:
        raise OracleError("grid quadrature limited to 8 vertices")
    nodes, wts = one_site_rule(N, resolution)
    kernel = np.exp(beta * (nodes @ nodes.T))
    letters = "abcdefgh"
    terms = []
    operands = []
    for a, b in graph.edges:
        terms.append(letters[a] + letters[b])
        operands.append(kernel)
    for v in range(graph.n_vertices):
        site = wts.copy()
        p = insertions.get(v, 0)
        if p:
            site = site * nodes[:, 0] ** p
        terms.append(letters[v])
        operands.append(site)
    num = np.einsum(",".join(terms) + "->", *operands, optimize=True)
    terms2 = []
    operands2 = []
    for a, b in graph.edges:
        terms2.append(letters[a] + letters[b])
        operands2.append(kernel)
    for v in range(graph.n_vertices):
        terms2.append(letters[v])
        operands2.append(wts)
    den = np.einsum(",".join(terms2) + "->", *operands2, optimize=True)
    return float(num / den)


def _bessel_i(k, beta, terms=60):
    """Modified Bessel function I_k(beta) by its power series."""
    k = abs(k)
    total = 0.0
    term = (beta / 2.0) ** k / math.factorial(k)
    m = 0
    while m < terms:
        total += term
        m += 1
        term *= (beta / 2.0) ** 2 / (m * (m + k))
        if term < 1e-300:
            break
    return total


def _mode_site_tensor(beta, kmax, shift_coeffs):
    """B[u, d, i, o] = sum_m c_m delta(i - o + u - d + m) I_o(beta) I_d(beta).

    The O(2) edge weight expands as e^{beta cos D} = sum_k I_k(beta) e^{ikD};
    integrating the site angle forces zero total mode flux, shifted by the
    insertion modes m.
    """
    nk = 2 * kmax + 1
    iv = np.array([_bessel_i(k, beta) for k in range(-kmax, kmax + 1)])
    b = np.zeros((nk, nk, nk, nk))
    ks = range(-kmax, kmax + 1)
    for m, cf in shift_coeffs.items():
        for iu, u in enumerate(ks):
            for ii, i in enumerate(ks):
                for io, o in enumerate(ks):
                    d = i - o + u + m
                    if -kmax <= d <= kmax:
                        b[iu, d + kmax, ii, io] += cf * iv[io] * iv[d + kmax]
    return b


def _mode_column_matrix(L, kmax, tensors):
    nk = 2 * kmax + 1
    acc = tensors[0]
    for r in range(1, L - 1):
        acc = np.tensordot(acc, tensors[r], axes=([1], [0]))
        acc = np.moveaxis(acc, -3, 1)
    m = np.tensordot(acc, tensors[L - 1], axes=([1, 0], [0, 1]))
    order = list(range(0, 2 * L, 2)) + list(range(1, 2 * L, 2))
    m = np.transpose(m, order)
    dim = nk ** L
    return np.ascontiguousarray(m.reshape(dim, dim))


_XY_CACHE = {}


def _xy_torus_expectation(graph, beta, insertions, kmax):
    """O(2) model on a d=2 torus via a transfer matrix in the Fourier-mode
    basis.  Truncating |k| <= kmax only discards closed loops of high modes,
    of relative weight ~ (I_{kmax+1}/I_0)^4 — the reported error (difference
    of consecutive kmax values) dominates it comfortably.
    """
    L = graph.L
    key = (L, float(beta), kmax)
    cache = _XY_CACHE.setdefault(key, {})
    if "plain" not in cache:
        cache["plain"] = _mode_site_tensor(beta, kmax, {0: 1.0})
        cache["pows"] = {}

    def generic_power(k):
        pows = cache["pows"]
        if k not in pows:
            if k == 1:
                pows[1] = _mode_column_matrix(L, kmax, [cache["plain"]] * L)
            else:
                pows[k] = generic_power(k - 1) @ generic_power(1)
        return pows[k]

    def coeffs_for(p):
        out = {}
        for j in range(p + 1):
            m = 2 * j - p
            out[m] = out.get(m, 0.0) + math.comb(p, j) / 2.0 ** p
        return out

    ins_by_col = {}
    for v, p in insertions.items():
        c, r = graph.vertices[v]
        ins_by_col.setdefault(c, {})[r] = ins_by_col.get(c, {}).get(r, 0) + p

    total = None
    run = 0

    def flush(total, run):
        if run:
            power = generic_power(run)
            total = power if total is None else total @ power
        return total

    for c in range(L):
        if c not in ins_by_col:
            run += 1
            continue
        total = flush(total, run)
        run = 0
        tensors = []
        for r in range(L):
            p = ins_by_col[c].get(r, 0)
            tensors.append(cache["plain"] if p == 0
                           else _mode_site_tensor(beta, kmax, coeffs_for(p)))
        total = _mode_column_matrix(L, kmax, tensors) if total is None \
            else total @ _mode_column_matrix(L, kmax, tensors)
    total = flush(total, run)
    return float(np.trace(total))


def spin_expectation(graph, N, beta, insertions, resolution=None):
    """<prod (phi^1_x)^{p_x}> by the route fitting the graph and N."""
    insertions = {v: p for v, p in insertions.items() if p}
    if N == 1:
        return _ising_expectation(graph, beta, insertions)
    if graph.is_torus and graph.d == 2:
        if N != 2:
            raise OracleError("torus spin oracle covers N in {1, 2}")
        kmax = resolution or 4
        num = _xy_torus_expectation(graph, beta, insertions, kmax)
        den = _xy_torus_expectation(graph, beta, {}, kmax)
        return num / den
    res = resolution or (48 if N == 2 else 12)
    return _grid_expectation(graph, N, beta, insertions, res)


DEFAULT_RESOLUTIONS = {1: (2, 2), 2: (48, 96), 3: (12, 16)}


def spin_correlation(graph, N, beta, A, resolution=None, mc=False, seed=0):
    """<prod_{x in A} phi^1_x> with a reported discretization error
    (difference against a finer deterministic rule).  A may repeat vertices.

    Graphs too large for deterministic integration raise unless mc=True,
    which falls back to Metropolis sampling with a reported standard error.
    """
    insertions = {}
    for x in A:
        v = x if isinstance(x, int) else graph.index(x)
        insertions[v] = insertions.get(v, 0) + 1
    try:
        if N == 1:
            return _ising_expectation(graph, beta, insertions), 1e-13
        if graph.is_torus and graph.d == 2 and N == 2:
            coarse = spin_expectation(graph, N, beta, insertions, resolution or 3)
            fine = spin_expectation(graph, N, beta, insertions, (resolution or 3) + 1)
            return fine, abs(fine - coarse) + 1e-12
        base, check = resolution or DEFAULT_RESOLUTIONS[N][0], DEFAULT_RESOLUTIONS[N][1]
        coarse = spin_expectation(graph, N, beta, insertions, base)
        fine = spin_expectation(graph, N, beta, insertions, check)
        return fine, abs(fine - coarse) + 1e-12
    except OracleError:
        if not mc:
            raise
    return _metropolis_correlation(graph, N, beta, insertions, seed)


def _metropolis_correlation(graph, N, beta, insertions, seed,
                            sweeps=20000, burn=2000):
    rng = np.random.default_rng(seed)
    nv = graph.n_vertices
    spins = rng.normal(size=(nv, N))
    spins /= np.linalg.norm(spins, axis=1, keepdims=True)
    samples = []
    for sweep in range(sweeps):
        for v in range(nv):
            prop = rng.normal(size=N)
            prop /= np.linalg.norm(prop)
            de = 0.0
            for w in graph.adjacency[v]:
                de += beta * float((prop - spins[v]) @ spins[w])
            if de >= 0 or rng.random() < math.exp(de):
                spins[v] = prop
        if sweep >= burn:
            val = 1.0
            for v, p in insertions.items():
                val *= spins[v, 0] ** p
            samples.append(val)
    arr = np.array(samples)
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(len(arr)))


# -- dimer model --------------------------------------------------------------


def dimer_count(graph, A=()):
    """|Omega^dim(A)|: perfect matchings of the graph minus the monomer set."""
    removed = frozenset(v if isinstance(v, int) else graph.index(v) for v in A)
    nv = graph.n_vertices
    if nv > 62:
        raise OracleError("matching enumeration limited to 62 vertices")
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


def dimer_count_transfer(graph):
    """Perfect-matching count of a d=2 torus by a profile transfer matrix;
    an independent recount for the backtracking totals."""
    if not graph.is_torus or graph.d != 2:
        raise OracleError("transfer recount is for d=2 tori")
    L = graph.L
    ring_match = {}
    for subset in range(1 << L):
        ring_match[subset] = _ring_matchings(subset, L)
    dim = 1 << L
    T = np.zeros((dim, dim), dtype=np.float64)
    for mask_in in range(dim):
        free = ((1 << L) - 1) ^ mask_in
        sub = free
        while True:
            rest = free ^ sub  # covered by vertical dimers inside the column
            T[mask_in, sub] += ring_match[rest]
            if sub == 0:
                break
            sub = (sub - 1) & free
    total = np.linalg.matrix_power(T, L)
    return int(round(np.trace(total)))


def _ring_matchings(subset, L):
    """Perfect matchings of the cycle C_L induced on `subset` (bitmask)."""
    verts = [r for r in range(L) if subset >> r & 1]
    if len(verts) % 2:
        return 0
    if not verts:
        return 1
    edges = [(r, (r + 1) % L) for r in range(L)
             if subset >> r & 1 and subset >> ((r + 1) % L) & 1]

    def rec(remaining, eidx):
        if not remaining:
            return 1
        if eidx >= len(edges):
            return 0
        total = rec(remaining, eidx + 1)
        a, b = edges[eidx]
        if a in remaining and b in remaining:
            total += rec(remaining - {a, b}, eidx + 1)
        return total

    return rec(frozenset(verts), 0)


def double_dimer_correlation(graph, x, y):
    """G^{d.d.}(x,y) = |Omega^dim({x,y})| / |Omega^dim(empty)|."""
    base = dimer_count(graph)
    if base == 0:
        raise OracleError("graph has no dimer cover")
    return Fraction(dimer_count(graph, (x, y)), base)


# -- lattice permutations ------------------------------------------------------


def permutation_histogram(graph, A=()):
    """{moved-point count e(pi): multiplicity} over Omega^per(A).

    A empty: permutations with pi(z) = z or {z, pi(z)} an edge.  A = (x, y):
    functions V\\{y} -> V\\{x} with the same local rule, bijective away from
    the endpoints (x keeps one output, y one input).
    """
    nv = graph.n_vertices
    if A:
        x, y = (v if isinstance(v, int) else graph.index(v) for v in A)
        if x == y:
            raise OracleError("permutation endpoints must differ")
        domain = [v for v in range(nv) if v != y]
        banned_image = x
    else:
        x = y = None
        domain = list(range(nv))
        banned_image = None
    hist = {}
    used = [False] * nv

    def rec(idx, moved):
        if idx == len(domain):
            hist[moved] = hist.get(moved, 0) + 1
            return
        v = domain[idx]
        options = []
        if v != banned_image and not used[v]:
            options.append((v, 0))
        for w in graph.adjacency[v]:
            if w != banned_image and not used[w]:
                options.append((w, 1))
        for w, dm in options:
            used[w] = True
            rec(idx + 1, moved + dm)
            used[w] = False

    rec(0, 0)
    return hist


def permutation_partition(graph, beta, A=()):
    """Z^per(A) at edge weight beta = e^{-alpha}, exact for rational beta."""
    beta = Fraction(beta)
    hist = permutation_histogram(graph, A)
    return sum(cnt * beta ** e for e, cnt in hist.items())


def permutation_correlation(graph, beta, A):
    return permutation_partition(graph, beta, A) / permutation_partition(graph, beta)


# -- loop O(N) model -----------------------------------------------------------


def loop_model_histogram(graph):
    """One pass over spanning subgraphs with at most two odd-degree vertices.

    Returns {(endpoints, edges, loops): count} where endpoints is () for the
    fully even configurations and (a, b) for those with exactly two
    degree-one vertices.  Edge-subset DFS with vertex-completion pruning —
    deliberately a different algorithm from the engine's component growth.
    """
    ne = graph.n_edges
    nv = graph.n_vertices
    deg = [0] * nv
    remaining = [0] * nv
    for a, b in graph.edges:
        remaining[a] += 1
        remaining[b] += 1
    end = {}   # path endpoint -> other endpoint of its open path
    hist = {}

    def rec(i, m, loops, done_odd):
        if i == ne:
            ends = tuple(sorted(v for v in range(nv) if deg[v] == 1))
            key = (ends, m, loops)
            hist[key] = hist.get(key, 0) + 1
            return
        a, b = graph.edges[i]
        # skip the edge
        remaining[a] -= 1
        remaining[b] -= 1
        extra = (1 if remaining[a] == 0 and deg[a] == 1 else 0) + \
                (1 if remaining[b] == 0 and deg[b] == 1 else 0)
        if done_odd + extra <= 2:
            rec(i + 1, m, loops, done_odd + extra)
        # take the edge
        if deg[a] < 2 and deg[b] < 2:
            ea = end.get(a, a)
            eb = end.get(b, b)
            closing = ea == b  # a and b are the two ends of the same path
            deg[a] += 1
            deg[b] += 1
            saved = [(v, end.get(v)) for v in {a, b, ea, eb}]
            if closing:
                end.pop(a, None)
                end.pop(b, None)
            else:
                end.pop(a, None)
                end.pop(b, None)
                end[ea] = eb
                end[eb] = ea
            extra = (1 if remaining[a] == 0 and deg[a] == 1 else 0) + \
                    (1 if remaining[b] == 0 and deg[b] == 1 else 0)
            if done_odd + extra <= 2:
                rec(i + 1, m + 1, loops + (1 if closing else 0),
                    done_odd + extra)
            deg[a] -= 1
            deg[b] -= 1
            for v, old in saved:
                if old is None:
                    end.pop(v, None)
                else:
                    end[v] = old
        remaining[a] += 1
        remaining[b] += 1

    rec(0, 0, 0, 0)
    return hist


def loop_model_partition(graph, N, beta, A=()):
    """Z^loop(A) = sum over subgraphs with degree 1 on A and 0/2 elsewhere
    of beta^edges N^loops, exact for rational beta."""
    beta = Fraction(beta)
    key_ends = tuple(sorted(v if isinstance(v, int) else graph.index(v) for v in A))
    hist = loop_model_histogram(graph)
    total = Fraction(0)
    for (ends, m, loops), cnt in hist.items():
        if ends == key_ends:
            total += cnt * beta ** m * N ** loops
    return total


def loop_model_correlation(graph, N, beta, A):
    z0 = loop_model_partition(graph, N, beta)
    return loop_model_partition(graph, N, beta, A) / z0
