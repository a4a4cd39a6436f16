"""Exact column-transfer evaluation of path-ensemble sums on 2-d tori.

With at most one link per edge, the configuration restricted to the cut
between neighbouring columns is described by the colour (or absence) of the
link on each of the L crossing edges, giving (N+1)^L cut states.  The
partition sum is the trace of a product of per-column transition matrices;
each transition sums over the column's vertical links and vertex pairings.

Everything is scaled to integers (link weights and vertex factors have
bounded rational denominators) and evaluated modulo a family of word-sized
primes with BLAS matrix products — factors below 2^19 keep every float64
intermediate exactly representable — then reconstructed by the Chinese
remainder theorem.  Results are exact Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd

import numpy as np

from .wires import LocalCounts

_PRIME_CEILING = 1 << 19
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n):
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_stream():
    n = _PRIME_CEILING - 1
    while n > 2:
        if _is_prime(n):
            yield n
        n -= 2 if n % 2 else 1


def _crt(residues, moduli):
    total, modulus = 0, 1
    for r, m in zip(residues, moduli):
        inv = pow(modulus % m, -1, m)
        total += modulus * (((r - total) * inv) % m)
        modulus *= m
    return total % modulus


def _lcm(values):
    return reduce(lambda a, b: a * b // gcd(a, b), values, 1)


def _matmul_mod(a, b, p):
    if p is None:
        return a @ b
    return np.mod(np.rint(a @ b), p)


def _red(x, p):
    return x if p is None else np.mod(x, p)


# -- vertex specifications -------------------------------------------------

TARGET = "target"
FIELD = "field"


def _matchings(links):
    """Partial matchings of a colour list, pairing equal colours only."""

    def rec(remaining):
        if not remaining:
            yield ()
            return
        first, rest = remaining[0], remaining[1:]
        for tail in rec(rest):
            yield tail
        for k, other in enumerate(rest):
            if links[other] == links[first]:
                for tail in rec(rest[:k] + rest[k + 1:]):
                    yield ((first, other),) + tail

    yield from rec(tuple(range(len(links))))


def _vertex_value(weight_fn, links, spec):
    """Sum over pairings of the (distinct-edge) incident links at a vertex."""
    n_colours = weight_fn.n_colours
    total = Fraction(0)
    for matching in _matchings(links):
        u = [0] * n_colours
        v = [0] * n_colours
        unmatched = set(range(len(links)))
        for (i, j) in matching:
            v[links[i] - 1] += 1
            v[links[j] - 1] += 1
            unmatched.discard(i)
            unmatched.discard(j)
        for i in unmatched:
            u[links[i] - 1] += 1
        n = tuple(v[c] // 2 + u[c] for c in range(n_colours))
        counts = LocalCounts(n=n, u=tuple(u), v=tuple(v), t=0)
        val = weight_fn.value(counts)
        if val.is_zero():
            continue
        coeff = val.coeff  # sqrt(beta) factors live on colour-3 links instead
        kind, arg = spec
        if kind == TARGET:
            if u[0] != arg:
                continue
        else:
            h = Fraction(arg)
            if h == 0 and u[0] > 0:
                continue
            coeff *= h ** u[0]
        total += coeff
    return total


class TransferEngine:
    """Exact sums on one (2-d torus, weight, beta) instance at link cap 1."""

    def __init__(self, graph, weight_fn, beta, cap=1):
        if not graph.is_torus or graph.d != 2:
            raise ValueError("transfer backend handles d=2 tori only")
        if cap != 1:
            raise ValueError("transfer backend implements a single-link cap")
        self.graph = graph
        self.weight = weight_fn
        self.N = weight_fn.n_colours
        self.Nc = self.N + 1
        self.L = graph.L
        self.beta = Fraction(beta)
        self._setup_edge_weights()
        self._base_scale = self._vertex_scale()
        self._vf_tables = {}
        self._per_prime = {}

    # scaling ------------------------------------------------------------

    def _setup_edge_weights(self):
        beta = self.beta
        lw = [beta] * self.N
        if self.weight.name == "perm":
            lw[2] = beta * beta  # the two endpoint sqrt(beta) factors per link
        den = _lcm([w.denominator for w in lw])
        self.edge_den = den
        self.edge_nums = [den] + [int(w * den) for w in lw]  # slot 0 = no link
        if max(self.edge_nums) >= 2 ** 26:
            raise ValueError("beta numerator too large for the modular kernel")

    def _vertex_scale(self):
        # vertex weights at a degree-4 vertex see at most four visits
        dens = []
        for n in range(5):
            counts = LocalCounts(n=(n,) + (0,) * (self.N - 1),
                                 u=(0,) * self.N,
                                 v=(2 * n,) + (0,) * (self.N - 1), t=0)
            dens.append(self.weight.value(counts).coeff.denominator)
        return _lcm(dens)

    def _spec_scale(self, spec):
        kind, arg = spec
        if kind == FIELD:
            return self._base_scale * Fraction(arg).denominator ** 4
        return self._base_scale

    def _vf(self, spec):
        """Integer-scaled vertex factor table with axes [in, out, up, down]."""
        if spec not in self._vf_tables:
            scale = self._spec_scale(spec)
            Nc = self.Nc
            table = np.zeros((Nc, Nc, Nc, Nc), dtype=np.float64)
            for combo in product(range(Nc), repeat=4):
                links = tuple(c for c in combo if c != 0)
                val = _vertex_value(self.weight, links, spec) * scale
                if val.denominator != 1:
                    raise AssertionError("vertex scale does not clear denominators")
                if abs(val.numerator) >= 2 ** 50:
                    raise AssertionError("vertex factor exceeds the exact range")
                table[combo] = float(val.numerator)
            self._vf_tables[spec] = table
        return self._vf_tables[spec]

    # column transitions ---------------------------------------------------

    def _column_tensor(self, specs, p):
        """Transition matrix mod p for one column with per-row vertex specs."""
        L, Nc = self.L, self.Nc
        ef = _red(np.array(self.edge_nums, dtype=np.float64), p)
        bs = []
        for r in range(L):
            vf = _red(self._vf(specs[r]), p)
            # weight the out crossing link, then the downward vertical link,
            # reducing between steps to keep float64 products exact
            b = _red(vf * ef[None, :, None, None], p)
            b = _red(b * ef[None, None, None, :], p)
            # reorder [in, out, up, down] -> [up, down, in, out]
            b = np.transpose(b, (2, 3, 0, 1))
            bs.append(np.ascontiguousarray(b))
        acc = bs[0]  # axes [t_{L-1}, t_0, i0, o0]
        for r in range(1, L - 1):
            acc = np.tensordot(acc, bs[r], axes=([1], [0]))
            # axes: [t_{L-1}, i0, o0, ..., t_r, i_r, o_r] -> bring t_r forward
            acc = np.moveaxis(acc, -3, 1)
            acc = _red(acc, p)
        # close the ring: contract t_{L-2} and t_{L-1} with the last row
        m = np.tensordot(acc, bs[L - 1], axes=([1, 0], [0, 1]))
        m = _red(m, p)
        # axes now (i0, o0, i1, o1, ..., i_{L-1}, o_{L-1})
        order = list(range(0, 2 * L, 2)) + list(range(1, 2 * L, 2))
        m = np.transpose(m, order)
        dim = Nc ** L
        return np.ascontiguousarray(m.reshape(dim, dim))

    def _generic_specs(self):
        return tuple([(TARGET, 0)] * self.L)

    def _prime_ctx(self, p):
        if p not in self._per_prime:
            self._per_prime[p] = {"cols": {}, "pows": {}}
        return self._per_prime[p]

    def _generic_power(self, k, p):
        ctx = self._prime_ctx(p)
        if k not in ctx["pows"]:
            if k == 1:
                ctx["pows"][1] = self._column_matrix(self._generic_specs(), p)
            else:
                ctx["pows"][k] = _matmul_mod(self._generic_power(k - 1, p),
                                             self._generic_power(1, p), p)
        return ctx["pows"][k]

    def _column_matrix(self, specs, p):
        ctx = self._prime_ctx(p)
        if specs not in ctx["cols"]:
            ctx["cols"][specs] = self._column_tensor(specs, p)
        return ctx["cols"][specs]

    # value assembly ---------------------------------------------------------

    def _column_specs(self, pattern=None, field=None):
        L = self.L
        specs = [[(TARGET, 0)] * L for _ in range(L)]
        if pattern:
            for v, t in pattern.items():
                c, r = self.graph.vertices[v] if isinstance(v, int) else v
                specs[c][r] = (TARGET, int(t))
        if field is not None:
            for v, val in field.items():
                c, r = self.graph.vertices[v] if isinstance(v, int) else v
                h = Fraction(val)
                # zero field entries coincide with the u^1 = 0 constraint
                specs[c][r] = (TARGET, 0) if h == 0 else (FIELD, h)
        return [tuple(s) for s in specs]

    def _trace_chain(self, specs_by_col, p):
        generic = self._generic_specs()
        mat = None
        run = 0

        def flush(mat, run):
            if run:
                power = self._generic_power(run, p)
                mat = power if mat is None else _matmul_mod(mat, power, p)
            return mat

        for specs in specs_by_col:
            if specs == generic:
                run += 1
                continue
            mat = flush(mat, run)
            run = 0
            col = self._column_matrix(specs, p)
            mat = col if mat is None else _matmul_mod(mat, col, p)
        mat = flush(mat, run)
        if p is None:
            return float(np.trace(mat))
        return int(np.rint(np.trace(mat))) % p

    def _denominator(self, specs_by_col):
        den = self.edge_den ** self.graph.n_edges
        for specs in specs_by_col:
            for spec in specs:
                den *= self._spec_scale(spec)
        return den

    def _value_bound(self, specs_by_col):
        """Rigorous upper bound on the scaled integer sum: the weights are
        non-negative, so the sum is at most the unconstrained product of
        per-edge factor sums times the largest vertex factor per vertex."""
        per_edge = sum(self.edge_nums)
        bound = per_edge ** self.graph.n_edges
        for specs in specs_by_col:
            for spec in specs:
                t = self._vf(spec)
                bound *= max(1, int(np.max(np.abs(t))))
        return bound

    # memory policy: contexts for large state spaces are rebuilt per prime
    # and released, so a batch touches at most one prime's matrices at once
    _KEEP_DIM = 1024

    def _release(self, p):
        if self.Nc ** self.L > self._KEEP_DIM:
            self._per_prime.pop(p, None)

    def batch(self, tasks, progress=None):
        """Exact Fractions for a list of tasks, sharing per-prime work.

        Each task is {'pattern': {...}} or {'field': {...}}.
        """
        specs = []
        signed = []
        for task in tasks:
            pattern = task.get("pattern")
            field = task.get("field")
            if (pattern is None) == (field is None):
                raise ValueError("each task needs exactly one of pattern/field")
            if pattern is not None:
                pattern = {v: t for v, t in pattern.items() if t}
                specs.append(self._column_specs(pattern=pattern))
                signed.append(False)
            else:
                ff = {v: Fraction(val) for v, val in field.items()}
                specs.append(self._column_specs(field=ff))
                signed.append(any(h < 0 for h in ff.values()))
        bounds = [self._value_bound(s) for s in specs]
        # one float pass tightens the bounds for the non-negative tasks;
        # relative float error is negligible against the 1e-4 slack
        for i, s in enumerate(specs):
            if not signed[i]:
                approx = self._trace_chain(s, None)
                if np.isfinite(approx):
                    bounds[i] = min(bounds[i], int(approx * 1.0001) + 1)
        self._release(None)
        target = 2 * max(bounds) + 2
        residues = [[] for _ in tasks]
        moduli = []
        prod = 1
        for p in prime_stream():
            for i, s in enumerate(specs):
                residues[i].append(self._trace_chain(s, p))
            self._release(p)
            moduli.append(p)
            prod *= p
            if progress is not None:
                progress(p, prod, target)
            if prod > target:
                break
        out = []
        for i in range(len(tasks)):
            scaled = _crt(residues[i], moduli)
            if scaled > prod // 2:  # fields may produce negative sums
                scaled -= prod
            if abs(scaled) > bounds[i]:
                raise AssertionError("reconstructed value exceeds its bound")
            out.append(Fraction(scaled, self._denominator(specs[i])))
        return out

    def value(self, pattern=None, field=None):
        """Exact Fraction for a u^1 pattern sum or a field-weighted sum."""
        task = {"pattern": pattern} if pattern is not None else {"field": field}
        return self.batch([task])[0]


_ENGINES = {}


def get_engine(graph, weight_fn, beta, cap=1):
    key = (graph.d, graph.L, weight_fn.name, weight_fn.n_colours,
           Fraction(beta), cap)
    if key not in _ENGINES:
        _ENGINES[key] = TransferEngine(graph, weight_fn, beta, cap=cap)
    return _ENGINES[key]


def torus_value(graph, weight_fn, beta, pattern=None, field=None, cap=1):
    return get_engine(graph, weight_fn, beta, cap).value(
        pattern=pattern, field=field)
