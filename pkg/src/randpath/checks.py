"""Executable inequality checks over computed two-point values.

Every reflection-positivity and site-monotonicity statement becomes a
predicate producing CheckReports with explicit left/right sides, slack and
tolerance.  Exact rational evaluations use tolerance zero; quadrature-backed
spin checks use the oracle's reported discretization error plus a fixed
epsilon.  "not-applicable" (parity or range precondition unmet) and
"vacuous" (implication hypothesis never satisfied) are first-class verdicts
so that grid sweeps stay auditable.

The generator family for the bilinear-form checks is fixed here: field
monomials prod_x h_x^{u^1_x} with h supported on S inside one half, |S| <= 2
(value 1 on singles, values (1, -1/2) on pairs), plus the constant function.
On the 6x6 torus the family is restricted to |S| <= 1 without the constant,
keeping every value inside the precomputed pattern tables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import lattice as lat
from . import oracles
from .engine import Evaluator
from .weights import ModelResult

EPS = 1e-8
FLOAT_EPS = 1e-12


@dataclass
class CheckReport:
    check: str
    rule: str  # which statement the instance exercises
    instance: dict
    lhs: object
    rhs: object
    tolerance: float
    verdict: str
    note: str = ""

    @property
    def slack(self):
        if self.lhs is None or self.rhs is None:
            return None
        return self.rhs - self.lhs

    def as_dict(self):
        def enc(v):
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}" if v.denominator != 1 \
                    else str(v.numerator)
            if isinstance(v, float):
                return repr(v)
            return v
        inst = {k: enc(v) if isinstance(v, (Fraction, float)) else str(v)
                for k, v in sorted(self.instance.items())}
        return {
            "check": self.check,
            "rule": self.rule,
            "instance": inst,
            "lhs": enc(self.lhs),
            "rhs": enc(self.rhs),
            "slack": enc(self.slack) if self.slack is not None else "",
            "tolerance": repr(self.tolerance),
            "verdict": self.verdict,
            "note": self.note,
        }


def _verdict(lhs, rhs, tolerance):
    """pass iff rhs - lhs >= -tolerance."""
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction) and tolerance == 0:
        return "pass" if rhs >= lhs else "fail"
    return "pass" if float(rhs) - float(lhs) >= -tolerance else "fail"


def ineq_report(check, rule, instance, lhs, rhs, tolerance=0.0, note=""):
    return CheckReport(check=check, rule=rule, instance=instance, lhs=lhs,
                       rhs=rhs, tolerance=tolerance,
                       verdict=_verdict(lhs, rhs, tolerance), note=note)


def eq_report(check, rule, instance, lhs, rhs, tolerance=0.0, note=""):
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction) and tolerance == 0:
        ok = lhs == rhs
    else:
        ok = abs(float(lhs) - float(rhs)) <= tolerance
    return CheckReport(check=check, rule=rule, instance=instance, lhs=lhs,
                       rhs=rhs, tolerance=tolerance,
                       verdict="pass" if ok else "fail", note=note)


def na_report(check, rule, instance, note=""):
    return CheckReport(check=check, rule=rule, instance=instance, lhs=None,
                       rhs=None, tolerance=0.0, verdict="not-applicable",
                       note=note)


# -- reflection machinery ---------------------------------------------------


def merged_field(graph, plane, f_spec, g_spec):
    """The field h' with prod h'^{u^1} = f * (g o Theta): f lives on T+,
    the reflected g on T-."""
    plus, minus, _ = lat.torus_halves(graph, plane)
    perm = lat.reflect_index_map(graph, plane)
    h = {}
    for x in plus:
        h[x] = _monomial_value(f_spec, x)
    for x in minus:
        h[x] = _monomial_value(g_spec, perm[x])
    return h


def _monomial_value(spec, x):
    kind, data = spec
    if kind == "const":
        return Fraction(1)
    return Fraction(data.get(x, 0))


def monomial_family(graph, plane, degree2=True, with_const=True):
    """The documented generator family of functions with domain T+."""
    plus, _, _ = lat.torus_halves(graph, plane)
    plus = sorted(plus)
    fam = []
    if with_const:
        fam.append(("const", None))
    for x in plus:
        fam.append(("field", {x: Fraction(1)}))
    if degree2:
        for x, y in itertools.combinations(plus, 2):
            fam.append(("field", {x: Fraction(1), y: Fraction(-1, 2)}))
    return fam


def check_rp_edge(ev: Evaluator, plane, f_spec, g_spec, instance=None):
    """Prop-style bilinear form checks for one (f, g) pair: symmetry,
    positivity on the diagonal, and the Cauchy-Schwarz bound (squared)."""
    graph = ev.graph
    plus, _, _ = lat.torus_halves(graph, plane)
    for spec in (f_spec, g_spec):
        if spec[0] == "field" and not set(spec[1]) <= set(plus):
            raise ValueError("monomial support must lie in the plus half")
    inst = dict(instance or {})
    inst.update(plane_key(plane), f=spec_key(f_spec), g=spec_key(g_spec))
    fg = ev.z_field(merged_field(graph, plane, f_spec, g_spec)).value
    gf = ev.z_field(merged_field(graph, plane, g_spec, f_spec)).value
    ff = ev.z_field(merged_field(graph, plane, f_spec, f_spec)).value
    gg = ev.z_field(merged_field(graph, plane, g_spec, g_spec)).value
    return [
        eq_report("rp-edge", "bilinear-symmetry", inst, fg, gf),
        ineq_report("rp-edge", "diagonal-positivity", inst, Fraction(0), ff),
        ineq_report("rp-edge", "cauchy-schwarz", inst, fg * fg, ff * gg),
    ]


def plane_key(plane):
    return {"axis": plane.axis, "kind": plane.kind, "offset": str(plane.offset)}


def spec_key(spec):
    if spec[0] == "const":
        return "1"
    return ";".join(f"{x}:{v}" for x, v in sorted(spec[1].items()))


def split_field(graph, plane, h):
    """h+ keeps h on the plus half and mirrors it onto the minus half;
    h- does the opposite."""
    plus, minus, _ = lat.torus_halves(graph, plane)
    perm = lat.reflect_index_map(graph, plane)

    def hval(x):
        return Fraction(h.get(x, 0))

    hp, hm = {}, {}
    for y in plus:
        hp[y] = hval(y)
        hm[y] = hval(perm[y])
    for y in minus:
        hm[y] = hval(y)
        hp[y] = hval(perm[y])
    return hp, hm


def check_field_inequality(ev: Evaluator, plane, h, instance=None):
    """Z^field(h) <= sqrt(Z^field(h+) Z^field(h-)), compared in squares."""
    hp, hm = split_field(ev.graph, plane, h)
    z = ev.z_field(h).value
    zp = ev.z_field(hp).value
    zm = ev.z_field(hm).value
    inst = dict(instance or {})
    inst.update(plane_key(plane))
    if z <= 0:
        return ineq_report("rp-field", "field-split", inst, z * abs(z), zp * zm,
                           note="negative left side, squared comparison")
    return ineq_report("rp-field", "field-split", inst, z * z, zp * zm)


def check_z2_inequality(ev: Evaluator, plane, h, instance=None):
    """Z2(h) <= (Z2(h+) + Z2(h-)) / 2 for the quadratic field sum."""
    hp, hm = split_field(ev.graph, plane, h)
    lhs = ev.z_two(h).value
    rhs = (ev.z_two(hp).value + ev.z_two(hm).value) / 2
    inst = dict(instance or {})
    inst.update(plane_key(plane))
    return ineq_report("rp-z2", "quadratic-field-split", inst, lhs, rhs)


# -- site monotonicity (path models) ----------------------------------------


def check_site_monotonicity(ev: Evaluator, instance=None):
    """Projection inequalities, the odd-distance non-increase of the
    averaged two-point function, and the derived neighbour-dominance chain."""
    g = ev.graph
    L, d = g.L, g.d
    base = dict(instance or {})
    reports = []
    gvals = {z: ev.g_origin(z).value for z in g.vertices}
    ge1 = {i: gvals[g.axis_vertex(1, i)] for i in range(d)}

    def axis_val(k, i):
        return gvals[g.axis_vertex(k, i)]

    for z in g.vertices:
        if all(c == 0 for c in z):
            continue
        for i in range(d):
            zi = z[i]
            inst = dict(base, z=z, axis=i)
            on_axis = all(c == 0 for k, c in enumerate(z) if k != i)
            if zi % 2 == 1:
                rule = "projection-odd"
                if on_axis:
                    reports.append(eq_report("site-monotonicity", rule, inst,
                                             gvals[z], axis_val(zi, i),
                                             note="on-axis instance"))
                else:
                    reports.append(ineq_report("site-monotonicity", rule, inst,
                                               gvals[z], axis_val(zi, i)))
                # derived chain: G(o,z) <= G(o, z_i e_i) <= G(o, e_i)
                reports.append(ineq_report("site-monotonicity", "axis-chain",
                                           inst, gvals[z], ge1[i]))
            elif zi != 0:
                rule = "projection-even"
                rhs = (axis_val(zi - 1, i) + axis_val(zi + 1, i)) / 2
                reports.append(ineq_report("site-monotonicity", rule, inst,
                                           gvals[z], rhs))
                reports.append(ineq_report("site-monotonicity", "axis-chain",
                                           inst, gvals[z], ge1[i]))
            else:
                reports.append(na_report("site-monotonicity", "projection",
                                         inst, note="z on the plane axis=0"))
    # averaged two-point function over odd distances
    for i in range(d):
        for y in g.vertices:
            if y[i] != 0:
                continue
            ns = [n for n in range(1, L // 2 + 1, 2)]
            for n1, n2 in zip(ns, ns[1:]):
                inst = dict(base, y=y, axis=i, n=n1)
                lhs = gvals[g.wrap(tuple(c + n2 * (k == i)
                                         for k, c in enumerate(y)))] \
                    + axis_val(n2, i)
                rhs = gvals[g.wrap(tuple(c + n1 * (k == i)
                                         for k, c in enumerate(y)))] \
                    + axis_val(n1, i)
                reports.append(ineq_report("site-monotonicity", "averaged-monotone",
                                           inst, lhs, rhs))
    return reports


def check_convexity(ev: Evaluator, z, axis, q, instance=None):
    """Partition-function midpoint convexity on the axis and the averaged
    two-point midpoint inequality, for admissible parity and range."""
    g = ev.graph
    L = g.L
    zi = z[axis]
    inst = dict(instance or {}, z=tuple(z), axis=axis, q=q)
    reports = []
    if (zi + q) % 2 != 1 or not (0 < zi - q and zi + q < L):
        return [na_report("convexity", "partition-midpoint", inst,
                          note="parity or range precondition unmet")]
    zmid = ev.z_two_point(g.index(g.origin()), g.index(g.wrap(z))).value
    zlo = ev.z_two_point(g.index(g.origin()),
                         g.index(g.axis_vertex(zi - q, axis))).value
    zhi = ev.z_two_point(g.index(g.origin()),
                         g.index(g.axis_vertex(zi + q, axis))).value
    reports.append(ineq_report("convexity", "partition-midpoint", inst,
                               zmid, (zlo + zhi) / 2))
    gmid = ev.averaged_g(z, axis).value
    glo = ev.averaged_g(tuple(c - q * (k == axis) for k, c in enumerate(z)),
                        axis).value
    ghi = ev.averaged_g(tuple(c + q * (k == axis) for k, c in enumerate(z)),
                        axis).value
    reports.append(ineq_report("convexity", "averaged-midpoint", inst,
                               gmid - glo, ghi - gmid))
    return reports


def check_all_sites_monotone(ev: Evaluator, axis=0, instance=None):
    """Axis monotonicity over ALL integer distances (odd and even).

    This is a property of the spin family only; applied to the double-dimer
    ensemble it must report violations (vanishing even-distance values sit
    below positive odd-distance ones), demonstrating detection power.
    """
    g = ev.graph
    base = dict(instance or {}, axis=axis)
    reports = []
    vals = {n: ev.g_origin(g.axis_vertex(n, axis)).value
            for n in range(1, g.L // 2 + 1)}
    for n in range(1, g.L // 2):
        inst = dict(base, n=n)
        reports.append(ineq_report("all-sites-monotone", "axis-monotone-all",
                                   inst, vals[n + 1], vals[n]))
    return reports


# -- spin checks (oracle-backed) ----------------------------------------------


def _spin_pair(graph, N, beta, z):
    """<phi_o . phi_z> = N <phi^1_o phi^1_z> with its reported error."""
    o = graph.index(graph.origin())
    zi = graph.index(graph.wrap(z))
    if o == zi:
        return 1.0, 0.0
    val, err = oracles.spin_correlation(graph, N, beta, (o, zi))
    return N * val, N * err


def check_spin_monotonicity(graph, N, beta, instance=None):
    """Projection and monotonicity at every site (no parity restriction),
    even-q convexity, and the site-reflection Cauchy-Schwarz bound."""
    base = dict(instance or {}, model="spin", N=N, beta=beta)
    L, d = graph.L, graph.d
    reports = []
    vals = {}
    errs = {}
    for z in graph.vertices:
        vals[z], errs[z] = _spin_pair(graph, N, beta, z)

    def axis_v(k, i):
        return vals[graph.axis_vertex(k, i)], errs[graph.axis_vertex(k, i)]

    for z in graph.vertices:
        if all(c == 0 for c in z):
            continue
        for i in range(d):
            inst = dict(base, z=z, axis=i)
            pv, pe = axis_v(z[i], i)
            tol = errs[z] + pe + EPS
            reports.append(ineq_report("spin-monotonicity", "spin-projection",
                                       inst, vals[z], pv, tol))
    for i in range(d):
        for y in graph.vertices:
            if y[i] != 0:
                continue
            for n in range(1, L // 2):
                inst = dict(base, y=y, axis=i, n=n)
                y1 = graph.wrap(tuple(c + n * (k == i) for k, c in enumerate(y)))
                y2 = graph.wrap(tuple(c + (n + 1) * (k == i)
                                      for k, c in enumerate(y)))
                a1, e1 = axis_v(n, i)
                a2, e2 = axis_v(n + 1, i)
                lhs = vals[y2] + a2
                rhs = vals[y1] + a1
                tol = errs[y1] + errs[y2] + e1 + e2 + EPS
                reports.append(ineq_report("spin-monotonicity", "spin-averaged-monotone",
                                           inst, lhs, rhs, tol))
    # even-q midpoint convexity on the axes
    for z in graph.vertices:
        if all(c == 0 for c in z):
            continue
        for i in range(d):
            zi = z[i]
            for q in range(0, L):
                if (zi + q) % 2 != 0 or not (0 < zi - q and zi + q < L):
                    continue
                inst = dict(base, z=z, axis=i, q=q)
                lo, elo = axis_v(zi - q, i)
                hi, ehi = axis_v(zi + q, i)
                tol = errs[z] + (elo + ehi) / 2 + EPS
                reports.append(ineq_report(
                    "spin-monotonicity", "spin-even-midpoint", inst,
                    vals[z], (lo + hi) / 2, tol))
    reports.extend(check_spin_site_rp(graph, N, beta, base))
    return reports


def check_spin_site_rp(graph, N, beta, base, max_pairs=6):
    """Cauchy-Schwarz for site reflections on sample spin monomials."""
    reports = []
    plane = lat.site_plane(0, 0)
    plus, _, fixed = lat.torus_halves(graph, plane)
    perm = lat.reflect_index_map(graph, plane)
    interior = sorted(set(plus) - set(fixed))
    a = interior[0]
    b = interior[1 % len(interior)]
    samples = [(), (a,), (a, b)]
    pairs = list(itertools.combinations_with_replacement(samples, 2))[:max_pairs]
    cache = {}

    def expect(vertices):
        key = tuple(sorted(vertices))
        if key not in cache:
            cache[key] = oracles.spin_correlation(graph, N, beta, key,
                                                  resolution=2)
        return cache[key]

    for f, g in pairs:
        inst = dict(base)
        inst.update(plane_key(plane), f=str(f), g=str(g))
        theta_g = tuple(perm[v] for v in g)
        theta_f = tuple(perm[v] for v in f)
        try:
            fg, e1 = expect(f + theta_g)
            ff, e2 = expect(f + theta_f)
            gg, e3 = expect(g + theta_g)
        except oracles.OracleError as exc:
            reports.append(na_report("spin-monotonicity", "site-rp-cs", inst,
                                     note=str(exc)))
            continue
        tol = 2 * abs(fg) * e1 + abs(gg) * e2 + abs(ff) * e3 + EPS
        reports.append(ineq_report("spin-monotonicity", "site-rp-cs", inst,
                                   fg * abs(fg), ff * gg, tol))
    return reports


# -- positivity implication arithmetic ----------------------------------------


def check_positivity_implications(graph, N, beta, delta, instance=None):
    """Box, off-axis and Cesaro-mean implications evaluated on oracle data."""
    base = dict(instance or {}, model="spin", N=N, beta=beta, delta=delta)
    d, L = graph.d, graph.L
    o = graph.index(graph.origin())
    vals = {}
    errs = {}
    for z in graph.vertices:
        zi = graph.index(z)
        if zi == o:
            vals[zi], errs[zi] = 1.0 / N, 0.0
            continue
        vals[zi], errs[zi] = oracles.spin_correlation(graph, N, beta, (o, zi))
    H = lat.axes_and_bulk_set(graph)
    B = lat.ball_set(graph, L / 8)
    factor = (beta * math.exp(-2 * d * beta) / N) ** (d - 2)
    reports = []
    tol = max(errs.values()) * 2 + EPS

    def conclusion(rule, inst, targets, threshold):
        worst = None
        for y in sorted(targets):
            if y == o:
                continue
            if worst is None or vals[y] < vals[worst]:
                worst = y
        if worst is None:
            return na_report("positivity-implications", rule, inst,
                             note="no target vertices")
        return ineq_report("positivity-implications", rule,
                           dict(inst, worst=graph.vertices[worst]),
                           threshold, vals[worst], tol)

    fired = False
    for z in sorted(H):
        zv = graph.vertices[z]
        if graph.torus_norm_inf(zv) > L / 2 or z == o:
            continue
        if vals[z] >= 1.0 / N - delta:
            fired = True
            Q = lat.box_set(graph, zv)
            inst = dict(base, z=zv)
            reports.append(conclusion("box-implication", inst,
                                      Q & H, 1.0 / N - 2 ** d * delta))
            off = Q - H
            if off:
                reports.append(conclusion("offaxis-implication", inst, off,
                                          (1.0 / N - 2 ** d * delta) * factor))
    if not fired:
        reports.append(CheckReport(
            check="positivity-implications", rule="box-implication",
            instance=base, lhs=None, rhs=None, tolerance=tol,
            verdict="vacuous", note="hypothesis never satisfied"))
    mean = sum(vals.values()) / len(vals)
    inst = dict(base, cesaro_mean=mean)
    if mean >= 1.0 / N - delta:
        reports.append(conclusion("cesaro-ball-implication", inst,
                                  B & H, 1.0 / N - 2 ** (2 * d) * delta))
        if B - H:
            reports.append(conclusion("cesaro-offaxis-implication", inst,
                                      B - H,
                                      (1.0 / N - 2 ** (2 * d) * delta) * factor))
    else:
        reports.append(CheckReport(
            check="positivity-implications", rule="cesaro-ball-implication",
            instance=inst, lhs=None, rhs=None, tolerance=tol,
            verdict="vacuous", note=f"mean {mean:.6f} below threshold"))
    return reports


# -- sweep drivers -------------------------------------------------------------


def _graph_spec(graph):
    if graph.is_torus:
        return ("torus", graph.d, graph.L)
    return ("json", graph.to_json())


def _build_graph(spec):
    if spec[0] == "torus":
        return lat.build_torus(spec[1], spec[2])
    return lat.from_json(spec[1])


def _prefetch_worker(args):
    spec, model, N, beta, m_max, pattern_items = args
    graph = _build_graph(spec)
    ev = Evaluator(graph, model, N=N, beta=Fraction(beta), m_max=m_max)
    val = ev.z_pattern(dict(pattern_items)).value
    return pattern_items, str(val)


def prefetch_patterns(ev: Evaluator, patterns, jobs=1):
    """Fill the evaluator's pattern cache, optionally in parallel.

    Results are merged in canonical order, so downstream output is identical
    for any worker count.
    """
    todo = []
    seen = set()
    for p in patterns:
        canon = ev.cache.canonical(p)
        if canon in seen or ev.cache.get(p) is not None \
                or ev._fixture_key(p) in ev.fixtures:
            continue
        seen.add(canon)
        todo.append(tuple(sorted(p.items())))
    todo.sort()
    if jobs <= 1 or len(todo) <= 1:
        for items in todo:
            ev.z_pattern(dict(items))
        return
    import multiprocessing

    spec = _graph_spec(ev.graph)
    args = [(spec, ev.model, ev.N if ev.model in ("spin", "loop") else None,
             str(ev.beta), ev.m_max, items) for items in todo]
    with multiprocessing.Pool(jobs) as pool:
        results = pool.map(_prefetch_worker, args)
    for items, val in sorted(results):
        ev.cache.put(dict(items), Fraction(val))


def default_field_palette(model):
    if model == "spin":
        return [Fraction(1), Fraction(-1)]
    return [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2)]


def seeded_fields(graph, model, n_fields, seed, support=2):
    """Deterministic pseudo-random sparse test fields."""
    import random

    rng = random.Random(seed)
    palette = default_field_palette(model)
    fields = []
    verts = list(range(graph.n_vertices))
    for _ in range(n_fields):
        supp = rng.sample(verts, support)
        fields.append({v: rng.choice(palette) for v in supp})
    return fields


def seeded_dense_fields(graph, model, n_fields, seed):
    import random

    rng = random.Random(seed + 1)
    palette = default_field_palette(model) + [Fraction(0)]
    return [{v: rng.choice(palette) for v in range(graph.n_vertices)}
            for _ in range(n_fields)]


def representative_edge_planes(graph):
    return [lat.edge_plane(axis, Fraction(1, 2)) for axis in range(graph.d)]


def _pair_patterns(graph, diagonals=False):
    o = graph.index(graph.origin())
    pats = [dict()]
    for z in graph.vertices:
        zi = graph.index(z)
        if zi != o:
            pats.append({o: 1, zi: 1})
    if diagonals:
        pats.append({o: 2})
        for z in graph.vertices:
            zi = graph.index(z)
            if zi != o:
                pats.append({o: 2, zi: 2})
    return pats


def run_check(name, graph, model=None, N=None, beta=None, m_max=None,
              fixtures=None, seed=0, n_fields=100, jobs=1, delta=None):
    """Run one named check sweep; returns the report list in canonical order."""
    base = {"model": model, "N": N, "beta": beta,
            "graph": f"T{graph.L}d{graph.d}" if graph.is_torus else "custom"}

    def evaluator():
        ev = Evaluator(graph, model, N=N, beta=beta, m_max=m_max,
                       fixtures=fixtures)
        prefetch_patterns(ev, _pair_patterns(graph), jobs=jobs)
        return ev

    if name == "site-monotonicity":
        return check_site_monotonicity(evaluator(), instance=base)
    if name == "convexity":
        ev = evaluator()
        reports = []
        for z in graph.vertices:
            if all(c == 0 for c in z):
                continue
            for axis in range(graph.d):
                for q in range(0, graph.L):
                    reports.extend(check_convexity(ev, z, axis, q,
                                                   instance=base))
        return reports
    if name == "all-sites-monotone":
        ev = evaluator()
        reports = []
        for axis in range(graph.d):
            reports.extend(check_all_sites_monotone(ev, axis, instance=base))
        return reports
    if name == "rp-edge":
        ev = evaluator()
        heavy = ev.backend == "transfer" and graph.L >= 6
        reports = []
        for plane in representative_edge_planes(graph):
            fam = monomial_family(graph, plane, degree2=not heavy,
                                  with_const=not heavy)
            for i, f in enumerate(fam):
                for g in fam[i:]:
                    reports.extend(check_rp_edge(ev, plane, f, g,
                                                 instance=base))
        return reports
    if name == "rp-field":
        ev = evaluator()
        reports = []
        fields = seeded_fields(graph, model, n_fields, seed)
        for plane in representative_edge_planes(graph):
            for k, h in enumerate(fields):
                inst = dict(base, field=k)
                reports.append(check_field_inequality(ev, plane, h, inst))
        return reports
    if name == "rp-z2":
        ev = evaluator()
        reports = []
        fields = seeded_dense_fields(graph, model, n_fields, seed)
        for plane in representative_edge_planes(graph):
            for k, h in enumerate(fields):
                inst = dict(base, field=k)
                reports.append(check_z2_inequality(ev, plane, h, inst))
        return reports
    if name == "spin-monotonicity":
        return check_spin_monotonicity(graph, N, beta, instance=base)
    if name == "positivity-implications":
        deltas = [delta] if delta is not None else [0.01, 0.05, 0.1, 0.2]
        reports = []
        for dl in deltas:
            reports.extend(check_positivity_implications(graph, N, beta, dl,
                                                         instance=base))
        return reports
    if name == "dimer-bound":
        return check_dimer_bound(graph, instance=base)
    raise ValueError(f"unknown check {name!r}")


CHECK_NAMES = ("site-monotonicity", "convexity", "all-sites-monotone",
               "rp-edge", "rp-field", "rp-z2", "spin-monotonicity",
               "positivity-implications", "dimer-bound")


def summarize(reports):
    counts = {}
    for r in reports:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    return counts


# -- dimer bound ---------------------------------------------------------------


def check_dimer_bound(graph, instance=None):
    """Monomer-monomer bound G(o,z) <= G(o,e1) = 1/(2d), vanishing at even
    distance, and the cover-count ratio corollary."""
    base = dict(instance or {}, model="dimer")
    d = graph.d
    o = graph.vertices[graph.index(graph.origin())]
    base_count = oracles.dimer_count(graph)
    reports = []
    ge1 = Fraction(oracles.dimer_count(graph, (o, graph.axis_vertex(1, 0))),
                   base_count)
    reports.append(eq_report("dimer-bound", "neighbour-value", dict(base),
                             ge1, Fraction(1, 2 * d)))
    for z in graph.vertices:
        if z == o:
            continue
        gz = Fraction(oracles.dimer_count(graph, (o, z)), base_count)
        inst = dict(base, z=z)
        reports.append(ineq_report("dimer-bound", "neighbour-dominance",
                                   inst, gz, ge1))
        dist = sum(graph.torus_abs(c) for c in z)
        if dist % 2 == 0:
            reports.append(eq_report("dimer-bound", "even-distance-zero",
                                     inst, gz, Fraction(0)))
        reports.append(ineq_report("dimer-bound", "count-ratio-corollary",
                                   inst, gz,
                                   Fraction(graph.L ** (2 * d), 8 * d)))
    return reports
