"""Command-line front end.

Subcommands:
  two-point       G(x, y) for one vertex pair
  table           G(o, z) for all z with ||z||_inf <= L/2
  check NAME      run a named inequality sweep over the configured instance
  oracle-compare  path-ensemble values against the direct model oracles

Exit codes: 0 all checks pass (or pure computation succeeded), 1 at least
one check failed, 2 configuration error.  Output is deterministic byte for
byte for a fixed configuration, independent of --jobs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import checks, lattice, oracles
from .engine import Evaluator, load_fixtures
from .weights import BUILTIN_MODELS


class ConfigError(ValueError):
    pass


def fmt_value(v):
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else \
            f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def parse_vertex(text):
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad vertex {text!r}: comma-separated integers") from exc


def build_parser():
    p = argparse.ArgumentParser(prog="randpath",
                                description="exact path-ensemble computations and checks")
    p.add_argument("--config", help="JSON file with defaults for all flags")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--model", choices=BUILTIN_MODELS)
        sp.add_argument("--N", type=int)
        sp.add_argument("--beta", type=Fraction)
        sp.add_argument("--m-max", dest="m_max", type=int)
        sp.add_argument("--d", type=int)
        sp.add_argument("--L", type=int)
        sp.add_argument("--graph", help="JSON graph file instead of a torus")
        sp.add_argument("--fixtures", help="precomputed value table (JSON)")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", help="write results to a file instead of stdout")

    sp = sub.add_parser("two-point", help="two-point function between two vertices")
    common(sp)
    sp.add_argument("--from", dest="src", required=True)
    sp.add_argument("--to", dest="dst", required=True)

    sp = sub.add_parser("table", help="two-point table around the origin")
    common(sp)

    sp = sub.add_parser("check", help="run a named check sweep")
    common(sp)
    sp.add_argument("name", choices=checks.CHECK_NAMES)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n-fields", dest="n_fields", type=int, default=100)
    sp.add_argument("--delta", type=float)

    sp = sub.add_parser("oracle-compare", help="path values vs direct oracles")
    common(sp)
    return p


def load_config(args):
    if args.config:
        with open(args.config) as fh:
            defaults = json.load(fh)
        for key, val in defaults.items():
            attr = key.replace("-", "_")
            if getattr(args, attr, None) in (None, False) or \
                    (attr == "jobs" and args.jobs == 1):
                if attr == "beta":
                    val = Fraction(val)
                setattr(args, attr, val)
    return args


def make_graph(args):
    if args.graph:
        with open(args.graph) as fh:
            return lattice.from_json(fh.read())
    if args.d is None or args.L is None:
        raise ConfigError("need --d and --L (or --graph FILE)")
    try:
        return lattice.build_torus(args.d, args.L)
    except lattice.LatticeError as exc:
        raise ConfigError(str(exc)) from exc


def make_evaluator(args, graph):
    if not args.model:
        raise ConfigError("--model is required")
    if args.model == "perm" and args.beta is None:
        raise ConfigError("perm model requires --beta")
    if args.model == "ddimer":
        args.beta = Fraction(1)
    if args.beta is None:
        raise ConfigError("--beta is required")
    fixtures = load_fixtures(args.fixtures) if args.fixtures else None
    try:
        return Evaluator(graph, args.model, N=args.N, beta=args.beta,
                         m_max=args.m_max, fixtures=fixtures)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def emit(text, args):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_two_point(args):
    graph = make_graph(args)
    ev = make_evaluator(args, graph)
    x = parse_vertex(args.src)
    y = parse_vertex(args.dst)
    if graph.is_torus:
        x, y = graph.wrap(x), graph.wrap(y)
    res = ev.g(graph.index(x), graph.index(y))
    emit(fmt_value(res.value) + "\n", args)
    return 0


def cmd_table(args):
    graph = make_graph(args)
    if not graph.is_torus:
        raise ConfigError("table output needs a torus")
    ev = make_evaluator(args, graph)
    checks.prefetch_patterns(ev, checks._pair_patterns(graph), jobs=args.jobs)
    rows = []
    for z in graph.vertices:
        if graph.torus_norm_inf(z) > graph.L / 2:
            continue
        res = ev.g_origin(z)
        rows.append((",".join(str(c) for c in z), fmt_value(res.value)))
    if args.format == "json":
        text = json.dumps(dict(rows), indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["z", "G"])
        w.writerows(rows)
        text = buf.getvalue()
    emit(text, args)
    return 0


def reports_to_csv(reports):
    keys = sorted({k for r in reports for k in r.instance})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "rule"] + keys + ["lhs", "rhs", "slack", "tolerance",
                                           "verdict", "note"])
    for r in reports:
        d = r.as_dict()
        w.writerow([d["check"], d["rule"]] +
                   [d["instance"].get(k, "") for k in keys] +
                   [d["lhs"], d["rhs"], d["slack"], d["tolerance"],
                    d["verdict"], d["note"]])
    return buf.getvalue()


def reports_to_jsonl(reports):
    return "".join(json.dumps(r.as_dict(), sort_keys=True) + "\n"
                   for r in reports)


def cmd_check(args):
    graph = make_graph(args)
    fixtures = load_fixtures(args.fixtures) if args.fixtures else None
    if args.name in ("spin-monotonicity", "positivity-implications"):
        if args.N is None or args.beta is None:
            raise ConfigError(f"{args.name} needs --N and --beta")
        reports = checks.run_check(args.name, graph, model="spin", N=args.N,
                                   beta=args.beta, seed=args.seed,
                                   n_fields=args.n_fields, jobs=args.jobs,
                                   delta=args.delta)
    elif args.name == "dimer-bound":
        reports = checks.run_check(args.name, graph)
    else:
        if not args.model:
            raise ConfigError("--model is required")
        if args.model == "ddimer":
            args.beta = Fraction(1)
        if args.model == "perm" and args.beta is None:
            raise ConfigError("perm model requires --beta")
        if args.beta is None:
            raise ConfigError("--beta is required")
        reports = checks.run_check(args.name, graph, model=args.model,
                                   N=args.N, beta=args.beta, m_max=args.m_max,
                                   fixtures=fixtures, seed=args.seed,
                                   n_fields=args.n_fields, jobs=args.jobs)
    reports.sort(key=lambda r: json.dumps(r.as_dict(), sort_keys=True))
    text = reports_to_jsonl(reports) if args.format == "json" \
        else reports_to_csv(reports)
    counts = checks.summarize(reports)
    summary = "summary: " + " ".join(f"{k}={v}" for k, v in sorted(counts.items())) + "\n"
    emit(text + summary, args)
    return 1 if counts.get("fail") else 0


def cmd_oracle_compare(args):
    graph = make_graph(args)
    ev = make_evaluator(args, graph)
    model = args.model
    rows = []
    verts = list(range(graph.n_vertices))
    o = verts[0]
    for z in verts[1:]:
        path_val = ev.g(o, z).value
        if model == "loop":
            oracle = oracles.loop_model_correlation(graph, args.N or 1,
                                                    args.beta, (o, z))
        elif model == "perm":
            oracle = oracles.permutation_correlation(graph, args.beta, (o, z))
        elif model == "ddimer":
            oracle = oracles.double_dimer_correlation(graph, o, z)
        else:
            val, err = oracles.spin_correlation(graph, args.N or 1,
                                                float(args.beta), (o, z))
            oracle = val
        diff = abs(float(path_val) - float(oracle))
        rows.append((str(graph.vertices[o]), str(graph.vertices[z]),
                     fmt_value(path_val), fmt_value(oracle), f"{diff:.3e}"))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["from", "to", "path_model", "oracle", "abs_diff"])
    w.writerows(rows)
    emit(buf.getvalue(), args)
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2
    try:
        args = load_config(args)
        if args.command == "two-point":
            return cmd_two_point(args)
        if args.command == "table":
            return cmd_table(args)
        if args.command == "check":
            return cmd_check(args)
        if args.command == "oracle-compare":
            return cmd_oracle_compare(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
