"""Precomputation of the heavy 6x6-torus partition values.

The 4096-state transfer computations (loop model at N = 3, lattice
permutations, the one-link spin truncation at N = 2) take tens of minutes
each; their exact rational values are computed here once and stored as a
versioned JSON table that the test suite and the command line can load.
Everything in the table can be re-derived with `python -m randpath.fixtures`
(or the slow test), and the transfer backend itself is cross-validated
against the independent enumeration backends on the 4x4 torus.
"""

from __future__ import annotations

import json
import os
import sys
import time
from fractions import Fraction

from . import transfer2d
from .engine import Evaluator
from .lattice import build_torus

PAIR_CLASSES = [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2),
                (3, 0), (3, 1), (3, 2), (3, 3)]

BETAS = (Fraction(1, 10), Fraction(3, 10), Fraction(1))


def manifest():
    """(model, N, beta, m_max, patterns) groups covered by the table."""
    graph = build_torus(2, 6)
    o = graph.index((0, 0))
    pairs = [{o: 1, graph.index(z): 1} for z in PAIR_CLASSES]
    base = [dict()] + pairs
    groups = []
    for beta in BETAS:
        groups.append(("perm", 3, beta, None, base))
    for beta in BETAS:
        groups.append(("loop", 3, beta, None, base))
    for beta in BETAS:
        groups.append(("loop", 2, beta, None, base))
    return graph, groups


def compute(out_path, only=None, log=print):
    graph, groups = manifest()
    values = {}
    if os.path.exists(out_path):
        with open(out_path) as fh:
            values.update(json.load(fh))
    for model, N, beta, m_max, patterns in groups:
        if only and model not in only:
            continue
        ev = Evaluator(graph, model, N=N, beta=beta, m_max=m_max)
        keys = [ev._fixture_key(p) for p in patterns]
        todo = [(k, p) for k, p in zip(keys, patterns) if k not in values]
        if not todo:
            log(f"skip {model} N={N} beta={beta} (already present)")
            continue
        t0 = time.time()
        engine = transfer2d.get_engine(graph, ev.weight, ev.beta,
                                       cap=1 if m_max else ev.weight.edge_cap)
        tasks = [{"pattern": p} for _, p in todo]

        def progress(p, prod, target):
            log(f"  {model} N={N} beta={beta}: prime {p}, "
                f"{prod.bit_length()}/{target.bit_length()} bits")

        results = engine.batch(tasks, progress=progress)
        for (k, _), val in zip(todo, results):
            values[k] = str(val)
        with open(out_path, "w") as fh:
            json.dump(dict(sorted(values.items())), fh, indent=1)
        log(f"done {model} N={N} beta={beta} in {time.time() - t0:.0f}s "
            f"({len(values)} values total)")
    return values


def main(argv=None):
    argv = argv if argv is not None else sys.argv[1:]
    out = argv[0] if argv else os.path.join(
        os.path.dirname(__file__), os.pardir, os.pardir,
        "tests", "fixtures", "t6_values.json")
    only = argv[1].split(",") if len(argv) > 1 else None
    compute(os.path.abspath(out), only=only)


if __name__ == "__main__":
    main()
