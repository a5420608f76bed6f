"""Command-line front end.

Every run prints one JSON record per result on stdout; diagnostics go to
stderr.  Exit codes: 0 success, 2 usage error, 3 infeasible or bound
exceeded, 4 input/output error (unreadable or malformed files).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import NetworkError, validate_network
from .exact import Exceeded, StateLimitExceeded, heuristic_extension, nsw_pipeline
from .extension import InvalidExtension, read_extension
from .generate import contract_shortest, gen_network, level, sample_costs
from .ilp import check_assignment, emit_ilp, encode_extension
from .newick import (CostError, ResultRecord, digest, parse_costs, parse_enewick,
                     serialize_costs, serialize_enewick, unit_costs)
from .oracles import (TooManySwitchings, TooManyTaxa, TooManyVertices, brute_budgeted,
                      brute_pd_max, brute_pd_min, exhaustive_nsw)
from .pd import ExtensionMismatch, compute_min_tree_pd, solve_b_map_pd, solve_b_maxtree_pd

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_net(args):
    text = _read(args.net)
    dag, labels = parse_enewick(text)
    return validate_network(dag, labels, strict=getattr(args, "strict", False)), text


def _load_costs(args, net):
    if getattr(args, "unit_costs", False):
        costs = unit_costs(net)
        return costs, "unit"
    if not getattr(args, "costs", None):
        raise UsageError("give --costs FILE or --unit-costs")
    text = _read(args.costs)
    return parse_costs(text, net), text


def _load_dag(args):
    """A bare DAG suffices for width computations; network rules are not enforced."""
    text = _read(args.net)
    dag, _ = parse_enewick(text)
    return dag, text


def _budget(args, costs) -> int:
    total = sum(costs.values())
    if args.budget is not None and args.budget_frac is not None:
        raise UsageError("--budget and --budget-frac are exclusive")
    if args.budget is not None:
        if args.budget < 0:
            raise UsageError("budget must be non-negative")
        return args.budget
    if args.budget_frac is not None:
        if not 0 <= args.budget_frac <= 1:
            raise UsageError("--budget-frac must lie in [0, 1]")
        return math.floor(args.budget_frac * total)
    raise UsageError("give --budget or --budget-frac")


def _extension(args, net):
    if getattr(args, "extension", None):
        return read_extension(net, _read(args.extension))
    return nsw_pipeline(net)[0]


def _taxa_arg(args, net):
    if not args.taxa:
        raise UsageError("--taxa is required")
    taxa = [t.strip() for t in args.taxa.split(",") if t.strip()]
    return net.taxon_set(taxa)


def _emit(rec: ResultRecord, args):
    print(rec.to_json(timings=not getattr(args, "no_timings", False)))


# -- subcommands -----------------------------------------------------------

def cmd_validate(args) -> int:
    text = _read(args.net)
    try:
        dag, labels = parse_enewick(text)
        net = validate_network(dag, labels, strict=args.strict)
    except NetworkError as exc:
        rec = ResultRecord("validate", digest=digest(text),
                           extra={"valid": False, "error": f"{type(exc).__name__}: {exc}"})
        _emit(rec, args)
        return EXIT_INFEASIBLE
    rec = ResultRecord("validate", digest=digest(text), extra={
        "valid": True, "vertices": len(net), "edges": len(net.edges),
        "leaves": len(net.leaves), "reticulations": len(net.reticulations),
        "level": level(net), "strict": net.strict})
    _emit(rec, args)
    return EXIT_OK


def cmd_nsw(args) -> int:
    net, text = _load_dag(args)
    t0 = time.perf_counter()
    if args.heuristic:
        ext, k = heuristic_extension(net)
        if args.upper_bound is not None and k > args.upper_bound:
            raise Exceeded(args.upper_bound)
    else:
        ext, k = nsw_pipeline(net, reduce=not args.no_reduce, upper_bound=args.upper_bound,
                              max_states=args.max_states)
    millis = (time.perf_counter() - t0) * 1000
    extra = {"method": "heuristic" if args.heuristic else "exact", "reduce": not args.no_reduce}
    if args.out:
        Path(args.out).write_text(ext.to_text(), encoding="utf-8")
        extra["extension"] = args.out
    _emit(ResultRecord("nsw", value=k, nsw=k, millis=millis, digest=digest(text), extra=extra), args)
    return EXIT_OK


def cmd_pd(args) -> int:
    net, text = _load_net(args)
    t0 = time.perf_counter()
    ext = _extension(args, net)
    if args.kind == "min":
        taxa = _taxa_arg(args, net)
        value = compute_min_tree_pd(net, taxa, ext)
        millis = (time.perf_counter() - t0) * 1000
        rec = ResultRecord("pd-min", value=value, taxa=sorted(taxa), nsw=ext.width,
                           millis=millis, digest=digest(text, ",".join(sorted(taxa))))
        _emit(rec, args)
        return EXIT_OK
    costs, ctext = _load_costs(args, net)
    budget = _budget(args, costs)
    solver = solve_b_map_pd if args.kind == "map" else solve_b_maxtree_pd
    sol = solver(net, costs, budget, ext, route=args.route)
    millis = (time.perf_counter() - t0) * 1000
    extra = {"route": sol.route, "cost": sum(costs[t] for t in sol.taxa)}
    if sol.witness is not None:
        extra["witness"] = sorted([list(e) for e in sol.witness])
    rec = ResultRecord(f"pd-{args.kind}", value=sol.value, taxa=sorted(sol.taxa),
                       budget=budget, nsw=ext.width, millis=millis,
                       digest=digest(text, ctext, str(budget)), extra=extra)
    _emit(rec, args)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.kind == "nsw":
        dag, text = _load_dag(args)
        t0 = time.perf_counter()
        _, k = exhaustive_nsw(dag, max_vertices=args.max_vertices)
        rec = ResultRecord("oracle-nsw", value=k, nsw=k, digest=digest(text),
                           millis=(time.perf_counter() - t0) * 1000)
    else:
        rec = _oracle_pd(args)
    _emit(rec, args)
    return EXIT_OK


def _oracle_pd(args) -> ResultRecord:
    net, text = _load_net(args)
    t0 = time.perf_counter()
    if args.taxa and args.kind in ("max", "min"):
        taxa = _taxa_arg(args, net)
        fn = brute_pd_max if args.kind == "max" else brute_pd_min
        rec = ResultRecord(f"oracle-{args.kind}", value=fn(net, taxa), taxa=sorted(taxa),
                           digest=digest(text, ",".join(sorted(taxa))))
    elif args.kind == "min":
        raise UsageError("oracle min needs --taxa")
    else:
        costs, ctext = _load_costs(args, net)
        budget = _budget(args, costs)
        value, taxa = brute_budgeted(net, costs, budget, "map" if args.kind == "map" else "maxtree")
        rec = ResultRecord(f"oracle-{args.kind}", value=value, taxa=sorted(taxa), budget=budget,
                           digest=digest(text, ctext, str(budget)))
    rec.millis = (time.perf_counter() - t0) * 1000
    return rec


def cmd_gen(args) -> int:
    net = gen_network(args.leaves, args.reticulations, args.seed)
    if args.contract_frac:
        net = contract_shortest(net, args.contract_frac, args.seed)
    costs = sample_costs(net, args.seed)
    text = serialize_enewick(net)
    ctext = serialize_costs(costs)
    extra = {"leaves": len(net.leaves), "reticulations": len(net.reticulations),
             "level": level(net)}
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{out}.enwk").write_text(text + "\n", encoding="utf-8")
        Path(f"{out}.costs.csv").write_text(ctext, encoding="utf-8")
        extra["files"] = [f"{out}.enwk", f"{out}.costs.csv"]
    else:
        extra["enewick"] = text
    _emit(ResultRecord("gen", seed=args.seed, digest=digest(text, ctext), extra=extra), args)
    return EXIT_OK


def cmd_ilp(args) -> int:
    net, text = _load_dag(args)
    model = emit_ilp(net)
    if args.action == "emit":
        lp = model.to_lp()
        if not args.out:
            sys.stdout.write(lp)
            return EXIT_OK
        Path(args.out).write_text(lp, encoding="utf-8")
        rec = ResultRecord("ilp-emit", digest=digest(text),
                           extra={"file": args.out, "variables": len(model.variables),
                                  "constraints": model.family_counts()})
        _emit(rec, args)
        return EXIT_OK
    if not args.extension:
        raise UsageError("ilp check needs --extension FILE")
    ext = read_extension(net, _read(args.extension))
    ok, bad = check_assignment(model, encode_extension(net, ext))
    rec = ResultRecord("ilp-check", value=ext.width, nsw=ext.width, digest=digest(text),
                       extra={"feasible": ok, "violations": bad})
    _emit(rec, args)
    return EXIT_OK if ok else EXIT_INFEASIBLE


BENCH_HEADER = ["instance", "n_leaves", "level", "nsw", "problem", "budget_frac", "millis", "value"]


def bench(corpus: str | Path, fracs=(0.25, 0.5, 0.9), problems=("nsw", "map", "max")):
    """Time every instance of a corpus; returns (rows, summary rows).

    The corpus holds ``*.enwk`` networks, each optionally paired with a
    ``<name>.costs.csv`` file (unit costs otherwise).  A solver row's time
    covers the solver only; the ``nsw`` row covers the extension.
    """
    rows = []
    for path in sorted(Path(corpus).glob("*.enwk")):
        name = path.name[:-len(".enwk")]
        dag, labels = parse_enewick(path.read_text(encoding="utf-8"))
        net = validate_network(dag, labels)
        cpath = path.with_name(f"{name}.costs.csv")
        costs = parse_costs(cpath.read_text(encoding="utf-8"), net) if cpath.exists() else unit_costs(net)
        lev = level(net)
        t0 = time.perf_counter()
        ext, k = nsw_pipeline(net)
        t_nsw = (time.perf_counter() - t0) * 1000
        base = [name, len(net.leaves), lev, k]
        if "nsw" in problems:
            rows.append(base + ["nsw", "", round(t_nsw, 3), k])
        total = sum(costs.values())
        for prob in problems:
            if prob == "nsw":
                continue
            solver = {"map": solve_b_map_pd, "max": solve_b_maxtree_pd}[prob]
            for f in fracs:
                t0 = time.perf_counter()
                sol = solver(net, costs, math.floor(f * total), ext)
                ms = (time.perf_counter() - t0) * 1000
                rows.append(base + [prob, f, round(ms, 3), str(sol.value)])
    groups: dict[tuple, list[float]] = {}
    for r in rows:
        groups.setdefault((r[1], r[2], r[4], r[5]), []).append(r[6])
    summary = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], str(k[3]))):
        ms = np.array(groups[key])
        q1, q3 = np.percentile(ms, [25, 75])
        summary.append(list(key) + [len(ms), round(float(ms.mean()), 3), round(float(q3 - q1), 3)])
    return rows, summary


def cmd_bench(args) -> int:
    fracs = tuple(float(x) for x in args.fracs.split(","))
    problems = tuple(p.strip() for p in args.problems.split(","))
    for p in problems:
        if p not in ("nsw", "map", "max"):
            raise UsageError(f"unknown problem {p!r}")
    if not Path(args.corpus).is_dir():
        raise FileNotFoundError(args.corpus)
    rows, summary = bench(args.corpus, fracs, problems)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    w.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    sbuf = io.StringIO()
    sw = csv.writer(sbuf, lineterminator="\n")
    sw.writerow(["n_leaves", "level", "problem", "budget_frac", "count", "mean_millis", "iqr_millis"])
    sw.writerows(summary)
    if args.summary:
        Path(args.summary).write_text(sbuf.getvalue(), encoding="utf-8")
    else:
        sys.stderr.write(sbuf.getvalue())
    return EXIT_OK


# -- parser --------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _budget_flags(p):
    p.add_argument("--costs", help="CSV file with taxon,cost lines")
    p.add_argument("--unit-costs", action="store_true", help="every taxon costs 1")
    p.add_argument("--budget", type=int)
    p.add_argument("--budget-frac", type=float, help="budget as a fraction of the total cost")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nswpd", description="Node scanwidth and phylogenetic diversity on networks.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(p, net=True):
        if net:
            p.add_argument("--net", required=True, help="extended Newick file")
            p.add_argument("--strict", action="store_true",
                           help="require reticulations of in-degree exactly 2")
        p.add_argument("--no-timings", action="store_true", help="print millis as null")

    p = sub.add_parser("validate", help="check a network file")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("nsw", help="optimal node-scanwidth extension")
    common(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact search (default)")
    mode.add_argument("--heuristic", action="store_true", help="greedy upper bound only")
    p.add_argument("--no-reduce", action="store_true", help="skip the reduction rules")
    p.add_argument("--upper-bound", type=int)
    p.add_argument("--max-states", type=int, default=5_000_000)
    p.add_argument("--out", help="write the extension here")
    p.set_defaults(func=cmd_nsw)

    p = sub.add_parser("pd", help="diversity solvers")
    p.add_argument("kind", choices=["map", "max", "min"])
    common(p)
    _budget_flags(p)
    p.add_argument("--taxa", help="comma-separated taxa (min)")
    p.add_argument("--extension", help="tree-extension file to reuse")
    p.add_argument("--route", choices=["auto", "dp1", "dp2"], default="auto")
    p.set_defaults(func=cmd_pd)

    p = sub.add_parser("oracle", help="brute-force cross-checks")
    p.add_argument("kind", choices=["nsw", "map", "max", "min"])
    common(p)
    _budget_flags(p)
    p.add_argument("--taxa", help="comma-separated taxa (max/min of a fixed set)")
    p.add_argument("--max-vertices", type=int, default=7)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="random network and costs")
    common(p, net=False)
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--reticulations", type=int, default=0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--contract-frac", type=float, default=0.0)
    p.add_argument("--out", help="output prefix; writes PREFIX.enwk and PREFIX.costs.csv")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ilp", help="ILP export and checking")
    p.add_argument("action", choices=["emit", "check"])
    common(p)
    p.add_argument("--out", help="LP file (emit); stdout if omitted")
    p.add_argument("--extension", help="extension file (check)")
    p.set_defaults(func=cmd_ilp)

    p = sub.add_parser("bench", help="time a corpus")
    common(p, net=False)
    p.add_argument("--corpus", required=True, help="directory of .enwk (+ .costs.csv) files")
    p.add_argument("--fracs", default="0.25,0.5,0.9")
    p.add_argument("--problems", default="nsw,map,max")
    p.add_argument("--out", help="per-instance CSV; stdout if omitted")
    p.add_argument("--summary", help="summary CSV; stderr if omitted")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nswpd: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Exceeded, StateLimitExceeded, TooManySwitchings, TooManyTaxa, TooManyVertices) as exc:
        print(f"nswpd: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, NetworkError, CostError, InvalidExtension, ExtensionMismatch) as exc:
        print(f"nswpd: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"nswpd: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
