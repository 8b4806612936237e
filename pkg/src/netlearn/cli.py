"""Command-line harness.

Subcommands:
  check-topology    connectivity / L-connectivity / diameter of a graph
  graph-distance    dyadic rooted-ball distance between two rooted graphs
  simulate          run an ensemble from a config file
  verify-invariants run the built-in invariant suites

Exit codes: 0 success, 1 check failed (e.g. invariant violation), 2 usage or
input error (e.g. graph not strongly connected where required).
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, dynamics, graphs
from .config import load_config
from .invariants import SCOPES, run_scope

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _load_graph(arg: str):
    """A family spec like ``dicycle(6)`` or a path to an edge-list file."""
    try:
        return graphs.generate(graphs.parse_family_string(arg))
    except ValueError:
        pass
    with open(arg) as f:
        return graphs.from_edge_list_text(f.read())


def cmd_check_topology(args) -> int:
    try:
        g = _load_graph(args.graph)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    sc = graphs.is_strongly_connected(g)
    out = {"n": g.n, "edges": len(g.edges), "strongly_connected": sc}
    if sc:
        dist = graphs.all_pairs_distances(g)
        out["l_connectivity"] = graphs.min_l_connectivity(g)
        out["diameter"] = max(max(row) for row in dist)
        out["max_out_degree"] = graphs.out_degree_bound(g)
    print(json.dumps(out, indent=2))
    return EXIT_OK if sc else EXIT_USAGE


def cmd_graph_distance(args) -> int:
    try:
        g1 = _load_graph(args.graph1)
        g2 = _load_graph(args.graph2)
        value, truncated = graphs.rooted_distance(
            g1, args.root1, g2, args.root2, args.r_max)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps({"distance": value, "truncated": truncated,
                      "r_max": args.r_max}, indent=2))
    return EXIT_OK


def _chunk_tally(payload):
    """Worker: run a batch of replicates.  Top-level so it pickles."""
    cfg_path, overrides, indices = payload
    rc = load_config(cfg_path, overrides)
    g = rc.build_graph()
    m = rc.build_signal_model()
    prof = rc.build_profile(g, m)
    return dynamics.run_tally(g, m, prof, rc.sim, indices)


def cmd_simulate(args) -> int:
    overrides = {"sim": {"seed": args.seed}}
    try:
        rc = load_config(args.config, overrides)
        g = rc.build_graph()
        m = rc.build_signal_model()
        prof = rc.build_profile(g, m)
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    keep = bool(args.trace_csv or rc.trace_csv)
    if args.workers > 1 and not keep:
        chunks = np.array_split(np.arange(rc.sim.replicates), args.workers)
        payloads = [(args.config, overrides, [int(i) for i in c])
                    for c in chunks if len(c)]
        tally = dynamics.EnsembleTally(g.n)
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            for part in ex.map(_chunk_tally, payloads):
                tally.merge(part)
        report = dynamics.report_from_tally(tally, rc.sim, g.family_tag)
        traces = None
    else:
        report, traces = dynamics.run_ensemble(g, m, prof, rc.sim,
                                               keep_traces=keep)

    payload = report.to_dict()
    payload["version"] = __version__
    text = json.dumps(payload, indent=2)
    out_json = args.out or rc.report_json
    if out_json:
        with open(out_json, "w") as f:
            f.write(text + "\n")
    if args.format == "json" or not out_json:
        print(text)
    else:
        print(f"learning_freq={report.learning_freq:.4f} "
              f"agreement_freq={report.agreement_freq:.4f} "
              f"replicates={report.replicates}")
    csv_path = args.trace_csv or rc.trace_csv
    if csv_path and traces is not None:
        roles = _role_map(g)
        dynamics.write_trace_csv(csv_path, traces, roles)
    return EXIT_OK


def _role_map(g):
    if g.family_tag == "royal_family":
        royals, public = graphs.royal_family_roles(g)
        return {**{v: "royal" for v in royals},
                **{v: "public" for v in public}}
    if g.family_tag == "mad_king":
        from .strategies import mad_king_roles_of
        r = mad_king_roles_of(g)
        roles = {r.king: "king", r.regent: "regent"}
        roles.update({v: "court" for v in r.court})
        roles.update({v: "bureaucracy" for v in r.bureaucracy})
        roles.update({v: "person" for v in r.people})
        return roles
    return None


def cmd_verify_invariants(args) -> int:
    try:
        results = run_scope(args.scope, args.seed)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    failures = 0
    for name, ok, detail in results:
        mark = "ok  " if ok else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        print(f"{mark} {name}{suffix}")
        failures += not ok
    print(f"{len(results) - failures}/{len(results)} invariants hold")
    return EXIT_OK if failures == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="netlearn",
        description="Simulators and diagnostics for repeated learning games "
                    "on directed networks.")
    p.add_argument("--version", action="version",
                   version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check-topology",
                       help="connectivity and L-connectivity report")
    c.add_argument("graph", help="family spec like 'dicycle(6)' or an "
                                 "edge-list file path")
    c.set_defaults(fn=cmd_check_topology)

    d = sub.add_parser("graph-distance",
                       help="dyadic rooted-ball distance between two graphs")
    d.add_argument("graph1")
    d.add_argument("root1", type=int)
    d.add_argument("graph2")
    d.add_argument("root2", type=int)
    d.add_argument("--r-max", type=int, default=8)
    d.set_defaults(fn=cmd_graph_distance)

    s = sub.add_parser("simulate", help="run an ensemble from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int, default=None,
                   help="override the config's master seed")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default=None, help="report JSON path")
    s.add_argument("--trace-csv", default=None,
                   help="also write per-round actions to CSV")
    s.add_argument("--format", choices=("json", "summary"), default="json")
    s.set_defaults(fn=cmd_simulate)

    v = sub.add_parser("verify-invariants",
                       help="run built-in invariant suites")
    v.add_argument("--scope", default="all",
                   choices=SCOPES + ("all",))
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=cmd_verify_invariants)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
