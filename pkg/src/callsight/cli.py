"""Command line interface.

Three subcommands: ``analyze`` builds a call graph for one scenario,
``score`` compares a generated graph against a ground truth, and ``reach``
reports call chains from entry functions to target functions.  Exit code 0
means success, 1 a configuration error, and 2 an analysis completed with
errors (partial output is still written).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .callgraph import emit, load_adjacency, score, vuln_chains
from .driver import Mode, ScenarioConfig, run_scenario
from .errors import ConfigurationError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="callsight",
        description="Application-centered call graph construction for Python",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="construct a call graph")
    analyze.add_argument("--mode", choices=[m.value for m in Mode], default="aa")
    analyze.add_argument("--app-root", required=True, type=Path)
    analyze.add_argument("--lib-root", action="append", default=[], type=Path)
    analyze.add_argument("--entry", action="append", default=[], metavar="QUALNAME")
    analyze.add_argument("--builtin-table", type=Path, default=None)
    analyze.add_argument("-o", "--output", required=True, type=Path)
    analyze.add_argument("--format", choices=["adjacency", "edges"], default="adjacency")
    analyze.add_argument("--figure", type=Path, default=None,
                         help="also render the graph to this image file")
    analyze.add_argument("-v", "--verbose", action="store_true")

    score_cmd = sub.add_parser("score", help="precision/recall against a ground truth")
    score_cmd.add_argument("--gen", required=True, type=Path)
    score_cmd.add_argument("--gt", required=True, type=Path)
    score_cmd.add_argument("--figure", type=Path, default=None)

    reach = sub.add_parser("reach", help="call chains from entries to targets")
    reach.add_argument("--cg", required=True, type=Path)
    reach.add_argument("--entry", action="append", required=True, metavar="QUALNAME")
    reach.add_argument("--target", action="append", required=True, metavar="QUALNAME")

    return parser


def _cmd_analyze(args: argparse.Namespace) -> int:
    cfg = ScenarioConfig(
        mode=Mode(args.mode),
        app_root=args.app_root,
        lib_roots=tuple(args.lib_root),
        entries=tuple(args.entry),
        builtin_table=args.builtin_table,
    )
    result = run_scenario(cfg)
    payload = emit(result.callgraph, args.format)
    try:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_bytes(payload)
    except OSError as exc:
        raise ConfigurationError(f"cannot write {args.output}: {exc}") from exc
    if args.figure is not None:
        from .report import render_call_graph

        render_call_graph(
            result.callgraph.adjacency(), args.figure, title=f"{args.mode} call graph"
        )
    if args.verbose:
        counters = result.analysis.counters
        print(
            f"nodes={len(result.callgraph.nodes)} edges={len(result.callgraph.edges)} "
            f"sessions={counters['sessions']} rules={counters['rule_applications']} "
            f"cache_hits={counters['cache_hits']}",
            file=sys.stderr,
        )
        for warning in result.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        for diag in result.analysis.diagnostics:
            print(diag.render(), file=sys.stderr)
    return 2 if result.had_analysis_errors else 0


def _cmd_score(args: argparse.Namespace) -> int:
    gen = load_adjacency(args.gen)
    gt = load_adjacency(args.gt)
    report = score(gen, gt)
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    if args.figure is not None:
        from .report import render_metrics

        render_metrics(report, args.figure, title="call graph accuracy")
    return 0


def _cmd_reach(args: argparse.Namespace) -> int:
    graph = load_adjacency(args.cg)
    reports = vuln_chains(graph, list(args.entry), list(args.target))
    print(json.dumps([r.as_dict() for r in reports], indent=2, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "score":
            return _cmd_score(args)
        if args.command == "reach":
            return _cmd_reach(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
