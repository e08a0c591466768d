"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bounds as bounds_mod
from . import harness, policies as pol, workloads as wl
from .core import PagingError
from .graphs import ExtendedAccessGraph


def _load_config(args) -> harness.ExperimentConfig:
    config = harness.ExperimentConfig.load(args.config)
    if args.out:
        config.out_dir = args.out
    if args.seed is not None:
        config.seeds = [args.seed]
    if args.format:
        config.format = args.format
    return config


def cmd_run(args) -> int:
    config = _load_config(args)
    report = harness.run(config)
    print(report.summary_json(), end="")
    return 0


def cmd_compare(args) -> int:
    config = _load_config(args)
    report = harness.compare(config)
    for row in report.summary["pivot"]:
        print(json.dumps(row, sort_keys=True))
    return 0


def cmd_adversary(args) -> int:
    if args.generator == "cycle_walk":
        out = wl.cycle_walk(args.k, args.rounds)
    elif args.generator == "example2":
        out = wl.example2(args.k, args.phases)
    elif args.generator == "hole_adversary":
        victim = pol.create_policy(args.victim, args.k, args.seed)
        out = wl.deterministic_hole_adversary(victim, args.k, args.f, args.phases)
    elif args.generator == "halving_adversary":
        out = wl.randomized_halving_adversary(args.k, args.f, args.phases, args.seed)
    else:
        raise PagingError(f"unknown generator {args.generator!r}")
    wl.write_bundle(out, args.out, extra_meta={"seed": args.seed})
    print(f"bundle written to {args.out}")
    return 0


def cmd_bounds(args) -> int:
    graph = ExtendedAccessGraph.load(args.graph)
    report = bounds_mod.vine_search(graph, args.k)
    text = json.dumps(report.to_json_dict(), sort_keys=True, indent=2)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "bounds.json"), "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def cmd_verify(args) -> int:
    result = harness.verify(args.suite)
    text = json.dumps(result, sort_keys=True, indent=2)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"verify_{args.suite}.json"), "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if result["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paginglab", description="competitive-paging laboratory"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (("run", cmd_run), ("compare", cmd_compare)):
        p = sub.add_parser(name, help=f"{name} an experiment config")
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="replace the config's seed list")
        p.add_argument("--format", choices=["csv", "json"])
        p.set_defaults(fn=fn)

    p = sub.add_parser("adversary", help="generate a workload bundle")
    p.add_argument("--generator", required=True, choices=harness.GENERATORS)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--f", type=int, default=0)
    p.add_argument("--phases", type=int, default=4)
    p.add_argument("--rounds", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--victim", default="dto")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_adversary)

    p = sub.add_parser("bounds", help="lower-bound report for a graph")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("verify", help="run a named invariant suite")
    p.add_argument("--suite", required=True, choices=sorted(harness.VERIFY_SUITES))
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PagingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
