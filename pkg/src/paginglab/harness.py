"""Batch experiment runner: wires generators, policies, the offline optimum
and the bound estimators into reproducible runs with stable outputs."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import statistics
import time
from dataclasses import dataclass, field
from typing import Optional

from . import bounds as bounds_mod
from . import policies as pol
from . import workloads as wl
from .core import (
    ContractViolationError,
    PagingError,
    PhaseLedger,
    RequestSequence,
    opt_sandwich,
    partition_phases,
    simulate,
    verify_marking,
)
from .graphs import (
    ExtendedAccessGraph,
    build_phase_tree,
    delta,
    path_graph,
    phase_graph,
    validate_walk,
)


class ConfigError(PagingError):
    pass


_TOP_KEYS = {"workload", "k", "policies", "seeds", "out_dir", "format", "bounds"}
_WORKLOAD_KEYS = {"generator", "params", "sequence_file", "graph_file", "walk_file"}
_POLICY_KEYS = {"name", "params"}

CSV_COLUMNS = [
    "run_id",
    "policy",
    "seed",
    "phase_index",
    "faults",
    "new_pages",
    "belady_faults",
    "ratio",
]


@dataclass
class ExperimentConfig:
    workload: dict
    k: int
    policies: list[dict]
    seeds: list[int]
    out_dir: Optional[str] = None
    format: str = "csv"
    bounds: Optional[dict] = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        unknown = set(raw) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("workload", "k", "policies", "seeds"):
            if key not in raw:
                raise ConfigError(f"missing config key {key!r}")
        workload = raw["workload"]
        if not isinstance(workload, dict):
            raise ConfigError("workload must be an object")
        unknown = set(workload) - _WORKLOAD_KEYS
        if unknown:
            raise ConfigError(f"unknown workload keys: {sorted(unknown)}")
        if not isinstance(raw["k"], int) or raw["k"] < 1:
            raise ConfigError("k must be a positive integer")
        policies = raw["policies"]
        if not isinstance(policies, list) or not policies:
            raise ConfigError("policies must be a non-empty list")
        normalized = []
        for entry in policies:
            if isinstance(entry, str):
                entry = {"name": entry}
            unknown = set(entry) - _POLICY_KEYS
            if unknown:
                raise ConfigError(f"unknown policy keys: {sorted(unknown)}")
            if entry.get("name") not in pol.POLICY_NAMES:
                raise ConfigError(f"unknown policy name {entry.get('name')!r}")
            normalized.append({"name": entry["name"], "params": entry.get("params", {})})
        seeds = raw["seeds"]
        if not isinstance(seeds, list) or not seeds or not all(
            isinstance(s, int) for s in seeds
        ):
            raise ConfigError("seeds must be a non-empty list of integers")
        fmt = raw.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {fmt!r}")
        return cls(
            workload=workload,
            k=raw["k"],
            policies=normalized,
            seeds=list(seeds),
            out_dir=raw.get("out_dir"),
            format=fmt,
            bounds=raw.get("bounds"),
        )

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def canonical_json(self) -> str:
        return json.dumps(
            {
                "workload": self.workload,
                "k": self.k,
                "policies": self.policies,
                "seeds": self.seeds,
            },
            sort_keys=True,
        )

    def run_id(self) -> str:
        return hashlib.sha1(self.canonical_json().encode()).hexdigest()[:12]


GENERATORS = ("cycle_walk", "random_walk", "example2", "hole_adversary", "halving_adversary")


def build_workload(config: ExperimentConfig):
    """Materialize (sequence, graph, walk) from the config's workload spec."""
    spec = config.workload
    if "sequence_file" in spec:
        with open(spec["sequence_file"]) as fh:
            sequence = RequestSequence.from_text(fh.read())
        graph = None
        if spec.get("graph_file"):
            graph = ExtendedAccessGraph.load(spec["graph_file"])
        if spec.get("walk_file"):
            with open(spec["walk_file"]) as fh:
                walk = [int(line) for line in fh.read().split() if line.strip()]
            sequence = RequestSequence(sequence.requests, walk=walk)
        return sequence, graph
    name = spec.get("generator")
    params = dict(spec.get("params", {}))
    if name == "cycle_walk":
        out = wl.cycle_walk(**params)
    elif name == "example2":
        out = wl.example2(**params)
    elif name == "halving_adversary":
        out = wl.randomized_halving_adversary(**params)
    elif name == "hole_adversary":
        victim_name = params.pop("victim", "dto")
        victim = pol.create_policy(victim_name, params.get("k", config.k))
        out = wl.deterministic_hole_adversary(victim, **params)
    elif name == "random_walk":
        graph = ExtendedAccessGraph.load(params.pop("graph_file"))
        sequence = wl.random_walk(graph, **params)
        return sequence, graph
    else:
        raise ConfigError(f"unknown workload generator {name!r}")
    return out.sequence, out.graph


@dataclass
class ExperimentReport:
    run_id: str
    k: int
    rows: list[dict]
    summary: dict
    failure: Optional[str] = None

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row)
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(
            {"run_id": self.run_id, "k": self.k, "summary": self.summary,
             "failure": self.failure},
            sort_keys=True,
            indent=2,
        ) + "\n"


def _instantiate(entry: dict, config: ExperimentConfig, seed: int, graph, sequence):
    start_vertex = sequence.walk[0] if sequence.walk else None
    return pol.create_policy(
        entry["name"], config.k, seed, entry.get("params"), graph, start_vertex
    )


def run(config: ExperimentConfig) -> ExperimentReport:
    """Execute every policy x seed cell; deterministic given the config."""
    sequence, graph = build_workload(config)
    k = config.k
    ledger = partition_phases(sequence, k)
    belady_trace = pol.belady(sequence, k)
    sandwich = opt_sandwich(ledger)
    run_id = config.run_id()
    rows: list[dict] = []
    per_policy: dict[str, list[dict]] = {}
    failure = None

    for entry in config.policies:
        name = entry["name"]
        for seed in config.seeds:
            if name == "belady":
                trace = belady_trace
            else:
                policy = _instantiate(entry, config, seed, graph, sequence)
                try:
                    trace = simulate(policy, sequence, k, seed)
                except ContractViolationError as exc:
                    failure = f"{name} seed {seed}: {exc}"
                    break
            ratio = (
                trace.total_faults / belady_trace.total_faults
                if belady_trace.total_faults
                else None
            )
            for phase_index, faults in enumerate(trace.faults_per_phase):
                rows.append(
                    {
                        "run_id": run_id,
                        "policy": name,
                        "seed": seed,
                        "phase_index": phase_index,
                        "faults": faults,
                        "new_pages": ledger.new_pages[phase_index],
                        "belady_faults": belady_trace.faults_per_phase[phase_index],
                        "ratio": "" if ratio is None else f"{ratio:.6f}",
                    }
                )
            per_policy.setdefault(name, []).append(
                {
                    "seed": seed,
                    "total_faults": trace.total_faults,
                    "faults_per_phase": trace.faults_per_phase,
                    "ratio": ratio,
                }
            )
        if failure:
            break

    summary = {
        "belady_faults": belady_trace.total_faults,
        "opt_sandwich": {"lower": sandwich[0], "upper": sandwich[1]},
        "phases": ledger.phase_count,
        "policies": {},
    }
    for name, cells in per_policy.items():
        totals = [c["total_faults"] for c in cells]
        ratios = [c["ratio"] for c in cells if c["ratio"] is not None]
        summary["policies"][name] = {
            "mean_faults": statistics.fmean(totals),
            "stdev_faults": statistics.pstdev(totals) if len(totals) > 1 else 0.0,
            "mean_ratio": statistics.fmean(ratios) if ratios else None,
            "stdev_ratio": statistics.pstdev(ratios) if len(ratios) > 1 else 0.0,
            "mean_faults_per_phase": statistics.fmean(
                [statistics.fmean(c["faults_per_phase"]) for c in cells]
            ),
        }
    report = ExperimentReport(run_id, k, rows, summary, failure)
    if config.out_dir:
        write_report(report, config)
    if failure:
        raise ContractViolationError(-1, failure)
    return report


def write_report(report: ExperimentReport, config: ExperimentConfig) -> None:
    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    if config.format == "csv":
        with open(os.path.join(out_dir, "results.csv"), "w") as fh:
            fh.write(report.csv_text())
    else:
        with open(os.path.join(out_dir, "results.json"), "w") as fh:
            json.dump(report.rows, fh, sort_keys=True, indent=2)
            fh.write("\n")
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        fh.write(report.summary_json())
    meta = {
        "run_id": report.run_id,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": json.loads(config.canonical_json()),
        "failure": report.failure,
    }
    with open(os.path.join(out_dir, "meta.json"), "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")


def compare(config: ExperimentConfig) -> ExperimentReport:
    """run() plus a policy x metric pivot table (and optional bound columns)."""
    report = run(config)
    pivot: list[dict] = []
    bound_report = None
    if config.bounds and config.bounds.get("graph_file"):
        graph = ExtendedAccessGraph.load(config.bounds["graph_file"])
        bound_report = bounds_mod.vine_search(graph, config.k)
    for name, stats in sorted(report.summary["policies"].items()):
        row = {
            "policy": name,
            "mean_faults": round(stats["mean_faults"], 3),
            "mean_faults_per_phase": round(stats["mean_faults_per_phase"], 3),
            "mean_ratio": None
            if stats["mean_ratio"] is None
            else round(stats["mean_ratio"], 4),
        }
        if bound_report is not None:
            row["det_lower"] = round(bound_report.det_lower, 4)
            row["rand_lower"] = round(bound_report.rand_lower, 4)
        pivot.append(row)
    report.summary["pivot"] = pivot
    if config.out_dir:
        with open(os.path.join(config.out_dir, "compare.json"), "w") as fh:
            json.dump(pivot, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return report


# -- verification suites ------------------------------------------------------


def _random_instance(rng):
    length = rng.randint(4, 16)
    distinct = rng.randint(2, 7)
    k = rng.randint(1, 4)
    requests = [rng.randint(1, distinct) for _ in range(length)]
    return requests, k


def verify_oracle(trials: int = 1000, seed: int = 2024) -> dict:
    import random

    rng = random.Random(seed)
    mismatches = 0
    sandwich_violations = 0
    for _ in range(trials):
        requests, k = _random_instance(rng)
        exact = bounds_mod.brute_force_opt(requests, k)
        measured = pol.belady(requests, k).total_faults
        if exact != measured:
            mismatches += 1
        lower, upper = opt_sandwich(partition_phases(requests, k))
        if not (lower <= exact <= upper):
            sandwich_violations += 1
    return {
        "suite": "oracle",
        "trials": trials,
        "mismatches": mismatches,
        "sandwich_violations": sandwich_violations,
        "passed": mismatches == 0 and sandwich_violations == 0,
    }


def _random_graph(rng, n: int) -> ExtendedAccessGraph:
    labels = {i: i for i in range(1, n + 1)}
    edges = [(i, i + 1) for i in range(1, n)]
    extra = rng.randint(0, n)
    for _ in range(extra):
        u, v = rng.sample(range(1, n + 1), 2)
        edges.append((min(u, v), max(u, v)))
    return ExtendedAccessGraph(labels, edges)


def verify_marking_suite(workloads: int = 200, seed: int = 2024) -> dict:
    import random

    rng = random.Random(seed)
    failures = []
    for i in range(workloads):
        k = rng.choice([4, 6, 8])
        n = k + rng.randint(2, k)
        graph = _random_graph(rng, n)
        sequence = wl.random_walk(graph, length=16 * k, seed=rng.randrange(2**32))
        ledger = partition_phases(sequence, k)
        for name in ("rmark", "rto", "dto"):
            policy = pol.create_policy(name, k, seed=i)
            trace = simulate(policy, sequence, k, seed=i)
            if not verify_marking(trace, ledger):
                failures.append(f"{name} on workload {i}")
            if any(f > k for f in trace.faults_per_phase):
                failures.append(f"{name} exceeded k faults in a phase ({i})")
        # maxfar needs a path graph carrying exactly k+1 labels
        path_labels = list(range(1, k + 2)) + [
            rng.randint(1, k + 1) for _ in range(rng.randint(0, k))
        ]
        pgraph = path_graph(path_labels)
        psequence = wl.random_walk(pgraph, length=16 * k, seed=rng.randrange(2**32))
        pledger = partition_phases(psequence, k)
        policy = pol.maxfar(pgraph, psequence.walk[0], k)
        trace = simulate(policy, psequence, k, seed=i)
        if not verify_marking(trace, pledger):
            failures.append(f"maxfar on workload {i}")
        if any(f > k for f in trace.faults_per_phase):
            failures.append(f"maxfar exceeded k faults in a phase ({i})")
    return {
        "suite": "marking",
        "workloads": workloads,
        "failures": failures,
        "passed": not failures,
    }


def verify_phases(trials: int = 300, seed: int = 2024) -> dict:
    import random

    rng = random.Random(seed)
    failures = []
    for i in range(trials):
        requests, k = _random_instance(rng)
        ledger = partition_phases(requests, k)
        spans = ledger.boundaries
        if spans[0][0] != 0 or spans[-1][1] != len(requests):
            failures.append(f"coverage broken on trial {i}")
            continue
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            if e1 != s2:
                failures.append(f"non-contiguous phases on trial {i}")
        for j, (s, e) in enumerate(spans):
            d = set(requests[s:e])
            if d != ledger.distinct_pages[j]:
                failures.append(f"distinct set mismatch on trial {i}")
            if j < len(spans) - 1 and len(d) != k:
                failures.append(f"non-final phase without k distinct on trial {i}")
            if len(d) > k:
                failures.append(f"phase with more than k distinct on trial {i}")
        if any(g < 1 for g in ledger.new_pages):
            failures.append(f"phase with no new page on trial {i}")
        if ledger.new_pages[0] != len(ledger.distinct_pages[0]):
            failures.append(f"first-phase new pages wrong on trial {i}")
        trace = pol.belady(requests, k)
        if trace.phase_starts != [s for s, _ in spans]:
            failures.append(f"simulator phase starts disagree on trial {i}")
    return {
        "suite": "phases",
        "trials": trials,
        "failures": failures,
        "passed": not failures,
    }


def verify_adversary(seed: int = 2024) -> dict:
    failures = []
    out = wl.cycle_walk(6, 10)
    if not validate_walk(out.graph, out.walk):
        failures.append("cycle walk invalid")
    out = wl.example2(8, 6)
    if delta(out.graph) != 9:
        failures.append("example2 delta mismatch")
    victim = pol.dto(8)
    out = wl.deterministic_hole_adversary(victim, 8, 4, 6)
    trace = simulate(pol.dto(8), out.sequence, 8)
    for idx in out.meta["hole_fault_indices"]:
        if trace.events[idx].hit:
            failures.append(f"hole request {idx} did not fault")
            break
    out = wl.randomized_halving_adversary(16, 6, 8, seed)
    ledger = partition_phases(out.sequence, 16)
    if ledger.phase_count != out.phase_count:
        failures.append("halving adversary phase drift")
    for requests_list in (out.sequence.requests,):
        ph = [build_phase_tree(requests_list[s:e]) for s, e in ledger.boundaries[:3]]
        for (s, e), tree in zip(ledger.boundaries[:3], ph):
            gp = phase_graph(requests_list[s:e])
            if not set(tree.edges()) <= set(gp.edges):
                failures.append("phase tree is not a subgraph of the phase graph")
    return {"suite": "adversary", "failures": failures, "passed": not failures}


VERIFY_SUITES = {
    "oracle": verify_oracle,
    "marking": verify_marking_suite,
    "phases": verify_phases,
    "adversary": verify_adversary,
}


def verify(suite: str, **kwargs) -> dict:
    if suite not in VERIFY_SUITES:
        raise ConfigError(
            f"unknown verify suite {suite!r}; choose from {sorted(VERIFY_SUITES)}"
        )
    return VERIFY_SUITES[suite](**kwargs)
