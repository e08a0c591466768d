"""Request-sequence and graph generators, including the adversarial
constructions that separate truly-online policies from graph-aware ones.

Both adversaries build a long labeled path: a spine carrying pages
1..k+1 followed by extension blocks whose vertices are labeled lazily with
the low pages {1..f+1} (and, for the randomized construction, a re-request
ramp of the high pages).  Each generated phase requests exactly k distinct
pages, so one page per phase survives unrequested and the phase partition
tracks the construction.
"""

from __future__ import annotations

import copy
import json
import os
import random
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    PagingError,
    RequestSequence,
    SimulationStepper,
    partition_phases,
)
from .graphs import ExtendedAccessGraph, GraphError, INFINITY, delta, validate_walk


class AdversaryError(PagingError):
    pass


class NondeterministicPolicyError(AdversaryError):
    pass


@dataclass
class AdversaryOutput:
    """A generated (graph, walk, sequence) triple with its advertised bounds."""

    graph: ExtendedAccessGraph
    walk: list[int]
    sequence: RequestSequence
    advertised_delta: float
    phase_count: int
    meta: dict = field(default_factory=dict)

    def selfcheck(self, k: Optional[int] = None) -> None:
        if not validate_walk(self.graph, self.walk):
            raise AdversaryError("generated walk is not legal on its graph")
        for v, p in zip(self.walk, self.sequence.requests):
            if self.graph.labels[v] != p:
                raise AdversaryError("sequence labels disagree with walk")
        d = delta(self.graph)
        if d < self.advertised_delta:
            raise AdversaryError(
                f"delta {d} below advertised bound {self.advertised_delta}"
            )
        if k is not None:
            ledger = partition_phases(self.sequence, k)
            self.meta["partition_phase_count"] = ledger.phase_count


def cycle_walk(k: int, rounds: int) -> AdversaryOutput:
    """Round-robin traversal of an injectively labeled (k+1)-cycle."""
    if k < 2 or rounds < 1:
        raise ValueError("need k >= 2 and rounds >= 1")
    n = k + 1
    labels = {i: i for i in range(1, n + 1)}
    edges = [(i, i + 1) for i in range(1, n)] + [(n, 1)]
    graph = ExtendedAccessGraph(labels, edges)
    walk = [v for _ in range(rounds) for v in range(1, n + 1)]
    sequence = RequestSequence(list(walk), walk=list(walk))
    out = AdversaryOutput(graph, walk, sequence, INFINITY, rounds)
    out.selfcheck(k)
    return out


def random_walk(
    graph: ExtendedAccessGraph,
    length: int,
    seed: int,
    stay_prob: float = 0.0,
    start: Optional[int] = None,
) -> RequestSequence:
    """Uniform-neighbor random walk emitting `length` requests."""
    if length < 1:
        raise ValueError("length must be positive")
    if start is None:
        start = min(graph.labels)
    if start not in graph.labels:
        raise GraphError(f"start vertex {start} not in graph")
    rng = random.Random(seed)
    walk = [start]
    while len(walk) < length:
        here = walk[-1]
        nbrs = graph.neighbors(here)
        if not nbrs or (stay_prob > 0 and rng.random() < stay_prob):
            walk.append(here)
        else:
            walk.append(rng.choice(nbrs))
    requests = [graph.labels[v] for v in walk]
    sequence = RequestSequence(requests, walk=walk)
    assert validate_walk(graph, walk)
    return sequence


def example2(k: int, phases: int) -> AdversaryOutput:
    """Path on k+2 vertices whose far end reuses page 1, walked in
    alternating sweeps; locality can flip after exactly k+1 steps."""
    if k < 4 or phases < 2:
        raise ValueError("need k >= 4 and phases >= 2")
    labels = {i: i for i in range(1, k + 2)}
    labels[k + 2] = 1
    edges = [(i, i + 1) for i in range(1, k + 2)]
    graph = ExtendedAccessGraph(labels, edges)

    up_block = list(range(1, k + 1))  # vertices 1..k
    down_block = [k + 1, k + 2, k + 1] + list(range(k, 1, -1))
    walk: list[int] = []
    blocks_needed = phases + 2
    for b in range(blocks_needed):
        walk.extend(up_block if b % 2 == 0 else down_block)
    requests = [labels[v] for v in walk]
    ledger = partition_phases(requests, k)
    if ledger.phase_count < phases:
        raise AdversaryError("not enough generated blocks")  # pragma: no cover
    stop = ledger.boundaries[phases - 1][1]
    walk = walk[:stop]
    sequence = RequestSequence(requests[:stop], walk=list(walk))
    out = AdversaryOutput(graph, walk, sequence, k + 1, phases)
    out.selfcheck(k)
    return out


class _PathBuilder:
    """A growing labeled path: spine 1..k+1 plus lazily labeled chain slots."""

    def __init__(self, k: int):
        self.k = k
        self.labels = {pos: pos for pos in range(1, k + 2)}
        self.frontier = k + 1  # rightmost labeled position
        self.walk: list[int] = []
        self.requests: list[int] = []

    def commit(self, label: int) -> int:
        self.frontier += 1
        self.labels[self.frontier] = label
        return self.frontier

    def graph(self) -> ExtendedAccessGraph:
        edges = [(p, p + 1) for p in range(1, self.frontier)]
        return ExtendedAccessGraph(dict(self.labels), edges)


def deterministic_hole_adversary(
    victim, k: int, f: int, phases: int
) -> AdversaryOutput:
    """Forces any deterministic policy to fault f+1 times per phase.

    A shadow simulation of the victim reveals the page it evicts after each
    fault; the next sub-phase walks back to that hole's nearest vertex and
    requests it.  Each phase extends the path by a block holding the low
    pages {1..f+1} in ascending order; when k-f exceeds the block that would
    make, high-page separator slots stretch the block so two vertices
    sharing a label always sit at least k-f apart.
    """
    if not 0 < f < k:
        raise ValueError("need 0 < f < k")
    if phases < 2:
        raise ValueError("need phases >= 2")
    fprime = f + 1
    spacing = max(1, -(-(k - f) // fprime))  # ceil((k-f)/fprime)
    path = _PathBuilder(k)
    shadows = [
        SimulationStepper(copy.deepcopy(victim), k),
        SimulationStepper(copy.deepcopy(victim), k),
    ]
    state = {"hole": None}
    hole_fault_indices: list[int] = []
    assigned: set[int] = set()  # low labels committed to slots this phase
    separators = {"next": fprime + 1}

    def fresh_label() -> int:
        label = min(p for p in range(1, fprime + 1) if p not in assigned)
        assigned.add(label)
        return label

    def extend_block():
        # (spacing-1) high separator slots keep same-label vertices k-f apart
        for _ in range(spacing - 1):
            emit(path.commit(separators["next"]))
            separators["next"] += 1
        emit(path.commit(fresh_label()))

    def emit(pos: int):
        label = path.labels[pos]
        path.walk.append(pos)
        path.requests.append(label)
        events = [s.step(label) for s in shadows]
        if (events[0].hit, events[0].evicted) != (events[1].hit, events[1].evicted):
            raise NondeterministicPolicyError(
                "shadow runs disagree; the victim policy is not deterministic"
            )
        if events[0].evicted is not None:
            state["hole"] = events[0].evicted
        return events[0]

    def walk_span(start: int, stop: int):
        step = 1 if stop >= start else -1
        for pos in range(start, stop + step, step):
            emit(pos)

    block_ranges = []
    # warm-up phase: pages 1..k along the spine
    for pos in range(1, k + 1):
        emit(pos)
    block_ranges.append((0, len(path.walk)))
    position = k

    for phase_no in range(2, phases + 1):
        block_start = len(path.walk)
        assigned.clear()
        separators["next"] = fprime + 1
        if phase_no == 2:
            event = emit(k + 1)
            if event.hit:
                raise AdversaryError("expected the k+1 request to fault")
            position = k + 1
        for _ in range(fprime):
            hole = state["hole"]
            if hole is None:
                raise AdversaryError("victim produced no eviction to chase")
            # fetch the hole at its nearest existing vertex to the left (the
            # spine carries every label, so one always exists), walk back to
            # the frontier, then extend the block
            target = max(
                pos for pos in range(1, position) if path.labels[pos] == hole
            )
            walk_span(position - 1, target)
            hole_fault_indices.append(len(path.walk) - 1)
            walk_span(target + 1, path.frontier)
            extend_block()
            position = path.frontier
        block_ranges.append((block_start, len(path.walk)))

    graph = path.graph()
    sequence = RequestSequence(list(path.requests), walk=list(path.walk))
    out = AdversaryOutput(
        graph,
        list(path.walk),
        sequence,
        k - f,
        phases,
        meta={
            "k": k,
            "f": f,
            "block_ranges": block_ranges,
            "hole_fault_indices": hole_fault_indices,
        },
    )
    out.selfcheck(k)
    return out


def randomized_halving_adversary(
    k: int, f: int, phases: int, seed: int
) -> AdversaryOutput:
    """Oblivious construction that halves the unrequested low pages.

    Each phase opens with the previous phase's surviving page (forcing the
    phase boundary and, against any lazy marking policy, a fault), re-requests
    the high pages on a fresh ramp of path vertices, then repeatedly commits
    a random half of the still-unrequested low pages as a descending run.
    The phase ends with one low page left unrequested.
    """
    if not 0 < f < k:
        raise ValueError("need 0 < f < k")
    if f < 4:
        raise ValueError("need f >= 4")
    if phases < 2:
        raise ValueError("need phases >= 2")
    fprime = f + 1
    rng = random.Random(seed)
    path = _PathBuilder(k)

    def emit(pos: int):
        path.walk.append(pos)
        path.requests.append(path.labels[pos])

    def bounce(low_pos: int, high_pos: int):
        # re-request everything this phase has touched so far
        for pos in range(high_pos - 1, low_pos - 1, -1):
            emit(pos)
        for pos in range(low_pos + 1, high_pos + 1):
            emit(pos)

    block_ranges = []
    subphase_counts = []
    for pos in range(1, k + 1):
        emit(pos)
    block_ranges.append((0, len(path.walk)))

    survivor: Optional[int] = None
    for phase_no in range(2, phases + 1):
        block_start = len(path.walk)
        if phase_no == 2:
            emit(k + 1)
            block_first_pos = k + 1
            universe = list(range(1, fprime + 1))
        else:
            block_first_pos = path.commit(survivor)
            emit(block_first_pos)
            universe = [p for p in range(1, fprime + 1) if p != survivor]
        for label in range(fprime + 1, k + 2):
            emit(path.commit(label))
        remaining = sorted(universe)
        subphases = 0
        while len(remaining) > 1:
            bounce(block_first_pos, path.frontier)
            mid = (len(remaining) + 1) // 2
            lower, upper = remaining[:mid], remaining[mid:]
            chosen, remaining = (upper, lower) if rng.random() < 0.5 else (lower, upper)
            for label in sorted(chosen, reverse=True):
                emit(path.commit(label))
            subphases += 1
        survivor = remaining[0]
        subphase_counts.append(subphases)
        block_ranges.append((block_start, len(path.walk)))

    graph = path.graph()
    sequence = RequestSequence(list(path.requests), walk=list(path.walk))
    out = AdversaryOutput(
        graph,
        list(path.walk),
        sequence,
        k - f - 1,
        phases,
        meta={
            "k": k,
            "f": f,
            "seed": seed,
            "block_ranges": block_ranges,
            "subphase_counts": subphase_counts,
        },
    )
    out.selfcheck(k)
    ledger = partition_phases(sequence, k)
    if ledger.phase_count != phases or [s for s, _ in ledger.boundaries] != [
        s for s, _ in block_ranges
    ]:
        raise AdversaryError("phase blocks drifted from the phase partition")
    return out


def write_bundle(out: AdversaryOutput, directory: str, extra_meta: Optional[dict] = None) -> None:
    """Write graph.json, walk.txt, sequence.txt, and meta.json."""
    os.makedirs(directory, exist_ok=True)
    out.graph.save(os.path.join(directory, "graph.json"))
    with open(os.path.join(directory, "walk.txt"), "w") as fh:
        fh.write("\n".join(str(v) for v in out.walk) + "\n")
    with open(os.path.join(directory, "sequence.txt"), "w") as fh:
        fh.write(out.sequence.to_text())
    meta = {
        "advertised_delta": (
            None if out.advertised_delta == INFINITY else out.advertised_delta
        ),
        "phases": out.phase_count,
    }
    meta.update(out.meta)
    if extra_meta:
        meta.update(extra_meta)
    with open(os.path.join(directory, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, default=str)
        fh.write("\n")
