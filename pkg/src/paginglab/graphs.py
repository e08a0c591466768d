"""Extended access graphs, the locality parameter, and phase trees.

An extended access graph is a labeled undirected graph whose walks constrain
request sequences; a plain access graph is the injectively-labeled special
case.  Phase trees are the parent-pointer spanning trees of the previous
phase's consecutive-request graph that drive the truly-online policies.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import PagingError

INFINITY = math.inf


class GraphError(PagingError):
    pass


class ExtendedAccessGraph:
    """Labeled undirected simple graph.  Immutable after construction."""

    def __init__(self, labels: dict[int, int], edges: Iterable[tuple[int, int]]):
        self.labels = dict(labels)
        adjacency: dict[int, set[int]] = {v: set() for v in self.labels}
        edge_set: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if u not in adjacency or v not in adjacency:
                raise GraphError(f"edge ({u},{v}) references unknown vertex")
            edge_set.add((min(u, v), max(u, v)))
            adjacency[u].add(v)
            adjacency[v].add(u)
        self.edges = frozenset(edge_set)
        # sorted neighbor order keeps every "arbitrary choice" deterministic
        self.adjacency = {v: tuple(sorted(nbrs)) for v, nbrs in adjacency.items()}

    @property
    def vertices(self) -> list[int]:
        return sorted(self.labels)

    def label(self, vertex: int) -> int:
        return self.labels[vertex]

    def neighbors(self, vertex: int) -> tuple[int, ...]:
        if vertex not in self.adjacency:
            raise GraphError(f"unknown vertex {vertex}")
        return self.adjacency[vertex]

    def degree(self, vertex: int) -> int:
        return len(self.neighbors(vertex))

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def is_injective(self) -> bool:
        return len(set(self.labels.values())) == len(self.labels)

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertices": [{"id": v, "label": self.labels[v]} for v in self.vertices],
                "edges": [list(e) for e in sorted(self.edges)],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ExtendedAccessGraph":
        obj = json.loads(text)
        labels = {int(item["id"]): int(item["label"]) for item in obj["vertices"]}
        return cls(labels, [tuple(e) for e in obj["edges"]])

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "ExtendedAccessGraph":
        with open(path) as fh:
            return cls.from_json(fh.read())


def path_graph(labels: list[int]) -> ExtendedAccessGraph:
    """Simple path v1-v2-...-vn with the given labels, vertex ids 1..n."""
    label_map = {i + 1: lab for i, lab in enumerate(labels)}
    edges = [(i, i + 1) for i in range(1, len(labels))]
    return ExtendedAccessGraph(label_map, edges)


def cycle_graph(labels: list[int]) -> ExtendedAccessGraph:
    if len(labels) < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    label_map = {i + 1: lab for i, lab in enumerate(labels)}
    n = len(labels)
    edges = [(i, i + 1) for i in range(1, n)] + [(n, 1)]
    return ExtendedAccessGraph(label_map, edges)


def validate_walk(graph: ExtendedAccessGraph, walk: list[int]) -> bool:
    """True iff each consecutive pair repeats a vertex or traverses an edge."""
    for v in walk:
        if v not in graph.labels:
            raise GraphError(f"walk vertex {v} not in graph")
    for a, b in zip(walk, walk[1:]):
        if a != b and not graph.has_edge(a, b):
            return False
    return True


def delta(graph: ExtendedAccessGraph) -> float:
    """Shortest path length between two distinct vertices sharing a label.

    Infinity when labels are injective (or shared labels never connect);
    computed per component by breadth-first search from every vertex whose
    label occurs more than once.
    """
    by_label: dict[int, list[int]] = {}
    for v, lab in graph.labels.items():
        by_label.setdefault(lab, []).append(v)
    sources = [v for vs in by_label.values() if len(vs) > 1 for v in vs]
    best = INFINITY
    for src in sources:
        target_label = graph.labels[src]
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            if dist[u] >= best:
                continue
            for w in graph.adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    if graph.labels[w] == target_label and dist[w] < best:
                        best = dist[w]
                    queue.append(w)
    return best


@dataclass
class PhaseTree:
    """Parent-pointer tree over one phase's distinct pages.

    ``parent[p]`` is the page requested immediately before p's first
    occurrence in the phase; the root (first page of the phase) has no entry.
    """

    root: int
    parent: dict[int, int]

    def vertices(self) -> set[int]:
        return {self.root} | set(self.parent)

    def edges(self) -> set[tuple[int, int]]:
        return {(min(c, p), max(c, p)) for c, p in self.parent.items()}

    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices()}
        for child, par in self.parent.items():
            adj[child].add(par)
            adj[par].add(child)
        return {v: tuple(sorted(nbrs)) for v, nbrs in adj.items()}


class PhaseTreeBuilder:
    """Consumes one phase's requests and yields its parent-pointer tree.

    Each page's pointer is set once per phase, at its first occurrence.
    """

    def __init__(self):
        self.root: Optional[int] = None
        self.parent: dict[int, int] = {}
        self._seen: set[int] = set()
        self._prev: Optional[int] = None

    def observe(self, page: int) -> None:
        if self.root is None:
            self.root = page
            self._seen.add(page)
        elif page not in self._seen:
            self.parent[page] = self._prev
            self._seen.add(page)
        self._prev = page

    def finish(self) -> Optional[PhaseTree]:
        if self.root is None:
            return None
        return PhaseTree(self.root, dict(self.parent))


def build_phase_tree(phase_requests: list[int]) -> PhaseTree:
    """Parent-pointer spanning tree of one phase's consecutive-request graph."""
    if not phase_requests:
        raise ValueError("phase request list is empty")
    builder = PhaseTreeBuilder()
    for page in phase_requests:
        builder.observe(page)
    tree = builder.finish()
    assert tree is not None
    return tree


def phase_graph(phase_requests: list[int]) -> ExtendedAccessGraph:
    """Graph on the phase's distinct pages with edges between pages requested
    successively (self-loops excluded).  Vertex ids equal page ids."""
    if not phase_requests:
        raise ValueError("phase request list is empty")
    labels = {p: p for p in set(phase_requests)}
    edges = {
        (min(a, b), max(a, b))
        for a, b in zip(phase_requests, phase_requests[1:])
        if a != b
    }
    return ExtendedAccessGraph(labels, edges)
