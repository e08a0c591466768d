"""Ground-truth offline oracle and competitive-ratio lower-bound estimators.

The estimators realize the classical bounds computable from a graph witness:
leaf-rich subtrees on k+1 vertices, vine decompositions (a connected backbone
with vertex-disjoint attached ear paths), and long single vines taken from
cycles.  Witnesses ride along in the report so every number can be rechecked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .core import PagingError, _requests_of
from .graphs import ExtendedAccessGraph

OPT_GUARD = {"length": 24, "distinct": 8, "k": 6}


class TooLargeError(PagingError):
    pass


class VineValidationError(PagingError):
    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


def brute_force_opt(sequence, k: int) -> int:
    """Exact minimum fault count by dynamic programming over cache contents.

    Guarded to small instances; use the Belady simulation beyond the guard.
    """
    requests = _requests_of(sequence)
    if not requests:
        raise PagingError("empty sequence")
    distinct = len(set(requests))
    if (
        len(requests) > OPT_GUARD["length"]
        or distinct > OPT_GUARD["distinct"]
        or k > OPT_GUARD["k"]
    ):
        raise TooLargeError(
            f"instance (n={len(requests)}, distinct={distinct}, k={k}) "
            f"exceeds guard {OPT_GUARD}"
        )
    n = len(requests)
    memo: dict[tuple[int, frozenset], int] = {}

    def solve(i: int, cache: frozenset) -> int:
        while i < n and requests[i] in cache:
            i += 1
        if i == n:
            return 0
        key = (i, cache)
        if key in memo:
            return memo[key]
        page = requests[i]
        if len(cache) < k:
            best = solve(i + 1, cache | {page})
        else:
            best = min(solve(i + 1, cache - {q} | {page}) for q in cache)
        memo[key] = best + 1
        return best + 1

    return solve(0, frozenset())


def harmonic(n: int) -> float:
    return sum(1.0 / i for i in range(1, n + 1))


# -- leaf-rich subtrees -------------------------------------------------------


@dataclass
class SubtreeWitness:
    vertices: list[int]
    edges: list[tuple[int, int]]
    leaf_count: int

    def det_bound(self) -> int:
        return self.leaf_count - 1

    def rand_bound(self) -> float:
        return harmonic(self.leaf_count - 1)


def _connected(vertices: set[int], adjacency) -> bool:
    if not vertices:
        return False
    seen = {next(iter(vertices))}
    stack = list(seen)
    while stack:
        v = stack.pop()
        for u in adjacency[v]:
            if u in vertices and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen == vertices


def _count_leaves(vertices, edges) -> int:
    if len(vertices) == 1:
        return 0
    degree = {v: 0 for v in vertices}
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    return sum(1 for d in degree.values() if d == 1)


def _spanning_tree_edges(vertex_set: set[int], adjacency) -> list[tuple[int, int]]:
    start = min(vertex_set)
    seen = {start}
    stack = [start]
    edges = []
    while stack:
        v = stack.pop()
        for u in adjacency[v]:
            if u in vertex_set and u not in seen:
                seen.add(u)
                edges.append((min(u, v), max(u, v)))
                stack.append(u)
    return edges


def _max_leaf_tree_exact(vertices: set[int], graph) -> tuple[list[tuple[int, int]], int]:
    """Max-leaf spanning tree of the induced subgraph, via the minimum
    connected dominating set equivalence.  Small vertex sets only."""
    adj = {v: [u for u in graph.neighbors(v) if u in vertices] for v in vertices}
    n = len(vertices)
    if n == 1:
        return [], 0
    if n == 2:
        a, b = sorted(vertices)
        return [(a, b)], 2
    order = sorted(vertices)
    for size in range(1, n):
        for internal in combinations(order, size):
            iset = set(internal)
            if size > 1 and not _connected(iset, adj):
                continue
            if any(not (iset & set(adj[v])) for v in vertices - iset):
                continue
            edges = _spanning_tree_edges(iset, adj) if size > 1 else []
            for leaf in sorted(vertices - iset):
                host = min(u for u in adj[leaf] if u in iset)
                edges.append((min(leaf, host), max(leaf, host)))
            return sorted(edges), _count_leaves(vertices, edges)
    edges = _spanning_tree_edges(set(order), adj)  # pragma: no cover
    return sorted(edges), _count_leaves(vertices, edges)


def _connected_subsets(graph, size: int) -> set[frozenset]:
    """All connected vertex subsets of the given size.

    Canonical enumeration: grow each subset from its minimum vertex, only
    ever adding larger vertices.
    """
    results: set[frozenset] = set()
    for v in graph.vertices:
        stack = [(frozenset([v]), frozenset(u for u in graph.neighbors(v) if u > v))]
        seen_states = set()
        while stack:
            subset, frontier = stack.pop()
            if len(subset) == size:
                results.add(subset)
                continue
            for u in frontier:
                nxt = subset | {u}
                if nxt in seen_states:
                    continue
                seen_states.add(nxt)
                new_frontier = frozenset(
                    w
                    for w in (set(frontier) | set(graph.neighbors(u))) - nxt
                    if w > v
                )
                stack.append((nxt, new_frontier))
    return results


def max_leaf_subtree(
    graph: ExtendedAccessGraph, size: int, mode: str = "greedy"
) -> SubtreeWitness:
    """A subtree on `size` vertices with many leaves.

    ``exact`` enumerates connected vertex subsets (guarded at |V| <= 16);
    ``greedy`` grows from a high-degree seed, preferring hosts that are
    already internal so existing leaves are kept.
    """
    n = len(graph.labels)
    if n < size:
        raise PagingError(f"graph has {n} < {size} vertices")
    if mode == "exact":
        if n > 16:
            raise TooLargeError("exact subtree search guarded at |V| <= 16")
        best: Optional[SubtreeWitness] = None
        for subset in _connected_subsets(graph, size):
            edges, leaves = _max_leaf_tree_exact(set(subset), graph)
            if best is None or leaves > best.leaf_count:
                best = SubtreeWitness(sorted(subset), edges, leaves)
                if leaves == size - 1:
                    break
        if best is None:
            raise PagingError(f"no connected subgraph on {size} vertices")
        return best
    if mode != "greedy":
        raise ValueError(f"unknown mode {mode!r}")
    seed = max(graph.vertices, key=lambda v: (graph.degree(v), -v))
    tree_vertices = {seed}
    parent: dict[int, int] = {}
    children: dict[int, int] = {seed: 0}
    while len(tree_vertices) < size:
        candidates = []
        for v in sorted(tree_vertices):
            host_is_internal = children[v] > 0 or v == seed
            for u in graph.neighbors(v):
                if u not in tree_vertices:
                    candidates.append((0 if host_is_internal else 1, u, v))
        if not candidates:
            raise PagingError("graph is not connected around the seed")
        _, u, host = min(candidates)
        tree_vertices.add(u)
        parent[u] = host
        children[host] += 1
        children[u] = 0
    edges = sorted((min(c, p), max(c, p)) for c, p in parent.items())
    return SubtreeWitness(sorted(tree_vertices), edges, _count_leaves(tree_vertices, edges))


# -- vine decompositions ------------------------------------------------------


@dataclass
class VineDecomposition:
    """Connected backbone plus vertex-disjoint attached ear paths."""

    backbone: frozenset
    paths: tuple[tuple[int, ...], ...]

    def total_vertices(self) -> int:
        return len(self.backbone) + sum(len(p) for p in self.paths)


def vine_value(graph: ExtendedAccessGraph, vd: VineDecomposition) -> float:
    """sum of log2(|p|), |p| counting the path's edges including both
    attachment edges (vertices plus one).  Raises naming the violated clause.
    """
    if not vd.backbone:
        raise VineValidationError("backbone", "backbone is empty")
    for v in vd.backbone:
        if v not in graph.labels:
            raise VineValidationError("backbone", f"unknown vertex {v}")
    adjacency = graph.adjacency
    if not _connected(set(vd.backbone), adjacency):
        raise VineValidationError("backbone", "backbone is not connected")
    seen: set[int] = set()
    for p in vd.paths:
        if not p:
            raise VineValidationError("paths", "empty path")
        pset = set(p)
        if len(pset) != len(p):
            raise VineValidationError("paths", f"path {p} repeats a vertex")
        if pset & vd.backbone:
            raise VineValidationError(
                "disjoint-from-backbone", f"path {p} intersects the backbone"
            )
        if pset & seen:
            raise VineValidationError(
                "pairwise-disjoint", f"path {p} shares vertices with another path"
            )
        seen |= pset
        for a, b in zip(p, p[1:]):
            if not graph.has_edge(a, b):
                raise VineValidationError("paths", f"({a},{b}) is not an edge")
        first_hosts = {v for v in adjacency[p[0]] if v in vd.backbone}
        last_hosts = {v for v in adjacency[p[-1]] if v in vd.backbone}
        if not first_hosts or not last_hosts:
            raise VineValidationError(
                "endpoints-adjacent", f"path {p} does not attach to the backbone"
            )
        if len(p) == 1 and len(first_hosts) < 2:
            # one vertex needs two distinct attachment edges; with a single
            # edge it is a pendant leaf, not an ear
            raise VineValidationError(
                "endpoints-adjacent",
                f"single-vertex path {p} has only one attachment edge",
            )
    return sum(math.log2(len(p) + 1) for p in vd.paths)


@dataclass
class BoundReport:
    det_lower: float
    rand_lower: float
    witnesses: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        def encode(obj):
            if isinstance(obj, SubtreeWitness):
                return {
                    "vertices": obj.vertices,
                    "edges": [list(e) for e in obj.edges],
                    "leaf_count": obj.leaf_count,
                }
            if isinstance(obj, VineDecomposition):
                return {
                    "backbone": sorted(obj.backbone),
                    "paths": [list(p) for p in obj.paths],
                }
            if isinstance(obj, dict):
                return {key: encode(val) for key, val in obj.items()}
            if isinstance(obj, (list, tuple)):
                return [encode(val) for val in obj]
            return obj

        return {
            "det_lower": self.det_lower,
            "rand_lower": self.rand_lower,
            "witnesses": encode(self.witnesses),
            "notes": self.notes,
        }


def _find_cycles(graph: ExtendedAccessGraph) -> list[list[int]]:
    """Fundamental cycles of a DFS forest; a heuristic cycle inventory."""
    parent: dict[int, Optional[int]] = {}
    cycles = []
    seen_edges: set[tuple[int, int]] = set()
    for root in graph.vertices:
        if root in parent:
            continue
        parent[root] = None
        stack = [root]
        while stack:
            v = stack.pop()
            for u in graph.neighbors(v):
                edge = (min(u, v), max(u, v))
                if u not in parent:
                    parent[u] = v
                    seen_edges.add(edge)
                    stack.append(u)
                elif edge not in seen_edges:
                    seen_edges.add(edge)
                    cycles.append(_splice_cycle(v, u, parent))
    return [c for c in cycles if len(c) >= 3]


def _splice_cycle(v: int, u: int, parent) -> list[int]:
    to_root = []
    w: Optional[int] = v
    while w is not None:
        to_root.append(w)
        w = parent[w]
    index = {x: i for i, x in enumerate(to_root)}
    from_u = []
    w = u
    while w not in index:
        from_u.append(w)
        w = parent[w]
    return to_root[: index[w] + 1] + list(reversed(from_u))


def _cycle_vine(cycle: list[int]) -> VineDecomposition:
    return VineDecomposition(frozenset([cycle[0]]), (tuple(cycle[1:]),))


def _pad_backbone(
    graph: ExtendedAccessGraph, vd: VineDecomposition, total: int
) -> Optional[VineDecomposition]:
    """Grow the backbone with adjacent outside vertices until the
    decomposition spans exactly `total` vertices."""
    have = vd.total_vertices()
    if have == total:
        return vd
    if have > total:
        return None
    backbone = set(vd.backbone)
    vine_vertices = {v for p in vd.paths for v in p}
    while len(backbone) + len(vine_vertices) < total:
        frontier = sorted(
            u
            for v in backbone
            for u in graph.neighbors(v)
            if u not in backbone and u not in vine_vertices
        )
        if not frontier:
            return None
        backbone.add(frontier[0])
    return VineDecomposition(frozenset(backbone), vd.paths)


def _two_core_chains(graph: ExtendedAccessGraph, vertices: set[int]):
    """Branch vertices and the degree-2 chains of the induced 2-core."""
    core = {v: {u for u in graph.neighbors(v) if u in vertices} for v in vertices}
    changed = True
    while changed:
        changed = False
        for v in list(core):
            if len(core[v]) < 2:
                for u in core[v]:
                    core[u].discard(v)
                del core[v]
                changed = True
    if not core:
        return None
    branch = {v for v in core if len(core[v]) != 2}
    if not branch:
        return None  # pure cycles; the cycle witnesses cover those
    chains = []
    visited: set[int] = set()
    for b in sorted(branch):
        for start in sorted(core[b]):
            if start in branch or start in visited:
                continue
            chain = [start]
            visited.add(start)
            prev, here = b, start
            while True:
                nxt = [u for u in core[here] if u != prev]
                if not nxt or nxt[0] in branch:
                    break
                prev, here = here, nxt[0]
                chain.append(here)
                visited.add(here)
            chains.append(tuple(chain))
    return set(core), chains


def _greedy_connected_subgraph(graph: ExtendedAccessGraph, size: int) -> set[int]:
    seed = max(graph.vertices, key=lambda v: (graph.degree(v), -v))
    chosen = {seed}
    while len(chosen) < size:
        frontier = sorted(
            u for v in chosen for u in graph.neighbors(v) if u not in chosen
        )
        if not frontier:
            break
        chosen.add(max(frontier, key=lambda u: (graph.degree(u), -u)))
    return chosen


def vine_search(graph: ExtendedAccessGraph, k: int) -> BoundReport:
    """Heuristic lower bounds on the deterministic and randomized ratios.

    det: best of the subtree leaf bound, the best vine decomposition found on
    k+1 vertices, and the long-vine bound on k+g vertices.  rand: best of the
    harmonic leaf bound and the long-vine randomized bound (hidden constant
    taken as 1).
    """
    n = len(graph.labels)
    witnesses: dict = {}
    notes: list[str] = []
    det = 0.0
    rand = 0.0

    if n >= k + 1:
        mode = "exact" if n <= 12 and k + 1 <= 8 else "greedy"
        tree = max_leaf_subtree(graph, k + 1, mode)
        witnesses["subtree"] = tree
        witnesses["subtree_mode"] = mode
        det = max(det, float(tree.det_bound()))
        rand = max(rand, tree.rand_bound())

    best_vine: Optional[VineDecomposition] = None
    best_value = 0.0
    long_vine = None
    for cycle in _find_cycles(graph):
        length = len(cycle)
        if length <= k + 1:
            padded = _pad_backbone(graph, _cycle_vine(cycle), k + 1)
            if padded is None:
                continue
            value = vine_value(graph, padded)
            if value > best_value:
                best_vine, best_value = padded, value
        else:
            g = length - k
            det_big = math.floor(math.log2(length - 1) - math.log2(g)) / 2
            rand_big = (
                math.log2(length) - math.log2(g) if length - 1 >= 2 * g else 0.0
            )
            if long_vine is None or det_big > long_vine["det"]:
                long_vine = {
                    "vd": _cycle_vine(cycle),
                    "g": g,
                    "det": det_big,
                    "rand": rand_big,
                }

    if n >= k + 1:
        subgraph = _greedy_connected_subgraph(graph, k + 1)
        parts = _two_core_chains(graph, subgraph)
        if parts:
            core, chains = parts
            backbone = set(core)
            vines: list[tuple[int, ...]] = []
            for chain in sorted(chains, key=len, reverse=True):
                trial = backbone - set(chain)
                if trial and _connected(trial, graph.adjacency):
                    backbone = trial
                    vines.append(chain)
            if vines:
                candidate = _pad_backbone(
                    graph, VineDecomposition(frozenset(backbone), tuple(vines)), k + 1
                )
                if candidate is not None:
                    try:
                        value = vine_value(graph, candidate)
                    except VineValidationError:
                        value = 0.0
                    if value > best_value:
                        best_vine, best_value = candidate, value

    if best_vine is not None:
        witnesses["vine"] = best_vine
        witnesses["vine_value"] = best_value
        det = max(det, best_value)
    if long_vine is not None:
        witnesses["long_vine"] = long_vine["vd"]
        witnesses["long_vine_g"] = long_vine["g"]
        det = max(det, long_vine["det"])
        if long_vine["rand"] > 0:
            rand = max(rand, long_vine["rand"])
            notes.append(
                "randomized long-vine bound reported up to the hidden constant"
            )
    return BoundReport(det, rand, witnesses, notes)
