"""Marking policy for extended access graphs that are simple paths.

Anchored at the vertex where the phase begins, it orders pages by how far
along the path their first occurrence lies on each side of the anchor.  A
page is maximal when no other page must be passed first on every side where
it occurs.  On a fault it evicts the median unmarked maximal page in the
left-first-occurrence order; pages occurring on a single side are kept for
last.  The policy consumes the vertex walk directly instead of trying to
reconstruct vertices from labels.
"""

from __future__ import annotations

from typing import Optional

from ..core import PagingError
from ..graphs import ExtendedAccessGraph, GraphError
from .base import PagingPolicy

_FAR = float("inf")


class MaxfarConfigError(PagingError):
    pass


def _path_order(graph: ExtendedAccessGraph) -> list[int]:
    """Vertices of a simple path graph, end to end; raises if not a path."""
    vertices = graph.vertices
    if len(vertices) == 1:
        return list(vertices)
    degrees = {v: graph.degree(v) for v in vertices}
    ends = sorted(v for v, d in degrees.items() if d == 1)
    if len(ends) != 2 or any(d > 2 for d in degrees.values()):
        raise MaxfarConfigError("graph is not a simple path")
    order = [ends[0]]
    prev = None
    while True:
        nxt = [u for u in graph.neighbors(order[-1]) if u != prev]
        if not nxt:
            break
        prev = order[-1]
        order.append(nxt[0])
    if len(order) != len(vertices):
        raise MaxfarConfigError("graph is not connected")
    return order


class MaxfarPolicy(PagingPolicy):
    name = "maxfar"
    marking = True
    requires_walk = True

    def __init__(self, graph: ExtendedAccessGraph, start_vertex: int, k: int):
        super().__init__(k)
        self.graph = graph
        self.start_vertex = start_vertex
        self._order = _path_order(graph)
        self._position = {v: i for i, v in enumerate(self._order)}
        if start_vertex not in self._position:
            raise MaxfarConfigError(f"start vertex {start_vertex} not in graph")
        label_count = len(set(graph.labels.values()))
        if label_count != k + 1:
            raise MaxfarConfigError(
                f"path must carry exactly k+1={k + 1} distinct labels, found {label_count}"
            )

    def _reset_state(self):
        self._anchor_pending = True
        self._two_sided = []  # maximal pages on both sides, left-first order
        self._one_sided = []
        self.transcript = []

    def on_phase_start(self, phase_index):
        self._anchor_pending = True
        self.transcript.append({"phase": phase_index, "n_sizes": [], "m_size": None})

    def _ensure_anchor(self, vertex):
        if not self._anchor_pending:
            return
        if vertex is None:
            raise MaxfarConfigError("maxfar needs the vertex walk")
        self._anchor_pending = False
        pos = self._position[vertex]
        left_first: dict[int, int] = {}
        for rank, i in enumerate(range(pos - 1, -1, -1), start=1):
            left_first.setdefault(self.graph.labels[self._order[i]], rank)
        right_first: dict[int, int] = {}
        for rank, i in enumerate(range(pos + 1, len(self._order)), start=1):
            right_first.setdefault(self.graph.labels[self._order[i]], rank)
        anchor_label = self.graph.labels[vertex]
        two = []
        left_only = []
        right_only = []
        for label in set(self.graph.labels.values()):
            if label == anchor_label:
                continue
            lf = left_first.get(label, _FAR)
            rf = right_first.get(label, _FAR)
            if lf < _FAR and rf < _FAR:
                two.append((lf, rf, label))
            elif lf < _FAR:
                left_only.append((lf, label))
            elif rf < _FAR:
                right_only.append((rf, label))
        # a page is maximal when it is nobody's prerequisite: nothing sits
        # strictly farther out on every side it would have to guard
        far_left = max(left_only, default=None)
        far_right = max(right_only, default=None)
        two.sort()
        frontier = []
        best_right = -1
        for lf, rf, label in sorted(two, reverse=True):
            if rf > best_right:
                if (far_left is None or lf > far_left[0]) and (
                    far_right is None or rf > far_right[0]
                ):
                    frontier.append((lf, label))
                best_right = rf
        frontier.sort()
        one = []
        if far_left is not None:
            one.append(far_left[1])
        if far_right is not None:
            one.append(far_right[1])
        self._two_sided = [label for _, label in frontier]
        self._one_sided = sorted(one)
        self.transcript[-1]["m_size"] = len(self._two_sided) + len(one)

    def observe(self, page, vertex=None):
        self._ensure_anchor(vertex)

    def choose_victim(self, page, vertex=None):
        self._ensure_anchor(vertex)
        marked = self._snapshot.marked
        two = [p for p in self._two_sided if p not in marked and p != page]
        one = [p for p in self._one_sided if p not in marked and p != page]
        self.transcript[-1]["n_sizes"].append(len(two) + len(one))
        if two:
            victim = two[(len(two) - 1) // 2]
        elif one:
            victim = one[0]
        else:
            # theory says some maximal page stays unmarked mid-phase; keep a
            # total rule anyway
            victim = self._unmarked_resident()[0]
        return victim


def maxfar(graph: ExtendedAccessGraph, start_vertex: int, k: int) -> MaxfarPolicy:
    return MaxfarPolicy(graph, start_vertex, k)
