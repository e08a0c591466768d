"""Truly-online policies guided by the previous phase's spanning tree.

Both policies are marking algorithms.  While a phase runs they build the
parent-pointer tree of its requests; when the next phase opens, that tree
becomes the reference structure and eviction proceeds in three sub-phases:

  I   evict stale pages sitting on tree vertices of degree != 2 (the set C);
  II  grow connected hole regions A_v anchored at the C-members that are
      holes when sub-phase II starts, evicting stale tree-neighbors;
  III evict among the remaining stale pages, which all lie on degree-2
      vertices (uniformly at random, or at the midpoint of a maximal
      unmarked path for the deterministic variant).

Neither policy ever sees the access graph; they receive only page ids.
"""

from __future__ import annotations

from typing import Optional

from ..graphs import PhaseTreeBuilder
from .base import PagingPolicy, PolicyStateError


class _TreeGuidedPolicy(PagingPolicy):
    marking = True

    def _reset_state(self):
        self._builder = PhaseTreeBuilder()
        self._adj = None  # previous phase's tree adjacency, None in phase 0
        self._c = set()
        self._holes = set()
        self._subphase = 1
        self._regions = None  # A_v sets, keyed by anchor, once sub-phase II starts
        self._phase_index = 0
        self._rng = self.phase_rng(0)
        self.transcript = []

    def on_phase_start(self, phase_index):
        self._phase_index = phase_index
        tree = self._builder.finish()
        self._builder = PhaseTreeBuilder()
        if tree is None:
            self._adj = None
            self._c = set()
        else:
            self._adj = tree.adjacency()
            self._c = {v for v, nbrs in self._adj.items() if len(nbrs) != 2}
        self._holes = set()
        self._subphase = 1
        self._regions = None
        self._rng = self.phase_rng(phase_index)
        self.transcript.append({"phase": phase_index, "evictions": []})

    def observe(self, page, vertex=None):
        self._builder.observe(page)
        self._holes.discard(page)

    # -- eviction -----------------------------------------------------------

    def choose_victim(self, page, vertex=None):
        unmarked = self._unmarked_resident()
        if self._adj is None:
            victim = self._pick_without_tree(unmarked)
            self._record(0, victim)
        else:
            victim = self._pick_with_tree(page, unmarked)
        self._holes.add(victim)
        return victim

    def _pick_with_tree(self, page, unmarked):
        snap = self._snapshot
        stale = {
            p for p in self._adj if p in snap.resident and p not in snap.marked
        }
        if not stale:
            # defensive: every unmarked resident page normally belongs to the
            # previous phase, so this only triggers on degenerate inputs
            victim = self._pick_without_tree(unmarked)
            self._record(0, victim)
            return victim
        if self._subphase == 1:
            candidates = sorted(p for p in stale if p in self._c)
            if candidates:
                victim = self._pick_stale_c(candidates)
                self._record(1, victim)
                return victim
            self._enter_subphase_two()
        if self._subphase == 2:
            picked = self._subphase_two_victim(stale)
            if picked is not None:
                return picked
            self._subphase = 3
        victim = self._subphase_three_victim(stale, page)
        self._record(3, victim)
        return victim

    def _enter_subphase_two(self):
        self._subphase = 2
        self._regions = {v: {v} for v in sorted(self._holes) if v in self._c}

    def _region_stale_neighbors(self, region, stale):
        nbrs = set()
        for v in region:
            for u in self._adj[v]:
                if u in stale and u not in region:
                    nbrs.add(u)
        return nbrs

    def _subphase_two_victim(self, stale):
        live = []
        for anchor in sorted(self._regions):
            region = self._regions[anchor]
            if not region <= self._holes:
                continue
            nbrs = self._region_stale_neighbors(region, stale)
            if nbrs:
                live.append((anchor, region, nbrs))
        if not live:
            return None
        anchor, region, nbrs = self._pick_live(live)
        victim = self._pick_region_neighbor(sorted(nbrs))
        self._record(2, victim, live_sizes=[len(r) for _, r, _ in live])
        region.add(victim)
        return victim

    def _record(self, subphase, victim, **extra):
        entry = {"subphase": subphase, "victim": victim}
        entry.update(extra)
        self.transcript[-1]["evictions"].append(entry)

    # hooks that differ between the randomized and deterministic variants

    def _pick_without_tree(self, unmarked):
        raise NotImplementedError

    def _pick_stale_c(self, candidates):
        raise NotImplementedError

    def _pick_live(self, live):
        raise NotImplementedError

    def _pick_region_neighbor(self, neighbors):
        raise NotImplementedError

    def _subphase_three_victim(self, stale, page):
        raise NotImplementedError


class RtoPolicy(_TreeGuidedPolicy):
    """Randomized variant: uniform choices over the current candidate set.

    Sub-phase II picks a live anchor with the smallest region, breaking ties
    uniformly at random, which keeps live region sizes within one of each
    other.
    """

    name = "rto"

    def _pick_without_tree(self, unmarked):
        # no previous phase: behave like randomized marking
        return self._rng.choice(unmarked)

    def _pick_stale_c(self, candidates):
        return self._rng.choice(candidates)

    def _pick_live(self, live):
        smallest = min(len(region) for _, region, _ in live)
        pool = [entry for entry in live if len(entry[1]) == smallest]
        return pool[self._rng.randrange(len(pool))]

    def _pick_region_neighbor(self, neighbors):
        return self._rng.choice(neighbors)

    def _subphase_three_victim(self, stale, page):
        return self._rng.choice(sorted(stale))


class DtoPolicy(_TreeGuidedPolicy):
    """Deterministic variant: arbitrary choices resolved to smallest page id,
    and sub-phase III evicts near the midpoint of a maximal unmarked path."""

    name = "dto"

    def __init__(self, k: int):
        super().__init__(k, seed=0)

    def _pick_without_tree(self, unmarked):
        return unmarked[0]

    def _pick_stale_c(self, candidates):
        return candidates[0]

    def _pick_live(self, live):
        return live[0]  # live is ordered by anchor id

    def _pick_region_neighbor(self, neighbors):
        return neighbors[0]

    def _subphase_three_victim(self, stale, page):
        path = self._best_unmarked_path(stale)
        return self._midpoint_victim(path, stale)

    def _best_unmarked_path(self, stale):
        """Maximal path of unmarked tree vertices containing a stale page,
        with the smallest minimum page id among candidates."""
        marked = self._snapshot.marked
        unmarked_nodes = {p for p in self._adj if p not in marked}
        best = None
        remaining = set(unmarked_nodes)
        while remaining:
            comp = self._component(min(remaining), remaining)
            remaining -= comp
            if not comp & stale:
                continue
            path = self._canonical_path(comp, stale)
            if best is None or min(path) < min(best):
                best = path
        if best is None:  # stale is nonempty and stale pages are unmarked
            raise PolicyStateError("dto: no unmarked path contains a stale page")
        return best

    def _component(self, start, allowed):
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in self._adj[v]:
                if u in allowed and u not in comp:
                    comp.add(u)
                    stack.append(u)
        return comp

    def _canonical_path(self, comp, stale):
        if len(comp) == 1:
            return [next(iter(comp))]
        degree_in = {
            v: sum(1 for u in self._adj[v] if u in comp) for v in comp
        }
        leaves = sorted(v for v in comp if degree_in[v] <= 1)
        start = leaves[0]
        # paths from `start` to every other vertex of the component subtree
        parent = {start: None}
        order = [start]
        for v in order:
            for u in self._adj[v]:
                if u in comp and u not in parent:
                    parent[u] = v
                    order.append(u)

        def path_to(leaf):
            path = []
            v = leaf
            while v is not None:
                path.append(v)
                v = parent[v]
            path.reverse()
            return path

        for leaf in leaves[1:]:
            path = path_to(leaf)
            if any(p in stale for p in path):
                return path
        return path_to(leaves[1])

    @staticmethod
    def _midpoint_victim(path, stale):
        mid = (len(path) - 1) / 2
        candidates = [(abs(i - mid), i) for i, p in enumerate(path) if p in stale]
        best = min(d for d, _ in candidates)
        tied = [i for d, i in candidates if d == best]
        if len(tied) == 1:
            return path[tied[0]]
        # midpoint falls on an edge or two stale pages are equidistant:
        # resolve toward the endpoint with the smaller page id
        if path[0] <= path[-1]:
            return path[min(tied)]
        return path[max(tied)]


def rto(k: int, seed: int = 0) -> RtoPolicy:
    return RtoPolicy(k, seed)


def dto(k: int) -> DtoPolicy:
    return DtoPolicy(k)
