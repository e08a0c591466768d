"""Classical baselines: LRU, FIFO, randomized marking, and offline Belady."""

from __future__ import annotations

from bisect import bisect_right
from typing import Optional

from ..core import PolicyTrace, RequestSequence, _requests_of, simulate
from .base import PagingPolicy

_NEVER = float("inf")


class LruPolicy(PagingPolicy):
    name = "lru"

    def _reset_state(self):
        self._clock = 0
        self._stamp = {}

    def observe(self, page, vertex=None):
        self._clock += 1
        self._stamp[page] = self._clock

    def choose_victim(self, page, vertex=None):
        victim = min(self._snapshot.resident, key=lambda p: (self._stamp[p], p))
        del self._stamp[victim]
        return victim


class FifoPolicy(PagingPolicy):
    name = "fifo"

    def _reset_state(self):
        self._counter = 0
        self._arrival = {}

    def observe(self, page, vertex=None):
        if page not in self._arrival:
            self._counter += 1
            self._arrival[page] = self._counter

    def choose_victim(self, page, vertex=None):
        victim = min(self._snapshot.resident, key=lambda p: (self._arrival[p], p))
        del self._arrival[victim]
        return victim


class RMarkPolicy(PagingPolicy):
    """Marking algorithm evicting a uniformly random unmarked resident page."""

    name = "rmark"
    marking = True

    def _reset_state(self):
        self._rng = self.phase_rng(0)

    def on_phase_start(self, phase_index):
        self._rng = self.phase_rng(phase_index)

    def choose_victim(self, page, vertex=None):
        return self._rng.choice(self._unmarked_resident())


def lru(k: int) -> LruPolicy:
    return LruPolicy(k)


def fifo(k: int) -> FifoPolicy:
    return FifoPolicy(k)


def rmark(k: int, seed: int = 0) -> RMarkPolicy:
    return RMarkPolicy(k, seed)


class _BeladyPolicy(PagingPolicy):
    """Offline: evicts the resident page whose next use is furthest away.

    Pages never used again are preferred, smallest id first so runs are
    deterministic.  Needs the whole request list up front; next uses are
    looked up against the simulation clock, so they stay exact.
    """

    name = "belady"

    def __init__(self, k: int, requests: list[int]):
        super().__init__(k)
        occurrences: dict[int, list[int]] = {}
        for i, page in enumerate(requests):
            occurrences.setdefault(page, []).append(i)
        self._occurrences = occurrences

    def _next_use(self, page: int, now: int) -> float:
        occ = self._occurrences[page]
        j = bisect_right(occ, now)
        return occ[j] if j < len(occ) else _NEVER

    def choose_victim(self, page, vertex=None):
        now = self._snapshot.time
        return min(
            self._snapshot.resident, key=lambda p: (-self._next_use(p, now), p)
        )


def belady(sequence, k: int) -> PolicyTrace:
    """Fault-optimal offline run (Belady's rule) over the full sequence."""
    requests = _requests_of(sequence)
    policy = _BeladyPolicy(k, requests)
    return simulate(policy, RequestSequence(requests), k)
