"""Policy interface driven by the simulation stepper."""

from __future__ import annotations

import random
from typing import Optional

from ..core import MASK64, CacheSnapshot, PagingError


class PolicyStateError(PagingError):
    pass


class PagingPolicy:
    """Eviction strategy callbacks.

    The simulator owns the cache; a policy sees a read-only
    :class:`CacheSnapshot` and is consulted in this order per request:
    ``on_phase_start`` (at phase boundaries), ``choose_victim`` (on a fault
    with a full cache, before the page is loaded), ``observe`` (after the
    requested page is resident; skipped for consecutive duplicates).
    """

    name = "abstract"
    marking = False
    requires_walk = False

    def __init__(self, k: int, seed: int = 0):
        if k < 1:
            raise ValueError("k must be positive")
        self.k = k
        self.seed = seed
        self._snapshot: Optional[CacheSnapshot] = None

    def reset(self, snapshot: CacheSnapshot, seed: Optional[int] = None) -> None:
        self._snapshot = snapshot
        if seed is not None:
            self.seed = seed
        self._reset_state()

    def _reset_state(self) -> None:
        pass

    def on_phase_start(self, phase_index: int) -> None:
        pass

    def observe(self, page: int, vertex: Optional[int] = None) -> None:
        pass

    def choose_victim(self, page: int, vertex: Optional[int] = None) -> int:
        raise NotImplementedError

    def phase_rng(self, phase_index: int) -> random.Random:
        # split per phase so behavior within a phase does not depend on how
        # much randomness earlier phases consumed
        return random.Random((self.seed * 1000003 + phase_index) & MASK64)

    def _unmarked_resident(self) -> list[int]:
        snap = self._snapshot
        candidates = sorted(snap.resident - snap.marked)
        if not candidates:
            raise PolicyStateError(
                f"{self.name}: asked to evict with no unmarked resident page"
            )
        return candidates
