"""Universal-hash address compression around a marking policy.

The wrapped policy does all of its bookkeeping on hashed page ids
h(x) = (a*x + b) mod m while the real cache keeps true ids, so collisions can
corrupt the inner policy's tree structures but never the cache contents or
the fault count.  The wrapper stays a marking policy: an inner victim hash
that is unmarked in the hashed view can only map to truly unmarked pages.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from ..core import CacheSnapshot, MASK64, PagingError
from .base import PagingPolicy


class HashConfigError(PagingError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def smallest_prime_at_least(n: int) -> int:
    m = max(n, 2)
    while not is_prime(m):
        m += 1
    return m


@dataclass(frozen=True)
class HashMapper:
    """h(x) = (a*x + b) mod m with prime modulus m."""

    a: int
    b: int
    m: int

    def __post_init__(self):
        if not is_prime(self.m):
            raise HashConfigError(f"modulus {self.m} is not prime")
        if not (0 <= self.a < self.m and 0 <= self.b < self.m):
            raise HashConfigError("a and b must lie in Z_m")

    def __call__(self, x: int) -> int:
        return (self.a * x + self.b) % self.m

    @classmethod
    def draw(cls, m: int, rng: random.Random) -> "HashMapper":
        if not is_prime(m):
            raise HashConfigError(f"modulus {m} is not prime")
        return cls(rng.randrange(m), rng.randrange(m), m)


class HashedPolicy(PagingPolicy):
    """Runs an inner policy on hashed page ids; evictions map back to true ids.

    If a collision drives the inner policy into an impossible state its
    exception is swallowed and a random unmarked resident page is evicted
    instead, so fault accounting stays exact.
    """

    marking = True

    def __init__(self, policy_factory: Callable[[int, int], PagingPolicy],
                 k: int, m: int, seed: int = 0):
        super().__init__(k, seed)
        rng = random.Random((seed * 0x9E3779B97F4A7C15 + 0x1234567) & MASK64)
        self.mapper = HashMapper.draw(m, rng)
        self.inner = policy_factory(k, seed)
        self.name = f"{self.inner.name}+hash"

    def _reset_state(self):
        self._inner_snapshot = CacheSnapshot(set(), set(), self.k)
        self.inner.reset(self._inner_snapshot, self.seed)
        self._hash_count: dict[int, int] = {}
        self._mirror: set[int] = set()
        self._rng = self.phase_rng(0)

    def on_phase_start(self, phase_index):
        self._inner_snapshot.marked.clear()
        self._rng = self.phase_rng(phase_index)
        self.inner.on_phase_start(phase_index)

    def observe(self, page, vertex=None):
        h = self.mapper(page)
        if page not in self._mirror:
            self._mirror.add(page)
            self._hash_count[h] = self._hash_count.get(h, 0) + 1
            self._inner_snapshot.resident.add(h)
        self._inner_snapshot.marked.add(h)
        self.inner.observe(h, vertex)

    def choose_victim(self, page, vertex=None):
        snap = self._snapshot
        victim = None
        try:
            victim_hash = self.inner.choose_victim(self.mapper(page), vertex)
            candidates = sorted(
                q
                for q in snap.resident
                if q not in snap.marked and self.mapper(q) == victim_hash
            )
            if candidates:
                victim = candidates[0]
        except PagingError:
            victim = None
        if victim is None:
            # collision corrupted the inner state; fall back to a safe victim
            victim = self._rng.choice(self._unmarked_resident())
        h = self.mapper(victim)
        self._mirror.discard(victim)
        self._hash_count[h] -= 1
        if self._hash_count[h] == 0:
            self._inner_snapshot.resident.discard(h)
        return victim


def hashed(policy_factory: Callable[[int, int], PagingPolicy], k: int, m: int,
           seed: int = 0) -> HashedPolicy:
    return HashedPolicy(policy_factory, k, m, seed)
