"""Cache, phase and marking model shared by every replacement policy.

The simulator owns the cache contents and the marking state; policies only
decide eviction victims.  Phases, marks and fault accounting follow the
standard k-distinct-page phase partition, computed online.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

MASK64 = (1 << 64) - 1
_DIGEST_MULT = 0x9E3779B97F4A7C15


class PagingError(Exception):
    """Base class for errors raised by this package."""


class EmptySequenceError(PagingError):
    pass


class ContractViolationError(PagingError):
    """A policy broke its eviction contract at a given request index."""

    def __init__(self, index: int, message: str):
        super().__init__(f"request {index}: {message}")
        self.index = index


class TraceMismatchError(PagingError):
    pass


def _mix(page: int) -> int:
    # stable 64-bit scrambler for the marked-set digest
    return ((page + 0x9E37) * _DIGEST_MULT) & MASK64


@dataclass
class RequestSequence:
    """Ordered page requests, optionally paired with the generating vertex walk."""

    requests: list[int]
    walk: Optional[list[int]] = None

    def __post_init__(self):
        if self.walk is not None and len(self.walk) != len(self.requests):
            raise ValueError("walk and requests must have equal length")

    def __len__(self) -> int:
        return len(self.requests)

    def to_text(self) -> str:
        return "\n".join(str(p) for p in self.requests) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RequestSequence":
        requests = [int(line) for line in text.split() if line.strip()]
        return cls(requests)

    def to_json(self) -> str:
        return json.dumps({"requests": self.requests, "walk": self.walk})

    @classmethod
    def from_json(cls, text: str) -> "RequestSequence":
        obj = json.loads(text)
        return cls(list(obj["requests"]), obj.get("walk"))


def _requests_of(sequence) -> list[int]:
    if isinstance(sequence, RequestSequence):
        return sequence.requests
    return list(sequence)


def _walk_of(sequence) -> Optional[list[int]]:
    if isinstance(sequence, RequestSequence):
        return sequence.walk
    return None


@dataclass
class PhaseLedger:
    """The k-distinct-page phase partition of a request sequence.

    ``boundaries`` holds half-open ``(start, stop)`` request-index ranges.
    ``new_pages[i]`` counts pages of phase i absent from phase i-1; every
    distinct page of phase 0 counts as new.
    """

    k: int
    boundaries: list[tuple[int, int]]
    new_pages: list[int]
    distinct_pages: list[set[int]]

    @property
    def phase_count(self) -> int:
        return len(self.boundaries)

    def covered_length(self) -> int:
        return self.boundaries[-1][1]

    def phase_of(self, index: int) -> int:
        for i, (start, stop) in enumerate(self.boundaries):
            if start <= index < stop:
                return i
        raise IndexError(index)

    def to_json(self) -> str:
        return json.dumps(
            {
                "k": self.k,
                "boundaries": [list(b) for b in self.boundaries],
                "new_pages": self.new_pages,
                "distinct_pages": [sorted(d) for d in self.distinct_pages],
            }
        )


def partition_phases(sequence, k: int) -> PhaseLedger:
    """Partition a request sequence into phases of exactly k distinct pages.

    A phase ends just before the request that would bring the (k+1)-th
    distinct page of the phase; the last phase may stay short.
    """
    requests = _requests_of(sequence)
    if not requests:
        raise EmptySequenceError("cannot partition an empty request sequence")
    if k < 1:
        raise ValueError("k must be positive")
    boundaries: list[tuple[int, int]] = []
    distinct: list[set[int]] = []
    start = 0
    current: set[int] = set()
    for i, page in enumerate(requests):
        if page not in current and len(current) == k:
            boundaries.append((start, i))
            distinct.append(current)
            start = i
            current = set()
        current.add(page)
    boundaries.append((start, len(requests)))
    distinct.append(current)
    new_pages = [len(distinct[0])]
    for i in range(1, len(distinct)):
        new_pages.append(len(distinct[i] - distinct[i - 1]))
    return PhaseLedger(k, boundaries, new_pages, distinct)


def opt_sandwich(ledger: PhaseLedger) -> tuple[int, int]:
    """Bracket the offline optimum: ceil(sum(g)/2) <= OPT <= sum(g)."""
    total = sum(ledger.new_pages)
    return (total + 1) // 2, total


@dataclass
class CacheSnapshot:
    """Read-only view of the simulated cache handed to policies.

    ``time`` is the index of the request currently being served.
    """

    resident: set[int]
    marked: set[int]
    capacity: int
    time: int = 0


class TraceEvent(NamedTuple):
    page: int
    hit: bool
    evicted: Optional[int]
    marked_count: int
    marked_digest: int


@dataclass
class PolicyTrace:
    """Per-request record of a policy run, enough to replay and audit it."""

    policy_name: str
    k: int
    seed: int
    events: list[TraceEvent]
    phase_starts: list[int]
    faults_per_phase: list[int]
    total_faults: int

    @property
    def hits(self) -> int:
        return len(self.events) - self.total_faults

    def pages(self) -> list[int]:
        return [e.page for e in self.events]

    def to_json(self) -> str:
        return json.dumps(
            {
                "policy": self.policy_name,
                "k": self.k,
                "seed": self.seed,
                "total_faults": self.total_faults,
                "phase_starts": self.phase_starts,
                "faults_per_phase": self.faults_per_phase,
                "events": [
                    {"page": e.page, "hit": e.hit, "evicted": e.evicted}
                    for e in self.events
                ],
            }
        )


class SimulationStepper:
    """Incremental simulation: feed one request at a time.

    Used by :func:`simulate` and by adversary generators that must observe a
    policy's evictions while still constructing the request sequence.
    """

    def __init__(self, policy, k: int, seed: Optional[int] = None):
        if k < 1:
            raise ValueError("k must be positive")
        policy_k = getattr(policy, "k", k)
        if policy_k != k:
            raise ValueError(f"policy built for k={policy_k}, simulated with k={k}")
        self.policy = policy
        self.k = k
        self.seed = seed if seed is not None else getattr(policy, "seed", 0)
        self.snapshot = CacheSnapshot(set(), set(), k)
        policy.reset(self.snapshot, self.seed)
        self.events: list[TraceEvent] = []
        self.phase_starts: list[int] = []
        self.faults_per_phase: list[int] = []
        self.total_faults = 0
        self._phase_index = -1
        self._phase_distinct: set[int] = set()
        self._digest = 0
        self._prev_page: Optional[int] = None

    def step(self, page: int, vertex: Optional[int] = None) -> TraceEvent:
        index = len(self.events)
        snap = self.snapshot
        snap.time = index
        boundary = self._phase_index < 0 or (
            page not in self._phase_distinct and len(self._phase_distinct) == self.k
        )
        if boundary:
            self._phase_index += 1
            self._phase_distinct = set()
            snap.marked.clear()
            self._digest = 0
            self.phase_starts.append(index)
            self.faults_per_phase.append(0)
            self.policy.on_phase_start(self._phase_index)
        self._phase_distinct.add(page)
        evicted = None
        if page in snap.resident:
            hit = True
            # consecutive duplicates are hits and only re-mark
            if page != self._prev_page:
                self.policy.observe(page, vertex)
        else:
            hit = False
            if len(snap.resident) == self.k:
                victim = self.policy.choose_victim(page, vertex)
                if victim not in snap.resident:
                    raise ContractViolationError(index, f"victim {victim} is not resident")
                if getattr(self.policy, "marking", False) and victim in snap.marked:
                    raise ContractViolationError(
                        index, f"marking policy evicted marked page {victim}"
                    )
                snap.resident.discard(victim)
                evicted = victim
            snap.resident.add(page)
            self.total_faults += 1
            self.faults_per_phase[-1] += 1
            self.policy.observe(page, vertex)
        if page not in snap.marked:
            snap.marked.add(page)
            self._digest ^= _mix(page)
        self._prev_page = page
        event = TraceEvent(page, hit, evicted, len(snap.marked), self._digest)
        self.events.append(event)
        return event

    def finish(self) -> PolicyTrace:
        return PolicyTrace(
            policy_name=getattr(self.policy, "name", "?"),
            k=self.k,
            seed=self.seed,
            events=self.events,
            phase_starts=self.phase_starts,
            faults_per_phase=self.faults_per_phase,
            total_faults=self.total_faults,
        )


def simulate(policy, sequence, k: int, seed: Optional[int] = None) -> PolicyTrace:
    """Run a policy over a request sequence from a cold cache.

    Deterministic given (policy configuration, sequence, k, seed).  ``seed``
    overrides the seed the policy was constructed with; when omitted the
    policy's own seed is used.
    """
    requests = _requests_of(sequence)
    walk = _walk_of(sequence)
    if not requests:
        raise EmptySequenceError("cannot simulate an empty request sequence")
    if getattr(policy, "requires_walk", False) and walk is None:
        raise PagingError(
            f"policy {getattr(policy, 'name', '?')} requires the vertex walk"
        )
    stepper = SimulationStepper(policy, k, seed)
    if walk is None:
        for page in requests:
            stepper.step(page)
    else:
        for page, vertex in zip(requests, walk):
            stepper.step(page, vertex)
    return stepper.finish()


def verify_marking(trace: PolicyTrace, ledger: PhaseLedger) -> bool:
    """Check a trace against the marking discipline.

    True iff no eviction victim was marked at eviction time and the trace's
    marked-set digests agree with marks recomputed from the ledger's phase
    boundaries (marks reset exactly there).
    """
    if len(trace.events) != ledger.covered_length():
        raise TraceMismatchError(
            f"trace has {len(trace.events)} events, ledger covers {ledger.covered_length()}"
        )
    starts = {start for start, _ in ledger.boundaries}
    marked: set[int] = set()
    digest = 0
    for i, event in enumerate(trace.events):
        if i in starts:
            marked.clear()
            digest = 0
        if event.evicted is not None and event.evicted in marked:
            return False
        if event.page not in marked:
            marked.add(event.page)
            digest ^= _mix(event.page)
        if event.marked_count != len(marked) or event.marked_digest != digest:
            return False
    return True
