import pytest
from hypothesis import given, settings, strategies as st

import paginglab as pl
from paginglab.core import ContractViolationError, EmptySequenceError, TraceMismatchError
from paginglab.policies import LruPolicy


def reference_phase_scan(requests, k):
    """Independent phase scanner: restart the distinct-set whenever adding
    the next request would exceed k distinct pages."""
    phases = []
    current = []
    seen = set()
    for page in requests:
        if page not in seen and len(seen) == k:
            phases.append(current)
            current = []
            seen = set()
        current.append(page)
        seen.add(page)
    phases.append(current)
    return phases


class TestPartitionPhases:
    def test_spec_example_k3(self):
        ledger = pl.partition_phases([1, 2, 3, 1, 2, 4], 3)
        assert ledger.boundaries == [(0, 5), (5, 6)]
        assert ledger.new_pages == [3, 1]

    def test_single_page(self):
        ledger = pl.partition_phases([1, 1, 1], 2)
        assert ledger.boundaries == [(0, 3)]
        assert ledger.new_pages == [1]

    def test_cycle_example(self):
        ledger = pl.partition_phases([1, 2, 3, 4, 1, 2, 3, 4], 3)
        assert [set(d) for d in ledger.distinct_pages] == [
            {1, 2, 3},
            {4, 1, 2},
            {3, 4},
        ]
        # hand-stepping the definition: phase 3 requests {3,4} and 4 was
        # already requested in phase 2, so only 3 is new
        assert ledger.new_pages == [3, 1, 1]

    def test_empty_sequence_rejected(self):
        with pytest.raises(EmptySequenceError):
            pl.partition_phases([], 3)

    @given(
        st.lists(st.integers(1, 8), min_size=1, max_size=60),
        st.integers(1, 5),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_reference_scanner(self, requests, k):
        ledger = pl.partition_phases(requests, k)
        reference = reference_phase_scan(requests, k)
        starts = [s for s, _ in ledger.boundaries]
        expected_starts = []
        pos = 0
        for block in reference:
            expected_starts.append(pos)
            pos += len(block)
        assert starts == expected_starts
        # every phase except possibly the last has exactly k distinct pages
        for d in ledger.distinct_pages[:-1]:
            assert len(d) == k
        assert len(ledger.distinct_pages[-1]) <= k
        assert all(g >= 1 for g in ledger.new_pages)
        assert ledger.new_pages[0] == len(ledger.distinct_pages[0])


class TestOptSandwich:
    def test_lemma_values(self):
        ledger = pl.partition_phases([1, 2, 3, 1, 2, 4], 3)
        assert pl.opt_sandwich(ledger) == (2, 4)

    def test_single_phase(self):
        assert pl.opt_sandwich(pl.partition_phases([1, 1], 1)) == (1, 1)

    def test_three_phase_arithmetic(self):
        ledger = pl.PhaseLedger(
            k=3,
            boundaries=[(0, 4), (4, 8), (8, 12)],
            new_pages=[3, 1, 2],
            distinct_pages=[{1, 2, 3}, {4, 1, 2}, {3, 4, 5}],
        )
        assert pl.opt_sandwich(ledger) == (3, 6)


class BadPolicy(LruPolicy):
    name = "bad"

    def choose_victim(self, page, vertex=None):
        return 10_000  # never resident


class TestSimulate:
    def test_lru_hand_example(self):
        trace = pl.simulate(pl.lru(2), [1, 2, 1, 3], 2)
        assert trace.total_faults == 3

    def test_fifo_hand_example(self):
        trace = pl.simulate(pl.fifo(2), [1, 2, 1, 3, 1], 2)
        assert trace.total_faults == 4
        # 3 evicts 1, then 1 evicts 2
        assert [e.evicted for e in trace.events if e.evicted is not None] == [1, 2]

    def test_marking_policy_phase_bound(self):
        seq = [1, 2, 3, 4, 5, 1, 2, 6, 7, 3, 1, 5, 2, 4, 6, 1] * 4
        trace = pl.simulate(pl.rmark(4, seed=7), seq, 4)
        assert all(f <= 4 for f in trace.faults_per_phase)

    def test_determinism(self):
        seq = [1, 2, 3, 4, 2, 5, 1, 6, 2, 7] * 5
        a = pl.simulate(pl.rmark(3, seed=11), seq, 3)
        b = pl.simulate(pl.rmark(3, seed=11), seq, 3)
        assert a.events == b.events
        assert a.to_json() == b.to_json()

    def test_cold_start_faults(self):
        trace = pl.simulate(pl.lru(4), [1, 2, 3, 4], 4)
        assert trace.total_faults == 4

    def test_contract_violation_names_index(self):
        bad = BadPolicy(2)
        with pytest.raises(ContractViolationError) as err:
            pl.simulate(bad, [1, 2, 3], 2)
        assert err.value.index == 2

    def test_empty_sequence(self):
        with pytest.raises(EmptySequenceError):
            pl.simulate(pl.lru(2), [], 2)

    def test_phase_starts_match_ledger(self):
        seq = [1, 2, 3, 4, 1, 5, 2, 6, 3, 1, 2, 4]
        trace = pl.simulate(pl.lru(3), seq, 3)
        ledger = pl.partition_phases(seq, 3)
        assert trace.phase_starts == [s for s, _ in ledger.boundaries]
        assert len(trace.faults_per_phase) == ledger.phase_count


class TestVerifyMarking:
    def test_rmark_passes(self):
        seq = [1, 2, 3, 4, 2, 5, 1, 6, 2, 7, 3, 4] * 3
        trace = pl.simulate(pl.rmark(3, seed=5), seq, 3)
        assert pl.verify_marking(trace, pl.partition_phases(seq, 3)) is True

    def test_fifo_evicts_marked_page(self):
        # FIFO pushes out page 2 while it is marked in the second phase
        seq = [1, 2, 3, 1, 4, 2, 1]
        trace = pl.simulate(pl.fifo(3), seq, 3)
        assert pl.verify_marking(trace, pl.partition_phases(seq, 3)) is False

    def test_lru_is_marking(self):
        # recency order puts stale pages before marked ones, so LRU never
        # evicts a marked page
        seq = [1, 2, 3, 1, 2, 4, 3, 5, 1, 2, 6, 4, 2, 1, 3] * 4
        trace = pl.simulate(pl.lru(3), seq, 3)
        assert pl.verify_marking(trace, pl.partition_phases(seq, 3)) is True

    def test_injected_violation_detected(self):
        seq = [1, 2, 3, 4, 1, 2]
        trace = pl.simulate(pl.lru(3), seq, 3)
        ledger = pl.partition_phases(seq, 3)
        assert pl.verify_marking(trace, ledger) is True
        bad = trace.events[5]._replace(evicted=4)  # page 4 is marked there
        trace.events[5] = bad
        assert pl.verify_marking(trace, ledger) is False

    def test_length_mismatch_rejected(self):
        seq = [1, 2, 3, 4, 1, 2]
        trace = pl.simulate(pl.lru(3), seq, 3)
        short = pl.partition_phases(seq[:-1], 3)
        with pytest.raises(TraceMismatchError):
            pl.verify_marking(trace, short)


class TestSerialization:
    def test_sequence_text_roundtrip(self):
        seq = pl.RequestSequence([3, 1, 4, 1, 5])
        assert pl.RequestSequence.from_text(seq.to_text()).requests == seq.requests

    def test_sequence_json_keeps_walk(self):
        seq = pl.RequestSequence([1, 2, 1], walk=[10, 11, 10])
        back = pl.RequestSequence.from_json(seq.to_json())
        assert back.walk == [10, 11, 10]

    def test_walk_length_checked(self):
        with pytest.raises(ValueError):
            pl.RequestSequence([1, 2], walk=[1])

    def test_ledger_json(self):
        import json

        ledger = pl.partition_phases([1, 2, 3, 1, 2, 4], 3)
        obj = json.loads(ledger.to_json())
        assert obj["boundaries"] == [[0, 5], [5, 6]]
        assert obj["new_pages"] == [3, 1]
