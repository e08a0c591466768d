import math
import statistics

import pytest

import paginglab as pl
from paginglab import policies as pol
from paginglab.graphs import GraphError
from paginglab.workloads import AdversaryError, NondeterministicPolicyError


class TestCycleWalk:
    def test_small_example(self):
        out = pl.cycle_walk(3, 2)
        assert out.sequence.requests == [1, 2, 3, 4, 1, 2, 3, 4]

    def test_delta_infinite(self):
        out = pl.cycle_walk(5, 3)
        assert pl.delta(out.graph) == pl.INFINITY

    def test_lru_faults_every_request(self):
        out = pl.cycle_walk(4, 30)
        trace = pl.simulate(pl.lru(4), out.sequence, 4)
        assert trace.total_faults == len(out.sequence)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            pl.cycle_walk(1, 5)


class TestRandomWalk:
    def test_forced_alternation(self):
        g = pl.path_graph([1, 2])
        seq = pl.random_walk(g, 4, seed=0)
        assert seq.walk == [1, 2, 1, 2]

    def test_always_validates(self):
        g = pl.cycle_graph(list(range(1, 8)))
        for seed in range(10):
            seq = pl.random_walk(g, 50, seed=seed, stay_prob=0.2)
            assert pl.validate_walk(g, seq.walk)

    def test_single_vertex(self):
        g = pl.ExtendedAccessGraph({5: 9}, [])
        seq = pl.random_walk(g, 6, seed=1)
        assert seq.requests == [9] * 6

    def test_unknown_start(self):
        g = pl.path_graph([1, 2])
        with pytest.raises(GraphError):
            pl.random_walk(g, 3, seed=0, start=77)

    def test_pure_function_of_seed(self):
        g = pl.cycle_graph(list(range(1, 9)))
        assert (
            pl.random_walk(g, 64, seed=5).requests
            == pl.random_walk(g, 64, seed=5).requests
        )


class TestExample2:
    def test_delta_is_k_plus_1(self):
        for k in (4, 8, 16):
            out = pl.example2(k, 4)
            assert pl.delta(out.graph) == k + 1
            assert out.advertised_delta == k + 1

    def test_phase_structure(self):
        k = 8
        out = pl.example2(k, 7)
        ledger = pl.partition_phases(out.sequence, k)
        assert ledger.phase_count == 7
        # the sweep blocks carry exactly one new page per phase after warm-up
        assert ledger.new_pages[0] == k
        assert all(g == 1 for g in ledger.new_pages[1:])
        for d in ledger.distinct_pages[:-1]:
            assert len(d) == k

    def test_block_boundary_offset(self):
        # the descending sweep's final request opens the next phase, so
        # phase boundaries trail the J-blocks by one from the second sweep on
        k = 6
        out = pl.example2(k, 5)
        ledger = pl.partition_phases(out.sequence, k)
        starts = [s for s, _ in ledger.boundaries]
        assert starts[0] == 0 and starts[1] == k
        down_len = len([k + 1, 1, k + 1] + list(range(k, 1, -1)))
        assert starts[2] == k + down_len - 1

    def test_belady_cheap(self):
        k = 16
        out = pl.example2(k, 10)
        trace = pl.belady(out.sequence, k)
        assert all(f <= 2 for f in trace.faults_per_phase[1:])

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            pl.example2(3, 4)
        with pytest.raises(ValueError):
            pl.example2(8, 1)


class TestDeterministicHoleAdversary:
    def test_forces_fprime_faults_per_block(self):
        k, f = 8, 4
        out = pl.deterministic_hole_adversary(pol.dto(k), k, f, 6)
        trace = pl.simulate(pol.dto(k), out.sequence, k)
        for start, stop in out.meta["block_ranges"][1:]:
            faults = sum(1 for e in trace.events[start:stop] if not e.hit)
            assert faults >= f + 1

    def test_hole_requests_fault(self):
        k, f = 8, 4
        out = pl.deterministic_hole_adversary(pol.dto(k), k, f, 5)
        trace = pl.simulate(pol.dto(k), out.sequence, k)
        assert out.meta["hole_fault_indices"]
        for idx in out.meta["hole_fault_indices"]:
            assert not trace.events[idx].hit

    def test_delta_meets_bounds(self):
        k, f = 16, 8
        out = pl.deterministic_hole_adversary(pol.dto(k), k, f, 6)
        d = pl.delta(out.graph)
        assert d >= out.advertised_delta == k - f
        assert d == k - f + 1  # the block layout achieves the cap exactly

    def test_partition_structure(self):
        # walk legality forces re-requests across earlier blocks, so the
        # partition slices each adversary block into several k-distinct
        # phases, every one bringing exactly one new page
        k, f = 8, 4
        out = pl.deterministic_hole_adversary(pol.dto(k), k, f, 5)
        ledger = pl.partition_phases(out.sequence, k)
        assert ledger.phase_count > out.phase_count
        assert all(g == 1 for g in ledger.new_pages[1:])
        lower, upper = pl.opt_sandwich(ledger)
        assert upper == ledger.phase_count + k - 1

    def test_works_against_fifo(self):
        k, f = 8, 3
        out = pl.deterministic_hole_adversary(pl.fifo(k), k, f, 5)
        trace = pl.simulate(pl.fifo(k), out.sequence, k)
        for start, stop in out.meta["block_ranges"][1:]:
            faults = sum(1 for e in trace.events[start:stop] if not e.hit)
            assert faults >= f + 1

    def test_nondeterministic_victim_rejected(self):
        import itertools

        class FlakyPolicy(pol.PagingPolicy):
            name = "flaky"
            _shared_flip = itertools.count()  # class-level: survives deepcopy

            def choose_victim(self, page, vertex=None):
                resident = sorted(self._snapshot.resident)
                return resident[next(self._shared_flip) % len(resident)]

        k = 8
        with pytest.raises(NondeterministicPolicyError):
            pl.deterministic_hole_adversary(FlakyPolicy(k), k, 4, 4)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            pl.deterministic_hole_adversary(pol.dto(4), 4, 4, 4)


class TestRandomizedHalvingAdversary:
    def test_subphase_count_window(self):
        k, f = 32, 12
        fprime = f + 1
        low = math.floor(math.log2(fprime)) - 1
        high = math.ceil(math.log2(fprime)) + 1
        for seed in range(10):
            out = pl.randomized_halving_adversary(k, f, 6, seed)
            for count in out.meta["subphase_counts"]:
                assert low <= count <= high

    def test_phase_alignment_and_delta(self):
        k, f = 32, 12
        out = pl.randomized_halving_adversary(k, f, 8, seed=3)
        ledger = pl.partition_phases(out.sequence, k)
        assert ledger.phase_count == 8
        assert [s for s, _ in ledger.boundaries] == [
            s for s, _ in out.meta["block_ranges"]
        ]
        assert all(g == 1 for g in ledger.new_pages[1:])
        assert pl.delta(out.graph) >= out.advertised_delta == k - f - 1

    def test_forces_log_faults_against_dto(self):
        k, f = 64, 16
        per_phase = []
        for seed in range(15):
            out = pl.randomized_halving_adversary(k, f, 6, seed)
            trace = pl.simulate(pol.dto(k), out.sequence, k)
            for start, stop in out.meta["block_ranges"][1:]:
                per_phase.append(
                    sum(1 for e in trace.events[start:stop] if not e.hit)
                )
        assert statistics.fmean(per_phase) >= 0.4 * math.log2(f)

    def test_pure_function_of_seed(self):
        a = pl.randomized_halving_adversary(16, 6, 5, seed=4)
        b = pl.randomized_halving_adversary(16, 6, 5, seed=4)
        assert a.sequence.requests == b.sequence.requests
        assert a.walk == b.walk

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            pl.randomized_halving_adversary(16, 3, 5, seed=0)  # f >= 4


class TestBundle:
    def test_write_bundle(self, tmp_path):
        out = pl.cycle_walk(4, 3)
        directory = tmp_path / "bundle"
        pl.write_bundle(out, str(directory))
        assert (directory / "graph.json").exists()
        assert (directory / "walk.txt").exists()
        assert (directory / "sequence.txt").exists()
        import json

        meta = json.loads((directory / "meta.json").read_text())
        assert meta["phases"] == 3
        graph = pl.ExtendedAccessGraph.load(directory / "graph.json")
        assert graph.labels == out.graph.labels
