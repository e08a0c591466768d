import math
import statistics

import pytest

import paginglab as pl
from paginglab import policies as pol
from paginglab.core import PagingError
from paginglab.policies.pathwise import MaxfarConfigError


class TestConfiguration:
    def test_requires_path(self):
        labels = {1: 1, 2: 2, 3: 3, 4: 4}
        edges = [(1, 2), (1, 3), (1, 4)]
        star = pl.ExtendedAccessGraph(labels, edges)
        with pytest.raises(MaxfarConfigError):
            pol.maxfar(star, 1, 3)

    def test_requires_k_plus_one_labels(self):
        g = pl.path_graph([1, 2, 3, 4])
        with pytest.raises(MaxfarConfigError):
            pol.maxfar(g, 1, 4)  # only 4 labels, needs 5

    def test_requires_walk(self):
        g = pl.path_graph([1, 2, 3, 4, 5])
        policy = pol.maxfar(g, 1, 4)
        with pytest.raises(PagingError):
            pl.simulate(policy, pl.RequestSequence([1, 2, 3]), 4)


class TestInjectivePath:
    def test_few_maximal_pages(self):
        k = 8
        g = pl.path_graph(list(range(1, k + 2)))
        seq = pl.random_walk(g, 400, seed=9)
        policy = pol.maxfar(g, seq.walk[0], k)
        trace = pl.simulate(policy, seq, k)
        for phase in policy.transcript:
            if phase["m_size"] is not None:
                assert phase["m_size"] <= 2
        # at most a couple of faults per phase once the cache is warm
        assert all(f <= 3 for f in trace.faults_per_phase[1:])
        assert pl.verify_marking(trace, pl.partition_phases(seq, k))


class TestAdversaryGraphs:
    def test_fault_bound_and_halving(self):
        k, f = 64, 16
        fprime = f + 1
        out = pl.randomized_halving_adversary(k=k, f=f, phases=8, seed=5)
        policy = pol.maxfar(out.graph, out.sequence.walk[0], k)
        trace = pl.simulate(policy, out.sequence, k)
        bound = 2 * math.ceil(k / fprime) * math.ceil(math.log2(fprime)) + 4
        blocks = out.meta["block_ranges"][1:]
        for start, stop in blocks:
            faults = sum(1 for e in trace.events[start:stop] if not e.hit)
            assert faults <= bound
        for phase in policy.transcript:
            sizes = phase["n_sizes"]
            for before, after in zip(sizes, sizes[1:]):
                assert after <= before / 2 + 1

    def test_marking(self):
        k, f = 32, 8
        out = pl.randomized_halving_adversary(k=k, f=f, phases=6, seed=2)
        policy = pol.maxfar(out.graph, out.sequence.walk[0], k)
        trace = pl.simulate(policy, out.sequence, k)
        assert pl.verify_marking(trace, pl.partition_phases(out.sequence, k))
        assert all(fp <= k for fp in trace.faults_per_phase)
