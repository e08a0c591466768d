"""paginglab: a competitive-paging laboratory.

Cache simulation with phase/marking bookkeeping, extended access graphs,
truly-online tree-guided replacement policies, adversarial workload
generators, lower-bound estimators, and a reproducible experiment harness.
"""

from .core import (
    CacheSnapshot,
    ContractViolationError,
    EmptySequenceError,
    PagingError,
    PhaseLedger,
    PolicyTrace,
    RequestSequence,
    SimulationStepper,
    TraceEvent,
    opt_sandwich,
    partition_phases,
    simulate,
    verify_marking,
)
from .graphs import (
    INFINITY,
    ExtendedAccessGraph,
    GraphError,
    PhaseTree,
    PhaseTreeBuilder,
    build_phase_tree,
    cycle_graph,
    delta,
    path_graph,
    phase_graph,
    validate_walk,
)
from .policies import (
    belady,
    create_policy,
    dto,
    fifo,
    hashed,
    lru,
    maxfar,
    rmark,
    rto,
    smallest_prime_at_least,
)
from .bounds import (
    BoundReport,
    SubtreeWitness,
    VineDecomposition,
    brute_force_opt,
    max_leaf_subtree,
    vine_search,
    vine_value,
)
from .workloads import (
    AdversaryOutput,
    cycle_walk,
    deterministic_hole_adversary,
    example2,
    random_walk,
    randomized_halving_adversary,
    write_bundle,
)

__version__ = "0.1.0"
