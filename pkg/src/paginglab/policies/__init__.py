"""Page-replacement policies and the canonical-name registry."""

from __future__ import annotations

from typing import Optional

from ..core import PagingError
from ..graphs import ExtendedAccessGraph
from .base import PagingPolicy, PolicyStateError
from .classic import FifoPolicy, LruPolicy, RMarkPolicy, belady, fifo, lru, rmark
from .hashing import (
    HashConfigError,
    HashMapper,
    HashedPolicy,
    hashed,
    is_prime,
    smallest_prime_at_least,
)
from .pathwise import MaxfarConfigError, MaxfarPolicy, maxfar
from .treewalk import DtoPolicy, RtoPolicy, dto, rto

POLICY_NAMES = ("belady", "lru", "fifo", "rmark", "rto", "dto", "maxfar", "rto+hash")

OFFLINE_NAMES = ("belady",)


def create_policy(
    name: str,
    k: int,
    seed: int = 0,
    params: Optional[dict] = None,
    graph: Optional[ExtendedAccessGraph] = None,
    start_vertex: Optional[int] = None,
) -> PagingPolicy:
    """Instantiate an online policy by canonical name.

    ``maxfar`` needs the workload's graph and start vertex; ``rto+hash``
    accepts an ``m`` parameter (default: smallest prime >= k**3).
    """
    params = dict(params or {})
    if name == "lru":
        return lru(k)
    if name == "fifo":
        return fifo(k)
    if name == "rmark":
        return rmark(k, seed)
    if name == "rto":
        return rto(k, seed)
    if name == "dto":
        return dto(k)
    if name == "maxfar":
        if graph is None or start_vertex is None:
            raise PagingError("maxfar needs a path graph and a start vertex")
        return maxfar(graph, start_vertex, k)
    if name == "rto+hash":
        m = params.pop("m", None) or smallest_prime_at_least(k**3)
        return hashed(lambda kk, ss: rto(kk, ss), k, m, seed)
    raise PagingError(f"unknown policy name {name!r}")


__all__ = [
    "POLICY_NAMES",
    "OFFLINE_NAMES",
    "PagingPolicy",
    "PolicyStateError",
    "LruPolicy",
    "FifoPolicy",
    "RMarkPolicy",
    "RtoPolicy",
    "DtoPolicy",
    "MaxfarPolicy",
    "MaxfarConfigError",
    "HashedPolicy",
    "HashMapper",
    "HashConfigError",
    "belady",
    "lru",
    "fifo",
    "rmark",
    "rto",
    "dto",
    "maxfar",
    "hashed",
    "is_prime",
    "smallest_prime_at_least",
    "create_policy",
]
