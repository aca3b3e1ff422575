"""Exact reduced genus-one Gromov-Witten invariants of (P^m, hyperplane).

The package computes, over the rationals, four systems of invariants linked
by a tangency-lowering recursion: absolute invariants of P^m, absolute
invariants of the hyperplane H = P^{m-1}, relative invariants of the pair
(P^m, H) and rubber invariants of the projective bundle P(O + O(1)) over H.
"""

from .engine import RecursionTrace, compute, trace
from .genus0 import absolute_g0, relative_g0, rubber_g0
from .genus1 import (
    UnsupportedKeyError,
    absolute_g1,
    absolute_g1_Y,
    relative_g1,
    rubber_g1,
)
from .keys import (
    CombinatorialType,
    Edge,
    Insertion,
    InvariantKey,
    Rat,
    TangencyVector,
    ValidationError,
    Vertex,
    virtual_dimension,
)
from .store import CacheStore, FixtureConflictError, fixture_store

__version__ = "0.1.0"

__all__ = [
    "CacheStore",
    "CombinatorialType",
    "Edge",
    "FixtureConflictError",
    "Insertion",
    "InvariantKey",
    "Rat",
    "RecursionTrace",
    "TangencyVector",
    "UnsupportedKeyError",
    "ValidationError",
    "Vertex",
    "absolute_g0",
    "absolute_g1",
    "absolute_g1_Y",
    "compute",
    "fixture_store",
    "relative_g0",
    "relative_g1",
    "rubber_g0",
    "rubber_g1",
    "trace",
    "virtual_dimension",
    "__version__",
]
