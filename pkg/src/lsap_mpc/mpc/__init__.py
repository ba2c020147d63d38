"""Simulated three-party MPC runtime and oblivious solver execution."""

from .engine import (
    BitBoundError,
    ConsistencyError,
    CostModel,
    Engine,
    EventKind,
    LeakageEvent,
    LeakageLog,
    MPCError,
    Network,
    Party,
    SharedValue,
)
from .field import P61, field_for
from .oblivious import ALGORITHMS, ObliviousRun, SecureArith, run_oblivious
from .shuffle import ShuffleHandle, shuffle2d, unshuffle2d

__all__ = [
    "ALGORITHMS",
    "BitBoundError",
    "ConsistencyError",
    "CostModel",
    "Engine",
    "EventKind",
    "LeakageEvent",
    "LeakageLog",
    "MPCError",
    "Network",
    "ObliviousRun",
    "P61",
    "Party",
    "SecureArith",
    "SharedValue",
    "ShuffleHandle",
    "field_for",
    "run_oblivious",
    "shuffle2d",
    "unshuffle2d",
]
