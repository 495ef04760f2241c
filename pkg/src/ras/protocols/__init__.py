"""Honest protocol behaviors, legality predicates, and the utility function."""

from .common import (
    PROBLEMS,
    check_full_knowledge,
    classify,
    legality,
    utility,
)
from .ringbase import RingNodeMachine
from .knowledge import KSNode, KnowledgeExchange, ks_ring, shared_coin
from .election import LeaderElectionNode, fair_leader_election
from .partition import ring_partition
from .orientation import orientation
from .ringcolor import ring_coloring
from .witness import witness_coloring

__all__ = [
    "KSNode",
    "KnowledgeExchange",
    "LeaderElectionNode",
    "PROBLEMS",
    "RingNodeMachine",
    "check_full_knowledge",
    "classify",
    "fair_leader_election",
    "ks_ring",
    "legality",
    "orientation",
    "ring_coloring",
    "ring_partition",
    "shared_coin",
    "utility",
    "witness_coloring",
]
