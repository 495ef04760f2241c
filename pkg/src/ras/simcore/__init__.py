"""Core simulator: deterministic RNG streams, topologies, round engine, wake-up."""

from .rng import RngStream, mix64
from .topology import (
    NetworkTopology,
    Node,
    TopologyError,
    build_chorded_ring,
    build_ring,
    verify_two_connected,
)
from .engine import (
    BOTTOM,
    AgentParty,
    ExecutionTrace,
    Legality,
    NodeMachine,
    Party,
    RunawayProtocolError,
    SimulationFault,
    run_sync,
)
from .wakeup import GeneralWakeup, WakeUpNode, run_wake_up

__all__ = [
    "AgentParty",
    "BOTTOM",
    "ExecutionTrace",
    "GeneralWakeup",
    "Legality",
    "NetworkTopology",
    "Node",
    "NodeMachine",
    "Party",
    "RngStream",
    "RunawayProtocolError",
    "SimulationFault",
    "TopologyError",
    "WakeUpNode",
    "build_chorded_ring",
    "build_ring",
    "mix64",
    "run_sync",
    "run_wake_up",
    "verify_two_connected",
]
