"""Deterministic synchronous round engine.

A message sent in round r is readable exactly in round r+1 (synchrony).
Within a round, parties step in ascending agent-id order and every inbox is
sorted by (sender, payload), so a run is a pure function of (topology,
parties, seed). Protocol-level failure is an agent deciding BOTTOM; breaking
simulator physics (sending on a non-edge, deciding twice) raises
SimulationFault instead and never yields a trace.
"""

from dataclasses import dataclass
from enum import Enum


class SimulationFault(RuntimeError):
    """A behavior violated simulator physics. Harness bug, not a protocol outcome."""


class RunawayProtocolError(RuntimeError):
    """Round budget exhausted before every agent decided an output."""


class _Bottom:
    __slots__ = ()

    def __repr__(self):
        return "BOTTOM"

    def __deepcopy__(self, memo):
        return self


#: The failure output (the protocol aborted at this agent).
BOTTOM = _Bottom()


class Legality(Enum):
    LEGAL = "legal"
    ERRONEOUS = "erroneous"


@dataclass
class ExecutionTrace:
    """Result of one synchronous run.

    outputs maps real agent ids (virtual Sybil identities collapse to the
    cheater's one id) to the decided value or BOTTOM. rounds, when recorded,
    holds per-round tuples of (frm, to, payload) in sent order.
    """

    outputs: dict
    round_count: int
    message_count: int
    rounds: list = None
    legality: Legality = None

    def erroneous(self) -> bool:
        return self.legality is Legality.ERRONEOUS


class NodeMachine:
    """Per-node protocol state machine, engine-agnostic.

    Subclasses implement on_round(rnd, inbox) -> list of (to, payload) and
    set .decided/.decision when the agent outputs. Machines are silent once
    decided.
    """

    __slots__ = ("me", "decided", "decision")

    def __init__(self, me: int):
        self.me = me
        self.decided = False
        self.decision = None

    def decide(self, value):
        self.decided = True
        self.decision = value

    def on_round(self, rnd, inbox):
        raise NotImplementedError


class Party:
    """One strategic participant controlling one or more nodes.

    A Sybil cheater is a single party whose nodes are its virtual identities;
    it still produces exactly one output, keyed by agent_id.
    """

    def __init__(self, agent_id, nodes):
        self.agent_id = agent_id
        self.nodes = tuple(nodes)
        self.decided = False
        self.decision = None

    def decide(self, value):
        if self.decided:
            raise SimulationFault("party %d decided twice" % self.agent_id)
        self.decided = True
        self.decision = value

    def on_round(self, rnd, inboxes):
        """inboxes: the full node id -> sorted [(frm, payload)] map for this round.

        A party must only read the boxes of its own nodes. Returns the
        messages to send as [(frm, to, payload)].
        """
        raise NotImplementedError


class AgentParty(Party):
    """Honest party: a single node driven by one NodeMachine."""

    def __init__(self, machine: NodeMachine):
        super().__init__(machine.me, (machine.me,))
        self.machine = machine

    def on_round(self, rnd, inboxes):
        me = self.machine.me
        out = self.machine.on_round(rnd, inboxes.get(me, ()))
        if self.machine.decided and not self.decided:
            self.decide(self.machine.decision)
        return [(me, to, payload) for to, payload in out]


def run_sync(topology, parties, max_rounds, record=False) -> ExecutionTrace:
    """Run parties on topology until every party decided or max_rounds passes."""
    if max_rounds <= 0:
        raise ValueError("max_rounds must be positive")
    owned = [node for p in parties for node in p.nodes]
    if sorted(owned) != sorted(topology.ids()):
        raise SimulationFault("parties must cover every node exactly once")
    edges = topology.edges
    parties = sorted(parties, key=lambda p: p.agent_id)
    pending = []
    rounds_log = [] if record else None
    message_count = 0
    final_round = None
    for rnd in range(max_rounds + 1):
        inbox_map = {}
        for frm, to, payload in pending:
            inbox_map.setdefault(to, []).append((frm, payload))
        for box in inbox_map.values():
            box.sort()
        pending = []
        for party in parties:
            sent = party.on_round(rnd, inbox_map)
            for frm, to, payload in sent:
                if frm not in party.nodes:
                    raise SimulationFault("party %d sent from foreign node %d" % (party.agent_id, frm))
                pair = (frm, to) if frm < to else (to, frm)
                if pair not in edges:
                    raise SimulationFault("send on non-edge (%d, %d)" % (frm, to))
                pending.append((frm, to, payload))
        message_count += len(pending)
        if record:
            rounds_log.append(tuple(sorted(pending)))
        if all(p.decided for p in parties):
            final_round = rnd
            break
    if final_round is None:
        raise RunawayProtocolError("no full output vector after %d rounds" % max_rounds)
    outputs = {p.agent_id: p.decision for p in parties}
    return ExecutionTrace(
        outputs=outputs,
        round_count=final_round + 1,
        message_count=message_count,
        rounds=rounds_log,
    )
