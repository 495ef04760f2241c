"""Edge orientation by simultaneous one-bit exchange.

Both endpoints of every edge send a random bit (and their id) in round 0.
XOR of the two bits decides the direction: 1 points at the higher id,
0 at the lower. Each agent outputs its list of (edge, direction) pairs.
"""

from ..simcore.engine import BOTTOM, AgentParty, NodeMachine, run_sync
from ..simcore.rng import RngStream
from .common import classify


class OrientationNode(NodeMachine):
    def __init__(self, me, neighbor_ids, rng):
        super().__init__(me)
        self.nbrs = tuple(sorted(neighbor_ids))
        self.bits = {v: rng.bit() for v in self.nbrs}

    def on_round(self, rnd, inbox):
        if rnd == 0:
            return [(v, ("coin-share", self.bits[v], self.me)) for v in self.nbrs]
        entries = []
        for frm, payload in inbox:
            mixed = self.bits[frm] ^ payload[1]
            toward = max(self.me, frm) if mixed else min(self.me, frm)
            edge = (min(self.me, frm), max(self.me, frm))
            entries.append((edge, toward))
        if len(entries) != len(self.nbrs):
            self.decide(BOTTOM)
            return []
        self.decide(tuple(sorted(entries)))
        return []


def orientation(topology, seed, record=False):
    rng = RngStream(seed, "orientation")
    parties = [
        AgentParty(OrientationNode(a, topology.neighbors[a], rng.fork(a)))
        for a in topology.ids()
    ]
    trace = run_sync(topology, parties, max_rounds=4, record=record)
    return classify("orientation", topology, trace)
