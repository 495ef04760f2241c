"""Wake-Up building block: learn ids, n' and the topology by flooding.

Every agent announces (id, neighbor ids) in round 0 and relays each new
announcement once. An agent's view is closed when every id mentioned as a
neighbor has announced itself; on a connected graph that certifies the whole
topology. Conflicting announcements for the same origin turn the observer
to BOTTOM and an abort floods out.
"""

from .engine import BOTTOM, AgentParty, NodeMachine, run_sync
from .rng import RngStream


class GeneralWakeup:
    """Flooding state for one agent; engine-agnostic."""

    def __init__(self, me, neighbor_ids):
        self.me = me
        self.nbrs = tuple(sorted(neighbor_ids))
        self.adj = {me: self.nbrs}
        self.mentioned = {me, *self.nbrs}
        self.closed = False
        self.close_round = None
        self.conflict = False

    def start(self):
        """Round-0 announcements."""
        return [(v, ("id-announce", self.me, self.nbrs)) for v in self.nbrs]

    def absorb(self, rnd, frm, origin, origin_nbrs):
        """Record one announcement; returns relay messages."""
        origin_nbrs = tuple(origin_nbrs)
        if origin in self.adj:
            if self.adj[origin] != origin_nbrs:
                self.conflict = True
            return []
        self.adj[origin] = origin_nbrs
        self.mentioned.update(origin_nbrs)
        if not self.closed and self.mentioned <= set(self.adj):
            self.closed = True
            self.close_round = rnd
        return [(v, ("id-announce", origin, origin_nbrs)) for v in self.nbrs if v != frm]

    @property
    def n_prime(self):
        return len(self.adj) if self.closed else None

    def sorted_ids(self):
        return tuple(sorted(self.adj))

    def anchor_round(self) -> int:
        """First round by which every agent's view is closed: max eccentricity + 1."""
        return max(self._eccentricities().values()) + 1

    def _eccentricities(self):
        ecc = {}
        for source in self.adj:
            dist = {source: 0}
            frontier = [source]
            while frontier:
                nxt = []
                for v in frontier:
                    for w in self.adj[v]:
                        if w not in dist:
                            dist[w] = dist[v] + 1
                            nxt.append(w)
                frontier = nxt
            ecc[source] = max(dist.values())
        return ecc

    def view(self):
        adjacency = tuple(sorted((i, self.adj[i]) for i in self.adj))
        return (self.n_prime, self.sorted_ids(), adjacency)


class WakeUpNode(NodeMachine):
    """Honest agent running only Wake-Up and outputting its learned view."""

    def __init__(self, me, neighbor_ids, beta=None):
        super().__init__(me)
        self.wake = GeneralWakeup(me, neighbor_ids)
        self.beta = beta
        self._aborted = False

    def on_round(self, rnd, inbox):
        if self.decided:
            return []
        out = []
        if rnd == 0:
            out.extend(self.wake.start())
        for frm, payload in inbox:
            tag = payload[0]
            if tag == "abort":
                return self._abort()
            if tag == "id-announce":
                out.extend(self.wake.absorb(rnd, frm, payload[1], payload[2]))
        if self.wake.conflict:
            return self._abort()
        if self.wake.closed:
            if self.beta is not None and self.wake.n_prime > self.beta:
                return self._abort()
            if rnd >= self.wake.anchor_round():
                self.decide(self.wake.view())
        return out

    def _abort(self):
        self.decide(BOTTOM)
        return [(v, ("abort",)) for v in self.wake.nbrs]


def run_wake_up(topology, seed, beta=None, max_rounds=None, record=False):
    """All-honest Wake-Up on any topology; outputs are per-agent views."""
    del seed  # deterministic protocol; kept for interface uniformity
    if max_rounds is None:
        max_rounds = 2 * topology.n + 4
    parties = [
        AgentParty(WakeUpNode(i, topology.neighbors[i], beta=beta)) for i in topology.ids()
    ]
    return run_sync(topology, parties, max_rounds=max_rounds, record=record)
