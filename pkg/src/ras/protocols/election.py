"""Fair leader election on a ring by commit-then-reveal modular sum.

After wake-up each agent commits a uniform value in {0..n'-1} and sends it
along the orientation; values circulate for n'-1 rounds, the full vector is
echo-validated, and the leader is the agent holding the ((sum w) mod n')-th
largest id (0-based, descending). Any single honest contribution makes the
sum uniform, so every agent wins with probability exactly 1/n'.
"""

from ..simcore.engine import AgentParty, run_sync
from ..simcore.rng import RngStream
from .common import classify
from .ringbase import RingNodeMachine


class VectorPhase:
    """Commit one value per agent, circulate along the orientation, validate."""

    def __init__(self, node, start, chan, my_value):
        self.node = node
        self.start = start
        self.chan = chan
        self.values = {node.me: my_value}
        self._echoes = 0
        self.validated = False

    def complete_round(self):
        return self.start + self.node.n1 - 1

    def validated_round(self):
        return self.start + self.node.n1

    def tick(self, rnd):
        node = self.node
        if rnd == self.start:
            node.send(node.orient_next(), ("coin-share", self.chan, node.me, self.values[node.me], 1))
        if rnd == self.complete_round():
            if len(self.values) != node.n1:
                node.fail()
                return
            node.send(node.succ, ("vec-echo", self.chan, self._canon()))
            node.send(node.pred, ("vec-echo", self.chan, self._canon()))
        if rnd == self.validated_round():
            if self._echoes < 2:
                node.fail()
                return
            self.validated = True

    def handle_value(self, rnd, frm, origin, value, hops):
        node = self.node
        if origin in self.values:
            node.fail()
            return
        self.values[origin] = value
        if hops < node.n1 - 1:
            node.send(node.orient_next(), ("coin-share", self.chan, origin, value, hops + 1))

    def handle_echo(self, rnd, frm, vector):
        if vector != self._canon():
            self.node.fail()
            return
        self._echoes += 1

    def _canon(self):
        return tuple(sorted(self.values.items()))

    def total(self):
        return sum(self.values.values())


class LeaderElectionNode(RingNodeMachine):
    """Honest agent: commit w in {0..n'-1}, validate the vector, output 0/1."""

    def __init__(self, me, succ, pred, rng, beta=None):
        super().__init__(me, succ, pred, rng, beta=beta)
        self.vec = None
        self.winner = None

    def on_validated(self, rnd):
        self.vec = VectorPhase(self, rnd, "le", self.rng.randrange(self.n1))

    def handle(self, rnd, frm, payload):
        tag = payload[0]
        if tag == "coin-share" and payload[1] == "le":
            self.vec.handle_value(rnd, frm, payload[2], payload[3], payload[4])
        elif tag == "vec-echo" and payload[1] == "le":
            self.vec.handle_echo(rnd, frm, payload[2])
        else:
            raise AssertionError("unexpected tag %r" % (payload,))

    def tick(self, rnd):
        if self.vec is None:
            return
        self.vec.tick(rnd)
        if self.decided:
            return
        if self.vec.validated and self.winner is None:
            rank = self.vec.total() % self.n1
            self.winner = sorted(self.id_by_pos, reverse=True)[rank]
            self.finish_election(rnd)

    def finish_election(self, rnd):
        self.decide(1 if self.winner == self.me else 0)


def fair_leader_election(topology, seed, prior=None, record=False, max_rounds=None):
    beta = prior.beta if prior is not None and prior.finite else None
    rng = RngStream(seed, "le")
    parties = [
        AgentParty(
            LeaderElectionNode(a, topology.succ(a), topology.pred(a), rng.fork(a), beta=beta)
        )
        for a in topology.ids()
    ]
    if max_rounds is None:
        max_rounds = 2 * topology.n + 8
    trace = run_sync(topology, parties, max_rounds=max_rounds, record=record)
    return classify("leader-election", topology, trace)
