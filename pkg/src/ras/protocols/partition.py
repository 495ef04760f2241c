"""Ring partition into two equal groups via an alternating token.

The leader-election winner initiates a token that travels along the
orientation, marking agents 1,0,1,0,... Each marked-0 agent immediately
sends a random bit to its orientation-predecessor; each marked-1 agent waits
one round and sends a random bit to its orientation-successor, so each
(1, 0) pair exchanges bits simultaneously and outputs
(own bit + partner bit + mark) mod 2, splitting the pair.

Returning to the initiator on an even ring the token value must be the
opposite of the value sent; on an odd ring it is equal and the initiator
outputs BOTTOM.
"""

from ..simcore.engine import AgentParty, run_sync
from ..simcore.rng import RngStream
from .common import classify
from .election import LeaderElectionNode


class PartitionNode(LeaderElectionNode):
    def __init__(self, me, succ, pred, rng, beta=None):
        super().__init__(me, succ, pred, rng, beta=beta)
        self.token_start = None
        self.mark = None
        self.my_bit = None
        self.bit_sent_round = None
        self.partner_bit = None

    def finish_election(self, rnd):
        # winner becomes the initiator; nobody outputs yet
        self.token_start = rnd
        if self.winner == self.me:
            self.send(self.orient_next(), ("token", 1, 1))

    def handle(self, rnd, frm, payload):
        tag = payload[0]
        if tag == "token":
            self._on_token(rnd, payload[1], payload[2])
        elif tag == "pair-bit":
            self.partner_bit = payload[1]
        else:
            super().handle(rnd, frm, payload)

    def _on_token(self, rnd, value, hops):
        if self.token_start is None or self.mark is not None:
            self.fail()
            return
        if self.me == self.winner:
            # full circle: on an even ring the value must have flipped
            if hops != self.n1 or value == 1:
                self.fail()
                return
            self.mark = 0
            self._send_bit(toward_prev=True)
            return
        if hops != self.orient_dist(self.winner, self.me) or value != hops % 2:
            self.fail()
            return
        self.mark = value
        self.send(self.orient_next(), ("token", 1 - value, hops + 1))
        if value == 0:
            self._send_bit(toward_prev=True)
        else:
            self.bit_sent_round = rnd + 1  # wait one round, then send forward

    def _send_bit(self, toward_prev):
        self.my_bit = self.rng.bit()
        self.send(self.orient_prev() if toward_prev else self.orient_next(), ("pair-bit", self.my_bit))

    def tick(self, rnd):
        super().tick(rnd)
        if self.decided:
            return
        if self.bit_sent_round == rnd:
            self._send_bit(toward_prev=False)
            self.bit_sent_round = None
        if self.mark is not None and self.my_bit is not None and self.partner_bit is not None:
            self.decide((self.my_bit + self.partner_bit + self.mark) % 2)


def ring_partition(topology, seed, prior=None, record=False, max_rounds=None):
    beta = prior.beta if prior is not None and prior.finite else None
    rng = RngStream(seed, "partition")
    parties = [
        AgentParty(PartitionNode(a, topology.succ(a), topology.pred(a), rng.fork(a), beta=beta))
        for a in topology.ids()
    ]
    if max_rounds is None:
        max_rounds = 3 * topology.n + 12
    trace = run_sync(topology, parties, max_rounds=max_rounds, record=record)
    return classify("partition", topology, trace)
