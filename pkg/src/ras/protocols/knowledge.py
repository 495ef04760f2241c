"""Knowledge Sharing in a ring: secret-transmit pads, reveal, input broadcast.

Each agent a runs two secret transmissions of its input i_a, both one-time
padded mod k (X = i - R mod k, so R + X = i mod k):

  b1: to the clockwise neighbor.  R stays at a; X travels counter-clockwise
      the long way around, stopping one hop short (at a+2, which is n'-2
      counter-clockwise hops from a).
  b2: to the agent floor(n'/2) counter-clockwise hops away.  R travels
      clockwise stopping at a + ceil(n'/2) - 1; X travels counter-clockwise
      stopping at a - floor(n'/2) + 1.

Timeline with launch round L on a ring of size n':

  L           origins emit the travelling shares (pads committed)
  L + j       a share that has moved j hops is read by its j-th relay
  L + n' - 2  every pre-target holder has its share; holders emit to targets
  L + n' - 1  reveal: targets read both shares and reconstruct
  L + n' - 1  every agent broadcasts its input clockwise
  L + 2n' - 2 all inputs known; q(I) = sum mod k available

Launching at L = 2 lets the shares overlap the wake-up flood: every
hold-or-forward decision that needs n' happens no earlier than the wake-up
completion round ceil(n'/2) (tag priority guarantees same-round ordering),
and the one decision that needs only a nearby id (the b1 X share) needs the
id two hops counter-clockwise, known from round 2.

Each reconstruction pins the reported input of the reconstructed origin:
a broadcast that contradicts it turns the observer to BOTTOM. That is what
keeps a cheater that failed to out-duplicate the ring honest about inputs.
"""

from ..simcore.engine import AgentParty, run_sync
from ..simcore.rng import RngStream
from .common import classify
from .ringbase import RingNodeMachine


class KnowledgeExchange:
    """Share routing and input broadcast for one agent; driven by its node."""

    def __init__(self, node, launch, modulus, value, chan="ks", verify=True,
                 broadcast_override=None, pads=None):
        self.node = node
        self.launch = launch
        self.k = modulus
        self.value = value % modulus
        self.chan = chan
        self.verify = verify
        self.broadcast_override = broadcast_override
        if pads is None:
            pads = (node.rng.randrange(modulus), node.rng.randrange(modulus))
        self.pads = pads
        self._held = []       # (target_port_id, origin, trans, part, value)
        self._reveal = {}     # (trans, part) -> (frm, origin, value)
        self.reconstructed = {}  # origin id -> input pinned by a reveal
        self.inputs = {}      # origin id -> broadcast value
        self.sent_value = None
        self.result = None

    # -- round scheduling ----------------------------------------------------

    def reveal_round(self):
        return self.launch + self.node.n1 - 1

    def result_round(self):
        return self.launch + 2 * self.node.n1 - 2

    def tick(self, rnd):
        node = self.node
        if rnd == self.launch:
            self._emit_shares()
            return
        if node.n1 is None:
            return
        if rnd == self.reveal_round() - 1:
            for target, origin, trans, part, value in self._held:
                node.send(target, ("secret-share", self.chan, origin, trans, part, value))
            self._held = []
        elif rnd == self.reveal_round():
            self._reconstruct()
            if node.decided:
                return
            bval = self.value if self.broadcast_override is None else self.broadcast_override()
            self.sent_value = bval % self.k
            node.send(node.succ, ("relay", self.chan, node.me, self.sent_value, 1))
        elif rnd == self.result_round():
            if len(self.inputs) != node.n1 - 1:
                node.fail()
                return
            self.result = (sum(self.inputs.values()) + self.sent_value) % self.k

    def _emit_shares(self):
        node = self.node
        r1, r2 = self.pads
        x1 = (self.value - r1) % self.k
        x2 = (self.value - r2) % self.k
        me = node.me
        # b1: R held here until the reveal; X goes the long way counter-clockwise
        self._held.append((node.succ, me, 1, "R", r1))
        node.send(node.pred, ("secret-share", self.chan, me, 1, "X", x1))
        # b2: by launch time n' is known only if the ring is small; when
        # floor(n'/2) == 1 the X share's holder is the origin itself
        node.send(node.succ, ("secret-share", self.chan, me, 2, "R", r2))
        if node.n1 is not None and node.n1 // 2 == 1:
            self._held.append((node.pred, me, 2, "X", x2))
        else:
            node.send(node.pred, ("secret-share", self.chan, me, 2, "X", x2))

    # -- message handling ----------------------------------------------------

    def handle_share(self, rnd, frm, origin, trans, part, value):
        node = self.node
        if node.n1 is not None and rnd >= self.reveal_round():
            if (trans, part) in self._reveal:
                node.fail()  # duplicate delivery
                return
            self._reveal[(trans, part)] = (frm, origin, value)
            return
        dist = rnd - self.launch  # hops travelled; shares move one hop per round
        towards_pred = frm == node.succ  # counter-clockwise travel
        if trans == 1:
            # X of b1 stops when the origin sits two clockwise hops ahead,
            # i.e. two pred-hops from here; that id is known from round 2
            anchor = node.id_at(-2) if node.n1 is not None else node.offset_ids.get(-2)
            if origin == anchor:
                self._held.append((node.pred, origin, trans, part, value))
                return
        elif node.n1 is not None:
            hold = (node.n1 + 1) // 2 - 1 if part == "R" else node.n1 // 2 - 1
            if dist == hold:
                target = node.succ if part == "R" else node.pred
                self._held.append((target, origin, trans, part, value))
                return
        # keep travelling; any pre-completion arrival is strictly short of its stop
        node.send(node.pred if towards_pred else node.succ,
                  ("secret-share", self.chan, origin, trans, part, value))

    def _reconstruct(self):
        node = self.node
        pred_id = node.id_at(-1)
        far_id = node.id_at(node.n1 // 2)
        want = {
            (1, "R"): (node.pred, pred_id),
            (1, "X"): (node.succ, pred_id),
            (2, "R"): (node.pred, far_id),
            (2, "X"): (node.succ, far_id),
        }
        if set(self._reveal) != set(want):
            node.fail()
            return
        for key, (frm, origin, _value) in self._reveal.items():
            if (frm, origin) != want[key]:
                node.fail()
                return
        self.reconstructed[pred_id] = (
            self._reveal[(1, "R")][2] + self._reveal[(1, "X")][2]
        ) % self.k
        self.reconstructed[far_id] = (
            self._reveal[(2, "R")][2] + self._reveal[(2, "X")][2]
        ) % self.k

    def handle_relay(self, rnd, frm, origin, value, hops):
        node = self.node
        if origin in self.inputs or origin == node.me:
            node.fail()
            return
        self.inputs[origin] = value
        if self.verify and origin in self.reconstructed:
            if self.reconstructed[origin] != value % self.k:
                node.fail()  # broadcast contradicts a pinned input
                return
        if hops < node.n1 - 1:
            node.send(node.succ, ("relay", self.chan, origin, value, hops + 1))


class KSNode(RingNodeMachine):
    """Honest agent for ring Knowledge Sharing with q(I) = sum(I) mod k."""

    LAUNCH = 2

    def __init__(self, me, succ, pred, rng, k, input_value, beta=None,
                 pads=None, verify=True, broadcast_override=None):
        super().__init__(me, succ, pred, rng, beta=beta)
        self.k = k
        self.input = input_value % k
        self.exchange = KnowledgeExchange(
            self, self.LAUNCH, k, input_value, chan="ks", verify=verify,
            broadcast_override=broadcast_override, pads=pads,
        )

    def handle(self, rnd, frm, payload):
        tag = payload[0]
        if tag == "secret-share":
            self.exchange.handle_share(rnd, frm, payload[2], payload[3], payload[4], payload[5])
        elif tag == "relay":
            self.exchange.handle_relay(rnd, frm, payload[2], payload[3], payload[4])
        else:
            raise AssertionError("unexpected tag %r" % tag)

    def tick(self, rnd):
        self.exchange.tick(rnd)
        if self.exchange.result is not None and not self.decided:
            self.decide(self.exchange.result)


def ks_ring(topology, k, seed, prior=None, record=False, max_rounds=None):
    """All-honest Knowledge Sharing on a ring; inputs are the topology's."""
    beta = prior.beta if prior is not None and prior.finite else None
    rng = RngStream(seed, "ks")
    parties = []
    for agent in topology.ids():
        node = KSNode(
            agent,
            topology.succ(agent),
            topology.pred(agent),
            rng.fork(agent),
            k,
            topology.by_id[agent].input,
            beta=beta,
        )
        parties.append(AgentParty(node))
    if max_rounds is None:
        max_rounds = 2 * topology.n + 8
    trace = run_sync(topology, parties, max_rounds=max_rounds, record=record)
    return classify("ks", topology, trace)


def shared_coin(topology, seed, record=False):
    """2-Knowledge Sharing over fresh uniform bits; returns (bit, trace).

    The coin is the parity of all contributed bits, so it stays uniform as
    long as one contributor is honest.
    """
    rng = RngStream(seed, "coin")
    parties = []
    for agent in topology.ids():
        node = KSNode(
            agent,
            topology.succ(agent),
            topology.pred(agent),
            rng.fork(agent),
            2,
            rng.fork("bit", agent).bit(),
        )
        parties.append(AgentParty(node))
    trace = run_sync(topology, parties, max_rounds=2 * topology.n + 8, record=record)
    trace = classify("ks", topology, trace)
    values = set(trace.outputs.values())
    bit = values.pop() if len(values) == 1 else None
    return bit, trace
