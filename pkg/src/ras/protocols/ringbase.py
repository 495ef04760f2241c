"""Base state machine for honest agents on an oriented ring.

Wake-up is a bidirectional id flood: the copy of an id travelling clockwise
arrives on the pred port, so the id read on the pred port in round r belongs
to the agent r hops counter-clockwise (offset -r), and symmetrically for the
succ port. The flood completes for every agent in the same round
C = ceil(n'/2), when an already-seen id (or a both-ports duplicate) arrives.
At C each agent emits the canonical id vector to both neighbors for echo
validation, checked at C+1; a mismatch, or n' > beta under a finite prior,
turns the agent to BOTTOM and an abort cascades.

Message tags are processed in a fixed priority (aborts, id-announce,
id-echo, rest) so that wake-up completion lands before any same-round
routing decision that needs n'.
"""

from ..simcore.engine import BOTTOM, NodeMachine

_PRIORITY = {"abort": 0, "id-announce": 1, "id-echo": 2}


class RingNodeMachine(NodeMachine):
    """One honest agent on a ring; subclasses add phase logic via hooks.

    Hooks, in call order within a round:
      on_layout(rnd)     wake-up just completed (layout, n1 available)
      on_validated(rnd)  both neighbor echoes matched, one round later
      handle(rnd, frm, payload)  every non-wake-up message
      tick(rnd)          once per round after the inbox is drained
    """

    def __init__(self, me, succ, pred, rng, beta=None):
        super().__init__(me)
        self.succ = succ
        self.pred = pred
        self.rng = rng
        self.beta = beta
        self.outbox = []
        # wake-up state
        self.offset_ids = {0: me}
        self._seen = {me}
        self.n1 = None
        self.completion_round = None
        self.id_by_pos = None
        self.pos_of = None
        self._canon = None
        self._echoes = 0

    # -- engine interface ---------------------------------------------------

    def on_round(self, rnd, inbox):
        if self.decided:
            return []
        self.outbox = []
        if rnd == 0:
            self.send(self.succ, ("id-announce", self.me))
            self.send(self.pred, ("id-announce", self.me))
        for frm, payload in sorted(inbox, key=_tag_key):
            tag = payload[0]
            if tag == "abort":
                self.fail()
                return self.outbox
            if tag == "id-announce":
                self._wake_absorb(rnd, frm, payload[1])
            elif tag == "id-echo":
                if payload[1] != self._canon:
                    self.fail()
                    return self.outbox
                self._echoes += 1
            else:
                self.handle(rnd, frm, payload)
            if self.decided:
                return self.outbox
        if (
            self.completion_round is not None
            and rnd == self.completion_round + 1
            and self._echoes < 2
        ):
            self.fail()  # a neighbor never echoed a matching vector
            return self.outbox
        if self.completion_round is not None and rnd == self.completion_round + 1:
            self.on_validated(rnd)
        if not self.decided:
            self.tick(rnd)
        return self.outbox

    def send(self, to, payload):
        self.outbox.append((to, payload))

    def fail(self):
        """Protocol-level failure: output BOTTOM and spread an abort."""
        if not self.decided:
            self.decide(BOTTOM)
            self.outbox.append((self.succ, ("abort",)))
            self.outbox.append((self.pred, ("abort",)))

    # -- wake-up ------------------------------------------------------------

    def _wake_absorb(self, rnd, frm, origin):
        if self.n1 is not None:
            return
        if origin in self._seen:
            self._complete_wakeup(rnd)
            return
        self._seen.add(origin)
        side = 1 if frm == self.succ else -1
        self.offset_ids[side * rnd] = origin
        self.send(self.pred if side == 1 else self.succ, ("id-announce", origin))

    def _complete_wakeup(self, rnd):
        self.n1 = len(self._seen)
        self.completion_round = rnd
        table = [None] * self.n1
        for off, agent in self.offset_ids.items():
            table[off % self.n1] = agent
        if None in table:
            self.fail()
            return
        self.id_by_pos = table
        self.pos_of = {agent: pos for pos, agent in enumerate(table)}
        low = table.index(min(table))
        self._canon = tuple(table[low:] + table[:low])
        self.send(self.succ, ("id-echo", self._canon))
        self.send(self.pred, ("id-echo", self._canon))
        if self.beta is not None and self.n1 > self.beta:
            self.fail()
            return
        self.on_layout(rnd)

    # -- layout helpers -----------------------------------------------------

    def id_at(self, offset):
        """Agent id `offset` clockwise hops away (negative = counter-clockwise)."""
        return self.id_by_pos[offset % self.n1]

    def orient_step(self):
        """+1 if the global orientation runs clockwise, else -1.

        Orientation points from the max-id agent toward its smaller-id
        neighbor, as fixed during id exchange.
        """
        top = max(self.id_by_pos)
        pos = self.pos_of[top]
        after = self.id_by_pos[(pos + 1) % self.n1]
        before = self.id_by_pos[(pos - 1) % self.n1]
        return 1 if after < before else -1

    def orient_dist(self, src, dst):
        """Hops from src to dst walking along the orientation."""
        step = self.orient_step()
        return ((self.pos_of[dst] - self.pos_of[src]) * step) % self.n1

    def orient_next(self):
        """Port id one step along the orientation."""
        return self.succ if self.orient_step() == 1 else self.pred

    def orient_prev(self):
        return self.pred if self.orient_step() == 1 else self.succ

    # -- subclass hooks -----------------------------------------------------

    def on_layout(self, rnd):
        pass

    def on_validated(self, rnd):
        pass

    def handle(self, rnd, frm, payload):
        raise NotImplementedError("unexpected tag %r" % (payload[0],))

    def tick(self, rnd):
        pass


def _tag_key(entry):
    frm, payload = entry
    return (_PRIORITY.get(payload[0], 3), frm, payload)
