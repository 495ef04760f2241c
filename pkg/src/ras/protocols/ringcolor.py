"""Coloring in a ring with preferences, a shared coin and a sink.

Phase schedule, anchored on the wake-up completion round C = ceil(n'/2)
(ids validated at C+1, which also fixes the orientation):

  P0 = C+1            preferences flood both ways, validated by round
                      PV = P0 + floor(n'/2) + 1
  sink election       only if n' is odd and preferences are unanimous:
                      commit w in {0..n'-1}, circulate, validate
                      (n' + 1 rounds); the sink holds the
                      ((sum w) mod n')-th largest id
  shared coin         2-Knowledge Sharing over fresh bits (2n' - 1 rounds),
                      result b
  color steps         four rounds: parity-b members of each same-preference
                      group (and singletons) take their preference, then the
                      group interiors, then the group tails, then the sink

A group is a maximal run of consecutive same-preference agents in
orientation order, excluding the sink; when the whole ring is one group its
first member is the max-id agent. Members are indexed 1..|C| along the
orientation and neighbors in a group always differ in parity, which is what
keeps simultaneous choices off shared edges. Late choosers take their
preference whenever no neighbor already holds it, else the minimum unused
color.
"""

from ..simcore.engine import AgentParty, run_sync
from ..simcore.rng import RngStream
from .common import classify
from .election import VectorPhase
from .knowledge import KnowledgeExchange
from .ringbase import RingNodeMachine


class RingColoringNode(RingNodeMachine):
    def __init__(self, me, succ, pred, rng, beta=None):
        super().__init__(me, succ, pred, rng, beta=beta)
        self.pref = None  # set by the wrapper from the topology
        self.prefs_by_pos = None
        self._pref_echoes = 0
        self.sink_vec = None
        self.sink = None
        self.coin = None
        self.coin_bit = None
        self.my_step = None  # 9, 10, 11 or 12
        self.color_round = None
        self.nbr_colors = set()

    # -- schedule anchors ----------------------------------------------------

    def _p0(self):
        return self.completion_round + 1

    def _pref_complete(self):
        return self._p0() + self.n1 // 2

    def _pref_validated(self):
        return self._pref_complete() + 1

    def _sink_elected(self):
        # sink phase runs iff n' odd and unanimous preferences
        if self._has_sink_phase():
            return self._pref_validated() + self.n1 + 1
        return self._pref_validated()

    def _coin_result(self):
        return self._sink_elected() + 2 * self.n1 - 2

    def _has_sink_phase(self):
        return self.n1 % 2 == 1 and len(set(self.prefs_by_pos)) == 1

    # -- phases ---------------------------------------------------------------

    def on_validated(self, rnd):
        self.prefs_by_pos = [None] * self.n1
        self.prefs_by_pos[self.pos_of[self.me]] = self.pref
        self.send(self.succ, ("preference", self.me, self.pref, 1))
        self.send(self.pred, ("preference", self.me, self.pref, 1))

    def handle(self, rnd, frm, payload):
        tag = payload[0]
        if tag == "preference":
            self._on_pref(rnd, frm, payload[1], payload[2], payload[3])
        elif tag == "pref-echo":
            if payload[1] != self._pref_canon():
                self.fail()
            else:
                self._pref_echoes += 1
        elif tag == "coin-share" and payload[1] == "sink":
            self.sink_vec.handle_value(rnd, frm, payload[2], payload[3], payload[4])
        elif tag == "vec-echo" and payload[1] == "sink":
            self.sink_vec.handle_echo(rnd, frm, payload[2])
        elif tag == "secret-share":
            self.coin.handle_share(rnd, frm, payload[2], payload[3], payload[4], payload[5])
        elif tag == "relay":
            self.coin.handle_relay(rnd, frm, payload[2], payload[3], payload[4])
        elif tag == "color":
            self.nbr_colors.add(payload[1])
        else:
            raise AssertionError("unexpected tag %r" % (payload,))

    def _on_pref(self, rnd, frm, origin, value, hops):
        side = 1 if frm == self.succ else -1
        pos = (self.pos_of[self.me] + side * hops) % self.n1
        if self.id_by_pos[pos] != origin:
            self.fail()
            return
        if self.prefs_by_pos[pos] is None:
            self.prefs_by_pos[pos] = value
        elif self.prefs_by_pos[pos] != value:
            self.fail()  # the two flood directions disagree
            return
        if hops < self.n1 // 2:
            out = self.pred if side == 1 else self.succ
            self.send(out, ("preference", origin, value, hops + 1))

    def tick(self, rnd):
        if self.completion_round is None or rnd <= self.completion_round:
            return
        if rnd == self._pref_complete():
            if any(p is None for p in self.prefs_by_pos):
                self.fail()
                return
            vec = self._pref_canon()
            self.send(self.succ, ("pref-echo", vec))
            self.send(self.pred, ("pref-echo", vec))
        if rnd == self._pref_validated():
            if self._pref_echoes < 2:
                self.fail()
                return
            if self._has_sink_phase():
                self.sink_vec = VectorPhase(self, rnd, "sink", self.rng.randrange(self.n1))
        if self.sink_vec is not None:
            self.sink_vec.tick(rnd)
            if self.decided:
                return
            if self.sink_vec.validated and self.sink is None:
                rank = self.sink_vec.total() % self.n1
                self.sink = sorted(self.id_by_pos, reverse=True)[rank]
        if rnd == self._sink_elected():
            self.coin = KnowledgeExchange(self, rnd, 2, self.rng.bit(), chan="coin")
        if self.coin is not None:
            self.coin.tick(rnd)
            if self.decided:
                return
            if rnd == self._coin_result():
                self.coin_bit = self.coin.result
                self._assign_step()
        if self.color_round is not None and rnd == self.color_round:
            color = self._choose_color()
            self.send(self.succ, ("color", color))
            self.send(self.pred, ("color", color))
            self.decide(color)

    def _pref_canon(self):
        """Preference vector in the same canonical rotation as the id echo."""
        low = self.pos_of[min(self.id_by_pos)]
        return tuple(self.prefs_by_pos[(low + i) % self.n1] for i in range(self.n1))

    # -- color planning --------------------------------------------------------

    def _orientation_sequence(self):
        step = self.orient_step()
        if self.sink is not None:
            base = (self.pos_of[self.sink] + step) % self.n1
            length = self.n1 - 1  # drop the sink, it colors last
        else:
            base = self.pos_of[max(self.id_by_pos)]
            length = self.n1
        return [self.id_by_pos[(base + i * step) % self.n1] for i in range(length)]

    def _groups(self):
        seq = self._orientation_sequence()
        pref = {self.id_by_pos[p]: self.prefs_by_pos[p] for p in range(self.n1)}
        if self.sink is None and len(set(pref.values())) > 1:
            # circular split at preference boundaries
            n = len(seq)
            boundaries = [i for i in range(n) if pref[seq[i]] != pref[seq[i - 1]]]
            groups = []
            for bi, start in enumerate(boundaries):
                end = boundaries[(bi + 1) % len(boundaries)]
                span = (end - start) % n or n
                groups.append([seq[(start + j) % n] for j in range(span)])
            return groups
        return [seq]  # unanimous ring (one group) or sink case (one linear group)

    def _assign_step(self):
        if self.me == self.sink:
            self.my_step = 12
        else:
            for group in self._groups():
                if self.me in group:
                    i = group.index(self.me) + 1
                    size = len(group)
                    if i % 2 == self.coin_bit or size == 1:
                        self.my_step = 9
                    elif i < size:
                        self.my_step = 10
                    else:
                        self.my_step = 11
                    break
        self.color_round = self._coin_result() + (self.my_step - 9)

    def _choose_color(self):
        if self.my_step == 9 or self.pref not in self.nbr_colors:
            return self.pref
        color = 1
        while color in self.nbr_colors:
            color += 1
        return color


def ring_coloring(topology, seed, prior=None, record=False, max_rounds=None):
    """All-honest ring coloring; preferences come from the topology (>= 3 colors)."""
    beta = prior.beta if prior is not None and prior.finite else None
    rng = RngStream(seed, "ringcolor")
    parties = []
    for a in topology.ids():
        node = RingColoringNode(a, topology.succ(a), topology.pred(a), rng.fork(a), beta=beta)
        node.pref = topology.by_id[a].preference
        parties.append(AgentParty(node))
    if max_rounds is None:
        max_rounds = 6 * topology.n + 20
    trace = run_sync(topology, parties, max_rounds=max_rounds, record=record)
    return classify("coloring-ring", topology, trace)
