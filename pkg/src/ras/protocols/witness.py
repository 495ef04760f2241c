"""Witness coloring on any 2-connected graph with known size.

After wake-up (topology flood), agents draw ranks 1..n one by one in
descending id order. A draw is a simultaneous exchange of random numbers in
{1..|X|} with the drawer's witness (its minimum-id neighbor), where X is
{1..n} minus the values already taken by the drawer's neighbors; the rank is
the ((r_a + r_w) mod |X|)-th largest element of X (0-based). Ranks are then
verified by prompting every neighbor, whose answer must arrive both directly
and over the disjoint route through the neighbor's witness; only the witness
may serve as the first relay hop of that copy. Finally agents pick colors in
rank order: the preference when no neighbor holds it, else the minimum
unused color.

Every agent knows the topology and the id order after wake-up, so slot
timing, witness assignments, and relay routes are common knowledge; a
message that contradicts them turns the observer to BOTTOM.
"""

from ..simcore.engine import BOTTOM, AgentParty, NodeMachine, run_sync
from ..simcore.rng import RngStream
from ..simcore.wakeup import GeneralWakeup
from .common import classify

DRAW_ROUNDS = 4


class WitnessColoringNode(NodeMachine):
    def __init__(self, me, neighbor_ids, rng, pref):
        super().__init__(me)
        self.nbrs = tuple(sorted(neighbor_ids))
        self.rng = rng
        self.pref = pref
        self.wake = GeneralWakeup(me, neighbor_ids)
        self.anchor = None
        self.order = None  # ids, largest first; slot i belongs to order[i]
        self.taken = set()  # ranks held by my neighbors
        self.rank = None
        self.my_r = None
        self.my_witness_r = None
        self.witness_r = None
        self.witness_x = None  # X set while acting as someone's witness
        self.witness_expect = {}  # drawer id -> rank I computed with it
        self.ranks = {}  # neighbor id -> announced rank
        self.direct = {}
        self.via_witness = {}
        self.nbr_colors = set()
        self.outbox = []
        self._x = None
        self._drawer_r = None
        self._deadline = None

    # -- helpers --------------------------------------------------------------

    def witness_of(self, agent):
        return min(self.wake.adj[agent])

    def _n(self):
        return self.wake.n_prime

    def _slot0(self, i):
        return self.anchor + DRAW_ROUNDS * i

    def _prompt_round(self):
        return self.anchor + DRAW_ROUNDS * self._n()

    def _route(self, frm_agent, to_agent):
        """Witness copy route: frm -> its witness -> shortest path to `to` avoiding frm."""
        w = self.witness_of(frm_agent)
        return (frm_agent,) + self._shortest(w, to_agent, avoid=frm_agent)

    def _shortest(self, src, dst, avoid):
        if src == dst:
            return (src,)
        parent = {src: None}
        frontier = [src]
        while frontier:
            nxt = []
            for v in frontier:
                for u in self.wake.adj[v]:
                    if u != avoid and u not in parent:
                        parent[u] = v
                        if u == dst:
                            path = [u]
                            while parent[path[-1]] is not None:
                                path.append(parent[path[-1]])
                            return tuple(reversed(path))
                        nxt.append(u)
            frontier = sorted(nxt)
        raise AssertionError("no route %d -> %d avoiding %d" % (src, dst, avoid))

    def _verify_deadline(self):
        if self._deadline is None:
            longest = 0
            for a in self.wake.adj:
                for b in self.wake.adj[a]:
                    longest = max(longest, len(self._route(a, b)) - 1)
            self._deadline = self._prompt_round() + 1 + longest + 1
        return self._deadline

    def fail(self):
        if not self.decided:
            self.decide(BOTTOM)
            for v in self.nbrs:
                self.outbox.append((v, ("abort",)))

    # -- round driver -----------------------------------------------------------

    def on_round(self, rnd, inbox):
        if self.decided:
            return []
        self.outbox = []
        if rnd == 0:
            self.outbox.extend(self.wake.start())
        for frm, payload in sorted(inbox):
            self._handle(rnd, frm, payload)
            if self.decided:
                return self.outbox
        if self.wake.conflict:
            self.fail()
            return self.outbox
        if self.anchor is None and self.wake.closed:
            self.anchor = self.wake.anchor_round()
            self.order = sorted(self.wake.adj, reverse=True)
        if self.anchor is not None and rnd >= self.anchor:
            self._tick(rnd)
        return self.outbox

    def _handle(self, rnd, frm, payload):
        tag = payload[0]
        if tag == "abort":
            self.fail()
        elif tag == "id-announce":
            self.outbox.extend(self.wake.absorb(rnd, frm, payload[1], payload[2]))
        elif tag == "witness-mark":
            if self.witness_of(frm) != self.me:
                self.fail()
                return
            self.witness_x = tuple(payload[1])
            self.witness_r = self.rng.randint(1, len(self.witness_x))
            self.outbox.append((frm, ("draw-rand", self.witness_r)))
        elif tag == "draw-rand":
            # the slot's drawer disambiguates the two roles: the same pair of
            # agents can be each other's witnesses across different slots
            slot = (rnd - self.anchor) // DRAW_ROUNDS
            drawer = self.order[slot]
            if drawer == self.me and frm == self.witness_of(self.me):
                self.my_witness_r = payload[1]
            elif frm == drawer and self.witness_of(drawer) == self.me:
                self._drawer_r = payload[1]
            else:
                self.fail()
        elif tag == "drawn-value":
            self._on_drawn(rnd, frm, payload[1])
        elif tag == "prompt":
            self._answer_prompt(frm)
        elif tag == "drawn-direct":
            self.direct[frm] = payload[1]
        elif tag == "relay":
            self._relay(rnd, frm, payload)
        elif tag == "color":
            self.nbr_colors.add(payload[1])
        else:
            raise AssertionError("unexpected tag %r" % (payload,))

    def _on_drawn(self, rnd, frm, value):
        self.ranks[frm] = value
        self.taken.add(value)
        if frm in self.witness_expect and self.witness_expect[frm] != value:
            self.fail()  # drawer published a rank other than the drawn one

    def _answer_prompt(self, frm):
        self.outbox.append((frm, ("drawn-direct", self.rank)))
        route = self._route(self.me, frm)
        self.outbox.append((route[1], ("relay", self.me, frm, route, 1, self.rank)))

    def _relay(self, rnd, frm, payload):
        _tag, origin, dest, route, idx, value = payload
        if route != self._route(origin, dest) or route[idx] != self.me or frm != route[idx - 1]:
            self.fail()  # includes a first hop that is not the origin's witness
            return
        if idx == 1 and self.witness_of(origin) != self.me:
            self.fail()
            return
        if self.me == dest:
            self.via_witness[origin] = value
            return
        self.outbox.append((route[idx + 1], ("relay", origin, dest, route, idx + 1, value)))

    def _tick(self, rnd):
        n = self._n()
        slot = (rnd - self.anchor) // DRAW_ROUNDS if rnd < self._prompt_round() else None
        if slot is not None and self.order[slot] == self.me:
            t0 = self._slot0(slot)
            w = self.witness_of(self.me)
            if rnd == t0:
                self._x = tuple(sorted(set(range(1, n + 1)) - self.taken))
                self.outbox.append((w, ("witness-mark", self._x)))
            elif rnd == t0 + 1:
                self.my_r = self.rng.randint(1, len(self._x))
                self.outbox.append((w, ("draw-rand", self.my_r)))
            elif rnd == t0 + 2:
                if self.my_witness_r is None:
                    self.fail()
                    return
                q = (self.my_r + self.my_witness_r) % len(self._x)
                self.rank = sorted(self._x, reverse=True)[q]
                for v in self.nbrs:
                    self.outbox.append((v, ("drawn-value", self.rank)))
        elif slot is not None and self.witness_x is not None and rnd == self._slot0(slot) + 2:
            # I am this slot's witness: compute the same rank for later checks
            if self._drawer_r is None:
                self.fail()
                return
            drawer = self.order[slot]
            q = (self._drawer_r + self.witness_r) % len(self.witness_x)
            self.witness_expect[drawer] = sorted(self.witness_x, reverse=True)[q]
            self.witness_x = None
            self._drawer_r = None
        if rnd == self._prompt_round():
            for v in self.nbrs:
                self.outbox.append((v, ("prompt",)))
        if rnd == self._verify_deadline():
            for v in self.nbrs:
                if (
                    self.direct.get(v) != self.ranks.get(v)
                    or self.via_witness.get(v) != self.ranks.get(v)
                    or self.ranks.get(v) is None
                ):
                    self.fail()
                    return
        if self.rank is not None and rnd == self._verify_deadline() + self.rank:
            color = self.pref if self.pref not in self.nbr_colors else self._min_unused()
            for v in self.nbrs:
                self.outbox.append((v, ("color", color)))
            self.decide(color)

    def _min_unused(self):
        color = 1
        while color in self.nbr_colors:
            color += 1
        return color


def witness_coloring(topology, seed, record=False, max_rounds=None):
    rng = RngStream(seed, "witness")
    parties = [
        AgentParty(
            WitnessColoringNode(a, topology.neighbors[a], rng.fork(a), topology.by_id[a].preference)
        )
        for a in topology.ids()
    ]
    if max_rounds is None:
        max_rounds = 7 * topology.n + 30
    trace = run_sync(topology, parties, max_rounds=max_rounds, record=record)
    return classify("coloring-witness", topology, trace)
