"""Sybil duplication schemes and concrete cheating strategies.

A duplicating cheater replaces its node with d virtual identities run by a
single party. On a ring the identities form one consecutive segment; on a
general graph the cheater's edges are split across two frontier identities
joined by an internal chain. The execution graph has n' = n + d - 1 nodes
and honest agents holding a finite prior output BOTTOM as soon as wake-up
shows n' > beta.

Knowledge-Sharing attack: the segment runs the honest algorithm per
identity. When d > n, the segment straddles both travelling b2 shares of
every honest transmission, so the cheater reconstructs all honest inputs
before anyone must commit a broadcast; the first segment member's b1 and b2
reveal targets both lie inside the segment, so its reported input is pinned
by nobody and the cheater picks it to force q(I) to its preference. When
d <= n this coverage fails and the strategy degenerates to honest play under
d identities.
"""

from dataclasses import dataclass

from .priors import Prior
from .protocols.common import classify, utility
from .protocols.election import LeaderElectionNode
from .protocols.knowledge import KSNode
from .simcore.engine import BOTTOM, AgentParty, NodeMachine, Party, run_sync
from .simcore.rng import RngStream
from .simcore.topology import NetworkTopology, Node, TopologyError


@dataclass(frozen=True)
class DuplicationScheme:
    """A cheater's Sybil plan: pretend to be d agents (d = 1 means none)."""

    cheater: int
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise TopologyError("duplication count must be >= 1")


@dataclass
class CheaterVerdict:
    detected: bool
    cheater_utility: int
    trace: object


def detect_oversize(n_prime, prior: Prior) -> bool:
    """True iff agents holding this prior catch a ring of n' agents as too big."""
    if prior is None or not prior.finite:
        return False
    return n_prime > prior.beta


def apply_duplication(topology, scheme: DuplicationScheme, seed, input_values=(0, 1)):
    """Expand the topology with the cheater's virtual identities.

    Returns (expanded, virtual_ids). Virtual nodes carry fresh ids, inputs
    drawn from input_values and the cheater's preference. Ring: the cheater
    node becomes a consecutive path of d nodes between its two neighbors.
    General graph: the edge set splits across two frontier nodes joined by a
    chain of the remaining d - 2.
    """
    if scheme.cheater not in topology.by_id:
        raise TopologyError("cheater %d not in topology" % scheme.cheater)
    if scheme.d == 1:
        return topology, (scheme.cheater,)
    rng = RngStream(seed, "sybil", scheme.cheater)
    existing = set(topology.ids())
    virtual = []
    while len(virtual) < scheme.d:
        cand = rng.id64()
        if cand not in existing:
            existing.add(cand)
            virtual.append(cand)
    virtual = tuple(virtual)
    cheat = topology.by_id[scheme.cheater]
    rin = rng.fork("inputs")
    input_values = tuple(input_values)
    vnodes = [Node(v, rin.choice(input_values), cheat.preference) for v in virtual]
    keep = [n for n in topology.nodes if n.id != scheme.cheater]

    if topology.ring_order is not None:
        order = list(topology.ring_order)
        at = order.index(scheme.cheater)
        new_order = order[:at] + list(virtual) + order[at + 1 :]
        n = len(new_order)
        edges = [(new_order[i], new_order[(i + 1) % n]) for i in range(n)]
        return NetworkTopology(keep + vnodes, edges, ring_order=new_order), virtual

    nbrs = sorted(topology.neighbors[scheme.cheater])
    if scheme.d == 2:
        f1, f2 = virtual
        chain = [(f1, f2)]
    else:
        f1, f2 = virtual[0], virtual[-1]
        chain = [(virtual[i], virtual[i + 1]) for i in range(scheme.d - 1)]
    half = (len(nbrs) + 1) // 2
    edges = [e for e in topology.edges if scheme.cheater not in e]
    edges += [(f1, v) for v in nbrs[:half]]
    edges += [(f2, v) for v in nbrs[half:]]
    edges += chain
    return NetworkTopology(keep + vnodes, edges), virtual


class KSSybilParty(Party):
    """Runs the honest KS machine per virtual identity, plus the force step."""

    def __init__(self, virtual_ids, expanded, k, preference, rng):
        super().__init__(virtual_ids[0], virtual_ids)
        self.k = k
        self.preference = preference
        self._member = set(virtual_ids)
        self.harvest = {}  # (honest origin, transmission) -> {part: value}
        self.machines = []
        for v in virtual_ids:
            self.machines.append(
                KSNode(
                    v,
                    expanded.succ(v),
                    expanded.pred(v),
                    rng.fork(v),
                    k,
                    expanded.by_id[v].input,
                    beta=None,
                    verify=False,
                    broadcast_override=self._lead_value if v == virtual_ids[0] else None,
                )
            )

    def relabel(self, real_id):
        self.agent_id = real_id
        return self

    def _lead_value(self):
        lead = self.machines[0]
        d = len(self.machines)
        if 2 * d <= lead.n1 + 1:  # d <= n: no coverage, stay honest
            return lead.input
        total = 0
        for agent in lead.id_by_pos:
            if agent in self._member:
                continue
            parts = self.harvest.get((agent, 2), {})
            if "R" not in parts or "X" not in parts:
                return lead.input  # cannot reconstruct; fall back to honest play
            total += parts["R"] + parts["X"]
        others = sum(m.input for m in self.machines[1:])
        return (self.preference - total - others) % self.k

    def on_round(self, rnd, inboxes):
        out = []
        for machine in self.machines:
            box = inboxes.get(machine.me, ())
            for frm, payload in box:
                if payload[0] == "secret-share" and payload[2] not in self._member:
                    bucket = self.harvest.setdefault((payload[2], payload[3]), {})
                    bucket[payload[4]] = payload[5]
            for to, payload in machine.on_round(rnd, box):
                out.append((machine.me, to, payload))
        lead = self.machines[0]
        if lead.decided and not self.decided:
            self.decide(lead.decision)
        return out


def run_ks_sybil(topology, cheater, d, k, seed, prior=None, record=False) -> CheaterVerdict:
    """Full KS run with one duplicating cheater; utility per Solution Preference."""
    scheme = DuplicationScheme(cheater, d)
    expanded, virtual = apply_duplication(topology, scheme, seed, input_values=range(k))
    beta = prior.beta if prior is not None and prior.finite else None
    rng = RngStream(seed, "ks-sybil")
    preference = topology.by_id[cheater].preference
    parties = []
    vset = set(virtual)
    for a in expanded.ids():
        if a in vset:
            continue
        parties.append(
            AgentParty(
                KSNode(a, expanded.succ(a), expanded.pred(a), rng.fork(a), k,
                       expanded.by_id[a].input, beta=beta)
            )
        )
    if d == 1:
        parties.append(
            AgentParty(
                KSNode(cheater, expanded.succ(cheater), expanded.pred(cheater),
                       rng.fork(cheater), k, expanded.by_id[cheater].input, beta=None)
            )
        )
    else:
        parties.append(
            KSSybilParty(virtual, expanded, k, preference, rng.fork("cheater")).relabel(cheater)
        )
    trace = run_sync(expanded, parties, max_rounds=2 * expanded.n + 10, record=record)
    classify("ks", topology, trace)
    detected = detect_oversize(expanded.n, prior)
    return CheaterVerdict(detected, utility(cheater, trace, preference), trace)


class LESybilParty(Party):
    """Fields d candidates in a fair leader election; wins iff any of them wins."""

    def __init__(self, virtual_ids, expanded, rng):
        super().__init__(virtual_ids[0], virtual_ids)
        self.machines = [
            LeaderElectionNode(v, expanded.succ(v), expanded.pred(v), rng.fork(v), beta=None)
            for v in virtual_ids
        ]

    def relabel(self, real_id):
        self.agent_id = real_id
        return self

    def on_round(self, rnd, inboxes):
        out = []
        for machine in self.machines:
            for to, payload in machine.on_round(rnd, inboxes.get(machine.me, ())):
                out.append((machine.me, to, payload))
        if not self.decided and all(m.decided for m in self.machines):
            if any(m.decision is BOTTOM for m in self.machines):
                self.decide(BOTTOM)
            else:
                self.decide(1 if any(m.decision == 1 for m in self.machines) else 0)
        return out


def run_le_sybil(topology, cheater, d, seed, prior=None, record=False) -> CheaterVerdict:
    """Leader election with a duplicating cheater that prefers to be elected."""
    scheme = DuplicationScheme(cheater, d)
    expanded, virtual = apply_duplication(topology, scheme, seed)
    beta = prior.beta if prior is not None and prior.finite else None
    rng = RngStream(seed, "le-sybil")
    parties = []
    vset = set(virtual)
    for a in expanded.ids():
        if a in vset:
            continue
        parties.append(
            AgentParty(
                LeaderElectionNode(a, expanded.succ(a), expanded.pred(a), rng.fork(a), beta=beta)
            )
        )
    if d == 1:
        parties.append(
            AgentParty(
                LeaderElectionNode(cheater, expanded.succ(cheater), expanded.pred(cheater),
                                   rng.fork(cheater), beta=None)
            )
        )
    else:
        parties.append(LESybilParty(virtual, expanded, rng.fork("cheater")).relabel(cheater))
    trace = run_sync(expanded, parties, max_rounds=2 * expanded.n + 10, record=record)
    classify("leader-election", topology, trace)
    detected = detect_oversize(expanded.n, prior)
    return CheaterVerdict(detected, utility(cheater, trace, 1), trace)


class _CollectNode(NodeMachine):
    """Honest id collection (the opening of the ring coloring id exchange).

    Forwards unseen ids, outputs its id count on the first repeat, or when
    the flood dries up (a blocking cheater never loops ids around).
    """

    def __init__(self, me, succ, pred):
        super().__init__(me)
        self.succ = succ
        self.pred = pred
        self.seen = {me}

    def on_round(self, rnd, inbox):
        if self.decided:
            return []
        out = []
        if rnd == 0:
            out = [(self.succ, ("id-announce", self.me)), (self.pred, ("id-announce", self.me))]
        if rnd >= 2 and not inbox:
            self.decide(len(self.seen))
            return out
        for frm, payload in inbox:
            origin = payload[1]
            if origin in self.seen:
                self.decide(len(self.seen))
                return out
            self.seen.add(origin)
            out.append((self.pred if frm == self.succ else self.succ, ("id-announce", origin)))
        return out


class _AdaptiveSybilNode(NodeMachine):
    """Emits a fresh id across each frontier every round until a repeat arrives.

    Outputs the number of identities created. With stop_after set it gives up
    early after that many emission rounds (the d < n control).
    """

    def __init__(self, me, succ, pred, rng, stop_after=None):
        super().__init__(me)
        self.succ = succ
        self.pred = pred
        self.rng = rng
        self.stop_after = stop_after
        self.seen = set()
        self.emitted = 0
        self.rounds_emitting = 0

    def on_round(self, rnd, inbox):
        if self.decided:
            return []
        repeat = False
        for _frm, payload in inbox:
            origin = payload[1]
            if origin in self.seen:
                repeat = True
            self.seen.add(origin)
        if repeat or (self.stop_after is not None and self.rounds_emitting >= self.stop_after):
            self.decide(self.emitted)
            return []
        self.rounds_emitting += 1
        self.emitted += 2
        return [
            (self.succ, ("id-announce", self.rng.id64())),
            (self.pred, ("id-announce", self.rng.id64())),
        ]


def adaptive_duplication_demo(n, seed, stop_after=None):
    """Duplicate-until-n-known on a ring of n; returns (d, honest n' counts).

    The cheater keeps inventing identities until an id it already received
    arrives, which happens only once the honest arc's ids wrap around to it
    from both sides; by then it has created d >= n identities. honest counts
    come back as n - 1 + d once the flood drains.
    """
    from .simcore.topology import build_ring

    topology = build_ring(n, seed)
    order = topology.ring_order
    cheater = order[0]
    rng = RngStream(seed, "adaptive")
    parties = []
    for a in order:
        succ, pred = topology.succ(a), topology.pred(a)
        if a == cheater:
            parties.append(AgentParty(_AdaptiveSybilNode(a, succ, pred, rng, stop_after=stop_after)))
        else:
            parties.append(AgentParty(_CollectNode(a, succ, pred)))
    trace = run_sync(topology, parties, max_rounds=4 * n + 10)
    d = trace.outputs[cheater]
    honest_counts = [v for a, v in trace.outputs.items() if a != cheater]
    return d, honest_counts, trace


class FloodKSNode(NodeMachine):
    """Naive flooding Knowledge Sharing used by the emulation attack demo.

    Round 0 is a hello exchange (neighbors are known only by what they
    claim), round 1 announces (id, neighbor ids, input), later rounds relay
    new announcements. When the view closes every agent outputs the sum of
    all inputs mod k at the common anchor round. The protocol validates
    nothing but announcement consistency, which is the point: it is a
    strawman whose equilibrium the emulation attack destroys.
    """

    def __init__(self, me, ports, input_value, k, beta=None):
        super().__init__(me)
        self.ports = tuple(sorted(ports))
        self.input = input_value % k
        self.k = k
        self.beta = beta
        self.claimed = {}   # transport port -> claimed neighbor id
        self.adj = {}       # claimed id -> claimed neighbor tuple
        self.inputs = {}
        self.mentioned = set()
        self.anchor = None

    def on_round(self, rnd, inbox):
        if self.decided:
            return []
        out = []
        if rnd == 0:
            return [(p, ("id-announce", "hello", self.me)) for p in self.ports]
        for frm, payload in inbox:
            if payload[0] == "abort":
                self._fail(out)
                return out
            kind = payload[1]
            if kind == "hello":
                self.claimed[frm] = payload[2]
            else:
                _tag, _kind, origin, nbrs, value = payload
                if origin in self.adj:
                    if self.adj[origin] != nbrs or self.inputs[origin] != value:
                        self._fail(out)
                        return out
                    continue
                self.adj[origin] = nbrs
                self.inputs[origin] = value
                self.mentioned.update(nbrs)
                out.extend(
                    (p, ("id-announce", "announce", origin, nbrs, value)) for p in self.ports if p != frm
                )
        if rnd == 1:
            mine = tuple(sorted(self.claimed.values()))
            self.adj[self.me] = mine
            self.inputs[self.me] = self.input
            self.mentioned.update((self.me,) + mine)
            out.extend((p, ("id-announce", "announce", self.me, mine, self.input)) for p in self.ports)
        if self.anchor is None and self.adj and self.mentioned and self.mentioned <= set(self.adj):
            if self.beta is not None and len(self.adj) > self.beta:
                self._fail(out)
                return out
            self.anchor = 1 + _max_ecc(self.adj) + 1
        if self.anchor is not None and rnd >= self.anchor:
            self.decide(sum(self.inputs.values()) % self.k)
        return out

    def _fail(self, out):
        self.decide(BOTTOM)
        out.extend((p, ("abort",)) for p in self.ports)


def _max_ecc(adj):
    worst = 0
    for source in adj:
        dist = {source: 0}
        frontier = [source]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        worst = max(worst, max(dist.values()))
    return worst


def _forcing_search(k, committed, target, budget):
    """Bounded breadth-first search over completions of the one free input."""
    for v in range(min(k, budget)):
        if (committed + v) % k == target:
            return v
    return None


class EmulationCheaterParty(Party):
    """One agent impersonating a whole fabricated side of the graph.

    Speaks as persona a1 on its first edge and a2 on its second, with a
    fabricated path of personas strung between them. Announcements of the
    fabricated agents leave each port exactly when an honest relay would
    have forwarded them, so the honest side observes a perfectly ordinary
    flood over the pretended graph. The middle persona sits deep enough
    that its announcement is due only after every honest input has reached
    the cheater, and its fabricated input is chosen then to force the sum.
    """

    def __init__(self, me, port1, port2, epath_len, k, preference, rng, budget=None):
        super().__init__(me, (me,))
        self.port1 = port1
        self.port2 = port2
        self.k = k
        self.preference = preference
        self.budget = k if budget is None else budget
        ids = set()
        stream = rng.fork("personas")
        while len(ids) < epath_len + 2:
            ids.add(stream.id64())
        ids = sorted(ids)
        self.a1, self.a2 = ids[0], ids[1]
        self.epath = tuple(ids[2:])
        rin = rng.fork("fake-inputs")
        self.fake_inputs = {x: rin.randrange(k) for x in (self.a1, self.a2) + self.epath}
        self.mid = self.epath[(epath_len - 1) // 2]
        self.honest_inputs = {}
        self.expected_honest = None  # learned from the believed topology
        self.forced = None
        self._last_emission = 1 + epath_len + 1

    def _persona_adj(self, x):
        chain = (self.a1,) + self.epath + (self.a2,)
        i = chain.index(x)
        if x == self.a1:
            return tuple(sorted((self._d1, self.epath[0])))
        if x == self.a2:
            return tuple(sorted((self._d2, self.epath[-1])))
        return tuple(sorted((chain[i - 1], chain[i + 1])))

    def on_round(self, rnd, inboxes):
        out = []
        box = inboxes.get(self.nodes[0], ())
        me = self.nodes[0]
        if rnd == 0:
            return [
                (me, self.port1, ("id-announce", "hello", self.a1)),
                (me, self.port2, ("id-announce", "hello", self.a2)),
            ]
        for frm, payload in box:
            if payload[0] == "id-announce" and payload[1] == "announce":
                origin, nbrs, value = payload[2], payload[3], payload[4]
                if origin not in self.honest_inputs:
                    self.honest_inputs[origin] = value
        if rnd == 1:
            # port-to-honest-id binding comes from construction
            self._d1, self._d2 = self.port1, self.port2
            for port, persona in ((self.port1, self.a1), (self.port2, self.a2)):
                out.append(
                    (me, port,
                     ("id-announce", "announce", persona, self._persona_adj(persona),
                      self.fake_inputs[persona]))
                )
        p = len(self.epath)
        if 1 <= rnd - 1 <= p:
            i = rnd - 1  # persona index announced this round (1-based from a1)
            for port, dist in ((self.port1, i), (self.port2, p + 1 - i)):
                # emit on a port only if an honest relay would see the internal
                # copy first; the external route runs through the other frontier
                internal, external = dist, (p + 1 - dist) + 3
                if internal < external:
                    x = self.epath[dist - 1]
                    value = self._value_for(x)
                    if value is None:
                        return out  # cannot force and cannot stay consistent; go silent
                    out.append(
                        (me, port,
                         ("id-announce", "announce", x, self._persona_adj(x), value))
                    )
        if rnd >= self._last_emission and not self.decided:
            total = sum(self.honest_inputs.values()) + sum(self.fake_inputs.values())
            self.decide(total % self.k)
        return out

    def _value_for(self, x):
        if x != self.mid:
            return self.fake_inputs[x]
        if self.forced is None:
            committed = sum(self.honest_inputs.values())
            committed += sum(v for y, v in self.fake_inputs.items() if y != self.mid)
            found = _forcing_search(self.k, committed, self.preference, self.budget)
            if found is not None:
                self.fake_inputs[self.mid] = found
            self.forced = True
        return self.fake_inputs[self.mid]


def _emulation_setup(honest_side_size, k, seed):
    if honest_side_size < 3:
        raise TopologyError("honest side needs at least 3 agents (2-connected)")
    rng = RngStream(seed, "emulation")
    ids = set()
    while len(ids) < honest_side_size + 1:
        ids.add(rng.id64())
    ids = sorted(ids)
    cheater, cycle = ids[0], ids[1:]
    rin = rng.fork("inputs")
    nodes = [Node(i, rin.randrange(k), rin.randrange(k)) for i in cycle]
    nodes.append(Node(cheater, rin.randrange(k), rng.fork("pref").randrange(k)))
    m = honest_side_size
    edges = [(cycle[i], cycle[(i + 1) % m]) for i in range(m)]
    edges += [(cheater, cycle[0]), (cheater, cycle[1])]  # adjacent attachment
    topology = NetworkTopology(nodes, edges)
    # deepest honest input must reach the cheater before the middle persona is due
    t_know = max(
        min(_hops(topology, x, cycle[0]), _hops(topology, x, cycle[1])) for x in cycle
    ) + 1
    return topology, cheater, (cycle[0], cycle[1]), 2 * t_know - 1


def _hops(topology, src, dst):
    if src == dst:
        return 0
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for v in frontier:
            for w in topology.neighbors[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    if w == dst:
                        return dist[w]
                    nxt.append(w)
        frontier = nxt
    raise TopologyError("disconnected")


def emulation_attack_demo(honest_side_size, k, seed, prior=None, budget=None, record=False):
    """Run the fabricated-subgraph attack once; returns a CheaterVerdict."""
    topology, cheater, (d1, d2), epath_len = _emulation_setup(honest_side_size, k, seed)
    beta = prior.beta if prior is not None and prior.finite else None
    rng = RngStream(seed, "emu-run")
    parties = []
    for a in topology.ids():
        if a == cheater:
            continue
        parties.append(
            AgentParty(FloodKSNode(a, topology.neighbors[a], topology.by_id[a].input, k, beta=beta))
        )
    preference = topology.by_id[cheater].preference
    cheat = EmulationCheaterParty(cheater, d1, d2, epath_len, k, preference, rng, budget=budget)
    parties.append(cheat)
    trace = run_sync(topology, parties, max_rounds=6 * (topology.n + epath_len) + 20, record=record)
    classify("ks", topology, trace)
    believed = topology.n - 1 + epath_len + 2
    detected = detect_oversize(believed, prior)
    return CheaterVerdict(detected, utility(cheater, trace, preference), trace)


def emulation_honest_control(honest_side_size, k, seed, record=False):
    """The same graph run honestly; the would-be cheater's utility baseline."""
    topology, cheater, _ports, _epath = _emulation_setup(honest_side_size, k, seed)
    parties = [
        AgentParty(FloodKSNode(a, topology.neighbors[a], topology.by_id[a].input, k))
        for a in topology.ids()
    ]
    trace = run_sync(topology, parties, max_rounds=4 * topology.n + 20, record=record)
    classify("ks", topology, trace)
    preference = topology.by_id[cheater].preference
    return CheaterVerdict(False, utility(cheater, trace, preference), trace)
