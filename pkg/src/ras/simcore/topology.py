"""Agent network topologies: rings, chorded rings, 2-connectivity, file IO."""

import json
from dataclasses import dataclass

from .rng import RngStream


class TopologyError(ValueError):
    """Raised for invalid topology construction or queries."""


@dataclass(frozen=True)
class Node:
    id: int
    input: int
    preference: int


class NetworkTopology:
    """Undirected simple graph of agents, each with an input and a preference.

    Rings additionally carry ring_order, the global clockwise order that ring
    protocols assume as their orientation; succ/pred of a node follow it.
    """

    def __init__(self, nodes, edges, ring_order=None):
        nodes = tuple(nodes)
        ids = [node.id for node in nodes]
        if len(set(ids)) != len(ids):
            raise TopologyError("duplicate agent ids")
        known = set(ids)
        norm = set()
        for a, b in edges:
            if a == b:
                raise TopologyError("self-loop on %d" % a)
            if a not in known or b not in known:
                raise TopologyError("edge endpoint not a node: (%d, %d)" % (a, b))
            norm.add((a, b) if a < b else (b, a))
        self.nodes = nodes
        self.by_id = {node.id: node for node in nodes}
        self.edges = frozenset(norm)
        nbrs = {i: [] for i in ids}
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        self.neighbors = {i: tuple(sorted(v)) for i, v in nbrs.items()}
        if ring_order is not None:
            ring_order = tuple(ring_order)
            if sorted(ring_order) != sorted(ids):
                raise TopologyError("ring_order must be a permutation of node ids")
            n = len(ring_order)
            for i in range(n):
                pair = tuple(sorted((ring_order[i], ring_order[(i + 1) % n])))
                if pair not in self.edges:
                    raise TopologyError("ring_order step %d is not an edge" % i)
        self.ring_order = ring_order

    @property
    def n(self) -> int:
        return len(self.nodes)

    def degree(self, agent_id: int) -> int:
        return len(self.neighbors[agent_id])

    def ids(self):
        return tuple(node.id for node in self.nodes)

    def succ(self, agent_id: int) -> int:
        """Clockwise neighbor on a ring."""
        order = self._require_ring()
        return order[(order.index(agent_id) + 1) % len(order)]

    def pred(self, agent_id: int) -> int:
        """Counter-clockwise neighbor on a ring."""
        order = self._require_ring()
        return order[(order.index(agent_id) - 1) % len(order)]

    def _require_ring(self):
        if self.ring_order is None:
            raise TopologyError("topology has no ring orientation")
        return self.ring_order

    def to_json(self) -> str:
        doc = {
            "nodes": [
                {"id": n.id, "input": n.input, "preference": n.preference}
                for n in self.nodes
            ],
            "edges": sorted(list(e) for e in self.edges),
        }
        if self.ring_order is not None:
            doc["ring_order"] = list(self.ring_order)
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "NetworkTopology":
        doc = json.loads(text)
        nodes = [Node(d["id"], d.get("input", 0), d.get("preference", 0)) for d in doc["nodes"]]
        return cls(nodes, [tuple(e) for e in doc["edges"]], doc.get("ring_order"))


def _sample_ids(rng: RngStream, n: int):
    # id space is 2^64 >> n; collisions are resampled rather than tolerated
    ids = set()
    while len(ids) < n:
        ids.add(rng.id64())
    return ids


def build_ring(n, seed, input_values=(0, 1), preference_values=(0, 1)) -> NetworkTopology:
    """Cycle on n agents with random distinct ids and uniform inputs/preferences."""
    if n < 3:
        raise TopologyError("ring needs n >= 3, got %d" % n)
    rng = RngStream(seed, "topology")
    order = sorted(_sample_ids(rng.fork("ids"), n))
    rin = rng.fork("inputs")
    rpref = rng.fork("prefs")
    input_values = tuple(input_values)
    preference_values = tuple(preference_values)
    nodes = [Node(i, rin.choice(input_values), rpref.choice(preference_values)) for i in order]
    edges = [(order[i], order[(i + 1) % n]) for i in range(n)]
    return NetworkTopology(nodes, edges, ring_order=order)


def build_chorded_ring(n, extra_edges, seed, input_values=(0, 1), preference_values=(0, 1)) -> NetworkTopology:
    """Random 2-connected graph: a ring plus `extra_edges` random chords.

    Keeps the ring_order so the instance stays usable by ring protocols'
    generators of 2-connected test graphs; the chords only add edges.
    """
    base = build_ring(n, seed, input_values, preference_values)
    rng = RngStream(seed, "chords")
    order = list(base.ring_order)
    edges = set(base.edges)
    candidates = [
        (a, b)
        for i, a in enumerate(order)
        for b in order[i + 1 :]
        if (a, b) not in edges and (b, a) not in edges
    ]
    candidates.sort()
    for _ in range(min(extra_edges, len(candidates))):
        pick = candidates.pop(rng.randrange(len(candidates)))
        edges.add(pick)
    return NetworkTopology(base.nodes, edges, ring_order=base.ring_order)


def verify_two_connected(topology: NetworkTopology) -> bool:
    """True iff the graph is 2-vertex-connected (no cut vertex, connected, n >= 3).

    Uses DFS lowpoints (articulation points); tests compare it against the
    brute-force remove-one-node oracle.
    """
    ids = topology.ids()
    n = len(ids)
    if n < 3:
        return False
    nbrs = topology.neighbors
    if any(len(nbrs[i]) == 0 for i in ids):
        return False
    root = ids[0]
    index = {}
    low = {}
    parent = {root: None}
    order = []
    stack = [(root, iter(nbrs[root]))]
    index[root] = 0
    low[root] = 0
    counter = 1
    root_children = 0
    while stack:
        v, it = stack[-1]
        advanced = False
        for w in it:
            if w not in index:
                parent[w] = v
                if v == root:
                    root_children += 1
                index[w] = low[w] = counter
                counter += 1
                order.append(w)
                stack.append((w, iter(nbrs[w])))
                advanced = True
                break
            elif w != parent[v]:
                if index[w] < low[v]:
                    low[v] = index[w]
        if not advanced:
            stack.pop()
            p = parent[v]
            if p is not None:
                if low[v] < low[p]:
                    low[p] = low[v]
                if p != root and low[v] >= index[p]:
                    return False  # p is an articulation point
    if counter != n:
        return False  # disconnected
    return root_children <= 1
