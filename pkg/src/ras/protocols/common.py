"""Legality predicates, the 0/1 utility, and the Full Knowledge check.

Legality is evaluated over real agents only: a duplicating cheater
contributes the single output recorded under its real id, and the edge set
used for coloring is the real graph's.
"""

from itertools import product

from ..simcore.engine import BOTTOM, Legality

PROBLEMS = (
    "ks",
    "coloring-witness",
    "coloring-ring",
    "leader-election",
    "partition",
    "orientation",
)


def legality(problem, topology, outputs) -> Legality:
    """Classify an output vector; any BOTTOM is erroneous for every problem."""
    values = list(outputs.values())
    if any(v is BOTTOM or v is None for v in values):
        return Legality.ERRONEOUS
    ok = False
    if problem == "ks":
        ok = len(set(values)) == 1
    elif problem in ("coloring-witness", "coloring-ring"):
        ok = all(outputs[a] != outputs[b] for a, b in topology.edges)
    elif problem == "leader-election":
        ok = sorted(values) == [0] * (len(values) - 1) + [1]
    elif problem == "partition":
        zeros = sum(1 for v in values if v == 0)
        ones = sum(1 for v in values if v == 1)
        ok = zeros == ones == len(values) / 2
    elif problem == "orientation":
        ok = _orientation_agrees(topology, outputs)
    else:
        raise ValueError("unknown problem %r" % problem)
    return Legality.LEGAL if ok else Legality.ERRONEOUS


def _orientation_agrees(topology, outputs):
    views = {a: dict(v) for a, v in outputs.items()}
    for a, b in topology.edges:
        edge = (a, b)
        if edge not in views[a] or edge not in views[b]:
            return False
        if views[a][edge] != views[b][edge]:
            return False
    return True


def classify(problem, topology, trace):
    trace.legality = legality(problem, topology, trace.outputs)
    return trace


def utility(agent_id, trace, preference) -> int:
    """1 iff the trace is legal and the agent got its preferred output."""
    if trace.legality is None:
        raise ValueError("trace has not been classified")
    if trace.legality is Legality.ERRONEOUS:
        return 0
    return 1 if trace.outputs[agent_id] == preference else 0


def check_full_knowledge(k, m, q=None) -> bool:
    """Brute-force the Full Knowledge property of q on m inputs over {0..k-1}.

    For every position j and every fixing of the other inputs, each value in
    the range of q must be hit by the same number of choices of the free
    input.
    """
    if k < 2 or m < 1:
        raise ValueError("need k >= 2 and m >= 1")
    if q is None:
        q = lambda xs: sum(xs) % k
    rng_values = set()
    for xs in product(range(k), repeat=m):
        rng_values.add(q(list(xs)))
    for j in range(m):
        for rest in product(range(k), repeat=m - 1):
            hits = {}
            for x in range(k):
                xs = list(rest[:j]) + [x] + list(rest[j:])
                y = q(xs)
                hits[y] = hits.get(y, 0) + 1
            counts = [hits.get(y, 0) for y in rng_values]
            if len(set(counts)) != 1:
                return False
    return True
