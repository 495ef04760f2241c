"""Seeded randomness with stable per-agent substreams.

Every source of randomness in a run is an RngStream forked from the run's
master seed, so identical (topology, behaviors, seed) yields a bit-identical
trace. Python's salted hash() is never used for derivation.
"""

import random

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def mix64(seed: int, *tags) -> int:
    """Fold a seed and a path of tags (ints or strings) into one 64-bit value."""
    h = _splitmix64(seed & _MASK)
    for tag in tags:
        if isinstance(tag, str):
            h = _splitmix64(h ^ len(tag))
            for b in tag.encode("utf-8"):
                h = _splitmix64(h ^ b)
        else:
            h = _splitmix64(h ^ (int(tag) & _MASK))
    return h


class RngStream:
    """A random.Random whose identity is (seed, fork path).

    Substreams obtained via fork() are independent deterministic functions
    of the master seed and the fork tags.
    """

    __slots__ = ("seed", "_rng")

    def __init__(self, seed: int, *tags):
        self.seed = mix64(seed, *tags) if tags else seed & _MASK
        self._rng = random.Random(self.seed)

    def fork(self, *tags) -> "RngStream":
        return RngStream(self.seed, "fork", *tags)

    def randrange(self, n: int) -> int:
        return self._rng.randrange(n)

    def randint(self, a: int, b: int) -> int:
        return self._rng.randint(a, b)

    def choice(self, seq):
        return self._rng.choice(seq)

    def random(self) -> float:
        return self._rng.random()

    def bit(self) -> int:
        return self._rng.randrange(2)

    def id64(self) -> int:
        """Fresh 64-bit agent id candidate."""
        return self._rng.randrange(1 << 64)
