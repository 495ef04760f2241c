"""Priors on the network size n: exact pmf/cdf and exact sampling.

Supported kinds:
  uniform    P[n = t] = 1/(beta - alpha + 1) on [alpha, beta]
  geometric  half-decay from alpha with the tail above beta spread uniformly:
             P[n = t] = 2^(alpha - t - 1) + c,  c = 2^(alpha - beta - 1)/(beta - alpha + 1)
  point      all mass on alpha (= beta)
  unbounded  infinite support marker; carries no pmf and cannot be queried
             or sampled, only used by the no-detection attack demos

All probabilities are Fractions; no analysis-path value is ever rounded.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

UNIFORM = "uniform"
GEOMETRIC = "geometric"
POINT = "point"
UNBOUNDED = "unbounded"

_KINDS = (UNIFORM, GEOMETRIC, POINT, UNBOUNDED)


class UnsupportedQueryError(ValueError):
    """pmf/cdf/sample asked of a prior that cannot answer (unbounded support)."""


@dataclass(frozen=True)
class Prior:
    kind: str
    alpha: int
    beta: int = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError("unknown prior kind %r" % self.kind)
        if self.alpha < 1:
            raise ValueError("alpha must be positive")
        if self.kind == UNBOUNDED:
            if self.beta is not None:
                raise ValueError("unbounded prior has no beta")
            return
        if self.beta is None or self.beta < self.alpha:
            raise ValueError("need beta >= alpha, got [%s, %s]" % (self.alpha, self.beta))
        if self.kind == POINT and self.beta != self.alpha:
            raise ValueError("point prior needs alpha == beta")

    @property
    def finite(self) -> bool:
        return self.kind != UNBOUNDED

    def label(self) -> str:
        if self.kind == UNBOUNDED:
            return "unbounded(alpha=%d)" % self.alpha
        return "%s[%d,%d]" % (self.kind, self.alpha, self.beta)

    def to_dict(self) -> dict:
        if self.kind == UNBOUNDED:
            return {"kind": self.kind, "alpha": self.alpha}
        return {"kind": self.kind, "alpha": self.alpha, "beta": self.beta}

    @classmethod
    def from_dict(cls, doc: dict) -> "Prior":
        return cls(doc["kind"], doc["alpha"], doc.get("beta"))


def uniform(alpha: int, beta: int) -> Prior:
    return Prior(UNIFORM, alpha, beta)


def geometric_half(alpha: int, beta: int) -> Prior:
    return Prior(GEOMETRIC, alpha, beta)


def point(n: int) -> Prior:
    return Prior(POINT, n, n)


def unbounded(alpha: int = 1) -> Prior:
    return Prior(UNBOUNDED, alpha)


def _require_finite(prior: Prior):
    if not prior.finite:
        raise UnsupportedQueryError("unbounded prior has no finite pmf/cdf")


def geometric_redistribution(prior: Prior) -> Fraction:
    """The constant c spread over the support: tail mass 2^(alpha-1-beta) split evenly."""
    a, b = prior.alpha, prior.beta
    return Fraction(1, 2 ** (b - a + 1)) / (b - a + 1)


def pmf(prior: Prior, t: int) -> Fraction:
    """P[n = t], exactly."""
    _require_finite(prior)
    a, b = prior.alpha, prior.beta
    if t < a or t > b:
        return Fraction(0)
    if prior.kind == POINT:
        return Fraction(1)
    if prior.kind == UNIFORM:
        return Fraction(1, b - a + 1)
    return Fraction(1, 2 ** (t - a + 1)) + geometric_redistribution(prior)


def cdf(prior: Prior, t: int) -> Fraction:
    """P[n <= t], exactly; 0 below alpha and 1 from beta up."""
    _require_finite(prior)
    a, b = prior.alpha, prior.beta
    if t < a:
        return Fraction(0)
    if t >= b:
        return Fraction(1)
    if prior.kind == UNIFORM:
        return Fraction(t - a + 1, b - a + 1)
    # geometric: (1 - 2^(alpha-t-1)) + (t-alpha+1)c
    return 1 - Fraction(1, 2 ** (t - a + 1)) + (t - a + 1) * geometric_redistribution(prior)


def support(prior: Prior):
    _require_finite(prior)
    return range(prior.alpha, prior.beta + 1)


def mean_of(prior: Prior, fn) -> Fraction:
    """E[fn(n)] summed exactly over the support."""
    return sum((pmf(prior, t) * fn(t) for t in support(prior)), Fraction(0))


def sample(prior: Prior, rng) -> int:
    """Draw n with exactly pmf(t) probability (inverse cdf over a common denominator)."""
    _require_finite(prior)
    if prior.kind == POINT:
        return prior.alpha
    denom = lcm(*(cdf(prior, t).denominator for t in support(prior)))
    u = Fraction(rng.randrange(denom), denom)
    for t in support(prior):
        if u < cdf(prior, t):
            return t
    return prior.beta
