"""Interval bounds on probabilities and their propagation.

Instead of a distribution over where a probability might land, each entry
gets only a [low, high] range. Bounds on a target marginal come from
sweeping every overridden entry to its interval endpoints and evaluating
the marginal at all 2^k corner combinations. Marginals are multilinear in
the overridden entries, so corners attain the exact extremes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .model import DecisionModel
from .paramref import ParamRef, ProbabilityRef, parse_ref

MAX_OVERRIDES = 20


@dataclass(frozen=True)
class ProbabilityInterval:
    low: float
    high: float

    def __post_init__(self):
        if not (0.0 <= self.low <= self.high <= 1.0):
            raise ValueError(f"not a probability interval: [{self.low}, {self.high}]")

    @property
    def degenerate(self) -> bool:
        return self.low == self.high

    def __str__(self) -> str:
        return f"[{self.low:g}, {self.high:g}]"


def conjunction_bounds(chain) -> ProbabilityInterval:
    """Bounds on a conjunction given interval bounds along the chain
    p(A), p(B|A), p(C|AB), ...; endpoints multiply."""
    chain = list(chain)
    if not chain:
        raise ValueError("conjunction needs at least one interval")
    low = math.prod(iv.low for iv in chain)
    high = math.prod(iv.high for iv in chain)
    return ProbabilityInterval(low, high)


@dataclass(frozen=True)
class BoundsReport:
    target: tuple[str, str]
    interval: ProbabilityInterval
    renormalized: tuple[str, ...]
    vertices: int

    @property
    def low(self) -> float:
        return self.interval.low

    @property
    def high(self) -> float:
        return self.interval.high

    def to_dict(self) -> dict:
        return {
            "target": f"{self.target[0]}={self.target[1]}",
            "low": self.low,
            "high": self.high,
            "renormalized": list(self.renormalized),
            "vertices": self.vertices,
        }


def marginal_bounds(
    model: DecisionModel,
    overrides,
    target: tuple[str, str],
) -> BoundsReport:
    """Bounds on a target marginal when some probability entries are known
    only to intervals.

    ``overrides`` is an ordered collection of (reference, interval) pairs;
    references may be canonical strings. Rows with more than two outcomes
    are flagged in the report, since substituting one entry there rescales
    several siblings at once.
    """
    model.assert_valid()
    if isinstance(overrides, dict):
        overrides = list(overrides.items())
    pairs: list[tuple[ProbabilityRef, ProbabilityInterval]] = []
    for ref, interval in overrides:
        ref = parse_ref(ref) if isinstance(ref, str) else ref
        if not isinstance(ref, ProbabilityRef):
            raise ValueError(f"interval overrides apply to probability entries, not {ref}")
        if not isinstance(interval, ProbabilityInterval):
            interval = ProbabilityInterval(*interval)
        model.point_value(ref)
        pairs.append((ref, interval))
    if len(pairs) > MAX_OVERRIDES:
        raise ValueError(
            f"{len(pairs)} overrides would need {2 ** len(pairs)} corner "
            f"evaluations; limit is {MAX_OVERRIDES}"
        )
    var, outcome = target
    model.variable(var).outcome_index(outcome)

    renormalized = tuple(
        ref.render()
        for ref, _ in pairs
        if len(model.variable(ref.variable).outcomes) > 2
    )

    lo = math.inf
    hi = -math.inf
    count = 0
    for corner in itertools.product(*((iv.low, iv.high) for _, iv in pairs)):
        sub = model
        for (ref, _), value in zip(pairs, corner):
            sub = sub.substitute(ref, value)
        m = sub.marginal(var, outcome)
        lo = min(lo, m)
        hi = max(hi, m)
        count += 1
    lo = min(max(lo, 0.0), 1.0)
    hi = min(max(hi, 0.0), 1.0)
    return BoundsReport((var, outcome), ProbabilityInterval(lo, hi), renormalized, count)
