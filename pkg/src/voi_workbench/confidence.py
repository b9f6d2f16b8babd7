"""Second-order distributions over model parameters.

A second-order distribution describes where a probability (or utility)
entry is expected to land once a declared assessment effort is carried
out. Three families are supported:

* ``BetaDistribution`` -- fitted from two elicited fractiles,
* ``PiecewiseLinearCdf`` -- built from a rough sketch of the density,
* ``Degenerate`` -- a point mass, i.e. full confidence.

Every family supports an arbitrary bounded support interval; values are
mapped affinely onto the unit interval internally. An annotation ties a
distribution to one parameter together with the assessment-scenario text
and its expected cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import FitError, OutOfSupportError
from .incbeta import betainc, betainc_inv, beta_pdf
from .paramref import ParamRef, ProbabilityRef

if TYPE_CHECKING:
    from .model import DecisionModel

PARAM_MIN = 1e-3
PARAM_MAX = 1e6

# Residual targets: the solver aims an order of magnitude below the
# contractual 1e-7 so rounding in the forward cdf never tips a fit over.
_FIT_TARGET = 1e-11
_FIT_ACCEPT = 1e-7


@dataclass(frozen=True)
class FractilePair:
    """Elicited (cumulative probability, quantile) pairs, sorted by level.

    Both coordinates must be strictly increasing: a later fractile at the
    same or a smaller quantile has no consistent distribution.
    """

    pairs: tuple[tuple[float, float], ...]

    def __init__(self, pairs):
        pairs = tuple(sorted((float(p), float(q)) for p, q in pairs))
        if len(pairs) < 2:
            raise ValueError("need at least two fractile pairs")
        for p, _ in pairs:
            if not 0.0 < p < 1.0:
                raise ValueError(f"fractile level {p} outside (0, 1)")
        for (p1, q1), (p2, q2) in zip(pairs, pairs[1:]):
            if p2 <= p1:
                raise ValueError(f"fractile levels not strictly increasing: {p1}, {p2}")
            if q2 <= q1:
                raise ValueError(f"fractile quantiles not strictly increasing: {q1}, {q2}")
        object.__setattr__(self, "pairs", pairs)


@dataclass(frozen=True)
class BetaDistribution:
    alpha: float
    beta: float
    support: tuple[float, float] = (0.0, 1.0)

    family = "beta"

    def __post_init__(self):
        if not (PARAM_MIN <= self.alpha <= PARAM_MAX and PARAM_MIN <= self.beta <= PARAM_MAX):
            raise ValueError(
                f"beta parameters ({self.alpha}, {self.beta}) outside "
                f"[{PARAM_MIN}, {PARAM_MAX}]"
            )
        _check_support(self.support)

    def mean(self) -> float:
        lo, hi = self.support
        return lo + (hi - lo) * self.alpha / (self.alpha + self.beta)

    def cdf(self, x):
        return betainc(self.alpha, self.beta, _to_unit(x, self.support))

    def pdf(self, x):
        lo, hi = self.support
        return beta_pdf(self.alpha, self.beta, _to_unit(x, self.support)) / (hi - lo)

    def quantile(self, p):
        return _from_unit(betainc_inv(self.alpha, self.beta, _check_prob(p)), self.support)

    def sample(self, rng: np.random.Generator, size=None):
        return self.quantile(rng.random(size))


@dataclass(frozen=True)
class PiecewiseLinearCdf:
    """Distribution given by straight-line cdf segments between nodes.

    Nodes must have strictly increasing values and nondecreasing
    cumulative probabilities running from 0 to 1; an interior flat span
    encodes a zero-density gap, whose quantile is taken at its left edge.
    """

    points: tuple[tuple[float, float], ...]

    family = "sketch"

    def __post_init__(self):
        pts = tuple((float(x), float(c)) for x, c in self.points)
        if len(pts) < 2:
            raise ValueError("piecewise cdf needs at least two points")
        xs = [x for x, _ in pts]
        cs = [c for _, c in pts]
        if any(x2 <= x1 for x1, x2 in zip(xs, xs[1:])):
            raise ValueError("piecewise cdf values must be strictly increasing")
        if any(c2 < c1 for c1, c2 in zip(cs, cs[1:])):
            raise ValueError("piecewise cdf must be nondecreasing")
        if abs(cs[0]) > 1e-12 or abs(cs[-1] - 1.0) > 1e-12:
            raise ValueError("piecewise cdf must run from 0 to 1")
        object.__setattr__(self, "points", pts)

    @property
    def support(self) -> tuple[float, float]:
        return (self.points[0][0], self.points[-1][0])

    def _arrays(self):
        xs = np.array([x for x, _ in self.points])
        cs = np.array([c for _, c in self.points])
        return xs, cs

    def mean(self) -> float:
        xs, cs = self._arrays()
        return float(np.sum(np.diff(cs) * (xs[:-1] + xs[1:]) / 2.0))

    def cdf(self, x):
        scalar = np.isscalar(x) or getattr(x, "ndim", 1) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lo, hi = self.support
        if np.any((x < lo) | (x > hi)):
            raise OutOfSupportError(f"cdf query outside support [{lo}, {hi}]")
        xs, cs = self._arrays()
        out = np.interp(x, xs, cs)
        return float(out[0]) if scalar else out

    def quantile(self, p):
        scalar = np.isscalar(p) or getattr(p, "ndim", 1) == 0
        p = _check_prob(np.atleast_1d(np.asarray(p, dtype=float)))
        xs, cs = self._arrays()
        idx = np.searchsorted(cs, p, side="left")
        idx = np.clip(idx, 1, len(cs) - 1)
        c0 = cs[idx - 1]
        c1 = cs[idx]
        x0 = xs[idx - 1]
        x1 = xs[idx]
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(c1 > c0, (p - c0) / np.where(c1 > c0, c1 - c0, 1.0), 0.0)
        out = x0 + frac * (x1 - x0)
        out = np.where(p <= cs[0], xs[0], out)
        return float(out[0]) if scalar else out

    def sample(self, rng: np.random.Generator, size=None):
        return self.quantile(rng.random(size))


@dataclass(frozen=True)
class Degenerate:
    value: float

    family = "degenerate"

    @property
    def support(self) -> tuple[float, float]:
        return (self.value, self.value)

    def mean(self) -> float:
        return self.value

    def cdf(self, x):
        scalar = np.isscalar(x) or getattr(x, "ndim", 1) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.where(x < self.value, 0.0, 1.0)
        return float(out[0]) if scalar else out

    def quantile(self, p):
        scalar = np.isscalar(p) or getattr(p, "ndim", 1) == 0
        p = _check_prob(np.atleast_1d(np.asarray(p, dtype=float)))
        out = np.full(p.shape, self.value)
        return float(out[0]) if scalar else out

    def sample(self, rng: np.random.Generator, size=None):
        p = rng.random(size)  # consume the stream like the other families
        return self.quantile(p)


SecondOrderDistribution = BetaDistribution | PiecewiseLinearCdf | Degenerate


@dataclass(frozen=True)
class SecondOrderAnnotation:
    """Attaches a second-order distribution, the assessment scenario it
    describes, and the scenario's expected cost to one model parameter."""

    target: ParamRef
    scenario: str
    distribution: SecondOrderDistribution
    cost_mean: float
    fractiles: FractilePair | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.scenario.strip():
            raise ValueError("assessment scenario text must be nonempty")
        if self.cost_mean < 0:
            raise ValueError("assessment cost must be nonnegative")
        if isinstance(self.target, ProbabilityRef):
            lo, hi = self.distribution.support
            if lo < -1e-12 or hi > 1.0 + 1e-12:
                raise ValueError(
                    f"distribution support [{lo}, {hi}] exceeds [0, 1] "
                    f"for probability target {self.target}"
                )


@dataclass(frozen=True)
class CoherenceWarning:
    target: ParamRef
    point_value: float
    distribution_mean: float
    threshold: float

    @property
    def gap(self) -> float:
        return abs(self.distribution_mean - self.point_value)

    def __str__(self) -> str:
        return (
            f"{self.target}: second-order mean {self.distribution_mean:.6g} differs "
            f"from current value {self.point_value:.6g} by {self.gap:.4g} "
            f"(threshold {self.threshold:g})"
        )


def coherence_check(
    model: "DecisionModel",
    annotation: SecondOrderAnnotation,
    threshold: float = 0.02,
) -> CoherenceWarning | None:
    """Warn when an annotation's expected post-assessment value disagrees
    with the value currently stored in the model.

    A large gap means the assessor already believes the stored number is
    off, which is worth surfacing before any information-value analysis.
    """
    point = model.point_value(annotation.target)
    mean = annotation.distribution.mean()
    if abs(mean - point) > threshold:
        return CoherenceWarning(annotation.target, point, mean, threshold)
    return None


def fit_beta_from_fractiles(
    fractiles: FractilePair,
    support: tuple[float, float] = (0.0, 1.0),
) -> BetaDistribution:
    """Fit a beta distribution through exactly two elicited fractiles.

    The fit is exact: the returned distribution's cdf passes through both
    (quantile, level) pairs to within 1e-7. A damped Newton iteration on
    the log-parameters does the work; if it stalls, a nested-bisection
    sweep over (mean, concentration) takes over. Raises FitError when no
    solution exists inside the allowed parameter box.
    """
    if len(fractiles.pairs) != 2:
        raise ValueError("beta fitting requires exactly two fractile pairs")
    _check_support(support)
    (p1, q1), (p2, q2) = fractiles.pairs
    lo, hi = support
    u1 = (q1 - lo) / (hi - lo)
    u2 = (q2 - lo) / (hi - lo)
    if not (0.0 < u1 < 1.0 and 0.0 < u2 < 1.0):
        raise ValueError("fractile quantiles must lie strictly inside the support")

    if abs((u1 + u2) - 1.0) < 1e-12 and abs((p1 + p2) - 1.0) < 1e-12:
        alpha = _fit_symmetric(p2, u2)
        return BetaDistribution(alpha, alpha, support)

    params = _fit_newton(p1, u1, p2, u2)
    if params is None:
        params = _fit_nested_bisection(p1, u1, p2, u2)
    alpha, beta = params
    resid = max(
        abs(betainc(alpha, beta, u1) - p1),
        abs(betainc(alpha, beta, u2) - p2),
    )
    if resid > _FIT_ACCEPT:
        raise FitError(
            f"no beta within parameter bounds fits fractiles "
            f"({p1}->{q1}, {p2}->{q2})",
            residual=resid,
        )
    return BetaDistribution(alpha, beta, support)


def _fit_symmetric(p_hi: float, q_hi: float) -> float:
    # Symmetric case: alpha == beta, cdf(q_hi) is increasing in alpha for
    # q_hi > 1/2, so plain bisection on log(alpha) suffices.
    lo, hi = math.log(PARAM_MIN), math.log(PARAM_MAX)
    f_lo = betainc(math.exp(lo), math.exp(lo), q_hi) - p_hi
    f_hi = betainc(math.exp(hi), math.exp(hi), q_hi) - p_hi
    if f_lo == 0.0:
        return math.exp(lo)
    if f_hi == 0.0:
        return math.exp(hi)
    if (f_lo < 0.0) == (f_hi < 0.0):
        raise FitError(
            f"no symmetric beta within bounds has cdf({q_hi}) = {p_hi}",
            residual=min(abs(f_lo), abs(f_hi)),
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = betainc(math.exp(mid), math.exp(mid), q_hi) - p_hi
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    return math.exp(0.5 * (lo + hi))


def _fit_newton(p1, q1, p2, q2):
    lo_log, hi_log = math.log(PARAM_MIN), math.log(PARAM_MAX)
    m0 = min(max(q1 + (0.5 - p1) * (q2 - q1) / (p2 - p1), 1e-4), 1.0 - 1e-4)
    z1 = _norm_ppf(p1)
    z2 = _norm_ppf(p2)
    sigma = max((q2 - q1) / max(z2 - z1, 1e-9), 1e-6)
    n0 = max(m0 * (1.0 - m0) / sigma**2 - 1.0, 0.01)
    x = np.array([
        min(max(math.log(m0 * n0), lo_log), hi_log),
        min(max(math.log((1.0 - m0) * n0), lo_log), hi_log),
    ])

    def residual(v):
        a, b = math.exp(v[0]), math.exp(v[1])
        return np.array([betainc(a, b, q1) - p1, betainc(a, b, q2) - p2])

    r = residual(x)
    for _ in range(80):
        if np.max(np.abs(r)) < _FIT_TARGET:
            break
        h = 1e-6
        jac = np.empty((2, 2))
        for j in range(2):
            step = np.zeros(2)
            step[j] = h
            jac[:, j] = (residual(x + step) - residual(x - step)) / (2.0 * h)
        try:
            delta = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(delta)):
            return None
        scale = 1.0
        norm0 = float(np.max(np.abs(r)))
        for _ in range(12):
            x_new = np.clip(x - scale * delta, lo_log, hi_log)
            r_new = residual(x_new)
            if float(np.max(np.abs(r_new))) < norm0:
                x, r = x_new, r_new
                break
            scale *= 0.5
        else:
            return None
    if np.max(np.abs(r)) >= _FIT_TARGET * 10:
        return None
    return math.exp(x[0]), math.exp(x[1])


def _fit_nested_bisection(p1, q1, p2, q2):
    """Sweep concentration, matching the upper fractile exactly at each
    step via an inner bisection on the mean, until the lower fractile
    lands as well."""

    def mean_matching_upper(n):
        lo_m, hi_m = 1e-12, 1.0 - 1e-12
        for _ in range(100):
            mid = 0.5 * (lo_m + hi_m)
            val = betainc(mid * n, (1.0 - mid) * n, q2)
            # cdf at q2 falls as the mean rises
            if val > p2:
                lo_m = mid
            else:
                hi_m = mid
        return 0.5 * (lo_m + hi_m)

    def low_residual(n):
        m = mean_matching_upper(n)
        return betainc(m * n, (1.0 - m) * n, q1) - p1, m

    n_lo, n_hi = 2.0 * PARAM_MIN, 2.0 * PARAM_MAX
    r_lo, _ = low_residual(n_lo)
    r_hi, _ = low_residual(n_hi)
    if (r_lo < 0.0) == (r_hi < 0.0):
        best = min((abs(r_lo), n_lo), (abs(r_hi), n_hi))
        m = mean_matching_upper(best[1])
        return _clip_params(m * best[1], (1.0 - m) * best[1])
    log_lo, log_hi = math.log(n_lo), math.log(n_hi)
    for _ in range(100):
        log_mid = 0.5 * (log_lo + log_hi)
        r_mid, _ = low_residual(math.exp(log_mid))
        if (r_mid < 0.0) == (r_lo < 0.0):
            log_lo, r_lo = log_mid, r_mid
        else:
            log_hi = log_mid
    n = math.exp(0.5 * (log_lo + log_hi))
    m = mean_matching_upper(n)
    return _clip_params(m * n, (1.0 - m) * n)


def _clip_params(alpha, beta):
    return (
        min(max(alpha, PARAM_MIN), PARAM_MAX),
        min(max(beta, PARAM_MIN), PARAM_MAX),
    )


def fit_sketch(points) -> PiecewiseLinearCdf:
    """Turn a rough density sketch into a piecewise-linear cdf.

    ``points`` are (value, weight) pairs with strictly increasing values
    and nonnegative weights; weights need not be normalized. The sketch is
    integrated by the trapezoid rule and rescaled to total mass one.
    """
    pts = [(float(x), float(w)) for x, w in points]
    if len(pts) < 2:
        raise ValueError("sketch needs at least two points")
    xs = [x for x, _ in pts]
    ws = [w for _, w in pts]
    if any(x2 <= x1 for x1, x2 in zip(xs, xs[1:])):
        raise ValueError("sketch values must be strictly increasing")
    if any(w < 0 for w in ws):
        raise ValueError("sketch weights must be nonnegative")
    cum = [0.0]
    for (x1, w1), (x2, w2) in zip(pts, pts[1:]):
        cum.append(cum[-1] + 0.5 * (w1 + w2) * (x2 - x1))
    total = cum[-1]
    if total <= 0.0:
        raise ValueError("sketch has zero total weight")
    return PiecewiseLinearCdf(tuple((x, c / total) for x, c in zip(xs, cum)))


def _check_support(support):
    lo, hi = support
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"support must be a bounded interval, got [{lo}, {hi}]")


def _to_unit(x, support):
    lo, hi = support
    scalar = np.isscalar(x) or getattr(x, "ndim", 1) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((x < lo - 1e-12) | (x > hi + 1e-12)):
        raise OutOfSupportError(f"query outside support [{lo}, {hi}]")
    t = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
    return float(t[0]) if scalar else t


def _from_unit(t, support):
    lo, hi = support
    return lo + (hi - lo) * t


def _check_prob(p):
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise OutOfSupportError("cumulative probability outside [0, 1]")
    return p


def _norm_ppf(p: float) -> float:
    pp = min(p, 1.0 - p)
    t = math.sqrt(-2.0 * math.log(max(pp, 1e-300)))
    x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t
    return x if p < 0.5 else -x
