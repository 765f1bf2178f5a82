"""Monotone norms over the nonnegative orthant.

Covers the standard lp norms, weighted lp norms, rescaled norms, and
Minkowski gauge norms of convex constraint sets given only through a
set-membership oracle.  Gauge values are found by bracketing followed by
bisection along the ray through the query point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

log = logging.getLogger("numax.norms")

# Norm kinds.
L1 = "l1"
L2 = "l2"
LINF = "linf"
WEIGHTED_LP = "weighted_lp"
GAUGE = "gauge"
SCALED = "scaled"

# The bracketing search may rescale the initial guess by at most 2**_BRACKET_CAP
# in either direction before the oracle is declared invalid.
_BRACKET_CAP = 60

MembershipOracle = Callable[[np.ndarray], bool]


class GaugeSetError(ValueError):
    """The membership oracle does not describe a valid constraint set."""


@dataclass(frozen=True)
class MonotoneNormSpec:
    """A norm that is order preserving on the nonnegative orthant.

    Use the module-level constructors (`l1`, `linf`, `weighted_lp`, `gauge`,
    `scaled`, ...) rather than building instances by hand.  Weighted norms
    place the weights inside the power, (sum_j (w_j |x_j|)^p)^(1/p), so a
    unit vector e_j always has norm w_j.  Gauge norms are defined on the
    nonnegative orthant only.
    """

    kind: str
    dimension: int
    weights: tuple[float, ...] | None = None
    exponent: float | None = None
    # Oracles compare by identity: two gauge specs are interchangeable only
    # when they share the same membership function object.
    oracle: MembershipOracle | None = None
    tolerance: float = 1e-10
    base: "MonotoneNormSpec | None" = None
    factor: float | None = None

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise ValueError("dimension must be a positive integer")
        if self.kind == WEIGHTED_LP:
            if self.weights is None or len(self.weights) != self.dimension:
                raise ValueError("weighted norm needs one weight per coordinate")
            if min(self.weights) <= 0:
                raise ValueError("weights must be strictly positive")
            if self.exponent is None or self.exponent < 1:
                raise ValueError("exponent must satisfy p >= 1")
        elif self.kind == GAUGE:
            if self.oracle is None:
                raise ValueError("gauge norm needs a membership oracle")
            if self.tolerance <= 0:
                raise ValueError("gauge tolerance must be positive")
        elif self.kind == SCALED:
            if self.base is None:
                raise ValueError("scaled norm needs a base spec")
            if self.factor is None or not self.factor > 0:
                raise ValueError("scale factor must be strictly positive")
            if self.base.dimension != self.dimension:
                raise ValueError("scaled base dimension mismatch")
        elif self.kind not in (L1, L2, LINF):
            raise ValueError(f"unknown norm kind {self.kind!r}")

    def __call__(self, x) -> float:
        return norm_eval(self, x)


def l1(dimension: int) -> MonotoneNormSpec:
    return MonotoneNormSpec(L1, dimension)


def l2(dimension: int) -> MonotoneNormSpec:
    return MonotoneNormSpec(L2, dimension)


def linf(dimension: int) -> MonotoneNormSpec:
    return MonotoneNormSpec(LINF, dimension)


def weighted_lp(weights, exponent: float = 1.0) -> MonotoneNormSpec:
    weights = tuple(float(w) for w in weights)
    return MonotoneNormSpec(WEIGHTED_LP, len(weights), weights=weights,
                            exponent=float(exponent))


def gauge(oracle: MembershipOracle, dimension: int,
          tolerance: float = 1e-10) -> MonotoneNormSpec:
    return MonotoneNormSpec(GAUGE, dimension, oracle=oracle, tolerance=tolerance)


def scaled(base: MonotoneNormSpec, factor: float) -> MonotoneNormSpec:
    return MonotoneNormSpec(SCALED, base.dimension, base=base, factor=float(factor))


def norm_eval(spec: MonotoneNormSpec, x) -> float:
    """Evaluate the norm: zero only at the origin, absolutely homogeneous,
    monotone on the orthant."""
    v = np.asarray(x, dtype=float)
    if v.shape != (spec.dimension,):
        raise ValueError(
            f"expected a vector of length {spec.dimension}, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError("norm argument must be finite")
    if spec.kind == L1:
        return float(np.abs(v).sum())
    if spec.kind == L2:
        return float(np.sqrt(np.square(v).sum()))
    if spec.kind == LINF:
        return float(np.abs(v).max())
    if spec.kind == WEIGHTED_LP:
        scaled_mag = np.asarray(spec.weights) * np.abs(v)
        p = spec.exponent
        if math.isinf(p):
            return float(scaled_mag.max())
        return float((scaled_mag ** p).sum() ** (1.0 / p))
    if spec.kind == GAUGE:
        if (v < 0).any():
            raise ValueError("gauge norms are evaluated on the nonnegative orthant only")
        return gauge_eval(spec.oracle, v, spec.tolerance)
    return spec.factor * norm_eval(spec.base, v)


def gauge_eval(oracle: MembershipOracle, x, tol: float = 1e-10) -> float:
    """Minkowski gauge of x with respect to the set accepted by the oracle.

    The oracle must accept a compact, convex, downward-comprehensible subset
    of the orthant with the origin in its interior (relative to the orthant);
    then membership of x/gamma is monotone in gamma and bisection applies.
    The result gamma satisfies |gamma - ||x||_S| <= tol * ||x||_S.  The zero
    vector has gauge 0 by the infimum convention.
    """
    v = np.asarray(x, dtype=float)
    if (v < 0).any():
        raise ValueError("gauge is evaluated on the nonnegative orthant only")
    scale = float(v.max()) if v.size else 0.0
    if scale == 0.0:
        return 0.0
    # Work on the sup-normalized direction so that rescaling the input
    # rescales the result exactly (up to one multiplication).
    d = v / scale

    if oracle(d):
        hi = 1.0
        lo = 1.0
        for _ in range(_BRACKET_CAP):
            lo *= 0.5
            if not oracle(d / lo):
                break
        else:
            raise GaugeSetError(
                "membership holds arbitrarily far along the ray; set is unbounded")
    else:
        lo = 1.0
        hi = 1.0
        for _ in range(_BRACKET_CAP):
            hi *= 2.0
            if oracle(d / hi):
                break
        else:
            raise GaugeSetError(
                "no scaled-down copy of the point enters the set; "
                "the set has no interior around the origin")

    # lo is outside the set, hi inside; the gauge lies in (lo, hi].
    for _ in range(4 * _BRACKET_CAP):
        if hi - lo <= tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if oracle(d / mid):
            hi = mid
        else:
            lo = mid
    return float(hi * scale)


def _lp_exponent(spec: MonotoneNormSpec) -> float | None:
    """Exponent p for the plain lp kinds, None for everything else."""
    return {L1: 1.0, L2: 2.0, LINF: math.inf}.get(spec.kind)


def equiv_constants(a: MonotoneNormSpec, b: MonotoneNormSpec,
                    dimension: int) -> tuple[float, float]:
    """Constants (k1, k2) with k1*||x||_a <= ||x||_b <= k2*||x||_a.

    Tight closed forms for pairs of plain lp norms; for other monotone norms
    the constants are conservative, derived from evaluations on the unit
    vectors and the all-ones vector (valid on the orthant by monotonicity,
    and everywhere for the absolute norms provided here).
    """
    if a.dimension != dimension or b.dimension != dimension:
        raise ValueError("norm dimensions must match")
    if a == b:
        return 1.0, 1.0
    pa, pb = _lp_exponent(a), _lp_exponent(b)
    if pa is not None and pb is not None:
        inv_a = 0.0 if math.isinf(pa) else 1.0 / pa
        inv_b = 0.0 if math.isinf(pb) else 1.0 / pb
        ratio = float(dimension) ** (inv_b - inv_a)
        return min(1.0, ratio), max(1.0, ratio)
    basis = np.eye(dimension)
    lo_a = min(norm_eval(a, basis[j]) for j in range(dimension))
    lo_b = min(norm_eval(b, basis[j]) for j in range(dimension))
    hi_a = norm_eval(a, np.ones(dimension))
    hi_b = norm_eval(b, np.ones(dimension))
    return lo_b / hi_a, hi_b / lo_a


def infnorm_beta(a: MonotoneNormSpec) -> float:
    """Smallest certified beta with ||p||_inf <= beta*||p||_a on the orthant.

    Monotonicity gives p_j*||e_j||_a <= ||p||_a for p >= 0, hence
    beta = max_j 1/||e_j||_a works.
    """
    basis = np.eye(a.dimension)
    return max(1.0 / norm_eval(a, basis[j]) for j in range(a.dimension))


@dataclass
class GaugeSetReport:
    """Outcome of the probabilistic constraint-set validation."""

    dimension: int
    probes: int
    downward_violations: list
    convexity_violations: list
    boundedness_violations: list

    @property
    def ok(self) -> bool:
        return not (self.downward_violations or self.convexity_violations
                    or self.boundedness_violations)


def validate_gauge_set(oracle: MembershipOracle, dimension: int,
                       sample_count: int = 1000, seed: int = 0) -> GaugeSetReport:
    """Spot-check that an oracle describes a compact, convex, downward
    comprehensible set suitable for `gauge_eval`.  Report-only; violations
    are sampled, never proven absent."""
    rng = np.random.default_rng(seed)
    report = GaugeSetReport(dimension, sample_count, [], [], [])

    def note(bucket, item):
        if len(bucket) < 32:
            bucket.append(item)

    if not oracle(np.zeros(dimension)):
        # Any nonempty downward-comprehensible subset of the orthant contains 0.
        note(report.downward_violations, ("origin", np.zeros(dimension)))

    members: list[np.ndarray] = []
    for _ in range(sample_count):
        direction = rng.exponential(1.0, dimension) + 1e-12

        # Locate a member point along the ray (searching both directions).
        inside = None
        t = 1.0
        for _ in range(_BRACKET_CAP):
            if oracle(t * direction):
                inside = t * direction
                break
            t *= 0.5
        if inside is None:
            t = 1.0
            for _ in range(_BRACKET_CAP):
                t *= 2.0
                if oracle(t * direction):
                    inside = t * direction
                    break
        if inside is None:
            note(report.boundedness_violations, ("ray-misses-set", direction))
            continue

        # Boundedness: scaling a member far up must eventually leave the set.
        t, escaped = 1.0, False
        for _ in range(_BRACKET_CAP):
            t *= 2.0
            if not oracle(t * inside):
                escaped = True
                break
        if not escaped:
            note(report.boundedness_violations, ("unbounded-ray", inside))

        # Downward comprehensibility: anything below a member is a member.
        below = inside * rng.uniform(0.0, 1.0, dimension)
        if not oracle(below):
            note(report.downward_violations, (inside, below))

        members.append(inside)
        if len(members) >= 2:
            x, y = members[-2], members[-1]
            if not oracle(0.5 * (x + y)):
                note(report.convexity_violations, (x, y))

    return report
