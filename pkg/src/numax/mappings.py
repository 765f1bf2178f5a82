"""Interference mappings: continuous concave maps sending nonnegative power
vectors to strictly positive vectors.

Holds the mapping abstraction, stock constructors for affine and constant
mappings, sampling-based checkers for scalability / monotonicity / concavity,
and the affine majorant used by the energy-efficiency analysis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .norms import MonotoneNormSpec, norm_eval

log = logging.getLogger("numax.mappings")


@dataclass(frozen=True)
class InterferenceMapping:
    """A pure evaluator p -> T(p) with optional analytic providers.

    The evaluator must be defined on the whole nonnegative orthant (including
    the boundary) and return a strictly positive vector everywhere; this is
    checked at 0 on construction.  `lbm_provider` and `recession_provider`,
    when given, return the exact lower bounding matrix and the recession
    vector of T at the all-ones direction, sparing the numeric limits.
    """

    dimension: int
    evaluator: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    lbm_provider: Callable[[], np.ndarray] | None = field(default=None, compare=False)
    recession_provider: Callable[[], np.ndarray] | None = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise ValueError("dimension must be a positive integer")
        at_zero = np.asarray(self.evaluator(np.zeros(self.dimension)), dtype=float)
        if at_zero.shape != (self.dimension,) or not (at_zero > 0).all():
            raise ValueError(
                "mapping must send the zero vector to a strictly positive vector "
                "(mappings defined only on the open orthant are rejected)")

    def eval(self, p) -> np.ndarray:
        """Evaluate T(p) for a nonnegative power vector p."""
        v = np.asarray(p, dtype=float)
        if v.shape != (self.dimension,):
            raise ValueError(
                f"expected a power vector of length {self.dimension}, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("power vector entries must be finite")
        if (v < 0).any():
            raise ValueError("power vector entries must be nonnegative")
        out = np.asarray(self.evaluator(v), dtype=float)
        if out.shape != (self.dimension,) or not (out > 0).all():
            raise ValueError(f"mapping {self.label!r} produced a non-positive output")
        return out

    def __call__(self, p) -> np.ndarray:
        return self.eval(p)


def affine_mapping(coupling, offset, label: str = "affine") -> InterferenceMapping:
    """The mapping p -> M p + sigma for a nonnegative matrix M and sigma > 0.

    Its lower bounding matrix is M itself and its recession vector is M 1,
    both attached as analytic providers.
    """
    m = np.array(coupling, dtype=float)
    sigma = np.array(offset, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("coupling matrix must be square")
    if sigma.shape != (m.shape[0],):
        raise ValueError("offset length must match the coupling matrix")
    if (m < 0).any():
        raise ValueError("coupling matrix must be entrywise nonnegative")
    if (sigma <= 0).any():
        raise ValueError("offset must be strictly positive")
    n = m.shape[0]
    return InterferenceMapping(
        dimension=n,
        evaluator=lambda p: m @ p + sigma,
        lbm_provider=lambda: m.copy(),
        recession_provider=lambda: m @ np.ones(n),
        label=label,
    )


def constant_mapping(offset, label: str = "constant") -> InterferenceMapping:
    """The mapping p -> sigma, a degenerate affine mapping with no coupling."""
    sigma = np.asarray(offset, dtype=float)
    return affine_mapping(np.zeros((sigma.size, sigma.size)), sigma, label=label)


@dataclass
class MappingCheckReport:
    """Result of a sampling-based property check; report-only."""

    property_name: str
    samples: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def _sample_points(rng: np.random.Generator, dimension: int, count: int):
    """Nonnegative sample points with magnitudes spread over 1e-3..1e3, so the
    curvature of a mapping is exercised in both power regimes."""
    yield np.zeros(dimension)
    for _ in range(count - 1):
        magnitude = 10.0 ** rng.uniform(-3.0, 3.0)
        yield magnitude * rng.exponential(1.0, dimension)


def check_scalability(T: InterferenceMapping, samples: int = 1000,
                      mu: float = 2.0, seed: int = 0) -> MappingCheckReport:
    """Check mu*T(x) > T(mu*x) strictly componentwise for mu > 1.

    Tested with zero tolerance: in exact arithmetic the slack is at least
    (mu - 1) * T(0) > 0.
    """
    if not mu > 1:
        raise ValueError("mu must exceed 1")
    rng = np.random.default_rng(seed)
    report = MappingCheckReport("scalability", samples, [])
    for i, x in enumerate(_sample_points(rng, T.dimension, samples)):
        gap = mu * T.eval(x) - T.eval(mu * x)
        if not (gap > 0).all():
            if len(report.violations) < 32:
                report.violations.append((i, x, float(gap.min())))
    return report


def check_monotonicity(T: InterferenceMapping, samples: int = 1000,
                       seed: int = 0) -> MappingCheckReport:
    """Check x1 >= x2 implies T(x1) >= T(x2) on pairs obtained by
    componentwise down-scaling."""
    rng = np.random.default_rng(seed)
    report = MappingCheckReport("monotonicity", samples, [])
    for i, x1 in enumerate(_sample_points(rng, T.dimension, samples)):
        x2 = x1 * rng.uniform(0.0, 1.0, T.dimension)
        gap = T.eval(x1) - T.eval(x2)
        if (gap < 0).any():
            if len(report.violations) < 32:
                report.violations.append((i, x1, float(gap.min())))
    return report


def check_concavity(T: InterferenceMapping, samples: int = 1000,
                    seed: int = 0, tol: float = 1e-9) -> MappingCheckReport:
    """Check T(a*x + (1-a)*y) >= a*T(x) + (1-a)*T(y) within relative slack tol."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    rng = np.random.default_rng(seed)
    report = MappingCheckReport("concavity", samples, [])
    points = list(_sample_points(rng, T.dimension, 2 * samples))
    for i in range(samples):
        x, y = points[2 * i], points[2 * i + 1]
        alpha = rng.uniform(0.0, 1.0)
        blended = T.eval(alpha * x + (1.0 - alpha) * y)
        combo = alpha * T.eval(x) + (1.0 - alpha) * T.eval(y)
        deficit = combo - blended
        scale = np.maximum(np.abs(combo), np.abs(blended))
        if (deficit > tol * scale).any():
            if len(report.violations) < 32:
                report.violations.append((i, x, y, alpha, float(deficit.max())))
    return report


def affine_majorant(T: InterferenceMapping, x, c: float,
                    norm: MonotoneNormSpec) -> tuple[float, float]:
    """Constants (k1, k2) with ||T(pbar*x)|| <= k1*pbar + k2 for all pbar >= 0.

    Per coordinate, the left difference quotient of g_i(pbar) = t_i(pbar*x) at
    the anchor c (step c/2) dominates every supergradient of the concave g_i,
    so the affine function with that slope and intercept g_i(c) majorizes g_i
    on the whole half-line; the norm (which must be monotone) aggregates the
    per-coordinate majorants.  Zero slopes are clamped to the smallest positive
    float so k1 is always strictly positive.
    """
    direction = np.asarray(x, dtype=float)
    if direction.shape != (T.dimension,) or (direction <= 0).any():
        raise ValueError("direction must be strictly positive with matching length")
    if not c > 0:
        raise ValueError("anchor must be strictly positive")
    delta = 0.5 * c
    g_hi = T.eval(c * direction)
    g_lo = T.eval((c - delta) * direction)
    slope = np.maximum((g_hi - g_lo) / delta, np.finfo(float).tiny)
    return norm_eval(norm, slope), norm_eval(norm, g_hi)
