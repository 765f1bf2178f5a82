"""Bounds and regime analysis for budgeted max-min utility problems.

Computes lower bounding matrices and recession vectors (analytically when the
mapping provides them, otherwise by monotone numeric limits), the spectral
radius of nonnegative matrices, the utility and energy-efficiency bound
envelopes, the low/high power regime split at the transient points
u = ||T(0)||_a / rho and k = ||T(0)||_b / rho, and the interference- vs
noise-limited classification.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .mappings import InterferenceMapping
from .norms import MonotoneNormSpec, equiv_constants, infnorm_beta, norm_eval

log = logging.getLogger("numax.analysis")

ANALYTIC = "analytic"
NUMERIC = "numeric"

INTERFERENCE_LIMITED = "InterferenceLimited"
NOISE_LIMITED = "NoiseLimited"
UNDETERMINED = "Undetermined"

LOW = "Low"
HIGH = "High"

# Numeric limit schedule: h geometric with ratio 0.1 from 1 down to the floor,
# each entry settling once its relative change drops below the tolerance.
_H_START = 1.0
_H_RATIO = 0.1
_H_FLOOR = 1e-12
_SETTLE_TOL = 1e-8

# Classification thresholds separating structural zeros from rounding noise.
_RHO_TOL_FACTOR = 1e-9
_RECESSION_TOL_FACTOR = 1e-9


def spectral_radius(matrix, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Spectral radius of an entrywise nonnegative matrix by power iteration.

    Iterates on M + eps*I (eps = tol * max entry, subtracted from the result)
    from the all-ones vector; the shift keeps the iterates strictly positive
    even with zero rows and breaks the cycling of periodic matrices.  The
    Collatz-Wielandt ratios of each iterate bracket rho, so the returned
    midpoint is certified within tol*max(1, rho) once the bracket closes;
    failure to close within max_iter is logged and the midpoint returned.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.isfinite(m).all() or (m < 0).any():
        raise ValueError("matrix must be entrywise nonnegative and finite")
    top = float(m.max())
    if top == 0.0:
        return 0.0
    shift = tol * top
    shifted = m + shift * np.eye(m.shape[0])
    v = np.ones(m.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        w = shifted @ v
        lam = float(w.max())  # ||v||_inf = 1 throughout
        if (v > 0).all():
            # Certified bracket; it may fail to close for reducible matrices,
            # where components of v decay (or underflow) to zero.
            ratios = w / v
            lo, hi = float(ratios.min()), float(ratios.max())
            if hi - lo <= tol * max(1.0, hi):
                return max(0.5 * (lo + hi) - shift, 0.0)
        if np.abs(w - lam * v).max() <= tol * max(1.0, lam):
            return max(lam - shift, 0.0)
        v = w / lam
    log.warning("power iteration did not converge within %d iterations; "
                "spectral radius %.6e is approximate", max_iter, lam - shift)
    return max(lam - shift, 0.0)


def _shrinking_scale_limit(evaluate: Callable[[float], np.ndarray], size: int):
    """Numeric limit lim_{h->0+} h*f(x/h) along the geometric h-schedule.

    `evaluate(inv_h)` must return the vector f(inv_h * direction).  For
    concave f with f(0) > 0 the products are nonincreasing as h shrinks, so
    the final values over-approximate the true limit; entries whose relative
    change never fell below the settle tolerance are reported unsettled.
    Returns (values, settled, h_last).
    """
    h = _H_START
    values = h * np.asarray(evaluate(1.0 / h), dtype=float)
    settled = np.zeros(size, dtype=bool)
    h_last = np.full(size, h)
    floor = np.finfo(float).tiny
    while h > _H_FLOOR and not settled.all():
        h_next = h * _H_RATIO
        try:
            raw = np.asarray(evaluate(1.0 / h_next), dtype=float)
        except (ValueError, FloatingPointError):
            log.warning("numeric limit evaluation failed at h=%.1e; "
                        "keeping last stable values", h_next)
            break
        candidate = h_next * raw
        usable = np.isfinite(candidate) & ~settled
        change = np.abs(candidate[usable] - values[usable])
        reference = np.maximum(np.abs(candidate[usable]), floor)
        values[usable] = candidate[usable]
        h_last[usable] = h_next
        newly = np.zeros(size, dtype=bool)
        newly[np.flatnonzero(usable)] = change <= _SETTLE_TOL * reference
        settled |= newly
        h = h_next
    return values, settled, h_last


@dataclass
class LowerBoundingMatrix:
    """Entrywise limit matrix [M]_ij = lim_{h->0+} h*t_i(e_j/h).

    `construction` records whether the entries came from the mapping's
    analytic provider or from the numeric limit; numeric entries carry
    per-entry settled flags and the last h used.  The spectral radius is
    computed lazily and cached.
    """

    entries: np.ndarray
    construction: str
    settled: np.ndarray
    h_last: np.ndarray | None = None
    _rho: float | None = field(default=None, repr=False)

    def spectral_radius(self, tol: float = 1e-12) -> float:
        if self._rho is None:
            self._rho = spectral_radius(self.entries, tol)
        return self._rho


@dataclass
class RecessionVector:
    """Recession values t_i_inf(1) = lim_{h->0+} h*t_i(1/h), describing the
    growth of the mapping along the all-ones direction."""

    entries: np.ndarray
    construction: str
    settled: np.ndarray


def lower_bounding_matrix(T: InterferenceMapping) -> LowerBoundingMatrix:
    """Lower bounding matrix of T, analytic when the mapping provides one.

    The numeric path evaluates h*T(e_j/h) columnwise along the shrinking
    h-schedule; by concavity the products decrease toward the limit, so
    unsettled entries (flagged) over-approximate it.
    """
    n = T.dimension
    if T.lbm_provider is not None:
        entries = np.asarray(T.lbm_provider(), dtype=float)
        if entries.shape != (n, n) or (entries < 0).any():
            raise ValueError("analytic lower-bounding-matrix provider returned garbage")
        return LowerBoundingMatrix(entries, ANALYTIC, np.ones((n, n), dtype=bool))
    entries = np.zeros((n, n))
    settled = np.zeros((n, n), dtype=bool)
    h_last = np.zeros((n, n))
    basis = np.eye(n)
    for j in range(n):
        column, col_settled, col_h = _shrinking_scale_limit(
            lambda inv_h, e=basis[j]: T.eval(inv_h * e), n)
        entries[:, j] = column
        settled[:, j] = col_settled
        h_last[:, j] = col_h
    if not settled.all():
        log.info("lower bounding matrix: %d/%d entries did not settle",
                 int((~settled).sum()), n * n)
    return LowerBoundingMatrix(entries, NUMERIC, settled, h_last)


def recession_vector(T: InterferenceMapping) -> RecessionVector:
    """Recession vector of T at the all-ones direction, analytic when provided."""
    n = T.dimension
    if T.recession_provider is not None:
        entries = np.asarray(T.recession_provider(), dtype=float)
        if entries.shape != (n,) or (entries < 0).any():
            raise ValueError("analytic recession provider returned garbage")
        return RecessionVector(entries, ANALYTIC, np.ones(n, dtype=bool))
    ones = np.ones(n)
    values, settled, _ = _shrinking_scale_limit(lambda inv_h: T.eval(inv_h * ones), n)
    return RecessionVector(values, NUMERIC, settled)


def _effective_rho(lbm: LowerBoundingMatrix) -> float:
    """Spectral radius, treated as zero unless it is resolvable.

    A numeric lower bounding matrix over-approximates: entries whose limits
    are structural zeros never settle and leave floor residue behind.  Only
    settled entries witness real coupling, so when none is positive the
    matrix is treated as zero (the safe direction for every 1/rho branch).
    """
    witnessed = lbm.entries[lbm.settled]
    top = float(witnessed.max()) if witnessed.size else 0.0
    if top <= 0.0:
        return 0.0
    rho = lbm.spectral_radius()
    return rho if rho > _RHO_TOL_FACTOR * top else 0.0


def utility_bounds(T: InterferenceMapping, norm_a: MonotoneNormSpec, p_bar: float,
                   lbm: LowerBoundingMatrix, beta: float) -> tuple[float, float]:
    """Lower and upper bounds on the achievable utility U(p_bar).

    lower = p_bar / ||T(p_bar*beta*1)||_a and
    upper = min(p_bar / ||T(0)||_a, 1/rho), the second branch dropping out
    when rho = 0.  Always lower <= upper, and U < 1/rho strictly.
    """
    if not p_bar > 0:
        raise ValueError("power budget must be strictly positive")
    ones = np.ones(T.dimension)
    lower = p_bar / norm_eval(norm_a, T.eval(p_bar * beta * ones))
    upper = p_bar / norm_eval(norm_a, T.eval(np.zeros(T.dimension)))
    rho = _effective_rho(lbm)
    if rho > 0:
        upper = min(upper, 1.0 / rho)
    return lower, upper


def ee_bounds(T: InterferenceMapping, norm_a: MonotoneNormSpec,
              norm_b: MonotoneNormSpec, p_bar: float, lbm: LowerBoundingMatrix,
              alpha1: float, alpha2: float, beta: float) -> tuple[float, float]:
    """Lower and upper bounds on the energy efficiency E(p_bar).

    Requires alpha1*||x||_b <= ||x||_a <= alpha2*||x||_b and
    ||x||_inf <= beta*||x||_a (see `equiv_constants` / `infnorm_beta`).
    lower = alpha1 / ||T(p_bar*beta*1)||_a and
    upper = min(alpha2/(rho*p_bar), 1/||T(0)||_b), the first branch dropping
    out when rho = 0; E < alpha2/(rho*p_bar) strictly.
    """
    if not p_bar > 0:
        raise ValueError("power budget must be strictly positive")
    ones = np.ones(T.dimension)
    lower = alpha1 / norm_eval(norm_a, T.eval(p_bar * beta * ones))
    upper = 1.0 / norm_eval(norm_b, T.eval(np.zeros(T.dimension)))
    rho = _effective_rho(lbm)
    if rho > 0:
        upper = min(upper, alpha2 / (rho * p_bar))
    return lower, upper


def classify(T: InterferenceMapping, norm_a: MonotoneNormSpec,
             lbm: LowerBoundingMatrix, recession: RecessionVector) -> str:
    """Interference-limited (rho > 0: utility capped at 1/rho), noise-limited
    (vanishing recession vector: any utility reachable), or undetermined.

    Thresholds scale with the matrix entries so exact structural zeros are
    separated from rounding noise; a numeric-only lower bounding matrix
    over-approximates, making the classification approximate (see
    `BoundsReport.rho_approximate`).
    """
    if _effective_rho(lbm) > 0:
        return INTERFERENCE_LIMITED
    if norm_eval(norm_a, recession.entries) < _RECESSION_TOL_FACTOR * T.dimension:
        return NOISE_LIMITED
    return UNDETERMINED


@dataclass
class BoundsReport:
    """All budget-independent quantities behind the bound envelopes.

    `u` and `k` are the utility and energy-efficiency transient points
    separating the low and high power regimes (infinite when rho = 0);
    `c_infinity_lower` lower-bounds the limiting utility as the budget
    diverges (infinite when the recession vector vanishes).
    """

    rho: float
    t0_norm_a: float
    t0_norm_b: float
    u: float
    k: float
    beta: float
    alpha1: float
    alpha2: float
    recession_vector: np.ndarray
    classification: str
    c_infinity_lower: float
    rho_approximate: bool = False

    def to_json_dict(self) -> dict:
        """Flat JSON object; infinities encoded as the string "inf"."""

        def enc(value: float):
            return "inf" if math.isinf(value) else float(value)

        return {
            "rho": enc(self.rho),
            "t0_norm_a": enc(self.t0_norm_a),
            "t0_norm_b": enc(self.t0_norm_b),
            "u": enc(self.u),
            "k": enc(self.k),
            "beta": enc(self.beta),
            "alpha1": enc(self.alpha1),
            "alpha2": enc(self.alpha2),
            "recession_vector": [float(v) for v in self.recession_vector],
            "classification": self.classification,
            "c_infinity_lower": enc(self.c_infinity_lower),
            "rho_approximate": bool(self.rho_approximate),
        }


def bounds_report(T: InterferenceMapping, norm_a: MonotoneNormSpec,
                  norm_b: MonotoneNormSpec,
                  lbm: LowerBoundingMatrix | None = None,
                  recession: RecessionVector | None = None) -> BoundsReport:
    """Assemble the full bounds report for a mapping and a norm pair."""
    if lbm is None:
        lbm = lower_bounding_matrix(T)
    if recession is None:
        recession = recession_vector(T)
    rho = _effective_rho(lbm)
    zero = np.zeros(T.dimension)
    t0_a = norm_eval(norm_a, T.eval(zero))
    t0_b = norm_eval(norm_b, T.eval(zero))
    beta = infnorm_beta(norm_a)
    alpha1, alpha2 = equiv_constants(norm_b, norm_a, T.dimension)
    u = t0_a / rho if rho > 0 else math.inf
    k = t0_b / rho if rho > 0 else math.inf
    recession_a = norm_eval(norm_a, recession.entries)
    if recession_a < _RECESSION_TOL_FACTOR * T.dimension:
        c_inf_lower = math.inf
    else:
        c_inf_lower = 1.0 / (beta * recession_a)
    return BoundsReport(
        rho=rho,
        t0_norm_a=t0_a,
        t0_norm_b=t0_b,
        u=u,
        k=k,
        beta=beta,
        alpha1=alpha1,
        alpha2=alpha2,
        recession_vector=np.asarray(recession.entries, dtype=float),
        classification=classify(T, norm_a, lbm, recession),
        c_infinity_lower=c_inf_lower,
        rho_approximate=(lbm.construction == NUMERIC),
    )


def regime(p_bar: float, report: BoundsReport) -> str:
    """Low power regime for p_bar <= u, high power regime above; with rho = 0
    there is no transient point and every budget is in the low regime."""
    if not p_bar > 0:
        raise ValueError("power budget must be strictly positive")
    return LOW if (math.isinf(report.u) or p_bar <= report.u) else HIGH


@dataclass
class AsymptoticDiagnostics:
    """High-budget scaling diagnostics extracted from a sweep table.

    `decade_ratio` compares pbar*E(pbar) between the two highest swept
    decades; near 1 it indicates the Theta(1/pbar) decay of the energy
    efficiency.  `cap_fraction` is sup U / (1/rho), approaching 1 from below
    for mappings whose utility cap is asymptotically sharp.
    """

    conclusive: bool
    sup_utility: float
    utility_cap: float
    cap_fraction: float
    pbar_ee_top: float
    pbar_ee_prev: float
    decade_ratio: float
    decades_above_transient: float
    note: str = ""


def asymptotic_report(budgets: Sequence[float], utilities: Sequence[float],
                      ee_values: Sequence[float],
                      report: BoundsReport) -> AsymptoticDiagnostics:
    """Scaling diagnostics over a sweep; inconclusive unless the sweep spans
    at least three decades above the transient point u."""
    budgets = np.asarray(budgets, dtype=float)
    utilities = np.asarray(utilities, dtype=float)
    ee_values = np.asarray(ee_values, dtype=float)
    if budgets.size != utilities.size or budgets.size != ee_values.size:
        raise ValueError("sweep columns must have equal length")
    sup_u = float(utilities.max()) if utilities.size else math.nan
    cap = 1.0 / report.rho if report.rho > 0 else math.inf
    cap_fraction = sup_u / cap if math.isfinite(cap) else 0.0

    decades = math.log10(budgets.max() / report.u) if math.isfinite(report.u) else -math.inf
    if not math.isfinite(report.u):
        return AsymptoticDiagnostics(
            conclusive=False, sup_utility=sup_u, utility_cap=cap,
            cap_fraction=cap_fraction, pbar_ee_top=math.nan, pbar_ee_prev=math.nan,
            decade_ratio=math.nan, decades_above_transient=-math.inf,
            note="no transient point (rho = 0); utility saturation is not expected")
    if decades < 3.0:
        return AsymptoticDiagnostics(
            conclusive=False, sup_utility=sup_u, utility_cap=cap,
            cap_fraction=cap_fraction, pbar_ee_top=math.nan, pbar_ee_prev=math.nan,
            decade_ratio=math.nan, decades_above_transient=decades,
            note="sweep does not span three decades above the transient point")

    top = int(np.argmax(budgets))
    prev_candidates = np.flatnonzero(budgets <= budgets[top] / 10.0)
    prev = int(prev_candidates[-1])
    pe_top = float(budgets[top] * ee_values[top])
    pe_prev = float(budgets[prev] * ee_values[prev])
    return AsymptoticDiagnostics(
        conclusive=True,
        sup_utility=sup_u,
        utility_cap=cap,
        cap_fraction=cap_fraction,
        pbar_ee_top=pe_top,
        pbar_ee_prev=pe_prev,
        decade_ratio=pe_top / pe_prev,
        decades_above_transient=decades,
    )
