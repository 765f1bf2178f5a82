"""Normalized fixed-point solver for conditional eigenvalue problems.

Solves T(x) = lambda*x with ||x|| = 1 for a concave interference mapping and
a monotone norm by iterating x <- T(x)/||T(x)||, which converges geometrically
to the unique solution from any nonnegative start.  The same iteration under
the rescaled norm ||.||_a / pbar solves the budgeted max-min utility problem:
its optimum is the unique fixed point p = c*T(p) with ||p||_a = pbar and
utility c = 1/lambda.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from .mappings import InterferenceMapping
from .norms import MonotoneNormSpec, norm_eval, scaled

log = logging.getLogger("numax.eigensolver")


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule for the fixed-point iteration.

    The iteration stops once the componentwise relative change between
    consecutive iterates falls below `tolerance` (which implies the same
    bound on the sup-norm relative change); exhausting `max_iterations`
    first yields a partial result flagged as non-converged, not an exception.
    """

    tolerance: float = 1e-12
    max_iterations: int = 100_000
    initial_point: np.ndarray | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be strictly positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class EigSolution:
    """Solution tuple of the conditional eigenvalue / canonical problem.

    `p_star` is normalized under the solve norm, `lambda_star = ||T(p_star)||`
    and `c_star = 1/lambda_star` exactly by construction.  `residual_trace`
    holds the relative change per iteration; `converged` is False when the
    iteration budget ran out first.
    """

    p_star: np.ndarray
    c_star: float
    lambda_star: float
    iterations_used: int
    final_residual: float
    residual_trace: np.ndarray
    converged: bool


def conditional_eig(T: InterferenceMapping, norm: MonotoneNormSpec,
                    config: SolverConfig | None = None) -> EigSolution:
    """Solve T(x) = lambda*x, ||x|| = 1 by the normalized fixed-point iteration.

    The default start is the zero vector; T(0) > 0 makes the first iterate
    strictly positive.  The solution is unique, so the start only affects the
    iteration count.
    """
    cfg = config or SolverConfig()
    if norm.dimension != T.dimension:
        raise ValueError("norm and mapping dimensions must match")
    if cfg.initial_point is None:
        x = np.zeros(T.dimension)
    else:
        x = np.asarray(cfg.initial_point, dtype=float)
        if x.shape != (T.dimension,):
            raise ValueError("initial point has the wrong length")
        if (x < 0).any():
            raise ValueError("initial point must be nonnegative")

    trace = []
    converged = False
    for _ in range(cfg.max_iterations):
        image = T.eval(x)
        x_next = image / norm_eval(norm, image)
        # Componentwise relative change (the iterates are strictly positive
        # after the first step, so the ratios are well defined).  This implies
        # the plain sup-norm relative residual and makes the converged tuple
        # satisfy p = c*T(p) to the tolerance in every single coordinate,
        # however spread out the power vector is.
        residual = float((np.abs(x_next - x) / x_next).max())
        trace.append(residual)
        x = x_next
        if residual < cfg.tolerance:
            converged = True
            break

    lam = norm_eval(norm, T.eval(x))
    if not converged:
        log.warning("fixed-point iteration stopped at %d iterations with residual %.3e",
                    len(trace), trace[-1])
    return EigSolution(
        p_star=x,
        c_star=1.0 / lam,
        lambda_star=lam,
        iterations_used=len(trace),
        final_residual=trace[-1],
        residual_trace=np.asarray(trace),
        converged=converged,
    )


def solve_canonical(T: InterferenceMapping, norm_a: MonotoneNormSpec,
                    p_bar: float, config: SolverConfig | None = None) -> EigSolution:
    """Solve the budgeted max-min utility problem for the power budget p_bar.

    Runs `conditional_eig` under the scaled norm ||.||_a / p_bar, so the
    returned `p_star` satisfies ||p_star||_a = p_bar and `c_star` is the
    optimal utility.
    """
    if not p_bar > 0:
        raise ValueError("power budget must be strictly positive")
    return conditional_eig(T, scaled(norm_a, 1.0 / p_bar), config)


def sweep(T: InterferenceMapping, norm_a: MonotoneNormSpec, budgets,
          config: SolverConfig | None = None) -> list[EigSolution]:
    """Solve the canonical problem over an increasing sequence of budgets.

    Each solve is warm-started from the previous optimum rescaled by the
    budget ratio; by uniqueness this only speeds things up.  Non-convergence
    flags propagate on the per-budget solutions.
    """
    budgets = np.asarray(budgets, dtype=float)
    if budgets.ndim != 1 or budgets.size == 0:
        raise ValueError("budgets must be a nonempty 1-d sequence")
    if (budgets <= 0).any():
        raise ValueError("budgets must be strictly positive")
    if (np.diff(budgets) <= 0).any():
        raise ValueError("budgets must be strictly increasing")

    cfg = config or SolverConfig()
    solutions: list[EigSolution] = []
    for i, budget in enumerate(budgets):
        if solutions:
            guess = solutions[-1].p_star * (budget / budgets[i - 1])
            cfg_i = dataclasses.replace(cfg, initial_point=guess)
        else:
            cfg_i = cfg
        solutions.append(solve_canonical(T, norm_a, float(budget), cfg_i))
    return solutions


def energy_efficiency(T: InterferenceMapping, norm_b: MonotoneNormSpec,
                      solution: EigSolution) -> float:
    """Energy efficiency 1/||T(p_star)||_b of a converged solution.

    Equals U(pbar)/||P(pbar)||_b up to solver tolerance.  Non-converged
    solutions are refused.
    """
    if not solution.converged:
        raise ValueError("refusing to evaluate a non-converged solution")
    return 1.0 / norm_eval(norm_b, T.eval(solution.p_star))
