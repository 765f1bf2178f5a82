"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
verdict lines alongside the pytest output.
"""

import math
import time

import numpy as np
import pytest

from numax.analysis import (
    HIGH,
    LOW,
    bounds_report,
    lower_bounding_matrix,
    recession_vector,
    regime,
    spectral_radius,
    utility_bounds,
    ee_bounds,
)
from numax.eigensolver import SolverConfig, energy_efficiency, solve_canonical, sweep
from numax.mappings import InterferenceMapping, affine_mapping
from numax.norms import gauge_eval, l1, linf, norm_eval, weighted_lp
from numax.wireless import generate_scenario, recover_assignment, sinr, wireless_mapping

from helpers import make_asym, make_constant2, make_ex1, unit_scale_scenario

TOL = 1e-12


def verdict(number, name, failures):
    status = "PASS" if not failures else "FAIL"
    print(f"[criterion {number:02d}] {name}: {status}")
    assert not failures, f"criterion {number} ({name}): " + "; ".join(failures)


def strip_providers(T):
    return InterferenceMapping(T.dimension, T.evaluator, label=T.label + "-numeric")


@pytest.fixture(scope="module")
def fixture_sweeps():
    """Shared 50-point log sweeps per fixture, straddling the transient point
    (or an arbitrary window when there is none)."""
    cases = {}
    for name, T, norm_a, norm_b in [
        ("ex1", make_ex1(), linf(2), linf(2)),
        ("asym", make_asym(), linf(2), l1(2)),
        ("constant", make_constant2(), l1(2), l1(2)),
        ("wireless", wireless_mapping(unit_scale_scenario(num_bs=2, num_users=3)),
         linf(3), linf(3)),
    ]:
        report = bounds_report(T, norm_a, norm_b)
        anchor = report.u if math.isfinite(report.u) else 1.0
        budgets = np.geomspace(anchor * 1e-2, anchor * 1e2, 50)
        solutions = sweep(T, norm_a, budgets)
        cases[name] = dict(T=T, norm_a=norm_a, norm_b=norm_b, report=report,
                           lbm=lower_bounding_matrix(T), budgets=budgets,
                           solutions=solutions)
    return cases


@pytest.fixture(scope="module")
def regime_sweep():
    """Generated 5-BS/15-user scenario swept over six decades straddling u."""
    scenario = generate_scenario(num_bs=5, num_users=15, seed=42)
    T = wireless_mapping(scenario)
    norm_a = linf(15)
    report = bounds_report(T, norm_a, norm_a)
    budgets = np.geomspace(report.u * 1e-3, report.u * 1e3, 50)
    solutions = sweep(T, norm_a, budgets)
    return dict(scenario=scenario, T=T, norm_a=norm_a, report=report,
                budgets=budgets, solutions=solutions)


def test_criterion_01_example1_sharpness():
    failures = []
    coupling = np.array([[0.0, 0.5], [0.5, 0.0]])
    offset = np.ones(2)
    rho = 0.5  # eigenvalues of the coupling are +/- 0.5
    T = make_ex1()
    started = time.time()
    for eps in (0.25, 0.5, 0.9):
        c_eps = eps / rho
        # Oracle: direct 2x2 linear solve for the fixed point at utility c_eps.
        p_eps = c_eps * np.linalg.solve(np.eye(2) - c_eps * coupling, offset)
        p_bar = float(np.abs(p_eps).max())
        sol = solve_canonical(T, linf(2), p_bar)
        if not sol.converged:
            failures.append(f"eps={eps}: did not converge")
        if abs(sol.c_star - c_eps) > 1e-8 * c_eps:
            failures.append(f"eps={eps}: c_star={sol.c_star!r} vs c_eps={c_eps!r}")
    elapsed = time.time() - started
    if elapsed >= 1.0:
        failures.append(f"took {elapsed:.2f} s, budget is 1 s")
    verdict(1, "affine sharpness via closed form", failures)


def test_criterion_02_lambda_exceeds_rho_on_random_instances():
    failures = []
    rng = np.random.default_rng(2024)
    norms_by_dim = {}

    def pick_norm(n):
        choice = rng.integers(0, 3)
        if choice == 0:
            return l1(n)
        if choice == 1:
            return linf(n)
        return weighted_lp(rng.uniform(0.5, 2.0, n))

    for i in range(50):  # affine instances
        n = int(rng.integers(1, 9))
        coupling = rng.uniform(0.0, 1.0, (n, n)) * (rng.uniform(0, 1, (n, n)) < 0.7)
        offset = rng.uniform(0.1, 2.0, n)
        T = affine_mapping(coupling, offset)
        rho = spectral_radius(coupling)
        sol = solve_canonical(T, pick_norm(n), 10.0 ** rng.uniform(-2, 2))
        if not (sol.converged and sol.lambda_star > rho):
            failures.append(f"affine #{i}: lambda={sol.lambda_star} rho={rho}")

    for i in range(50):  # wireless instances
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, 4))
        s = unit_scale_scenario(num_bs=m, num_users=n, seed=1000 + i)
        T = wireless_mapping(s)
        rho = lower_bounding_matrix(T).spectral_radius()
        sol = solve_canonical(T, pick_norm(n), 10.0 ** rng.uniform(-2, 2))
        if not (sol.converged and sol.lambda_star > rho):
            failures.append(f"wireless #{i}: lambda={sol.lambda_star} rho={rho}")
    verdict(2, "conditional eigenvalue strictly above rho(LBM)", failures)


def test_criterion_03_bound_sandwich(fixture_sweeps):
    failures = []
    for name, case in fixture_sweeps.items():
        T, norm_a, norm_b = case["T"], case["norm_a"], case["norm_b"]
        report, lbm = case["report"], case["lbm"]
        for budget, sol in zip(case["budgets"], case["solutions"]):
            if not sol.converged:
                failures.append(f"{name} @ {budget:g}: no convergence")
                continue
            lo, hi = utility_bounds(T, norm_a, budget, lbm, report.beta)
            measured_ee = energy_efficiency(T, norm_b, sol)
            elo, ehi = ee_bounds(T, norm_a, norm_b, budget, lbm,
                                 report.alpha1, report.alpha2, report.beta)
            if not lo <= sol.c_star * (1 + 1e-9):
                failures.append(f"{name} @ {budget:g}: U below lower bound")
            if not sol.c_star <= hi * (1 + 1e-9):
                failures.append(f"{name} @ {budget:g}: U above upper bound")
            if not elo <= measured_ee * (1 + 1e-9):
                failures.append(f"{name} @ {budget:g}: E below lower bound")
            if not measured_ee <= ehi * (1 + 1e-9):
                failures.append(f"{name} @ {budget:g}: E above upper bound")
            if report.rho > 0:
                if not sol.c_star < 1.0 / report.rho:
                    failures.append(f"{name} @ {budget:g}: 1/rho branch not strict")
                if not measured_ee < report.alpha2 / (report.rho * budget):
                    failures.append(f"{name} @ {budget:g}: EE rho branch not strict")
    verdict(3, "bound sandwich over 50-point sweeps", failures)


def test_criterion_04_monotonicity(fixture_sweeps):
    slack = 1e-10
    failures = []
    for name, case in fixture_sweeps.items():
        T, norm_b = case["T"], case["norm_b"]
        sols = case["solutions"]
        utilities = [s.c_star for s in sols]
        ee = [energy_efficiency(T, norm_b, s) for s in sols]
        for i in range(len(sols) - 1):
            if not utilities[i + 1] > utilities[i] - slack:
                failures.append(f"{name}: U not increasing at step {i}")
            if not (sols[i + 1].p_star > sols[i].p_star - slack).all():
                failures.append(f"{name}: P not increasing at step {i}")
            if not ee[i + 1] <= ee[i] + slack:
                failures.append(f"{name}: E not non-increasing at step {i}")
        if not all(b > a for a, b in zip(utilities, utilities[1:])):
            failures.append(f"{name}: U not strictly increasing")
    verdict(4, "U/P increase, E non-increasing across sweeps", failures)


def test_criterion_05_ee_supremum():
    failures = []
    for scenario in (generate_scenario(num_bs=3, num_users=6, seed=5),
                     unit_scale_scenario(num_bs=2, num_users=4, seed=6)):
        T = wireless_mapping(scenario)
        norm_b = linf(scenario.num_users)
        supremum = 1.0 / norm_eval(norm_b, T.eval(np.zeros(scenario.num_users)))
        p_bar = 1e-6 * float(np.median(scenario.noise_power))
        sol = solve_canonical(T, linf(scenario.num_users), p_bar)
        measured = energy_efficiency(T, norm_b, sol)
        if abs(measured - supremum) > 1e-3 * supremum:
            failures.append(f"{scenario.label}: E={measured} sup={supremum}")
        if measured > supremum:
            failures.append(f"{scenario.label}: supremum exceeded")
    verdict(5, "EE approaches 1/||T(0)||_b as the budget vanishes", failures)


def test_criterion_06_ee_scales_as_one_over_budget():
    failures = []
    T = make_ex1()
    norm = linf(2)
    report = bounds_report(T, norm, norm)
    budgets = np.geomspace(report.u * 1e-1, report.u * 1e4, 51)
    sols = sweep(T, norm, budgets)
    by_budget = {round(math.log10(b / report.u), 6): (b, s)
                 for b, s in zip(budgets, sols)}
    top_b, top_s = by_budget[4.0]
    prev_b, prev_s = by_budget[3.0]
    pe_top = top_b * energy_efficiency(T, norm, top_s)
    pe_prev = prev_b * energy_efficiency(T, norm, prev_s)
    if abs(pe_top / pe_prev - 1.0) > 0.05:
        failures.append(f"pbar*E ratio {pe_top / pe_prev} departs from 1 by >5%")
    verdict(6, "pbar*E stable across the top decades (affine)", failures)


def test_criterion_07_numeric_limits_match_analytic():
    failures = []

    # Affine fixtures: every entry (zeros included) converges linearly in h.
    for T in (make_ex1(), make_asym()):
        analytic = T.lbm_provider()
        numeric = lower_bounding_matrix(strip_providers(T))
        scale = max(analytic.max(), 1.0)
        if not np.allclose(numeric.entries, analytic, rtol=1e-6, atol=1e-6 * scale):
            failures.append(f"{T.label}: numeric LBM mismatch")
        rec_analytic = T.recession_provider()
        rec_numeric = recession_vector(strip_providers(T))
        if not np.allclose(rec_numeric.entries, rec_analytic,
                           rtol=1e-6, atol=1e-6 * scale):
            failures.append(f"{T.label}: numeric recession mismatch")

    # Wireless fixtures (N <= 6): positive-limit entries must settle and agree
    # to 1e-6 relative; the structurally-zero diagonal decays only like
    # 1/log(1/h), so those entries stay flagged and must over-approximate.
    for seed in (3, 4):
        scenario = unit_scale_scenario(num_bs=2, num_users=5, seed=seed)
        T = wireless_mapping(scenario)
        analytic = T.lbm_provider()
        numeric = lower_bounding_matrix(strip_providers(T))
        off = ~np.eye(5, dtype=bool)
        if not np.allclose(numeric.entries[off], analytic[off], rtol=1e-6):
            failures.append(f"wireless seed {seed}: off-diagonal mismatch")
        if not numeric.settled[off].all():
            failures.append(f"wireless seed {seed}: off-diagonal entries unsettled")
        if numeric.settled[~off].any():
            failures.append(f"wireless seed {seed}: diagonal claimed settled")
        if (numeric.entries[~off] < 0).any():
            failures.append(f"wireless seed {seed}: diagonal under-approximates")
        rec_analytic = T.recession_provider()
        rec_numeric = recession_vector(strip_providers(T))
        if not np.allclose(rec_numeric.entries, rec_analytic, rtol=1e-6):
            failures.append(f"wireless seed {seed}: recession mismatch")
    verdict(7, "numeric limit matches analytic LBM/recession", failures)


def test_criterion_08_regime_structure(regime_sweep):
    failures = []
    report = regime_sweep["report"]
    budgets = regime_sweep["budgets"]
    sols = regime_sweep["solutions"]
    labels = [regime(float(b), report) for b in budgets]
    if LOW not in labels or HIGH not in labels:
        failures.append("sweep does not exhibit both regimes")
    if labels != sorted(labels, key=lambda r: r == HIGH):
        failures.append("regime labels are not Low..High ordered")
    for budget, sol in zip(budgets, sols):
        if not sol.converged:
            failures.append(f"@ {budget:g}: no convergence")
            continue
        if budget < report.u:
            linear = budget / report.t0_norm_a
            if not sol.c_star <= linear * (1 + 1e-9):
                failures.append(f"@ {budget:g}: U above the linear bound")
        if not sol.c_star < 1.0 / report.rho:
            failures.append(f"@ {budget:g}: U not strictly below 1/rho")
    verdict(8, "two power regimes on a generated 5x15 scenario", failures)


def test_criterion_09_low_power_assignment_rule():
    failures = []
    for seed in range(20):
        scenario = generate_scenario(num_bs=3, num_users=6, area_m=800.0, seed=seed)
        T = wireless_mapping(scenario)
        p_bar = 1e-9 * float(np.median(scenario.noise_power))
        sol = solve_canonical(T, linf(6), p_bar)
        got = recover_assignment(scenario, sol.p_star).bs_index
        expected = np.argmin(scenario.noise_power[:, None] / scenario.gains, axis=0)
        if not (got == expected).all():
            failures.append(f"seed {seed}: assignment {got} vs argmin {expected}")
    verdict(9, "vanishing-budget assignment follows argmin noise/gain", failures)


def test_criterion_10_rate_balance(regime_sweep):
    failures = []
    scenario = regime_sweep["scenario"]
    budgets = regime_sweep["budgets"]
    for budget, sol in zip(budgets[::7], regime_sweep["solutions"][::7]):
        if not sol.converged:
            failures.append(f"@ {budget:g}: no convergence")
            continue
        for j in range(scenario.num_users):
            best = max(sinr(scenario, sol.p_star, j, i)
                       for i in range(scenario.num_bs))
            rate = scenario.bandwidth_hz * math.log2(1.0 + best)
            target = sol.c_star * scenario.weights[j]
            if abs(rate - target) > 10 * TOL * target:
                failures.append(f"@ {budget:g} user {j}: rate {rate} vs {target}")
        if abs(np.abs(sol.p_star).max() - budget) > TOL * budget:
            failures.append(f"@ {budget:g}: sup-norm budget not attained")
    verdict(10, "per-user rates equal c*w at every solution", failures)


def test_criterion_11_convergence_and_uniqueness():
    failures = []
    rng = np.random.default_rng(7)
    cases = [
        (make_asym(), linf(2), 8.0),
        (wireless_mapping(unit_scale_scenario(num_bs=2, num_users=3)), linf(3), 5.0),
        (wireless_mapping(unit_scale_scenario(num_bs=3, num_users=4, seed=8)),
         l1(4), 5.0),
    ]
    for T, norm_a, budget in cases:
        sol = solve_canonical(T, norm_a, budget)
        if not sol.converged:
            failures.append(f"{T.label}: no convergence")
            continue
        tail = sol.residual_trace[10:]
        if len(tail) < 2:
            failures.append(f"{T.label}: trace too short to assess decay")
        elif not (tail[1:] / tail[:-1]).max() < 1.0:
            failures.append(f"{T.label}: residual tail not strictly decaying")
        for _ in range(2):
            start = rng.uniform(0.1, 3.0, T.dimension)
            again = solve_canonical(T, norm_a, budget,
                                    SolverConfig(initial_point=start))
            if abs(again.c_star - sol.c_star) > 10 * TOL * sol.c_star:
                failures.append(f"{T.label}: utilities disagree across starts")
            scale = np.abs(sol.p_star).max()
            if np.abs(again.p_star - sol.p_star).max() > 10 * TOL * scale:
                failures.append(f"{T.label}: power vectors disagree across starts")
    verdict(11, "geometric decay and start-independence", failures)


def test_criterion_12_gauge_matches_closed_forms():
    failures = []
    rng = np.random.default_rng(12)
    n = 4
    box = lambda x: bool((x <= 1.0).all())
    simplex = lambda x: bool(x.sum() <= 1.0)
    for _ in range(1000):
        x = rng.exponential(1.0, n) * 10.0 ** rng.uniform(-2, 2)
        via_box = gauge_eval(box, x, 1e-10)
        exact_inf = norm_eval(linf(n), x)
        if abs(via_box - exact_inf) > 1e-8 * exact_inf:
            failures.append(f"box gauge {via_box} vs linf {exact_inf}")
            break
        via_simplex = gauge_eval(simplex, x, 1e-10)
        exact_l1 = norm_eval(l1(n), x)
        if abs(via_simplex - exact_l1) > 1e-8 * exact_l1:
            failures.append(f"simplex gauge {via_simplex} vs l1 {exact_l1}")
            break
    verdict(12, "gauge norms agree with linf/l1 closed forms", failures)
