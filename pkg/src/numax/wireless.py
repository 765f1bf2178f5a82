"""Joint uplink power control and base-station assignment for weighted rate
allocation.

Models a network of base stations and users coupled by interference: each
user connects to whichever station gives it the best SINR, and the goal is
the largest common fraction c such that every user j attains rate c*w_j under
a per-user (or shared) power cap.  The problem reduces to the canonical
budgeted form through the interference mapping built here, whose coordinate j
is min over stations of  w_j*ln2*D_ij(p)/(B*g_ij) * kappa(s_ij), with D the
interference-plus-noise power, s the SINR and kappa(s) = s/ln(1+s) extended
by kappa(0) = 1.  That kernel is algebraically identical to the two-branch
rate form w_j*p_j/(B*log2(1+s)) but stays stable as p_j -> 0.

Also includes a synthetic log-distance scenario generator (stand-in for
ray-traced pathloss tables) and JSON scenario files with gains stored in dB.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .mappings import InterferenceMapping

log = logging.getLogger("numax.wireless")

LN2 = math.log(2.0)


class ScenarioError(ValueError):
    """Base class for scenario validation failures."""


class ScenarioFormatError(ScenarioError):
    """Malformed scenario file: missing fields, wrong types, bad JSON."""


class ScenarioDimensionError(ScenarioError):
    """Inconsistent array shapes in a scenario."""


class ScenarioValueError(ScenarioError):
    """Out-of-range scenario values (nonpositive gains, noise, weights...)."""


@dataclass(frozen=True, eq=False)
class Scenario:
    """An uplink network snapshot.

    gains[i, j] is the linear power pathgain between base station i and user
    j; all gains must be strictly positive (users reachable by every station),
    which makes the coupling matrix irreducible.  Noise powers are per
    station, in Watts.  Weights are the per-user rate priorities.
    """

    gains: np.ndarray
    noise_power: np.ndarray
    bandwidth_hz: float
    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        gains = np.atleast_2d(np.asarray(self.gains, dtype=float))
        object.__setattr__(self, "gains", gains)
        noise = np.atleast_1d(np.asarray(self.noise_power, dtype=float))
        object.__setattr__(self, "noise_power", noise)
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "weights", weights)
        if gains.ndim != 2:
            raise ScenarioDimensionError("gains must be a 2-d array")
        if noise.shape != (gains.shape[0],):
            raise ScenarioDimensionError("need one noise power per base station")
        if weights.shape != (gains.shape[1],):
            raise ScenarioDimensionError("need one weight per user")
        if not np.isfinite(gains).all() or (gains <= 0).any():
            raise ScenarioValueError("gains must be finite and strictly positive")
        if not np.isfinite(noise).all() or (noise <= 0).any():
            raise ScenarioValueError("noise powers must be finite and strictly positive")
        if not np.isfinite(weights).all() or (weights <= 0).any():
            raise ScenarioValueError("weights must be finite and strictly positive")
        if not self.bandwidth_hz > 0:
            raise ScenarioValueError("bandwidth must be strictly positive")

    @property
    def num_bs(self) -> int:
        return self.gains.shape[0]

    @property
    def num_users(self) -> int:
        return self.gains.shape[1]


def _exclusive_mask(n: int) -> np.ndarray:
    return np.ones((n, n)) - np.eye(n)


def _interference_plus_noise(scenario: Scenario, p: np.ndarray) -> np.ndarray:
    """D[i, j] = sum_{k != j} p_k*g_ik + sigma_i^2, computed as a direct
    exclusive sum (no subtraction of the own-signal term, which would lose
    precision when the own signal dominates)."""
    received = scenario.gains * p
    return received @ _exclusive_mask(scenario.num_users) + scenario.noise_power[:, None]


def _sinr_matrix(scenario: Scenario, p: np.ndarray) -> np.ndarray:
    received = scenario.gains * p
    return received / _interference_plus_noise(scenario, p)


def sinr(scenario: Scenario, p, user: int, bs: int) -> float:
    """SINR of `user` at station `bs`: p_j*g_ij / (sum_{k!=j} p_k*g_ik + sigma_i^2)."""
    v = np.asarray(p, dtype=float)
    if v.shape != (scenario.num_users,):
        raise ValueError("power vector length must equal the user count")
    if not 0 <= user < scenario.num_users:
        raise IndexError("user index out of range")
    if not 0 <= bs < scenario.num_bs:
        raise IndexError("base station index out of range")
    if (v < 0).any():
        raise ValueError("powers must be nonnegative")
    own = v[user] * scenario.gains[bs, user]
    others = float(np.dot(np.delete(scenario.gains[bs], user), np.delete(v, user)))
    return float(own / (others + scenario.noise_power[bs]))


def wireless_mapping(scenario: Scenario) -> InterferenceMapping:
    """Interference mapping of the weighted rate allocation problem.

    Carries analytic providers for the closed-form lower bounding matrix and
    the recession vector.
    """
    gains = scenario.gains
    noise = scenario.noise_power
    bandwidth = scenario.bandwidth_hz
    weights = scenario.weights
    n = scenario.num_users
    mask = _exclusive_mask(n)
    # coeff[i, j] = w_j * ln2 / (B * g_ij)
    coeff = (weights * LN2 / bandwidth) / gains

    def evaluator(p: np.ndarray) -> np.ndarray:
        received = gains * p
        denom = received @ mask + noise[:, None]
        ratio = received / denom
        with np.errstate(invalid="ignore", divide="ignore"):
            kappa = np.where(ratio > 0, ratio / np.log1p(ratio), 1.0)
        return (coeff * denom * kappa).min(axis=0)

    return InterferenceMapping(
        dimension=n,
        evaluator=evaluator,
        lbm_provider=lambda: _closed_form_lbm(scenario),
        recession_provider=lambda: _closed_form_recession(scenario),
        label=scenario.label or "wireless",
    )


def _closed_form_lbm(scenario: Scenario) -> np.ndarray:
    # [M]_jk = 0 on the diagonal, min_i w_j*g_ik*ln2/(B*g_ij) off it.
    coeff = (scenario.weights * LN2 / scenario.bandwidth_hz) / scenario.gains
    cross = coeff[:, :, None] * scenario.gains[:, None, :]
    entries = cross.min(axis=0)
    np.fill_diagonal(entries, 0.0)
    return entries


def _closed_form_recession(scenario: Scenario) -> np.ndarray:
    # t_j_inf(1) = min_i w_j / (B * log2(1 + g_ij / sum_{k!=j} g_ik)); the
    # noise drops out of the limit, and an empty interference sum (single
    # user) sends the limiting SINR to infinity and the entry to zero.
    gains = scenario.gains
    other = gains @ _exclusive_mask(scenario.num_users)
    with np.errstate(divide="ignore"):
        limit_sinr = np.where(other > 0, gains / np.maximum(other, 1e-300), np.inf)
        log_rate = np.log1p(limit_sinr) / LN2
        per_bs = np.where(np.isinf(log_rate), 0.0, 1.0 / np.where(log_rate > 0, log_rate, np.inf))
    return (scenario.weights / scenario.bandwidth_hz) * per_bs.min(axis=0)


def wireless_lbm(scenario: Scenario):
    """Closed-form lower bounding matrix of the rate-allocation mapping.

    Zero diagonal, strictly positive off-diagonal (gains are positive), hence
    irreducible with a strictly positive spectral radius for two or more
    users: these networks are interference limited.
    """
    from .analysis import ANALYTIC, LowerBoundingMatrix
    entries = _closed_form_lbm(scenario)
    n = scenario.num_users
    return LowerBoundingMatrix(entries, ANALYTIC, np.ones((n, n), dtype=bool))


def weights_interference_free(scenario: Scenario, ref_power: float = 1.0) -> np.ndarray:
    """Priorities proportional to each user's best interference-free rate.

    b_j = max_i B*log2(1 + ref_power*g_ij/sigma_i^2), normalized by the max so
    the best-off user has weight exactly 1 and the solved utility is the
    common fraction of individual peak rates the network supports.
    """
    if not ref_power > 0:
        raise ValueError("reference power must be strictly positive")
    snr = ref_power * scenario.gains / scenario.noise_power[:, None]
    best = (scenario.bandwidth_hz * np.log1p(snr) / LN2).max(axis=0)
    return best / best.max()


@dataclass(frozen=True, eq=False)
class Assignment:
    """Per-user serving station, achieved SINR and achieved rate."""

    bs_index: np.ndarray
    sinr: np.ndarray
    rate_bps: np.ndarray


def recover_assignment(scenario: Scenario, p_star) -> Assignment:
    """Connect every user to its best-SINR station (lowest index on ties)."""
    p = np.asarray(p_star, dtype=float)
    if p.shape != (scenario.num_users,):
        raise ValueError("power vector length must equal the user count")
    table = _sinr_matrix(scenario, p)
    chosen = table.argmax(axis=0)
    best = table[chosen, np.arange(scenario.num_users)]
    rates = scenario.bandwidth_hz * np.log1p(best) / LN2
    return Assignment(bs_index=chosen, sinr=best, rate_bps=rates)


def dbm_per_hz_to_watts(psd_dbm_hz: float) -> float:
    """Linear power spectral density in W/Hz from a dBm/Hz figure."""
    return 10.0 ** ((psd_dbm_hz - 30.0) / 10.0)


def watts_to_dbm_per_hz(psd_w_hz: float) -> float:
    return 10.0 * math.log10(psd_w_hz) + 30.0


def generate_scenario(num_bs: int, num_users: int, area_m: float = 500.0,
                      pathloss_exponent: float = 3.5, ref_gain_at_1m: float = 1e-4,
                      noise_psd_dbm_hz: float = -145.0, bandwidth_hz: float = 1e7,
                      seed: int = 0) -> Scenario:
    """Synthetic scenario on a square area: stations on a jittered grid, users
    uniform, log-distance pathloss with a 1 m close-in cap.

    Deterministic for a fixed seed.  The close-in cap keeps every gain
    strictly positive; noise power per station is PSD (linear) * bandwidth.
    """
    if num_bs < 1 or num_users < 1:
        raise ValueError("need at least one base station and one user")
    if not area_m > 0:
        raise ValueError("area side must be strictly positive")
    if pathloss_exponent < 2:
        raise ValueError("pathloss exponent must be at least 2")
    if not ref_gain_at_1m > 0 or not bandwidth_hz > 0:
        raise ValueError("reference gain and bandwidth must be strictly positive")

    rng = np.random.default_rng(seed)
    side = math.ceil(math.sqrt(num_bs))
    cell = area_m / side
    idx = np.arange(num_bs)
    centers = np.column_stack(((idx % side + 0.5) * cell, (idx // side + 0.5) * cell))
    bs_xy = centers + rng.uniform(-0.25, 0.25, (num_bs, 2)) * cell
    user_xy = rng.uniform(0.0, area_m, (num_users, 2))

    dist = np.hypot(bs_xy[:, 0][:, None] - user_xy[:, 0],
                    bs_xy[:, 1][:, None] - user_xy[:, 1])
    gains = ref_gain_at_1m * np.maximum(dist, 1.0) ** (-pathloss_exponent)
    noise = np.full(num_bs, dbm_per_hz_to_watts(noise_psd_dbm_hz) * bandwidth_hz)
    return Scenario(
        gains=gains,
        noise_power=noise,
        bandwidth_hz=float(bandwidth_hz),
        weights=np.ones(num_users),
        label=f"synthetic-{num_bs}bs-{num_users}ue-seed{seed}",
    )


def save_scenario(scenario: Scenario, path) -> None:
    """Write a scenario file (gains in dB, noise as a dBm/Hz PSD)."""
    psd = [watts_to_dbm_per_hz(p / scenario.bandwidth_hz) for p in scenario.noise_power]
    if len(set(psd)) == 1:
        psd = psd[0]
    payload = {
        "label": scenario.label,
        "bandwidth_hz": scenario.bandwidth_hz,
        "noise_psd_dbm_hz": psd,
        "gains_db": (10.0 * np.log10(scenario.gains)).tolist(),
        "weights": scenario.weights.tolist(),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file.

    Absent weights are resolved by the named scheme ("uniform" by default, or
    "interference_free" evaluated at weight_ref_power_w).  Gains that
    underflow to zero after dB conversion are rejected: every bound here
    evaluates the mapping at 0 and needs strictly positive gains.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioFormatError("scenario file must hold a JSON object")
    for key in ("bandwidth_hz", "noise_psd_dbm_hz", "gains_db"):
        if key not in raw:
            raise ScenarioFormatError(f"missing required field {key!r}")

    gains_db = raw["gains_db"]
    if (not isinstance(gains_db, list) or not gains_db
            or not all(isinstance(row, list) for row in gains_db)):
        raise ScenarioFormatError("gains_db must be a non-empty list of rows")
    row_len = len(gains_db[0])
    if row_len == 0 or any(len(row) != row_len for row in gains_db):
        raise ScenarioDimensionError("gains_db rows must be non-empty and equal length")
    try:
        gains = 10.0 ** (np.asarray(gains_db, dtype=float) / 10.0)
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError("gains_db entries must be numbers") from exc
    if not np.isfinite(gains).all() or (gains <= 0).any():
        raise ScenarioValueError("every gain must convert to a positive finite value")
    num_bs, num_users = gains.shape

    bandwidth = raw["bandwidth_hz"]
    if not isinstance(bandwidth, (int, float)) or not bandwidth > 0:
        raise ScenarioValueError("bandwidth_hz must be a positive number")

    psd = raw["noise_psd_dbm_hz"]
    if isinstance(psd, (int, float)):
        psd_values = [float(psd)] * num_bs
    elif isinstance(psd, list) and all(isinstance(v, (int, float)) for v in psd):
        if len(psd) != num_bs:
            raise ScenarioDimensionError("need one noise PSD per base station")
        psd_values = [float(v) for v in psd]
    else:
        raise ScenarioFormatError("noise_psd_dbm_hz must be a number or a list of numbers")
    noise = np.array([dbm_per_hz_to_watts(v) * bandwidth for v in psd_values])

    label = raw.get("label", "")
    if not isinstance(label, str):
        raise ScenarioFormatError("label must be a string")

    weights_raw = raw.get("weights")
    scenario = Scenario(gains=gains, noise_power=noise, bandwidth_hz=float(bandwidth),
                        weights=np.ones(num_users), label=label)
    if weights_raw is not None:
        if (not isinstance(weights_raw, list)
                or not all(isinstance(v, (int, float)) for v in weights_raw)):
            raise ScenarioFormatError("weights must be a list of numbers")
        if len(weights_raw) != num_users:
            raise ScenarioDimensionError("need one weight per user")
        weights = np.asarray(weights_raw, dtype=float)
    else:
        scheme = raw.get("weight_scheme", "uniform")
        if scheme == "uniform":
            weights = np.ones(num_users)
        elif scheme == "interference_free":
            ref = raw.get("weight_ref_power_w", 1.0)
            if not isinstance(ref, (int, float)) or not ref > 0:
                raise ScenarioValueError("weight_ref_power_w must be a positive number")
            weights = weights_interference_free(scenario, float(ref))
        else:
            raise ScenarioFormatError(f"unknown weight scheme {scheme!r}")
    return Scenario(gains=gains, noise_power=noise, bandwidth_hz=float(bandwidth),
                    weights=weights, label=label)
