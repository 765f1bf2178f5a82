"""Shared fixture factories for the test suite."""

import numpy as np

from numax import affine_mapping, constant_mapping
from numax.wireless import Scenario

# The symmetric affine pair: coupling [[0, .5], [.5, 0]], offset [1, 1].
# Closed form under the sup norm: p(c) = c/(1 - c/2) * [1, 1], utility cap
# 1/rho = 2, transient point u = 2.
EX1_COUPLING = np.array([[0.0, 0.5], [0.5, 0.0]])
EX1_OFFSET = np.array([1.0, 1.0])


def make_ex1():
    return affine_mapping(EX1_COUPLING, EX1_OFFSET, label="ex1")


def make_asym():
    """Asymmetric affine instance (rho = 0.4): unlike the symmetric pair, the
    zero start is not aligned with the fixed point, so iteration counts are
    meaningful."""
    return affine_mapping([[0.0, 0.6], [0.2, 0.1]], [1.0, 0.5], label="asym")


def make_constant2():
    return constant_mapping([1.0, 1.0], label="const2")


def unit_scale_scenario(num_bs=2, num_users=3, seed=5):
    """Random scenario with O(1) gains, unit noise and unit bandwidth; keeps
    solver iteration counts and conditioning tame in unit tests."""
    rng = np.random.default_rng(seed)
    gains = rng.uniform(0.2, 2.0, (num_bs, num_users))
    return Scenario(gains=gains, noise_power=np.ones(num_bs), bandwidth_hz=1.0,
                    weights=rng.uniform(0.5, 1.5, num_users),
                    label=f"unit-{num_bs}x{num_users}-seed{seed}")
