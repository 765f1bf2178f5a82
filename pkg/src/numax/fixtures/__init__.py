"""Bundled problem fixtures for the CLI and tests.

`example1_affine` is the symmetric two-element affine instance with coupling
[[0, 0.5], [0.5, 0]] and offset [1, 1] (spectral radius 0.5, so the utility
cap is 2 and the sup-norm transient point sits at budget 2).  `constant` has
no coupling at all, and `single_user` is a one-user wireless scenario with
unit gain, unit noise power and unit bandwidth.
"""

from importlib import resources
from pathlib import Path

FIXTURE_NAMES = ("example1_affine", "constant", "single_user")


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture JSON file."""
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}")
    return Path(str(resources.files(__package__).joinpath(f"{name}.json")))
