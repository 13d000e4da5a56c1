"""Python access to the fracholder solvers and experiment runner."""

import json

from ._core import (
    FracholderError,
    Shape,
    ball_solution,
    besov_capacity,
    config_hash,
    domain_catalog,
    fatness_ratio,
    harmonic_measure,
    is_trivial_point,
    parse_shape,
    solve_dirichlet,
    weighted_capacity,
)
from ._core import run_experiment as _run_experiment

__all__ = [
    "FracholderError",
    "Shape",
    "ball_solution",
    "besov_capacity",
    "config_hash",
    "domain_catalog",
    "fatness_ratio",
    "harmonic_measure",
    "is_trivial_point",
    "parse_shape",
    "run_experiment",
    "solve_dirichlet",
    "weighted_capacity",
]


def run_experiment(config_text, jobs=1):
    """Run an INI config and return the report as a dict."""
    return json.loads(_run_experiment(config_text, jobs))
