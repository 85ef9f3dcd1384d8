"""Metric functionals, resolvent points and invariant horofunctions for isometries.

The package is organized by space: ``normed`` (sequence spaces and their
maps), ``pos`` (positive definite matrices with the Thompson metric),
``hyperbolic`` (the upper half-plane) and ``linfty`` (finite-dimensional
l-infinity).  ``solver`` computes resolvent points and checks invariance,
``ergodic`` turns the invariant functionals into mean ergodic statements and
``scenarios``/``cli`` package everything as seeded experiments.
"""

from .core import (
    DomainError,
    HorolibError,
    InvalidParameter,
    Isometry,
    MetricFunctional,
    MetricSpace,
    NonConvergenceError,
    NumericError,
    ResourceError,
    UnsupportedOperation,
    bicombing_defects,
    displacement,
    point_functional_eval,
    pushforward_functional,
    rebase_functional,
    translation_number_estimate,
)
from .registry import REGISTRY, get_map
from .solver import SolverConfig, invariance_report, resolvent_point, run_schedule

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "HorolibError",
    "InvalidParameter",
    "Isometry",
    "MetricFunctional",
    "MetricSpace",
    "NonConvergenceError",
    "NumericError",
    "REGISTRY",
    "ResourceError",
    "SolverConfig",
    "UnsupportedOperation",
    "bicombing_defects",
    "displacement",
    "get_map",
    "invariance_report",
    "point_functional_eval",
    "pushforward_functional",
    "rebase_functional",
    "resolvent_point",
    "run_schedule",
    "translation_number_estimate",
]
