"""Certified starters for Newton's method on Kepler's equation."""

from .alpha import ALPHA0, AlphaReport, alpha0, alpha_test, beta, gamma, gamma_bruteforce
from .lookup import LookupTable, build_table, table_starter
from .model import (
    AnomalyReduction,
    DomainError,
    EccentricityError,
    EllipseGeometry,
    OrbitPoint,
    eccentric_to_position,
    eval_f,
    eval_f_derivative,
    reduce_anomaly,
    restore_anomaly,
)
from .regions import RegionId, in_region
from .solver import (
    SolveResult,
    bisection_oracle,
    fixed_point_baseline,
    iterations_for_digits,
    newton_step,
    solve,
)
from .starters import (
    Branch,
    StarterKind,
    StarterValue,
    analytic_starter,
    classical_starter,
    starter,
    thm1_starter,
)
from .sweep import RegionMap, find_corner_failure, sweep

__all__ = [
    "ALPHA0",
    "AlphaReport",
    "AnomalyReduction",
    "Branch",
    "DomainError",
    "EccentricityError",
    "EllipseGeometry",
    "LookupTable",
    "OrbitPoint",
    "RegionId",
    "RegionMap",
    "SolveResult",
    "StarterKind",
    "StarterValue",
    "alpha0",
    "alpha_test",
    "analytic_starter",
    "beta",
    "bisection_oracle",
    "build_table",
    "classical_starter",
    "eccentric_to_position",
    "eval_f",
    "eval_f_derivative",
    "find_corner_failure",
    "fixed_point_baseline",
    "gamma",
    "gamma_bruteforce",
    "in_region",
    "iterations_for_digits",
    "newton_step",
    "reduce_anomaly",
    "restore_anomaly",
    "solve",
    "starter",
    "sweep",
    "table_starter",
    "thm1_starter",
]
