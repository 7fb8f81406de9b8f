"""
ncerg - Noncommutative Ergodic Lab
Local ergodic averages of multiparameter Dunford-Schwartz semigroups on
finite-dimensional von Neumann algebras, with the symmetric norms and
rearrangement machinery needed to measure them.
"""

__version__ = "0.1.0"
__author__ = "ncerg contributors"
__license__ = "MIT"

from ncerg.algebra import AlgebraShape, Operator, spectral_projection, spectral_window, trace
from ncerg.rearrangement import StepFunction, distribution, hl_leq, mu, partial_integral
from ncerg.spaces import (
    ConcavePhi,
    OrliczFunction,
    descriptor_from_spec,
    in_R_tau,
    space_traits,
    standard_descriptors,
)
from ncerg.dynamics import Semigroup, Superoperator, make_family, make_semigroup, verify_ds_plus
from ncerg.averaging import AveragingMethod, average, average_phi1, average_quadrature
from ncerg.experiments import EXPERIMENTS, is_valid_experiment
from ncerg.scenario import Scenario
from ncerg.literals import detect_format, parse_literal
from ncerg.reports import Report
from ncerg.runner import run_scenario, selftest

__all__ = [
    "AlgebraShape",
    "Operator",
    "spectral_projection",
    "spectral_window",
    "trace",
    "StepFunction",
    "distribution",
    "hl_leq",
    "mu",
    "partial_integral",
    "ConcavePhi",
    "OrliczFunction",
    "descriptor_from_spec",
    "in_R_tau",
    "space_traits",
    "standard_descriptors",
    "Semigroup",
    "Superoperator",
    "make_family",
    "make_semigroup",
    "verify_ds_plus",
    "AveragingMethod",
    "average",
    "average_phi1",
    "average_quadrature",
    "EXPERIMENTS",
    "is_valid_experiment",
    "Scenario",
    "detect_format",
    "parse_literal",
    "Report",
    "run_scenario",
    "selftest",
]
