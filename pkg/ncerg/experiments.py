"""
ncerg Experiment Vocabulary
Every scenario names one of these experiments; its params must come from the
matching allowed set.
"""

from typing import Dict, FrozenSet

EXPERIMENTS: Dict[str, str] = {
    "mu":        "Rearrangement mu_t(x) as a step function, optionally sampled at t",
    "norm":      "Symmetric norms of x for one or more norm descriptors",
    "ds-verify": "Certify a map as positive Dunford-Schwartz (Choi / stochastic test)",
    "average":   "Local ergodic average A_t(x) by quadrature or phi1",
    "converge":  "Mean convergence table ||A_t(x) - x||_E along a decreasing t-grid",
    "maximal":   "Maximal inequality projection search (continuous or discrete)",
    "bounds":    "Rate, continuity and dyadic bound checks",
}

EXPERIMENT_PARAMS: Dict[str, FrozenSet[str]] = {
    "mu":        frozenset({"t"}),
    "norm":      frozenset({"norm", "norms"}),
    "ds-verify": frozenset({"tol"}),
    "average":   frozenset({"t", "method", "order", "factorized", "error_estimate"}),
    "converge":  frozenset({"norm", "t_grid"}),
    "maximal":   frozenset({"lambda", "strategy", "t_grid", "target_constant", "discrete", "N"}),
    "bounds":    frozenset({"check", "t0", "p", "t_grid", "v_samples", "pairs", "slack"}),
}

# experiments that act through a semigroup, a map, or need no dynamics at all
NEEDS_SEMIGROUP = frozenset({"average", "converge", "bounds"})
NEEDS_MAP = frozenset({"ds-verify"})

BOUND_CHECKS = ("rate", "continuity", "dyadic")


def is_valid_experiment(name: str) -> bool:
    """Check if an experiment name is part of the vocabulary."""
    return name.lower() in EXPERIMENTS


def describe_experiment(name: str) -> str:
    """Return the description of an experiment."""
    return EXPERIMENTS.get(name.lower(), "Unknown experiment")


def allowed_params(name: str) -> FrozenSet[str]:
    return EXPERIMENT_PARAMS.get(name.lower(), frozenset())
