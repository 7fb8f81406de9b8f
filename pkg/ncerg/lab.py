"""
ncerg Lab
Experiments that check the quantitative statements of the local ergodic theory
on finite-dimensional instances: mean convergence and its rate, the continuity
modulus of t -> A_t, the dyadic comparison bound, maximal inequalities, and
contraction of symmetric norms under Dunford-Schwartz maps.

Bound checks never raise on violation; failures are recorded in the report.
Almost-uniform convergence statements collapse to norm convergence in finite
dimension and are not checked separately.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from ncerg.algebra import (
    Operator,
    random_operator,
    random_positive,
    random_shape,
    spectral_decompose,
    trace,
)
from ncerg.averaging import (
    DEFAULT_ORDER,
    average_map_phi1,
    average_map_quadrature,
    average_phi1,
    product_average_e5,
)
from ncerg.config import TOLERANCES, Settings, Tolerances
from ncerg.dynamics import (
    Semigroup,
    Superoperator,
    builtin_suite,
    cyclic_shift,
    heat_cycle,
    is_commutative,
    substochastic_map,
    verify_ds_plus,
)
from ncerg.exceptions import (
    BruteForceTooLargeError,
    InvalidParameterError,
    InvalidPhiError,
    NCERGError,
)
from ncerg.rearrangement import distribution, hl_leq, mu
from ncerg.spaces import (
    ConcavePhi,
    LorentzNorm,
    LpNorm,
    L1CapLinfNorm,
    L1PlusLinfNorm,
    MarcinkiewiczNorm,
    NormDescriptor,
    OrliczFunction,
    OrliczNorm,
    luxemburg_norm,
    marcinkiewicz_norm,
    norm_p,
    standard_descriptors,
)

logger = logging.getLogger(__name__)

CONVERGENCE_NOTE = (
    "a.u. and b.a.u. convergence coincide with norm convergence in finite "
    "dimension; only norm convergence is measured"
)
BRUTE_FORCE_MAX_ATOMS = 12
STRATEGIES = ("chebyshev", "greedy_peel", "brute_force")


# ----------------------------------------------------------------------
# reports


@dataclass
class ConvergenceReport:
    t_grid: List[float]
    values: List[float]
    norm: str
    monotone_tail: bool
    final_ratio: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t_grid": self.t_grid,
            "values": self.values,
            "norm": self.norm,
            "monotone_tail": self.monotone_tail,
            "final_ratio": self.final_ratio,
            "note": CONVERGENCE_NOTE,
        }

    def rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.t_grid, self.values))


@dataclass
class MaximalReport:
    lam: float
    trace_budget: float
    projection_found: bool
    tau_e_perp: float
    achieved_sup: float
    achieved_constant: float
    strategy: str
    grid_size: int = 0
    grid_modulus: Optional[float] = None
    projection: Optional[Operator] = field(default=None, repr=False)

    @property
    def budget_met(self) -> bool:
        return self.tau_e_perp <= self.trace_budget + TOLERANCES.budget

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "trace_budget": self.trace_budget,
            "projection_found": self.projection_found,
            "tau_e_perp": self.tau_e_perp,
            "achieved_sup": self.achieved_sup,
            "achieved_constant": self.achieved_constant,
            "strategy": self.strategy,
            "grid_size": self.grid_size,
            "grid_modulus": self.grid_modulus,
        }


@dataclass
class BoundRow:
    param: Any
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def excess(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> Dict[str, Any]:
        return {"param": self.param, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


@dataclass
class BoundCheckReport:
    """Rows of lhs <= rhs (slack already added to rhs)."""

    name: str
    rows: List[BoundRow]
    constant: Optional[float] = None
    slack: float = TOLERANCES.bound_slack
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(row.holds for row in self.rows)

    @property
    def max_excess(self) -> float:
        return max((row.excess for row in self.rows), default=-math.inf)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "constant": self.constant,
            "slack": self.slack,
            "passed": self.passed,
            "max_excess": self.max_excess,
            "rows": [row.to_dict() for row in self.rows],
            **self.extra,
        }


@dataclass
class SuiteReport:
    name: str
    seed: int
    trials: int
    violations: int
    max_excess: float
    failures: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "seed": self.seed,
            "trials": self.trials,
            "violations": self.violations,
            "max_excess": self.max_excess,
            "passed": self.passed,
            "failures": self.failures[:10],
        }


@dataclass
class AcceptanceRow:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


# ----------------------------------------------------------------------
# mean convergence


def _check_decreasing_grid(t_grid: Sequence[float]) -> List[float]:
    grid = [float(t) for t in t_grid]
    if not grid:
        raise InvalidParameterError("t_grid must not be empty")
    if any(t <= 0 or not math.isfinite(t) for t in grid):
        raise InvalidParameterError("t_grid must contain finite positive values")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameterError("t_grid must be strictly decreasing")
    return grid


def mean_convergence_table(
    sg: Semigroup,
    x: Operator,
    descriptor: NormDescriptor,
    t_grid: Sequence[float],
) -> ConvergenceReport:
    """
    ||A_t(x) - x||_E along a decreasing t-grid, averages by the phi1 method.

    monotone_tail: values are non-increasing over the last half of the grid.
    final_ratio: last value / first value (0 when the first value is 0).
    """
    grid = _check_decreasing_grid(t_grid)
    values = [descriptor.norm(average_phi1(sg, x, t) - x) for t in grid]
    tail = values[len(values) // 2:]
    tol = 1e-12 * (1.0 + max(values))
    monotone = all(b <= a + tol for a, b in zip(tail, tail[1:]))
    ratio = values[-1] / values[0] if values[0] > 0 else 0.0
    logger.info("mean_convergence_table(%s, %s): final_ratio %.3e", sg.name, descriptor.label, ratio)
    return ConvergenceReport(grid, values, descriptor.label, monotone, ratio)


# ----------------------------------------------------------------------
# bound checks


def rate_constant(t0: float, d: int) -> float:
    """C(t0, d) = 2 t0^-1 sum_{k=1}^d binom(d, k) = 2 (2^d - 1) / t0."""
    if not t0 > 0:
        raise InvalidParameterError(f"t0 must be > 0, got {t0}")
    return 2.0 / t0 * float(sum(comb(d, k, exact=True) for k in range(1, d + 1)))


def check_rate_l33(
    sg: Semigroup,
    y: Operator,
    t0: float,
    p: float,
    t_grid: Sequence[float],
    v_samples: Optional[Sequence[float]] = None,
    slack: float = TOLERANCES.bound_slack,
) -> BoundCheckReport:
    """
    Rate of mean convergence for x = A_{t0}(y):

        ||A_t(x) - x||_p <= t C(t0, d) ||y||_p                      for t < t0
        ||T_v(x) - x||_p <= 2 (t0^d - (t0 - v)^d) / t0^d ||y||_p    for v < t0

    the second at u = (v, ..., v) (rows tagged "intermediate").
    """
    if not t0 > 0:
        raise InvalidParameterError(f"t0 must be > 0, got {t0}")
    grid = [float(t) for t in t_grid]
    if any(not 0 < t < t0 for t in grid):
        raise InvalidParameterError(f"t_grid must lie in (0, {t0})")
    samples = grid if v_samples is None else [float(v) for v in v_samples]
    if any(not 0 < v < t0 for v in samples):
        raise InvalidParameterError(f"v samples must lie in (0, {t0})")

    d = sg.d
    x = average_phi1(sg, y, t0)
    C = rate_constant(t0, d)
    ny = norm_p(y, p)
    rows = [BoundRow(t, norm_p(average_phi1(sg, x, t) - x, p), t * C * ny + slack) for t in grid]
    intermediate = []
    for v in samples:
        lhs = norm_p(sg.evolve([v] * d, x) - x, p)
        rhs = 2.0 * (t0 ** d - (t0 - v) ** d) / t0 ** d * ny + slack
        intermediate.append(BoundRow({"v": v, "intermediate": True}, lhs, rhs))
    return BoundCheckReport("rate", rows + intermediate, C, slack, {"t0": t0, "p": _p_label(p), "d": d})


def _p_label(p: float) -> Any:
    return "inf" if math.isinf(p) else p


def check_continuity_l333(
    sg: Semigroup,
    x: Operator,
    p: float,
    pairs: Sequence[Tuple[float, float]],
    slack: float = TOLERANCES.bound_slack,
) -> BoundCheckReport:
    """||A_t(x) - A_s(x)||_p <= 2 (t^d - s^d) / t^d ||x||_p for 0 < s < t."""
    d = sg.d
    nx = norm_p(x, p)
    rows = []
    for s, t in pairs:
        s, t = float(s), float(t)
        if not 0 < s < t:
            raise InvalidParameterError(f"Continuity pairs need 0 < s < t, got ({s}, {t})")
        lhs = norm_p(average_phi1(sg, x, t) - average_phi1(sg, x, s), p)
        rhs = 2.0 * (t ** d - s ** d) / t ** d * nx + slack
        rows.append(BoundRow([s, t], lhs, rhs))
    return BoundCheckReport("continuity", rows, None, slack, {"p": _p_label(p), "d": d})


def dyadic_coefficient(t: float, d: int) -> float:
    """k^d (k^-d - t^d) + |k^d - t^-d| t^d with k = floor(1/t)."""
    if not 0 < t < 1:
        raise InvalidParameterError(f"Dyadic bound needs t in (0, 1), got {t}")
    k = math.floor(1.0 / t + 1e-12)
    return k ** d * (k ** -d - t ** d) + abs(k ** d - t ** -d) * t ** d


def check_dyadic_e8(
    sg: Semigroup,
    x: Operator,
    t_grid: Sequence[float],
    slack: float = TOLERANCES.bound_slack,
) -> BoundCheckReport:
    """
    ||A_t(x) - A_{1/floor(1/t)}(x)||_inf <= dyadic_coefficient(t, d) ||x||_inf.

    Both averages are over cubes [0, t]^d and [0, 1/floor(1/t)]^d.
    """
    d = sg.d
    nx = norm_p(x, math.inf)
    rows, coefficients = [], []
    for t in t_grid:
        t = float(t)
        coefficient = dyadic_coefficient(t, d)
        k = math.floor(1.0 / t + 1e-12)
        lhs = (average_phi1(sg, x, t) - average_phi1(sg, x, 1.0 / k)).norm_inf
        rows.append(BoundRow(t, lhs, coefficient * nx + slack))
        coefficients.append(coefficient)
    non_increasing = all(b <= a + 1e-15 for a, b in zip(coefficients, coefficients[1:]))
    return BoundCheckReport(
        "dyadic", rows, None, slack,
        {"coefficients": coefficients, "coefficients_non_increasing": non_increasing, "d": d},
    )


# ----------------------------------------------------------------------
# maximal inequalities


def default_time_grid(settings: Optional[Settings] = None) -> List[float]:
    """Log grid over the settings range plus the large-t Cesaro surrogate."""
    settings = settings or Settings()
    lo, hi = settings.maximal_grid_range
    grid = np.logspace(math.log10(lo), math.log10(hi), settings.maximal_grid_points).tolist()
    return grid + [settings.large_t]


def grid_modulus(t_grid: Sequence[float], d: int, x_norm: float) -> float:
    """Largest continuity bound 2 (t^d - s^d) / t^d ||x|| between neighbouring grid points."""
    grid = sorted(float(t) for t in t_grid)
    if len(grid) < 2:
        return 0.0
    return max(2.0 * (t ** d - s ** d) / t ** d * x_norm for s, t in zip(grid, grid[1:]))


def _sup_on(e: Operator, ys: Sequence[Operator]) -> float:
    return max((e @ y @ e).norm_inf for y in ys)


def _tau_perp(e: Operator) -> float:
    return float(e.shape.total_trace - trace(e).real)


def _chebyshev(ys: Sequence[Operator], budget: float) -> Operator:
    """
    e = chi_(-inf, c](S) for S the mean of the averages, with c the smallest
    spectral level such that tau{S > c} <= budget (e = 0 allowed).
    """
    shape = ys[0].shape
    s = Operator.zeros(shape)
    for y in ys:
        s = s + y
    s = (s / len(ys)).hermitian_part()
    dec = spectral_decompose(s)
    tail = np.cumsum(dec.traces[::-1])[::-1]  # tail[j] = tau of eigenvalues >= lambda_j
    limit = budget + TOLERANCES.budget
    if shape.total_trace <= limit:
        logger.debug("chebyshev: whole algebra fits the budget, e = 0")
        return Operator.zeros(shape)
    e = Operator.zeros(shape)
    for j, projection in enumerate(dec.projections):
        e = e + projection
        above = float(tail[j + 1]) if j + 1 < len(tail) else 0.0
        if above <= limit:
            logger.debug("chebyshev: cut at %.6g, tau(e_perp) = %.6g", dec.eigenvalues[j], above)
            return e
    return e


def _greedy_peel(ys: Sequence[Operator], budget: float, target: float) -> Tuple[Operator, bool]:
    """Remove the top eigenspace of the worst e A_t(x) e until all are <= target."""
    shape = ys[0].shape
    e = Operator.identity(shape)
    removed = 0.0
    for _ in range(shape.hs_dimension + 1):
        cut = [(e @ y @ e).hermitian_part() for y in ys]
        norms = [c.norm_inf for c in cut]
        worst = int(np.argmax(norms))
        if norms[worst] <= target * (1.0 + 1e-12):
            return e, True
        dec = spectral_decompose(cut[worst])
        if removed + dec.traces[-1] > budget + TOLERANCES.budget:
            logger.debug("greedy_peel: budget exhausted at tau(e_perp) = %.6g", removed)
            return e, False
        removed += dec.traces[-1]
        e = (e - dec.projections[-1]).hermitian_part()
    return e, False


def _brute_force(ys: Sequence[Operator], budget: float) -> Operator:
    """
    Exhaustive search over diagonal projections for the smallest sup under the budget.

    Ties go to the smaller tau(e_perp), then to the smaller subset index.
    """
    shape = ys[0].shape
    n = len(shape.blocks)
    if not shape.is_diagonal or n > BRUTE_FORCE_MAX_ATOMS:
        raise BruteForceTooLargeError(
            f"brute_force needs a diagonal algebra with at most {BRUTE_FORCE_MAX_ATOMS} atoms, "
            f"got {shape.dims}"
        )
    values = np.abs(np.array([y.diagonal_values() for y in ys]))
    column_max = values.max(axis=0)
    weights = np.array(shape.weights)
    masks = np.arange(2 ** n)
    keep = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    removed = (~keep).astype(float) @ weights
    sups = np.where(keep, column_max[None, :], 0.0).max(axis=1)
    feasible = np.nonzero(removed <= budget + TOLERANCES.budget)[0]
    order = np.lexsort((feasible, removed[feasible], sups[feasible]))
    best = feasible[order[0]]
    return Operator.diagonal(shape, keep[best].astype(float))


def _search(
    ys: Sequence[Operator],
    lam: float,
    budget: float,
    strategy: str,
    target_constant: float,
    settings: Settings,
) -> MaximalReport:
    found = True
    if strategy == "chebyshev":
        e = _chebyshev(ys, budget)
    elif strategy == "greedy_peel":
        e, found = _greedy_peel(ys, budget, lam * target_constant)
    elif strategy == "brute_force":
        e = _brute_force(ys, budget)
    else:
        raise InvalidParameterError(f"Unknown strategy '{strategy}'. Known: {list(STRATEGIES)}")
    tau_perp = _tau_perp(e)
    found = found and tau_perp <= budget + TOLERANCES.budget
    achieved = _sup_on(e, ys)
    constant = achieved / lam
    if constant > settings.soft_constant_threshold:
        logger.warning("%s: achieved constant %.3f above soft threshold %.1f",
                       strategy, constant, settings.soft_constant_threshold)
    return MaximalReport(lam, budget, found, tau_perp, achieved, constant, strategy,
                         len(ys), None, e)


def _check_positive(x: Operator, lam: float) -> None:
    if not x.is_positive:
        raise InvalidParameterError("Maximal inequalities need a positive x")
    if not lam > 0:
        raise InvalidParameterError(f"lambda must be > 0, got {lam}")


def maximal_projection_search(
    sg: Semigroup,
    x: Operator,
    lam: float,
    t_grid: Optional[Sequence[float]] = None,
    strategy: str = "chebyshev",
    target_constant: float = 1.0,
    settings: Optional[Settings] = None,
) -> MaximalReport:
    """
    Look for e with tau(e_perp) <= 2 ||x||_1 / lam and small sup_t ||e A_t(x) e||_inf.

    The supremum over t > 0 is taken over a finite grid (default: 64 log-spaced
    points over [1e-3, 1e3] plus t = 1e6), an under-approximation whose gap is
    controlled by the reported grid modulus.

    Raises:
        BruteForceTooLargeError: brute_force on a non-diagonal or too large algebra
    """
    settings = settings or Settings()
    _check_positive(x, lam)
    grid = default_time_grid(settings) if t_grid is None else [float(t) for t in t_grid]
    if not grid or any(t <= 0 for t in grid):
        raise InvalidParameterError("t_grid must contain positive values")
    budget = 2.0 * norm_p(x, 1.0) / lam
    ys = [average_map_phi1(sg, t).apply(x).hermitian_part() for t in grid]
    report = _search(ys, lam, budget, strategy, target_constant, settings)
    log_grid = [t for t in grid if t < settings.large_t]
    report.grid_modulus = grid_modulus(log_grid, sg.d, x.norm_inf)
    logger.info("maximal_projection_search(%s, %s): found=%s, constant %.4g",
                sg.name, strategy, report.projection_found, report.achieved_constant)
    return report


def yeadon_discrete_check(
    T: Superoperator,
    x: Operator,
    lam: float,
    N: int = 50,
    settings: Optional[Settings] = None,
) -> MaximalReport:
    """
    Look for e with tau(e_perp) <= ||x||_1 / lam and sup_{n <= N} ||e M_n(x) e||_inf <= lam,
    M_n = (1/n) sum_{k<n} T^k. Brute force on diagonal algebras up to 12 atoms,
    chebyshev otherwise.
    """
    settings = settings or Settings()
    _check_positive(x, lam)
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"N must be an integer >= 1, got {N!r}")
    certificate = verify_ds_plus(T, tolerances=settings.tolerances)
    if not certificate.verdict:
        raise InvalidParameterError(f"T is not certified DS+: {certificate}")
    budget = norm_p(x, 1.0) / lam
    ys, total, term = [], x, x
    for n in range(1, int(N) + 1):
        if n > 1:
            term = T.apply(term)
            total = total + term
        ys.append((total / n).hermitian_part())
    small = T.shape.is_diagonal and len(T.shape.blocks) <= BRUTE_FORCE_MAX_ATOMS
    strategy = "brute_force" if small else "chebyshev"
    report = _search(ys, lam, budget, strategy, 1.0, settings)
    logger.info("yeadon_discrete_check: found=%s, constant %.4g", report.projection_found, report.achieved_constant)
    return report


# ----------------------------------------------------------------------
# randomized suites


def _trial_rngs(seed: int, trials: int) -> List[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _run_trials(fn: Callable[[int, np.random.Generator], Any], seed: int, trials: int, threads: int) -> List[Any]:
    rngs = _trial_rngs(seed, trials)
    indices = range(trials)
    if threads <= 1:
        return [fn(i, rng) for i, rng in zip(indices, rngs)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, indices, rngs))


def _summarize(name: str, seed: int, reports: Sequence[BoundCheckReport]) -> SuiteReport:
    failures = [r.to_dict() for r in reports if not r.passed]
    excess = max((r.max_excess for r in reports), default=-math.inf)
    suite = SuiteReport(name, seed, len(reports), len(failures), excess, failures)
    logger.info("%s suite: %d trials, %d violations, max excess %.3e", name, suite.trials, suite.violations, excess)
    return suite


_P_CHOICES = (1.0, 2.0, math.inf)


def rate_suite(
    seed: int,
    trials: int = 500,
    threads: int = 1,
    families: Optional[Dict[str, Semigroup]] = None,
    max_d: int = 2,
) -> SuiteReport:
    """Randomized check_rate_l33 over built-in families with d <= max_d."""
    families = families or builtin_suite()
    pool = [sg for sg in families.values() if sg.d <= max_d]

    def trial(i: int, rng: np.random.Generator) -> BoundCheckReport:
        sg = pool[i % len(pool)]
        y = random_operator(sg.shape, rng)
        t0 = float(rng.uniform(0.5, 2.0))
        p = _P_CHOICES[int(rng.integers(len(_P_CHOICES)))]
        grid = sorted((t0 * rng.uniform(0.01, 0.99, 3)).tolist())
        return check_rate_l33(sg, y, t0, p, grid)

    return _summarize("rate", seed, _run_trials(trial, seed, trials, threads))


def continuity_suite(
    seed: int,
    trials: int = 500,
    threads: int = 1,
    families: Optional[Dict[str, Semigroup]] = None,
) -> SuiteReport:
    """Randomized check_continuity_l333 over all built-in families."""
    pool = list((families or builtin_suite()).values())

    def trial(i: int, rng: np.random.Generator) -> BoundCheckReport:
        sg = pool[i % len(pool)]
        x = random_operator(sg.shape, rng)
        p = _P_CHOICES[int(rng.integers(len(_P_CHOICES)))]
        t = float(rng.uniform(0.05, 3.0))
        s = t * float(rng.uniform(0.01, 0.99))
        return check_continuity_l333(sg, x, p, [(s, t)])

    return _summarize("continuity", seed, _run_trials(trial, seed, trials, threads))


def dyadic_suite(
    seed: int,
    trials: int = 100,
    threads: int = 1,
    families: Optional[Dict[str, Semigroup]] = None,
) -> SuiteReport:
    """Randomized check_dyadic_e8 at random t in (0, 1)."""
    pool = list((families or builtin_suite()).values())

    def trial(i: int, rng: np.random.Generator) -> BoundCheckReport:
        sg = pool[i % len(pool)]
        x = random_operator(sg.shape, rng)
        return check_dyadic_e8(sg, x, [float(rng.uniform(0.01, 0.99))])

    return _summarize("dyadic", seed, _run_trials(trial, seed, trials, threads))


def certified_maps(
    families: Optional[Dict[str, Semigroup]] = None,
    tolerances: Optional[Tolerances] = None,
) -> Dict[str, Superoperator]:
    """Built-in DS+ maps: propagators at u = (1, ..., 1), averages at t = 1, two fixed maps."""
    families = families or builtin_suite()
    maps: Dict[str, Superoperator] = {
        "cyclic_shift_4": cyclic_shift(4),
        "substochastic_3": substochastic_map([[0.5, 0.25, 0.0], [0.25, 0.25, 0.25], [0.0, 0.25, 0.5]]),
    }
    for name, sg in families.items():
        maps[f"{name}:T_1"] = sg.propagator([1.0] * sg.d)
        maps[f"{name}:A_1"] = average_map_phi1(sg, 1.0)
    return {name: T for name, T in maps.items() if verify_ds_plus(T, tolerances=tolerances).verdict}


def submajorization_suite(
    seed: int,
    trials: int = 100,
    threads: int = 1,
    maps: Optional[Dict[str, Superoperator]] = None,
    descriptors: Optional[Dict[str, NormDescriptor]] = None,
    tolerances: Optional[Tolerances] = None,
) -> SuiteReport:
    """
    For certified DS+ maps T: mu(T(x)) is submajorized by mu(x), and
    ||T(x)||_E <= ||x||_E for every implemented norm.
    """
    tolerances = tolerances or TOLERANCES
    maps = maps or certified_maps(tolerances=tolerances)
    descriptors = descriptors or standard_descriptors()
    names = sorted(maps)
    tol = tolerances.ds

    def trial(i: int, rng: np.random.Generator) -> BoundCheckReport:
        rows = []
        for name in names:
            T = maps[name]
            x = random_operator(T.shape, rng)
            fx, fy = mu(x), mu(T.apply(x))
            rows.append(BoundRow({"map": name, "norm": "hardy-littlewood"},
                                 0.0 if hl_leq(fy, fx, tolerances.submajorization) else 1.0, 0.0))
            for label, descriptor in descriptors.items():
                before = descriptor.norm(fx)
                rows.append(BoundRow({"map": name, "norm": label}, descriptor.norm(fy), before * (1.0 + tol) + tol))
        return BoundCheckReport("submajorization", rows)

    return _summarize("submajorization", seed, _run_trials(trial, seed, trials, threads))


def marcinkiewicz_equivalence_ratio(phi: ConcavePhi, trials: int = 50, seed: int = 0) -> Dict[str, Any]:
    """
    Empirical range of ||x||_M_phi / ||x||_1 when phi(0+) > 0 and phi(inf) < inf.

    Then M_phi = L1 with 1/phi(inf) <= ratio <= 1/phi(0+).
    """
    if not (phi.phi_at_zero_plus > 0 and math.isfinite(phi.phi_at_infinity)):
        raise InvalidPhiError("Equivalence with L1 needs phi(0+) > 0 and phi(inf) < inf")
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(trials):
        x = random_operator(random_shape(rng), rng)
        ratios.append(marcinkiewicz_norm(x, phi) / norm_p(x, 1.0))
    lower, upper = 1.0 / phi.phi_at_infinity, 1.0 / phi.phi_at_zero_plus
    lo, hi = min(ratios), max(ratios)
    return {
        "min_ratio": lo,
        "max_ratio": hi,
        "lower_bound": lower,
        "upper_bound": upper,
        "within_bounds": lower * (1 - 1e-12) <= lo and hi <= upper * (1 + 1e-12),
    }


# ----------------------------------------------------------------------
# acceptance


def _mu_oracle(x: Operator, ts: np.ndarray) -> np.ndarray:
    """inf{lam >= 0 : tau{|x| > lam} <= t} for each t, scanning the singular values."""
    values, _ = x.weighted_singular_values()
    candidates = np.concatenate(([0.0], np.sort(values)))
    # non-increasing in the candidate; the largest singular value always qualifies
    levels = np.array([distribution(x, float(c)) for c in candidates])
    return np.array([candidates[int(np.argmax(levels <= t))] for t in ts])


def _acceptance_mu(rng: np.random.Generator) -> AcceptanceRow:
    worst = 0.0
    for _ in range(100):
        x = random_operator(random_shape(rng), rng)
        f = mu(x)
        total = x.shape.total_trace
        ts = total * 1.1 * (np.arange(1000) + 0.5) / 1000
        got = f(ts)
        expected = _mu_oracle(x, ts)
        worst = max(worst, float(np.max(np.abs(got - expected))))
    return AcceptanceRow("mu-oracle", worst <= 1e-9, f"max error {worst:.3e} over 100 operators")


def _acceptance_cross_method(rng, families, order) -> AcceptanceRow:
    worst = 0.0
    for sg in families.values():
        for t in (0.1, 1.0, 2.0):
            quad = average_map_quadrature(sg, t, order)
            exact = average_map_phi1(sg, t)
            for _ in range(50):
                x = random_operator(sg.shape, rng)
                worst = max(worst, quad.apply(x).distance(exact.apply(x)) / max(x.norm_inf, 1e-300))
    return AcceptanceRow("cross-method", worst <= 1e-8, f"max relative gap {worst:.3e} (order {order})")


def _acceptance_closed_form(order) -> AcceptanceRow:
    sg = heat_cycle(2)
    x = Operator.diagonal(sg.shape, [1.0, -1.0])
    expected = -math.expm1(-2.0) / 2.0
    phi1_factor = float(average_phi1(sg, x, 1.0).diagonal_values()[0].real)
    quad_factor = float(average_map_quadrature(sg, 1.0, order).apply(x).diagonal_values()[0].real)
    gap = max(abs(phi1_factor - expected), abs(quad_factor - expected))
    return AcceptanceRow("closed-form", gap <= 1e-10, f"factor {phi1_factor:.12f}, expected {expected:.12f}")


def _acceptance_dyadic(rng, families) -> AcceptanceRow:
    coefficient = dyadic_coefficient(0.3, 1)
    grid = [0.3 * 2.0 ** -j for j in range(7)]
    sg = families["heat_cycle_5"]
    report = check_dyadic_e8(sg, random_operator(sg.shape, rng), grid)
    ok = (abs(coefficient - 0.2) <= 1e-12 and report.passed
          and report.extra["coefficients_non_increasing"] and report.extra["coefficients"][-1] < 0.02)
    return AcceptanceRow("dyadic", ok, f"coefficient(0.3) = {coefficient:.12g}, final {report.extra['coefficients'][-1]:.6g}")


def _acceptance_convergence(rng) -> AcceptanceRow:
    sg = heat_cycle(8)
    x = random_operator(sg.shape, rng)
    grid = [2.0 ** -j for j in range(1, 11)]
    norms = [
        LpNorm(1.0), LpNorm(2.0), LpNorm(math.inf), L1PlusLinfNorm(),
        OrliczNorm(OrliczFunction.power(3.0)),
        LorentzNorm(ConcavePhi.power(0.5)), MarcinkiewiczNorm(ConcavePhi.power(0.5)),
    ]
    ratios = {n.label: mean_convergence_table(sg, x, n, grid).final_ratio for n in norms}
    worst = max(ratios.values())
    return AcceptanceRow("mean-convergence", worst <= 0.05, f"max final_ratio {worst:.3e}")


def _acceptance_identities(rng) -> AcceptanceRow:
    pairs = [
        (OrliczNorm(OrliczFunction.power(1.0)), LpNorm(1.0)),
        (OrliczNorm(OrliczFunction.power(2.0)), LpNorm(2.0)),
        (OrliczNorm(OrliczFunction.power(3.0)), LpNorm(3.0)),
        (LorentzNorm(ConcavePhi.power(1.0)), LpNorm(1.0)),
        (LorentzNorm(ConcavePhi.min_linear(1.0)), L1PlusLinfNorm()),
        (MarcinkiewiczNorm(ConcavePhi.min_linear(1.0)), L1CapLinfNorm()),
        (MarcinkiewiczNorm(ConcavePhi.power(1.0)), LpNorm(math.inf)),
    ]
    worst = 0.0
    for _ in range(50):
        x = random_operator(random_shape(rng), rng)
        for left, right in pairs:
            a, b = left.norm(x), right.norm(x)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    return AcceptanceRow("norm-identities", worst <= 1e-8, f"max relative gap {worst:.3e}")


def _acceptance_modular(rng) -> AcceptanceRow:
    worst = 0.0
    for phi in (OrliczFunction.power(3.0), OrliczFunction.exp_minus_one()):
        for _ in range(50):
            x = random_operator(random_shape(rng), rng)
            a = luxemburg_norm(x, phi)
            f = mu(x)
            worst = max(worst, abs(float(np.dot(f.lengths, phi(f.values / a))) - 1.0))
    return AcceptanceRow("luxemburg-modular", worst <= 1e-6, f"max |modular - 1| {worst:.3e}")


def _random_substochastic(n: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.uniform(0.0, 1.0, (n, n))
    return m / max(m.sum(axis=0).max(), m.sum(axis=1).max())


def _acceptance_maximal(rng, families, settings) -> AcceptanceRow:
    problems = []
    shift = cyclic_shift(4)
    x = Operator.diagonal(shift.shape, [4.0, 0.0, 0.0, 0.0])
    instances = [(shift, x, 1.0)]
    for _ in range(50):
        n = int(rng.integers(2, 11))
        T = substochastic_map(_random_substochastic(n, rng))
        x = Operator.diagonal(T.shape, rng.uniform(0.0, 2.0, n))
        instances.append((T, x, float(rng.uniform(0.5, 2.0))))
    for T, x, lam in instances:
        report = yeadon_discrete_check(T, x, lam, 50, settings)
        if not (report.projection_found and report.budget_met
                and report.achieved_constant <= 1.0 + 1e-9):
            problems.append(f"yeadon n={len(T.shape.blocks)} constant {report.achieved_constant:.4g}")

    worst_commutative = 0.0
    for name, sg in families.items():
        x = random_positive(sg.shape, rng)
        lam = 4.0 * norm_p(x, 1.0) / sg.shape.total_trace
        report = maximal_projection_search(sg, x, lam, settings=settings)
        if not report.budget_met:
            problems.append(f"{name}: budget missed")
        if is_commutative(sg):
            worst_commutative = max(worst_commutative, report.achieved_constant)
    if worst_commutative > settings.soft_constant_threshold:
        problems.append(f"commutative constant {worst_commutative:.4g}")
    detail = "; ".join(problems) if problems else f"max commutative constant {worst_commutative:.4g}"
    return AcceptanceRow("maximal", not problems, detail)


def _acceptance_product_rewriting(rng, families, order) -> AcceptanceRow:
    worst = 0.0
    for sg in (heat_cycle(4), families["tensor_product_pair"]):
        x = random_operator(sg.shape, rng)
        for n in range(1, 5):
            for m in range(1, 5):
                got = product_average_e5(sg, x, n, m, order)
                worst = max(worst, got.distance(average_phi1(sg, x, n / m)) / max(1.0, x.norm_inf))
    return AcceptanceRow("product-rewriting", worst <= 1e-8, f"max gap {worst:.3e}")


def acceptance_suite(
    seed: int,
    quadrature_order: int = DEFAULT_ORDER,
    settings: Optional[Settings] = None,
) -> List[AcceptanceRow]:
    """
    The embedded acceptance criteria, in order. A criterion that raises is a
    failed row carrying the error message.
    """
    settings = settings or Settings(seed=seed)
    families = builtin_suite()
    rngs = _trial_rngs(seed, 12)
    checks: List[Tuple[str, Callable[[], AcceptanceRow]]] = [
        ("mu-oracle", lambda: _acceptance_mu(rngs[0])),
        ("cross-method", lambda: _acceptance_cross_method(rngs[1], families, quadrature_order)),
        ("closed-form", lambda: _acceptance_closed_form(quadrature_order)),
        ("rate", lambda: _suite_row(rate_suite(seed, 500, settings.threads, families))),
        ("continuity", lambda: _suite_row(continuity_suite(seed, 500, settings.threads, families))),
        ("dyadic", lambda: _acceptance_dyadic(rngs[5], families)),
        ("mean-convergence", lambda: _acceptance_convergence(rngs[6])),
        ("submajorization", lambda: _suite_row(
            submajorization_suite(seed, 100, settings.threads, certified_maps(families, settings.tolerances),
                                  tolerances=settings.tolerances))),
        ("norm-identities", lambda: _acceptance_identities(rngs[8])),
        ("luxemburg-modular", lambda: _acceptance_modular(rngs[9])),
        ("maximal", lambda: _acceptance_maximal(rngs[10], families, settings)),
        ("product-rewriting", lambda: _acceptance_product_rewriting(rngs[11], families, quadrature_order)),
    ]
    rows = []
    for name, check in checks:
        try:
            row = check()
        except NCERGError as e:
            row = AcceptanceRow(name, False, f"{type(e).__name__}: {e}")
        logger.info("acceptance %-18s %s", name, "PASS" if row.passed else "FAIL")
        rows.append(row)
    return rows


def _suite_row(suite: SuiteReport) -> AcceptanceRow:
    return AcceptanceRow(
        suite.name, suite.passed,
        f"{suite.trials} trials, {suite.violations} violations, max excess {suite.max_excess:.3e}",
    )
