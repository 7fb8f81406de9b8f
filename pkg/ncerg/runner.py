"""
ncerg Runner
Scenario dispatch and the embedded self-test.

Exit codes: 0 success, 1 validation error, 2 a bound check or acceptance
criterion failed.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from ncerg.algebra import AlgebraShape, Operator
from ncerg.averaging import AveragingMethod, average, quadrature_error_estimate
from ncerg.config import Settings, load_settings
from ncerg.dynamics import Semigroup, Superoperator, make_family, map_from_spec, verify_ds_plus
from ncerg.exceptions import ExperimentError, NCERGError, ShapeMismatchError
from ncerg.experiments import BOUND_CHECKS
from ncerg.lab import (
    AcceptanceRow,
    BoundCheckReport,
    acceptance_suite,
    check_continuity_l333,
    check_dyadic_e8,
    check_rate_l33,
    maximal_projection_search,
    mean_convergence_table,
    yeadon_discrete_check,
)
from ncerg.literals import operator_to_literal
from ncerg.rearrangement import mu
from ncerg.reports import Report, acceptance_table, write_csv
from ncerg.scenario import Scenario, build_element
from ncerg.spaces import LpNorm, descriptor_from_spec, standard_descriptors

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BOUND_FAILURE = 2

DEFAULT_CONVERGENCE_GRID = [2.0 ** -k for k in range(1, 11)]
DEFAULT_DYADIC_GRID = [0.3 * 2.0 ** -j for j in range(7)]
DEFAULT_CONTINUITY_PAIRS = [(0.1, 0.2), (0.5, 1.0), (1.0, 2.0)]

Table = Tuple[Sequence[str], List[Sequence[Any]]]


@dataclass
class RunResult:
    exit_code: int
    report: Optional[Report] = None
    paths: List[Path] = field(default_factory=list)
    error: Optional[str] = None
    rows: List[AcceptanceRow] = field(default_factory=list)


@dataclass
class Outcome:
    result: Dict[str, Any]
    table: Optional[Table] = None
    passed: bool = True


@dataclass
class Inputs:
    """Objects a scenario refers to, built once before dispatch."""

    params: Dict[str, Any]
    seed: int
    settings: Settings
    shape: Optional[AlgebraShape] = None
    semigroup: Optional[Semigroup] = None
    map: Optional[Superoperator] = None
    element: Optional[Operator] = None

    def require(self, name: str) -> Any:
        value = getattr(self, name)
        if value is None:
            raise ExperimentError(f"Experiment needs a '{name}'")
        return value


def build_inputs(scenario: Scenario, seed: int, settings: Settings) -> Inputs:
    inputs = Inputs(dict(scenario.params), seed, settings)
    if scenario.semigroup is not None:
        inputs.semigroup = make_family(scenario.semigroup)
    if scenario.map is not None:
        inputs.map = map_from_spec(scenario.map)
    shapes = [s.shape for s in (inputs.semigroup, inputs.map) if s is not None]
    if scenario.algebra is not None:
        shapes.append(AlgebraShape.from_spec(scenario.algebra))
    if any(s != shapes[0] for s in shapes[1:]):
        raise ShapeMismatchError(f"Scenario algebras disagree: {[s.to_list() for s in shapes]}")
    inputs.shape = shapes[0] if shapes else None
    if scenario.element is not None:
        inputs.element = build_element(scenario.element, inputs.shape, seed)
        if inputs.shape is not None and inputs.element.shape != inputs.shape:
            raise ShapeMismatchError(f"Element lives on {inputs.element.shape}, expected {inputs.shape}")
    return inputs


def _p(value: Any) -> float:
    if isinstance(value, str) and value.lower() in ("inf", "infinity"):
        return math.inf
    return float(value)


# ----------------------------------------------------------------------
# experiments


def _run_mu(inputs: Inputs) -> Outcome:
    m = mu(inputs.require("element"))
    result: Dict[str, Any] = {
        "mu": m.to_list(),
        "integral": m.integral(),
        "sup": m.sup,
        "support": m.support,
    }
    if "t" in inputs.params:
        ts = inputs.params["t"]
        ts = ts if isinstance(ts, list) else [ts]
        result["samples"] = [[float(t), float(m(float(t)))] for t in ts]
    return Outcome(result, (("end", "value"), [list(k) for k in m.knots]))


def _run_norm(inputs: Inputs) -> Outcome:
    x = inputs.require("element")
    params = inputs.params
    if "norms" in params:
        descriptors = [descriptor_from_spec(s) for s in params["norms"]]
    elif "norm" in params:
        descriptors = [descriptor_from_spec(params["norm"])]
    else:
        descriptors = list(standard_descriptors().values())
    values = {d.label: d.norm(x) for d in descriptors}
    traits = {d.label: d.traits().to_dict() for d in descriptors}
    return Outcome({"norms": values, "traits": traits}, (("norm", "value"), list(values.items())))


def _run_ds_verify(inputs: Inputs) -> Outcome:
    T = inputs.require("map")
    certificate = verify_ds_plus(T, tol=inputs.params.get("tol"), seed=inputs.seed,
                                 tolerances=inputs.settings.tolerances)
    logger.info("ds-verify: %s", certificate)
    return Outcome({"algebra": T.shape.to_list(), **certificate.to_dict()})


def _run_average(inputs: Inputs) -> Outcome:
    sg, x = inputs.require("semigroup"), inputs.require("element")
    t = float(inputs.params.get("t", 1.0))
    method = AveragingMethod.from_spec({
        "method": inputs.params.get("method", "phi1"),
        "order": inputs.params.get("order", inputs.settings.quadrature_order),
        "factorized": inputs.params.get("factorized", True),
    })
    y = average(sg, x, t, method)
    result = {"t": t, "method": method.to_dict(), "average": operator_to_literal(y), "norm_inf": y.norm_inf}
    if inputs.params.get("error_estimate") and method.kind == "quadrature":
        result["error_estimate"] = quadrature_error_estimate(sg, x, t, method.order)
    return Outcome(result)


def _run_converge(inputs: Inputs) -> Outcome:
    sg, x = inputs.require("semigroup"), inputs.require("element")
    descriptor = descriptor_from_spec(inputs.params["norm"]) if "norm" in inputs.params else LpNorm(2.0)
    report = mean_convergence_table(sg, x, descriptor, inputs.params.get("t_grid", DEFAULT_CONVERGENCE_GRID))
    return Outcome(report.to_dict(), (("t", "norm_value"), report.rows()))


def _run_maximal(inputs: Inputs) -> Outcome:
    x = inputs.require("element")
    params = inputs.params
    if "lambda" not in params:
        raise ExperimentError("maximal needs param 'lambda'")
    lam = float(params["lambda"])
    if params.get("discrete", False):
        report = yeadon_discrete_check(inputs.require("map"), x, lam, params.get("N", 50), inputs.settings)
    else:
        report = maximal_projection_search(
            inputs.require("semigroup"), x, lam,
            t_grid=params.get("t_grid"),
            strategy=params.get("strategy", "chebyshev"),
            target_constant=float(params.get("target_constant", 1.0)),
            settings=inputs.settings,
        )
    return Outcome({**report.to_dict(), "budget_met": report.budget_met})


def _bound_checks(inputs: Inputs) -> List[BoundCheckReport]:
    sg, x = inputs.require("semigroup"), inputs.require("element")
    params = inputs.params
    check = params.get("check", "all")
    names = BOUND_CHECKS if check == "all" else (check,)
    if any(n not in BOUND_CHECKS for n in names):
        raise ExperimentError(f"Unknown bound check {check!r}. Known: {list(BOUND_CHECKS)} or 'all'")
    slack = float(params.get("slack", inputs.settings.tolerances.bound_slack))
    p = _p(params.get("p", 2.0))
    reports = []
    for name in names:
        if name == "rate":
            t0 = float(params.get("t0", 1.0))
            grid = params.get("t_grid", [t0 * 2.0 ** -k for k in range(1, 7)])
            reports.append(check_rate_l33(sg, x, t0, p, grid, params.get("v_samples"), slack))
        elif name == "continuity":
            pairs = params.get("pairs", DEFAULT_CONTINUITY_PAIRS)
            reports.append(check_continuity_l333(sg, x, p, pairs, slack))
        else:
            reports.append(check_dyadic_e8(sg, x, params.get("t_grid", DEFAULT_DYADIC_GRID), slack))
    return reports


def _run_bounds(inputs: Inputs) -> Outcome:
    reports = _bound_checks(inputs)
    passed = all(r.passed for r in reports)
    rows = [
        (r.name, str(row.param), row.lhs, row.rhs, row.holds)
        for r in reports for row in r.rows
    ]
    for r in reports:
        if not r.passed:
            logger.warning("bound check %s failed: max excess %.3e", r.name, r.max_excess)
    return Outcome(
        {"passed": passed, "checks": [r.to_dict() for r in reports]},
        (("check", "param", "lhs", "rhs", "holds"), rows),
        passed,
    )


RUNNERS: Dict[str, Callable[[Inputs], Outcome]] = {
    "mu": _run_mu,
    "norm": _run_norm,
    "ds-verify": _run_ds_verify,
    "average": _run_average,
    "converge": _run_converge,
    "maximal": _run_maximal,
    "bounds": _run_bounds,
}


def dispatch(scenario: Scenario, seed: int, settings: Settings) -> Outcome:
    runner = RUNNERS.get(scenario.experiment)
    if runner is None:
        raise ExperimentError(f"No runner for experiment '{scenario.experiment}'")
    logger.info("running %s (seed %d)", scenario.experiment, seed)
    return runner(build_inputs(scenario, seed, settings))


# ----------------------------------------------------------------------
# entry points


def run_scenario(
    path: Union[str, Path],
    out_dir: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> RunResult:
    """
    Run one scenario file and write its report.

    The report goes to OUT/NAME.json, with OUT from out_dir, then the
    scenario's output.dir, then the scenario's own directory, and NAME from
    output.name or STEM.report for a scenario file STEM.json. Experiments
    with a table also write NAME.csv unless output.csv is false.

    Returns:
        RunResult with exit code 0, 1 (validation error) or 2 (bound failure)
    """
    settings = settings or load_settings()
    path = Path(path)
    try:
        scenario = Scenario.load(path)
        run_seed = scenario.resolve_seed(seed, settings.seed)
        outcome = dispatch(scenario, run_seed, settings.with_overrides(seed=run_seed))
    except (NCERGError, ValueError, KeyError, TypeError) as e:
        message = str(e) if isinstance(e, NCERGError) else f"{type(e).__name__}: {e}"
        logger.error("scenario %s failed validation: %s", path, message)
        return RunResult(EXIT_VALIDATION, error=message)

    report = Report(scenario.experiment, outcome.result, run_seed, scenario.hash, settings.tolerances)
    target = Path(out_dir) if out_dir is not None else Path(scenario.output.get("dir", path.parent))
    name = scenario.output.get("name", f"{path.stem}.report")
    paths = [report.write(target / f"{name}.json")]
    if outcome.table is not None and scenario.output.get("csv", True):
        header, rows = outcome.table
        paths.append(write_csv(target / f"{name}.csv", header, rows))
    code = EXIT_OK if outcome.passed else EXIT_BOUND_FAILURE
    return RunResult(code, report, paths)


def selftest(
    seed: Optional[int] = None,
    out_dir: Optional[Union[str, Path]] = None,
    quadrature_order: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> RunResult:
    """
    Run the embedded acceptance suite; writes OUT/selftest.json when out_dir is given.

    Returns:
        RunResult with exit code 0 when every criterion passes, 2 otherwise
    """
    settings = settings or load_settings()
    seed = settings.seed if seed is None else int(seed)
    order = settings.quadrature_order if quadrature_order is None else quadrature_order
    settings = settings.with_overrides(seed=seed)
    rows = acceptance_suite(seed, order, settings)
    body = {**acceptance_table(rows), "quadrature_order": order}
    report = Report("selftest", body, seed, None, settings.tolerances)
    paths = [report.write(Path(out_dir) / "selftest.json")] if out_dir is not None else []
    code = EXIT_OK if body["passed"] else EXIT_BOUND_FAILURE
    return RunResult(code, report, paths, rows=rows)
