"""
Tests for the ncerg lab: convergence tables, bound checks, maximal search
and the randomized suites.
"""

import math

import numpy as np
import pytest

from ncerg.algebra import Operator, random_operator, random_positive
from ncerg.config import Settings
from ncerg.dynamics import builtin_suite, cyclic_shift, heat_cycle, scaling_map, schur, verify_ds_plus
from ncerg.exceptions import BruteForceTooLargeError, InvalidParameterError, InvalidPhiError
from ncerg.lab import (
    STRATEGIES,
    certified_maps,
    check_continuity_l333,
    check_dyadic_e8,
    check_rate_l33,
    continuity_suite,
    default_time_grid,
    dyadic_coefficient,
    dyadic_suite,
    grid_modulus,
    marcinkiewicz_equivalence_ratio,
    maximal_projection_search,
    mean_convergence_table,
    rate_constant,
    rate_suite,
    submajorization_suite,
    yeadon_discrete_check,
)
from ncerg.spaces import ConcavePhi, LpNorm, L1PlusLinfNorm, norm_p


@pytest.fixture
def families():
    return builtin_suite()


def test_rate_constant():
    assert rate_constant(1.0, 1) == pytest.approx(2.0)
    assert rate_constant(1.0, 2) == pytest.approx(6.0)
    assert rate_constant(0.5, 1) == pytest.approx(4.0)
    with pytest.raises(InvalidParameterError):
        rate_constant(0.0, 1)


def test_dyadic_coefficient():
    assert dyadic_coefficient(0.3, 1) == pytest.approx(0.2, abs=1e-12)
    assert dyadic_coefficient(0.5, 1) == pytest.approx(0.0, abs=1e-12)
    assert dyadic_coefficient(0.25, 2) == pytest.approx(0.0, abs=1e-12)
    for t in (0.0, 1.0, 1.5):
        with pytest.raises(InvalidParameterError):
            dyadic_coefficient(t, 1)


def test_mean_convergence_table():
    sg = heat_cycle(8)
    x = random_operator(sg.shape, np.random.default_rng(30))
    grid = [2.0 ** -j for j in range(1, 11)]
    report = mean_convergence_table(sg, x, LpNorm(2.0), grid)
    assert report.t_grid == grid
    assert report.monotone_tail
    assert report.final_ratio < 0.05
    assert report.rows()[0] == (grid[0], report.values[0])
    assert "norm convergence" in report.to_dict()["note"]


def test_mean_convergence_of_fixed_point_is_zero():
    sg = heat_cycle(3)
    report = mean_convergence_table(sg, Operator.identity(sg.shape), L1PlusLinfNorm(), [1.0, 0.5])
    assert max(report.values) < 1e-12


@pytest.mark.parametrize("grid", [[], [0.5, 1.0], [1.0, 0.0], [1.0, 1.0]])
def test_mean_convergence_rejects_bad_grid(grid):
    sg = heat_cycle(2)
    with pytest.raises(InvalidParameterError):
        mean_convergence_table(sg, Operator.identity(sg.shape), LpNorm(2.0), grid)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_rate_check_holds(families, p):
    sg = families["tensor_product_pair"]
    y = random_operator(sg.shape, np.random.default_rng(31))
    report = check_rate_l33(sg, y, 1.0, p, [0.5, 0.25, 0.125])
    assert report.passed
    assert report.constant == pytest.approx(6.0)
    assert sum(1 for row in report.rows if isinstance(row.param, dict)) == 3
    assert report.to_dict()["p"] == ("inf" if math.isinf(p) else p)


def test_rate_check_rejects_grid_outside_t0():
    sg = heat_cycle(2)
    with pytest.raises(InvalidParameterError):
        check_rate_l33(sg, Operator.identity(sg.shape), 1.0, 2.0, [1.5])


def test_negative_slack_makes_check_fail():
    sg = heat_cycle(3)
    y = random_operator(sg.shape, np.random.default_rng(32))
    report = check_continuity_l333(sg, y, 2.0, [(0.5, 1.0)], slack=-10.0)
    assert not report.passed
    assert report.max_excess > 0


def test_continuity_check(families):
    rng = np.random.default_rng(33)
    for sg in families.values():
        x = random_operator(sg.shape, rng)
        assert check_continuity_l333(sg, x, 1.0, [(0.1, 0.2), (0.5, 1.0), (1.0, 2.0)]).passed
    with pytest.raises(InvalidParameterError):
        check_continuity_l333(sg, x, 1.0, [(1.0, 0.5)])


def test_dyadic_check(families):
    sg = families["heat_cycle_5"]
    x = random_operator(sg.shape, np.random.default_rng(34))
    grid = [0.3 * 2.0 ** -j for j in range(7)]
    report = check_dyadic_e8(sg, x, grid)
    assert report.passed
    assert report.extra["coefficients_non_increasing"]
    assert report.extra["coefficients"][0] == pytest.approx(0.2)
    assert report.extra["coefficients"][-1] < 0.02


def test_default_time_grid():
    settings = Settings(maximal_grid_points=5, maximal_grid_range=(0.1, 10.0), large_t=1e4)
    grid = default_time_grid(settings)
    assert len(grid) == 6
    assert grid[0] == pytest.approx(0.1)
    assert grid[4] == pytest.approx(10.0)
    assert grid[-1] == 1e4


def test_grid_modulus():
    assert grid_modulus([1.0, 0.5], 1, 1.0) == pytest.approx(1.0)
    assert grid_modulus([1.0], 1, 1.0) == 0.0


def test_yeadon_on_cyclic_shift():
    T = cyclic_shift(4)
    x = Operator.diagonal(T.shape, [4.0, 0.0, 0.0, 0.0])
    report = yeadon_discrete_check(T, x, 2.0, N=50)
    assert report.strategy == "brute_force"
    assert report.trace_budget == pytest.approx(2.0)
    assert report.projection_found and report.budget_met
    assert report.achieved_constant <= 1.0
    assert report.grid_size == 50


def test_yeadon_rejects_non_ds_maps():
    T = scaling_map(cyclic_shift(2).shape, 2.0)
    x = Operator.diagonal(T.shape, [1.0, 0.0])
    with pytest.raises(InvalidParameterError):
        yeadon_discrete_check(T, x, 1.0)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_maximal_search_meets_budget(strategy):
    sg = heat_cycle(5)
    x = random_positive(sg.shape, np.random.default_rng(35))
    lam = 4.0 * float(np.sum(x.diagonal_values().real)) / sg.shape.total_trace
    report = maximal_projection_search(sg, x, lam, strategy=strategy, settings=Settings(maximal_grid_points=16))
    assert report.budget_met
    assert report.strategy == strategy
    assert report.grid_modulus is not None and report.grid_modulus >= 0


def test_brute_force_is_optimal_among_diagonal_projections():
    sg = heat_cycle(6)
    x = random_positive(sg.shape, np.random.default_rng(36))
    grid = [0.1, 1.0, 10.0]
    brute = maximal_projection_search(sg, x, 1.0, grid, "brute_force")
    cheb = maximal_projection_search(sg, x, 1.0, grid, "chebyshev")
    assert brute.achieved_sup <= cheb.achieved_sup + 1e-12


def test_brute_force_needs_diagonal_algebra():
    sg = schur([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(BruteForceTooLargeError):
        maximal_projection_search(sg, Operator.identity(sg.shape), 1.0, [1.0], "brute_force")


def test_maximal_search_input_checks():
    sg = heat_cycle(2)
    with pytest.raises(InvalidParameterError):
        maximal_projection_search(sg, Operator.diagonal(sg.shape, [1.0, -1.0]), 1.0, [1.0])
    with pytest.raises(InvalidParameterError):
        maximal_projection_search(sg, Operator.identity(sg.shape), 0.0, [1.0])
    with pytest.raises(InvalidParameterError):
        maximal_projection_search(sg, Operator.identity(sg.shape), 1.0, [1.0], "annealing")


def test_suites_pass_and_are_reproducible(families):
    first = rate_suite(7, trials=12, families=families)
    second = rate_suite(7, trials=12, threads=3, families=families)
    assert first.passed and first.trials == 12
    assert first.max_excess == second.max_excess
    assert continuity_suite(7, trials=12, families=families).passed
    assert dyadic_suite(7, trials=8, families=families).passed


def test_certified_maps_and_submajorization(families):
    maps = certified_maps(families)
    assert "cyclic_shift_4" in maps
    assert all(verify_ds_plus(T).verdict for T in maps.values())
    suite = submajorization_suite(3, trials=2, maps={k: maps[k] for k in sorted(maps)[:4]})
    assert suite.passed


def test_marcinkiewicz_equivalence_ratio():
    phi = ConcavePhi.piecewise_linear([[1.0, 2.0]], zero_plus=1.0)
    result = marcinkiewicz_equivalence_ratio(phi, trials=20, seed=1)
    assert result["lower_bound"] == pytest.approx(0.5)
    assert result["upper_bound"] == pytest.approx(1.0)
    assert result["within_bounds"]
    with pytest.raises(InvalidPhiError):
        marcinkiewicz_equivalence_ratio(ConcavePhi.power(0.5))


@pytest.mark.parametrize("name", ["heat_cycle_5", "schur_abs_3", "tensor_product_pair"])
@pytest.mark.parametrize("c", [0.25, 3.0, 40.0])
def test_chebyshev_search_is_scale_equivariant(families, name, c):
    sg = families[name]
    x = random_positive(sg.shape, np.random.default_rng(44))
    lam = 2.0 * norm_p(x, 1.0) / sg.shape.total_trace
    settings = Settings(maximal_grid_points=8)
    base = maximal_projection_search(sg, x, lam, strategy="chebyshev", settings=settings)
    scaled = maximal_projection_search(sg, x * c, lam * c, strategy="chebyshev", settings=settings)
    assert scaled.trace_budget == pytest.approx(base.trace_budget, rel=1e-12)
    assert scaled.tau_e_perp == pytest.approx(base.tau_e_perp, abs=1e-12)
    assert scaled.achieved_sup == pytest.approx(c * base.achieved_sup, rel=1e-9)
    assert scaled.achieved_constant == pytest.approx(base.achieved_constant, rel=1e-9)
