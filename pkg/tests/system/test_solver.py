from dataclasses import replace

import numpy as np
import pytest

from dispatchcalc.const import Binding
from dispatchcalc.errors import InfeasibleDemandError
from dispatchcalc.evolution.repair import random_feasible_dispatch
from dispatchcalc.system.cost import total_cost, violations
from dispatchcalc.system.solver import kkt_residuals, solve_ed

from ..common import BUNDLED_CONSTANTS, PROMPT_EXAMPLES, create_system, prompt_dispatch


def test_minimum_demand_puts_every_unit_at_minimum(system):
    solution = solve_ed(system, 652)

    assert solution.dispatch.pg == tuple(system.p_min)
    assert set(solution.binding) == {Binding.MIN}


def test_maximum_demand_puts_every_unit_at_maximum(system):
    solution = solve_ed(system, 6515)

    assert solution.dispatch.pg == tuple(system.p_max)
    assert set(solution.binding) == {Binding.MAX}


def test_demand_below_minimum(system):
    with pytest.raises(InfeasibleDemandError) as excinfo:
        solve_ed(system, 651)

    assert excinfo.value.bound_name == "pd_min"
    assert excinfo.value.bound == 652
    assert "pd_min = 652" in str(excinfo.value)


def test_demand_above_maximum(system):
    with pytest.raises(InfeasibleDemandError) as excinfo:
        solve_ed(system, 6516)

    assert excinfo.value.bound_name == "pd_max"
    assert excinfo.value.bound == 6515


def test_cheapest_unit_takes_the_slack(system):
    solution = solve_ed(system, 700)

    assert solution.dispatch.as_array() == pytest.approx(
        prompt_dispatch(700.0).as_array(), abs=1e-5
    )
    assert solution.cost == pytest.approx(18077.53, abs=0.5)
    assert solution.marginal_price == pytest.approx(12.61 + 2 * 0.002 * 108, abs=1e-6)


@pytest.mark.parametrize("pd", sorted(PROMPT_EXAMPLES))
def test_optimal_costs_match_printed_costs(system, pd):
    solution = solve_ed(system, pd)

    assert solution.cost == pytest.approx(PROMPT_EXAMPLES[pd][0], rel=5e-4)
    assert solution.cost <= PROMPT_EXAMPLES[pd][0] + 0.02
    assert abs(solution.dispatch.total - pd) <= 1e-6


def test_constants_do_not_move_the_optimum(system):
    without = solve_ed(system, 3747)
    with_constants = solve_ed(system, 3747, include_constants=True)

    assert with_constants.dispatch == without.dispatch
    assert with_constants.cost - without.cost == pytest.approx(BUNDLED_CONSTANTS, abs=1e-6)
    assert with_constants.include_constants


def test_solver_is_deterministic(system):
    assert solve_ed(system, 4398) == solve_ed(system, 4398)


def test_sweep_satisfies_optimality_conditions(system):
    rng = np.random.default_rng(1234)
    previous = None
    for pd in np.linspace(system.pd_min, system.pd_max, 50):
        solution = solve_ed(system, float(pd))

        residuals = kkt_residuals(solution, system)
        assert residuals.is_satisfied(), (pd, residuals)
        assert violations(solution.dispatch, system).gen_violation == 0

        if previous is not None:
            assert solution.cost >= previous.cost
            assert solution.marginal_price >= previous.marginal_price
        previous = solution

        for _ in range(1000):
            candidate = random_feasible_dispatch(system, float(pd), rng)
            assert total_cost(candidate, system) >= solution.cost - 1e-6


def test_flat_units_share_the_residual_by_headroom():
    system = create_system(
        (1, 0, 100, 0, 10, 0),
        (2, 0, 50, 0, 10, 0),
        (3, 0, 100, 0.01, 20, 0),
    )

    solution = solve_ed(system, 60)

    assert solution.dispatch.as_array() == pytest.approx([40, 20, 0], abs=1e-6)
    assert solution.marginal_price == 10
    assert kkt_residuals(solution, system).is_satisfied()


def test_flat_unit_at_maximum_with_interior_quadratic_unit():
    system = create_system((1, 0, 100, 0, 10, 0), (2, 0, 100, 0.01, 20, 0))

    solution = solve_ed(system, 150)

    assert solution.dispatch.as_array() == pytest.approx([100, 50], abs=1e-5)
    assert solution.marginal_price == pytest.approx(21, abs=1e-5)
    assert solution.binding == (Binding.MAX, Binding.INTERIOR)


def test_kkt_residuals_flag_a_suboptimal_dispatch(system):
    solution = solve_ed(system, 2150)
    perturbed = replace(solution, marginal_price=solution.marginal_price + 5)

    assert not kkt_residuals(perturbed, system).is_satisfied()


@pytest.mark.parametrize("pd", sorted(PROMPT_EXAMPLES))
def test_printed_dispatches_never_beat_the_solver(system, pd):
    printed = prompt_dispatch(pd)
    solution = solve_ed(system, pd)

    assert violations(printed, system).balance_violation <= 1e-9
    assert total_cost(printed, system) >= solution.cost - 1e-6


@pytest.mark.parametrize("pd", [700, 1257, 2150, 3747, 5050, 6122, 6500])
def test_solution_balances_to_rounding_error(system, pd):
    solution = solve_ed(system, pd)

    assert abs(solution.dispatch.total - pd) <= 1e-9
    assert kkt_residuals(solution, system).is_satisfied()


def test_nearly_flat_unit_takes_the_residual():
    system = create_system((1, 0, 100, 1e-12, 10, 0), (2, 0, 100, 0.01, 20, 0))

    solution = solve_ed(system, 50)

    assert solution.dispatch.as_array() == pytest.approx([50, 0], abs=1e-9)
    assert solution.marginal_price == pytest.approx(10, abs=1e-6)
    assert solution.binding == (Binding.INTERIOR, Binding.MIN)
    assert kkt_residuals(solution, system).is_satisfied()
