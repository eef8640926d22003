import numpy as np
import pytest

from dispatchcalc.errors import DimensionError, InfeasibleDemandError
from dispatchcalc.evolution.repair import random_feasible_dispatch, repair_balance
from dispatchcalc.system.cost import violations
from dispatchcalc.system.model import Dispatch

from ..common import create_system, prompt_dispatch


def test_balanced_dispatch_is_returned_unchanged(system):
    dispatch = prompt_dispatch(2150.0)

    assert repair_balance(dispatch, system) is dispatch


def test_deficit_is_spread_by_headroom(system):
    repaired = repair_balance(system.min_dispatch(700.0), system)

    share = 48 / (system.pd_max - system.pd_min)
    expected = system.p_min + share * (system.p_max - system.p_min)
    assert repaired.as_array() == pytest.approx(expected, abs=1e-9)
    assert violations(repaired, system).balance_violation <= 1e-9
    assert violations(repaired, system).gen_violation == 0


def test_surplus_is_taken_from_room_above_minimum(system):
    repaired = repair_balance(system.max_dispatch(6000.0), system)

    result = violations(repaired, system)
    assert result.balance_violation <= 1e-9
    assert result.gen_violation == 0
    assert np.all(repaired.as_array() <= system.p_max)


def test_out_of_box_entries_are_clamped_first():
    system = create_system((1, 10, 100, 0.01, 20, 0), (2, 0, 50, 0.02, 25, 0))

    repaired = repair_balance(Dispatch((0.0, 80.0), 60.0), system)

    assert repaired.pg == pytest.approx((10.0, 50.0), abs=1e-9)


def test_repair_reaches_the_bounds_of_a_saturated_system():
    system = create_system((1, 0, 100, 0.01, 20, 0), (2, 0, 50, 0.02, 25, 0))

    repaired = repair_balance(Dispatch((10.0, 10.0), 150.0), system)

    assert repaired.pg == (100.0, 50.0)


def test_repair_rejects_infeasible_demand(system):
    with pytest.raises(InfeasibleDemandError):
        repair_balance(system.min_dispatch(100.0), system)


def test_repair_rejects_wrong_dimension(system):
    with pytest.raises(DimensionError):
        repair_balance(Dispatch((1.0, 2.0), 3.0), system)


@pytest.mark.parametrize("pd", [652.0, 727.0, 3747.0, 6122.0, 6515.0])
def test_random_feasible_dispatch(system, pd):
    rng = np.random.default_rng(7)

    for _ in range(20):
        dispatch = random_feasible_dispatch(system, pd, rng)
        result = violations(dispatch, system)

        assert dispatch.pd == pd
        assert result.gen_violation == 0
        assert result.balance_violation <= 1e-9


def test_random_feasible_dispatch_is_seeded(system):
    first = random_feasible_dispatch(system, 3227.0, np.random.default_rng(3))
    second = random_feasible_dispatch(system, 3227.0, np.random.default_rng(3))

    assert first == second
