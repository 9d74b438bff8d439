import csv
import math

import numpy as np
import pytest

from impulse_qvi.payoff import evaluate_payoff, truncation_horizon
from impulse_qvi.problem import (
    Box,
    ClippedLinearGain,
    ConstantDrift,
    ConstantGain,
    FixedPlusProportionalCost,
    GameProblem,
    SaturatedAffineDrift,
    ZeroDrift,
)
from impulse_qvi.trajectory import ImpulseControl, gronwall_check, integrate_drift, simulate


def problem_1d(drift=None, gain=None, lam=1.0, c=0.3, chi=0.5, U=(1.0,), V=(-1.0, 1.0), box=(-5.0, 5.0)):
    return GameProblem(
        drift=drift or ZeroDrift(1), gain=gain or ConstantGain(0.0), discount=lam,
        max_actions=list(U), min_actions=list(V),
        max_cost=FixedPlusProportionalCost(c), min_cost=FixedPlusProportionalCost(chi),
        domain=Box([box[0]], [box[1]]),
    )


DECAY = SaturatedAffineDrift([[-1.0]], [0.0], 5.0)
GROWTH = SaturatedAffineDrift([[1.0]], [0.0], 5.0)
NONE = ImpulseControl.empty(1)


def test_integrate_zero_field():
    assert integrate_drift(problem_1d(), [0.7], 1.0, 0.1)[0] == 0.7


def test_integrate_decay_matches_exponential():
    y = integrate_drift(problem_1d(drift=DECAY), [1.0], 1.0, 1e-2)
    assert y[0] == pytest.approx(math.exp(-1.0), abs=1e-6)


def test_integrate_constant_field_2d():
    p = GameProblem(
        drift=ConstantDrift([1.0, 0.0]), gain=ConstantGain(0.0), discount=1.0,
        max_actions=[[1.0, 0.0]], min_actions=[[0.0, 1.0]],
        max_cost=FixedPlusProportionalCost(1.0), min_cost=FixedPlusProportionalCost(1.0),
    )
    np.testing.assert_allclose(integrate_drift(p, [0.0, 0.0], 0.5, 0.1), [0.5, 0.0], atol=1e-14)


def test_integrate_errors():
    p = problem_1d()
    with pytest.raises(ValueError):
        integrate_drift(p, [0.0], 0.0, 0.1)
    with pytest.raises(ValueError):
        integrate_drift(p, [0.0], 1.0, -0.1)
    with pytest.raises(ValueError):
        integrate_drift(p, [0.0], 0.1, 0.2)


def test_rk4_convergence_order():
    p = problem_1d(drift=DECAY)
    exact = 2.0 * math.exp(-2.0)
    errs = [abs(integrate_drift(p, [2.0], 2.0, h)[0] - exact) for h in (0.2, 0.1, 0.05)]
    # fourth order: halving the step divides the error by about 16
    for a, b in zip(errs, errs[1:]):
        assert 12 < a / b < 20


def test_single_jump():
    traj = simulate(problem_1d(), [0.0], ImpulseControl([0.5], [1.0]), NONE, 1.0, 0.1)
    before = traj.times < 0.5 - 1e-12
    assert np.all(traj.states[before, 0] == 0.0)
    assert np.all(traj.states[~before, 0] == 1.0)
    (rec,) = traj.jumps
    assert rec.player == "xi" and not rec.suppressed
    assert rec.pre_state[0] == 0.0 and rec.post_state[0] == 1.0


def test_simultaneous_jumps_only_eta_applies():
    traj = simulate(problem_1d(), [0.0], ImpulseControl([0.5], [1.0]), ImpulseControl([0.5], [-1.0]), 1.0, 0.1)
    assert traj.states[-1, 0] == -1.0
    xi = [r for r in traj.jumps if r.player == "xi"]
    eta = [r for r in traj.jumps if r.player == "eta"]
    assert xi[0].suppressed and not eta[0].suppressed


def test_decay_then_jump():
    p = problem_1d(drift=DECAY, V=(1.0,))
    ln2 = math.log(2.0)
    traj = simulate(p, [1.0], NONE, ImpulseControl([ln2], [1.0]), 2 * ln2, ln2 / 100)
    (rec,) = traj.jumps
    assert rec.pre_state[0] == pytest.approx(0.5, abs=1e-9)
    assert rec.post_state[0] == pytest.approx(1.5, abs=1e-9)
    assert traj.states[-1, 0] == pytest.approx(0.75, abs=1e-9)


def test_empty_controls_match_integrate_drift():
    p = problem_1d(drift=DECAY)
    traj = simulate(p, [1.3], NONE, NONE, 2.0, 0.05)
    assert traj.states[-1, 0] == integrate_drift(p, [1.3], 2.0, 0.05)[0]


def test_jump_time_snapping_ties_to_earlier_node():
    traj = simulate(problem_1d(), [0.0], ImpulseControl([0.25], [1.0]), NONE, 1.0, 0.5)
    assert traj.jumps[0].node_time == 0.0


def test_simulate_errors():
    p = problem_1d()
    with pytest.raises(ValueError):
        simulate(p, [0.0], ImpulseControl([0.5], [2.0]), NONE, 1.0, 0.1)
    with pytest.raises(ValueError):
        ImpulseControl([0.5, 0.2], [1.0, 1.0])
    with pytest.raises(ValueError):
        ImpulseControl([0.5, 0.5], [1.0, 1.0])


def test_trajectory_csv(tmp_path):
    traj = simulate(problem_1d(), [0.0], ImpulseControl([0.5], [1.0]), ImpulseControl([0.5], [-1.0]), 1.0, 0.25)
    path = tmp_path / "traj.csv"
    traj.write_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "x_1", "jump_player", "jump_suppressed"]
    assert rows[3] == ["0.5", "-1.0", "eta", "1"]


def test_gronwall_examples():
    p = problem_1d(drift=DECAY, box=(-2.0, 2.0))
    assert gronwall_check(p, [0.3], [0.3], 3.0, 0.01, 0.05)
    assert gronwall_check(p, [1.0], [0.5], 3.0, 0.01, 0.05)
    q = problem_1d(drift=GROWTH, box=(-1.0, 1.0))
    assert gronwall_check(q, [0.1], [0.0], 3.0, 0.01, 0.05)


def test_gronwall_detects_an_underestimated_rate():
    q = problem_1d(drift=GROWTH, box=(-1.0, 1.0))
    assert not gronwall_check(q, [0.1], [0.0], 3.0, 0.01, 0.05, lipschitz_b=0.5)


# ---------------------------------------------------------------- payoff


def test_constant_running_gain():
    p = problem_1d(gain=ConstantGain(1.0))
    traj = simulate(p, [0.0], NONE, NONE, 20.0, 0.01)
    pay = evaluate_payoff(p, traj, NONE, NONE)
    assert pay.running_gain_integral == pytest.approx(1 - math.exp(-20.0), abs=1e-4)
    assert pay.xi_cost_total == 0 and pay.eta_cost_total == 0
    assert pay.truncation_bound == pytest.approx(math.exp(-20.0))


def test_discounted_costs():
    p = problem_1d()
    u = ImpulseControl([0.0], [1.0])
    v = ImpulseControl([math.log(2.0)], [-1.0])
    pay = evaluate_payoff(p, simulate(p, [0.0], u, v, 1.0, 0.01), u, v)
    assert pay.total == pytest.approx(-0.05, abs=1e-12)


def test_suppressed_xi_cost():
    p = problem_1d()
    u = ImpulseControl([0.0], [1.0])
    v = ImpulseControl([0.0], [-1.0])
    pay = evaluate_payoff(p, simulate(p, [0.0], u, v, 1.0, 0.01), u, v)
    assert pay.xi_cost_total == 0.0
    assert pay.total == pytest.approx(0.5)


def test_payoff_rejects_foreign_controls():
    p = problem_1d()
    u = ImpulseControl([0.2], [1.0])
    traj = simulate(p, [0.0], u, NONE, 1.0, 0.1)
    with pytest.raises(ValueError):
        evaluate_payoff(p, traj, NONE, NONE)


def test_jump_split_quadrature_is_exact_for_piecewise_constant_state():
    # f(y) = y, state 0 then 1 after t=1: integral = exp(-1) - exp(-3) up to trapezoid error on exp
    p = problem_1d(gain=ClippedLinearGain([1.0], 0.0, -5.0, 5.0))
    u = ImpulseControl([1.0], [1.0])
    traj = simulate(p, [0.0], u, NONE, 3.0, 1e-3)
    pay = evaluate_payoff(p, traj, u, NONE)
    assert pay.running_gain_integral == pytest.approx(math.exp(-1) - math.exp(-3), abs=1e-7)


def test_payoff_additivity_at_a_jump_free_node():
    p = problem_1d(drift=DECAY, gain=ClippedLinearGain([1.0], 0.5, -5.0, 5.0), U=(1.0,), V=(-1.0,))
    u = ImpulseControl([0.3, 2.2], [1.0, 1.0])
    v = ImpulseControl([1.7], [-1.0])
    full = evaluate_payoff(p, simulate(p, [0.4], u, v, 3.0, 0.01), u, v)

    split = 1.0
    head_u = ImpulseControl([0.3], [1.0])
    head = simulate(p, [0.4], head_u, NONE, split, 0.01)
    head_pay = evaluate_payoff(p, head, head_u, NONE)
    tail_u = ImpulseControl([1.2], [1.0])
    tail_v = ImpulseControl([0.7], [-1.0])
    tail_pay = evaluate_payoff(p, simulate(p, head.states[-1], tail_u, tail_v, 2.0, 0.01), tail_u, tail_v)
    recombined = head_pay.total + math.exp(-split) * tail_pay.total
    assert full.total == pytest.approx(recombined, abs=1e-10)


def test_removing_a_xi_jump():
    p = problem_1d(drift=DECAY, gain=ClippedLinearGain([1.0], 0.0, -5.0, 5.0))
    u = ImpulseControl([0.4], [1.0])
    with_jump = evaluate_payoff(p, simulate(p, [0.0], u, NONE, 2.0, 0.01), u, NONE)
    without = evaluate_payoff(p, simulate(p, [0.0], NONE, NONE, 2.0, 0.01), NONE, NONE)
    delta_running = with_jump.running_gain_integral - without.running_gain_integral
    assert without.total - with_jump.total == pytest.approx(0.3 * math.exp(-0.4) - delta_running, abs=1e-14)


@pytest.mark.parametrize(
    "bound_f, lam, eps, expected",
    [
        (1.0, 1.0, math.exp(-5.0), 5.0),
        (0.0, 1.0, 1e-3, 0.0),
        (2.0, 0.5, 1e-3, 2.0 * math.log(4000.0)),
    ],
)
def test_truncation_horizon(bound_f, lam, eps, expected):
    p = problem_1d(lam=lam)
    assert truncation_horizon(p, eps, bound_f=bound_f) == pytest.approx(expected, rel=1e-12)


def test_truncation_horizon_sampled_bound():
    p = problem_1d(gain=ConstantGain(2.0), lam=0.5)
    assert truncation_horizon(p, 1e-3) == pytest.approx(2.0 * math.log(4000.0))
