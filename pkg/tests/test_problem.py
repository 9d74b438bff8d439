import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from impulse_qvi.problem import (
    Box,
    ClippedLinearGain,
    ConstantGain,
    FixedPlusProportionalCost,
    GameProblem,
    PeakGain,
    ProportionalCost,
    SaturatedAffineDrift,
    ZeroDrift,
    sample_points,
    validate,
    validate_h1,
    validate_h2,
    value_bound,
)


def make(U=(-1.0, 1.0), V=(-0.5, 0.5), c=None, chi=None, gain=None, drift=None, lam=1.0, box=(-1.0, 1.0)):
    return GameProblem(
        drift=drift or ZeroDrift(1),
        gain=gain or ConstantGain(1.0),
        discount=lam,
        max_actions=list(U),
        min_actions=list(V),
        max_cost=c or ProportionalCost(1.0),
        min_cost=chi or FixedPlusProportionalCost(0.5, 0.5),
        domain=Box([box[0]], [box[1]]),
    )


def test_zero_lower_bound_and_vacuous_subadditivity():
    rep = validate_h1(make(U=(-1.0, 1.0), c=ProportionalCost(1.0)))
    assert rep.zero_lower_bound_ok
    # -1 + 1 = 0 is not an action, 1 + 1 = 2 is not either
    assert rep.subadditivity_c_ok
    assert not rep.violations


def test_strict_subadditivity_of_fixed_plus_proportional():
    rep = validate_h1(make(V=(-0.5, 0.5, 1.0), chi=FixedPlusProportionalCost(0.5, 0.5)))
    assert rep.strict_subadditivity_chi_ok


def test_quadratic_cost_breaks_subadditivity():
    rep = validate_h1(make(U=(1.0, 2.0), c=lambda a: float(a[0] ** 2)))
    assert rep.subadditivity_c_ok is False
    names = [v[0] for v in rep.violations]
    assert "subadditivity_c" in names
    witness = rep.violations[names.index("subadditivity_c")][1]
    assert witness == ([1.0], [1.0])
    assert not rep.ok


def test_zero_cost_is_reported_with_witness():
    rep = validate_h1(make(c=lambda a: 0.0))
    assert rep.zero_lower_bound_ok is False
    assert any(v[0] == "zero_lower_bound_c" for v in rep.violations)


def test_h2_equality_passes():
    rep = validate_h2(make(U=(0.5, 1.0, 2.0), c=ProportionalCost(1.0)), [2.0])
    assert rep.proportional_h2_ok
    assert rep.h2_vacuous is False


def test_h2_fixed_cost_fails():
    rep = validate_h2(make(U=(0.5, 1.0), c=FixedPlusProportionalCost(0.3, 1.0)), [0.5])
    assert rep.proportional_h2_ok is False
    (name, witness, values), = rep.violations
    assert name == "proportional_h2"
    assert witness == (0.5, [1.0])
    assert values[0] == pytest.approx(0.8)
    assert values[1] == pytest.approx(0.65)


def test_h2_vacuous_in_2d():
    p = GameProblem(
        drift=ZeroDrift(2), gain=ConstantGain(1.0), discount=1.0,
        max_actions=[[1.0, 0.0], [0.0, 1.0]], min_actions=[[1.0, 0.0]],
        max_cost=ProportionalCost(1.0), min_cost=FixedPlusProportionalCost(1.0),
        domain=Box([0, 0], [1, 1]),
    )
    rep = validate_h2(p, [0.5, 2.0, 3.0])
    assert rep.proportional_h2_ok and rep.h2_vacuous


def test_value_bound_examples():
    assert value_bound(make(gain=ConstantGain(1.0), lam=1.0)) == 1.0
    assert value_bound(make(gain=ConstantGain(0.0), lam=3.0)) == 0.0
    # peak at the box center, which is always sampled
    assert value_bound(make(gain=PeakGain([0.0]), lam=0.5, box=(-2.0, 2.0))) == 2.0


def test_lipschitz_estimates_on_saturated_drift():
    p = make(drift=SaturatedAffineDrift([[-1.0]], [0.0], 5.0), gain=ClippedLinearGain([1.0], 0, 0, 2),
             box=(0.0, 2.0))
    rep = validate_h1(p, samples=200)
    assert rep.lipschitz_b_estimate == pytest.approx(1.0, abs=1e-12)
    assert rep.lipschitz_f_estimate == pytest.approx(1.0, abs=1e-12)
    assert rep.bound_b == pytest.approx(2.0)
    assert rep.bound_f == pytest.approx(2.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(U=()), dict(V=()), dict(lam=0.0), dict(lam=-1.0), dict(U=(0.0, 1.0))],
)
def test_construction_errors(kwargs):
    with pytest.raises(ValueError):
        make(**kwargs)


def test_degenerate_box_rejected():
    with pytest.raises(ValueError):
        Box([1.0], [1.0])
    with pytest.raises(ValueError):
        validate_h1(make(), samples=1)


def test_validate_is_deterministic_given_seed():
    p = make(drift=SaturatedAffineDrift([[0.3]], [0.1], 0.5), gain=PeakGain([0.2]))
    a = validate(p, samples=64, seed=7).to_lines()
    b = validate(p, samples=64, seed=7).to_lines()
    assert a == b


@settings(max_examples=25, deadline=None)
@given(small=st.integers(2, 40), extra=st.integers(1, 40), seed=st.integers(0, 2**16))
def test_lipschitz_estimates_monotone_in_samples(small, extra, seed):
    p = GameProblem(
        drift=SaturatedAffineDrift([[0.5, -1.0], [0.3, 0.2]], [0.0, 0.1], [0.4, 0.7]),
        gain=PeakGain([0.1, -0.2]), discount=1.0,
        max_actions=[[1.0, 0.0]], min_actions=[[0.0, 1.0]],
        max_cost=ProportionalCost(1.0), min_cost=FixedPlusProportionalCost(1.0),
        domain=Box([-1, -1], [1, 1]),
    )
    a = validate_h1(p, samples=small, seed=seed)
    b = validate_h1(p, samples=small + extra, seed=seed)
    assert b.lipschitz_b_estimate >= a.lipschitz_b_estimate
    assert b.lipschitz_f_estimate >= a.lipschitz_f_estimate


def test_sample_points_prefix_stable():
    box = Box([-1, 0], [1, 3])
    a = sample_points(box, 10, 3)
    b = sample_points(box, 30, 3)
    np.testing.assert_array_equal(a, b[: len(a)])


@settings(max_examples=25, deadline=None)
@given(lam1=st.floats(0.01, 10), lam2=st.floats(0.01, 10))
def test_value_bound_nonincreasing_in_discount(lam1, lam2):
    lo, hi = sorted((lam1, lam2))
    g = PeakGain([0.0], height=1.5)
    assert value_bound(make(gain=g, lam=hi)) <= value_bound(make(gain=g, lam=lo))


def test_report_lines_mark_vacuous_h2():
    lines = validate(make(U=(-1.0, 1.0)), samples=8).to_lines()
    assert "h2_vacuous=true" in lines
    assert "passed=true" in lines
    assert any(line.startswith("note=") for line in lines)
    assert math.isfinite(float(lines[0].split("=")[1]))
