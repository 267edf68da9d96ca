import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from fbshock.errors import NoAdmissibleShock
from fbshock.gas import GasParams, ThermoState, lambda3
from fbshock.hugoniot import (ShockData, check_entropy, rh_residual, shock_speed_formula,
                              solve_left_state, theta_minus_for_strength)

# (gamma, right state, theta-) -> (v-, u-, s) from a 30-digit Newton solve of the three
# jump conditions, independent of the closed-form root used by the package
ORACLE = [
    (5.0 / 3.0, (2.0, 0.0, 1.0), 1.2, (1.5323807579381203, 0.36384166602812292, 0.77807248569120259)),
    (1.4, (2.0, 0.0, 1.0), 1.125, (1.5, 0.35355339059327383, 0.70710678118654752)),
    (1.4, (1.0, 0.5, 1.5), 2.4, (0.39999999999999996, 2.1431676725154985, 2.7386127875258306)),
    (1.4, (3.5, -0.5, 0.7), 1.3, (1.185774393731681, 0.94024642248910779, 0.62234486498984872)),
]


@pytest.mark.parametrize("g,right,tm,expected", ORACLE)
def test_matches_high_precision_oracle(g, right, tm, expected):
    sh = solve_left_state(ThermoState(*right), tm, GasParams(gamma=g))
    assert (sh.left.v, sh.left.u, sh.s) == pytest.approx(expected, rel=1e-12, abs=1e-14)
    assert sh.left.theta == tm


def test_no_shock_for_cooler_left_state():
    with pytest.raises(NoAdmissibleShock):
        solve_left_state(ThermoState(2.0, 0.0, 1.0), 1.0, GasParams())
    with pytest.raises(NoAdmissibleShock):
        solve_left_state(ThermoState(2.0, 0.0, 1.0), 0.9, GasParams())


def test_derived_constants(shock, air):
    assert shock.d == pytest.approx(0.5)
    assert shock.d2 == pytest.approx(0.4 * 0.5 / 4.0)
    assert shock.d1 == pytest.approx(shock.d2 / (1 + shock.d2))
    assert shock.p0 == shock.p_minus == pytest.approx(0.75)
    # the constants agree whichever side they are computed from
    np.testing.assert_allclose(shock.constants("-", air), shock.constants("+", air), atol=1e-13)
    assert set(shock.as_dict()) >= {"s", "a", "b1", "b2", "d", "p_minus", "p_plus"}


def test_from_states_round_trip(shock, air):
    again = ShockData.from_states(shock.left, shock.right, shock.s, air)
    assert again == shock


admissible = st.tuples(
    st.sampled_from([1.4, 5.0 / 3.0, 1.1, 2.0]),
    st.floats(0.5, 4.0), st.floats(-1.0, 1.0), st.floats(0.5, 2.0), st.floats(1.0001, 2.0),
)


@settings(max_examples=200, deadline=None)
@given(admissible)
def test_jump_conditions_and_lax(case):
    g, v, u, t, ratio = case
    P = GasParams(gamma=g)
    sh = solve_left_state(ThermoState(v, u, t), ratio * t, P)
    assert max(abs(r) for r in rh_residual(sh, P)) <= 1e-10
    assert check_entropy(sh, P)
    assert 0.0 < sh.left.v < sh.right.v
    assert sh.left.u > sh.right.u
    assert 0 < lambda3(sh.right, P) < sh.s < lambda3(sh.left, P)


@settings(max_examples=200, deadline=None)
@given(admissible)
def test_speed_formula(case):
    g, v, u, t, ratio = case
    P = GasParams(gamma=g)
    sh = solve_left_state(ThermoState(v, u, t), ratio * t, P)
    assert shock_speed_formula(sh, P) == pytest.approx(sh.s ** 2, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(g=st.sampled_from([1.2, 1.4, 5.0 / 3.0]), v=st.floats(0.5, 4.0), frac=st.floats(0.01, 0.95))
def test_strength_inverse(g, v, frac):
    P = GasParams(gamma=g)
    right = ThermoState(v, 0.0, 1.0)
    d = frac * v * 2.0 / (g + 1.0)
    tm = theta_minus_for_strength(right, d, P)
    assume(tm > 1.0 + 1e-9)
    assert solve_left_state(right, tm, P).d == pytest.approx(d, rel=1e-9)


def test_strength_out_of_range():
    with pytest.raises(NoAdmissibleShock):
        theta_minus_for_strength(ThermoState(2.0, 0.0, 1.0), 2.0 * 2.0 / 2.4, GasParams(gamma=1.4))
    with pytest.raises(NoAdmissibleShock):
        theta_minus_for_strength(ThermoState(2.0, 0.0, 1.0), 0.0, GasParams(gamma=1.4))


def test_strong_shock_limit():
    # compression ratio tends to (gamma+1)/(gamma-1) as theta- grows
    P = GasParams(gamma=1.4)
    sh = solve_left_state(ThermoState(2.0, 0.0, 1.0), 1e6, P)
    assert sh.right.v / sh.left.v == pytest.approx(6.0, rel=1e-4)
    assert math.isfinite(sh.s)
