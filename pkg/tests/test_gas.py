import math
import warnings

import pytest
from hypothesis import given, strategies as st

from fbshock.errors import DomainError
from fbshock.gas import GasParams, ThermoState, internal_energy, lambda3, pressure

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


def test_defaults_and_cv():
    P = GasParams()
    assert P.gamma == pytest.approx(5.0 / 3.0)
    assert P.cv == pytest.approx(1.5)


def test_reference_values():
    P = GasParams(gamma=1.4, R=2.0)
    s = ThermoState(v=2.0, u=0.3, theta=1.5)
    assert pressure(s, P) == pytest.approx(1.5)
    assert internal_energy(1.5, P) == pytest.approx(7.5)
    assert lambda3(s, P) == pytest.approx(math.sqrt(1.4 * 2.0 * 1.5) / 2.0)
    assert s.rho == 0.5


@pytest.mark.parametrize("kw", [dict(gamma=1.0), dict(gamma=0.5), dict(R=0.0),
                                dict(mu=-1.0), dict(kappa=0.0), dict(gamma=float("nan"))])
def test_bad_params(kw):
    with pytest.raises(DomainError):
        GasParams(**kw)


@pytest.mark.parametrize("v,theta", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (float("inf"), 1.0)])
def test_bad_states(v, theta):
    with pytest.raises(DomainError):
        ThermoState(v, 0.0, theta)


def test_warns_outside_theory():
    with pytest.warns(UserWarning):
        assert GasParams(gamma=2.5).warn_if_outside_theory()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not GasParams(gamma=1.4).warn_if_outside_theory()


@given(v=pos, theta=pos, g=st.floats(1.01, 3.0))
def test_state_quantities_positive(v, theta, g):
    P = GasParams(gamma=g)
    s = ThermoState(v, 0.0, theta)
    assert pressure(s, P) > 0.0
    assert internal_energy(theta, P) > 0.0
    # lambda3^2 v^2 = gamma p v
    assert lambda3(s, P) ** 2 * v * v == pytest.approx(g * pressure(s, P) * v, rel=1e-12)
