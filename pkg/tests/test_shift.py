import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbshock.errors import NonIntegrablePerturbation
from fbshock.profile import decay_fit, sample_profile
from fbshock.shift import boundary_A, compute_alpha, dI_dalpha, integral_I


def _grid(profile, beta, n=4001):
    rate = decay_fit(profile).c2_hat * profile.shock.d
    return np.linspace(0.0, beta + 60.0 / rate, n)


@pytest.fixture(scope="module")
def beta(profile):
    return 20.0 / (decay_fit(profile).c2_hat * profile.shock.d)


@settings(max_examples=25, deadline=None)
@given(h=st.floats(-3.0, 3.0))
def test_translated_profile_gives_minus_shift(profile, beta, h):
    x = _grid(profile, beta)
    _, u0, _ = sample_profile(profile, x - beta - h)
    assert compute_alpha(x, u0, profile, beta).alpha == pytest.approx(-h, abs=1e-7)


def test_derivative_identity(profile, beta):
    x = _grid(profile, beta)
    u0 = sample_profile(profile, x - beta)[1] + 1e-3 * np.exp(-0.5 * (x - beta) ** 2)
    sh = profile.shock
    for a in np.linspace(-1.0, 1.0, 5):
        assert dI_dalpha(a, x, u0, profile, beta) == pytest.approx(sh.left.u - sh.right.u, rel=1e-6)


def test_alpha_solves_I(profile, beta):
    x = _grid(profile, beta)
    u0 = sample_profile(profile, x - beta)[1] + 2e-3 * np.exp(-0.5 * ((x - beta) / 2) ** 2)
    res = compute_alpha(x, u0, profile, beta)
    assert abs(integral_I(res.alpha, x, u0, profile, beta)) < 1e-9
    assert res.quad_tol < 1e-6


def test_momentum_of_bump_sets_alpha(profile, beta):
    x = _grid(profile, beta, 8001)
    m = 1e-3 * np.sqrt(2 * np.pi)
    u0 = sample_profile(profile, x - beta)[1] + 1e-3 * np.exp(-0.5 * (x - beta) ** 2)
    base = compute_alpha(x, sample_profile(profile, x - beta)[1], profile, beta).alpha
    sh = profile.shock
    assert compute_alpha(x, u0, profile, beta).alpha - base == pytest.approx(
        m / (sh.right.u - sh.left.u), rel=1e-9)


def test_alpha_vanishes_as_offset_grows(profile):
    rate = decay_fit(profile).c2_hat * profile.shock.d
    vals = []
    for k in (10.0, 20.0, 40.0):
        b = k / rate
        x = _grid(profile, b)
        vals.append(abs(compute_alpha(x, sample_profile(profile, x - b)[1], profile, b).alpha))
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-12


def test_rejects_non_decaying_data(profile, beta):
    x = _grid(profile, beta)
    u0 = sample_profile(profile, x - beta)[1] + 1e-3
    with pytest.raises(NonIntegrablePerturbation):
        compute_alpha(x, u0, profile, beta)


def test_boundary_A(profile, beta):
    A = boundary_A(np.array([0.0, 1.0, 1e4]), profile, 0.0, beta)
    assert A[0] == pytest.approx(-profile.velocity_primitive(-beta))
    assert A[2] == 0.0
    assert abs(A[1]) <= abs(A[0])
