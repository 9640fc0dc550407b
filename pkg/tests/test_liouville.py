import warnings

import numpy as np
import pytest

from hitchin import fields, liouville
from hitchin.errors import IntegralityError, SingularPointError, ValidationError
from hitchin.liouville import LiouvilleSolution

rng = np.random.default_rng(7)
SAMPLES = rng.uniform(-2, 2, size=(100, 2))
SAMPLES = SAMPLES[np.hypot(*SAMPLES.T) > 0.05]


@pytest.mark.parametrize("nu,z,expected", [
    (1, 1.0, 1.0),          # 4 / (1 + 1)**2
    (2, 1j, 4.0),           # 16 |z|**2 / (1 + 1)**2
    (1, 0.0, 4.0),
    (3, 2.0, 4 * 9 * 16 / 65**2),
])
def test_lambda_hand_values(nu, z, expected):
    assert liouville.lambda_general(LiouvilleSolution.monomial(nu), z) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("sign", ["top", "bottom"])
@pytest.mark.parametrize("nu", [1, 2, 2.5])
def test_liouville_equation(nu, sign):
    sol = LiouvilleSolution.monomial(nu, sign)
    pts = SAMPLES[np.abs(np.hypot(*SAMPLES.T) - 1) > 0.2]
    res = liouville.liouville_residual(sol, pts[:, 0], pts[:, 1])
    lam = liouville.lambda_general(sol, pts[:, 0] + 1j * pts[:, 1])
    assert np.max(np.abs(res) / (1 + lam)) < 1e-6


def test_bottom_sign_pole():
    with pytest.raises(SingularPointError):
        liouville.lambda_general(LiouvilleSolution.monomial(1, "bottom"), 1.0)


def test_nu_zero_rejected():
    with pytest.raises(ValidationError):
        LiouvilleSolution.monomial(0)


def test_signature_choice():
    assert liouville.signature_for("top") == (1, 0)
    assert liouville.signature_for("bottom") == (0, 0)


@pytest.mark.parametrize("nu", [1.0, 2.0, 3.0])
def test_polar_family_solves_reduced_equations(nu):
    f = liouville.hitchin_pair_polar(nu, "top")
    x, y = SAMPLES[:, 0], SAMPLES[:, 1]
    assert fields.hitchin_residual(f, (x, y)).max_abs() < 1e-8
    for pt in SAMPLES[:10]:
        assert fields.flat_connection_residual(f, tuple(pt)) < 1e-8


def test_polar_pair_matches_ansatz():
    pair = liouville.polar_pair(2.0)
    for pt in SAMPLES[:5]:
        assert max(fields.pair_residuals(pair, tuple(pt))) < 1e-8


@pytest.mark.parametrize("nu", [1, 2])
def test_patches_glue(nu):
    assert liouville.patch_transition_error(nu, r=1.0) < 1e-10
    assert liouville.patch_transition_error(nu, r=0.3) < 1e-10


@pytest.mark.parametrize("nu", [1, 2])
def test_each_patch_is_a_solution(nu):
    for pair in liouville.patch_pair(nu):
        for pt in SAMPLES[:5]:
            assert max(fields.pair_residuals(pair, tuple(pt))) < 1e-8


@pytest.mark.parametrize("nu", [0.5, 1.5, 2.25])
def test_non_integer_nu_rejected(nu):
    with pytest.raises(IntegralityError):
        liouville.patch_pair(nu)
    with pytest.raises(IntegralityError):
        liouville.patch_transition_error(nu)


@pytest.mark.parametrize("nu", [1, 2, 3])
def test_flux_quantised(nu):
    assert liouville.flux(nu) == -4 * np.pi * nu
    assert liouville.flux(nu, numerical=True) == pytest.approx(-4 * np.pi * nu, rel=1e-8)


def test_flux_non_integer_is_not_quantised():
    # the quadrature follows -4 pi nu for any nu > 0; integrality is a gluing statement
    assert liouville.flux(1.5, numerical=True) == pytest.approx(-6 * np.pi, rel=1e-8)


@pytest.mark.parametrize("roots", [(0.0, 1.0), (0.5, -0.5j, 1 + 1j)])
def test_multicenter(roots):
    n = len(roots)
    assert liouville.multicenter_flux(roots) == pytest.approx(-4 * np.pi * n, rel=1e-6)
    f = liouville.multicenter_field(roots)
    for pt in SAMPLES[:8]:
        assert fields.hitchin_residual(f, tuple(pt)).max_abs() < 1e-7


def test_multicenter_zero_of_derivative_warns():
    with pytest.warns(RuntimeWarning):
        val = liouville.multicenter_lambda((1.0, -1.0), 0.0)
    assert val == 0.0


def test_multicenter_duplicate_roots_rejected():
    with pytest.raises(ValidationError):
        liouville.multicenter_lambda((1.0, 1.0), 0.5)


@pytest.mark.parametrize("nu", [1, 2, 3])
def test_reduced_action_vanishes(nu):
    act = liouville.reduced_action(nu, "top")
    assert act.regular
    assert abs(act.value) < 1e-8


def test_reduced_action_bottom_sign_singular():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert not liouville.reduced_action(1, "bottom").regular


def test_unit_charge_connection():
    r = np.array([0.0, 0.5, 1.0, 3.0])
    np.testing.assert_allclose(liouville.connection_coefficient(1, "top", r), -2 * r**2 / (1 + r**2),
                               atol=1e-15)


def test_residual_at_fixed_point():
    f = liouville.hitchin_pair_polar(2.0, "top")
    assert fields.hitchin_residual(f, (0.7, -0.3)).max_abs() < 1e-8


def test_patch_connections_regular():
    origin, infinity = liouville.patch_pair(1)
    near = origin.ax(1e-6, 1e-6), origin.ay(1e-6, 1e-6)
    far = infinity.ax(1e5, 3e4), infinity.ay(1e5, 3e4)
    assert max(np.abs(m).max() for m in near) < 1e-5
    assert max(np.abs(m).max() for m in far) < 1e-8


def test_single_root_matches_monomial():
    z = np.array([0.3 + 0.1j, -1.2j, 2.0])
    np.testing.assert_allclose(liouville.multicenter_lambda((0.0,), z),
                               liouville.lambda_general(LiouvilleSolution.monomial(1), z), rtol=1e-14)


def test_two_centres_positive_and_smooth():
    xs = np.linspace(-2, 2, 41) + 0.013
    X, Y = np.meshgrid(xs, xs)
    keep = np.hypot(X, Y).ravel() > 0.2  # lambda vanishes where the derivative of z**2 - 1 does
    lam = liouville.multicenter_lambda((1.0, -1.0), X + 1j * Y)
    assert np.all(np.isfinite(lam)) and np.all(lam > 0)
    sol = LiouvilleSolution.polynomial((1.0, -1.0))
    res = liouville.liouville_residual(sol, X.ravel(), Y.ravel())
    assert np.max((np.abs(res) / (1 + lam.ravel()))[keep]) < 1e-5
