import numpy as np
import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hitchin import theta_torus as tt
from hitchin.errors import ConvergenceError, SingularSolutionError, SpectralDataError, ValidationError

B2 = np.array([[1.1j + 0.2, 0.3 - 0.1j], [0.3 - 0.1j, 0.9j - 0.4]])


def _jtheta3(z, tau):
    return complex(mpmath.jtheta(3, mpmath.pi * z, mpmath.exp(1j * mpmath.pi * tau)))


@pytest.mark.parametrize("tau", [1j, 0.3 + 1.1j, 0.5j])
@pytest.mark.parametrize("z", [0.0, 0.3 + 0.2j, -0.7 - 0.4j, 0.25])
def test_genus_one_against_mpmath(tau, z):
    assert abs(tt.riemann_theta([z], [[tau]]) - _jtheta3(z, tau)) < 1e-12


def test_diagonal_matrix_factorises():
    B = np.diag([1j, 0.2 + 1.5j])
    z = np.array([0.1 + 0.2j, -0.3 + 0.05j])
    expect = _jtheta3(z[0], B[0, 0]) * _jtheta3(z[1], B[1, 1])
    assert abs(tt.riemann_theta(z, B) - expect) < 1e-12


def test_periodicity_and_quasi_periodicity():
    rng = np.random.default_rng(3)
    z = rng.normal(size=(20, 2)) * 0.4 + 1j * rng.normal(size=(20, 2)) * 0.2
    base = tt.riemann_theta(z, B2)
    for j in range(2):
        e = np.eye(2)[j]
        assert np.max(np.abs(tt.riemann_theta(z + e, B2) - base) / np.abs(base)) < 1e-10
        shifted = tt.riemann_theta(z + B2 @ e, B2)
        factor = np.exp(-2j * np.pi * (z[:, j] + B2[j, j] / 2))
        assert np.max(np.abs(shifted - factor * base) / np.abs(factor * base)) < 1e-10


def test_even():
    z = np.array([0.2 + 0.1j, -0.4 + 0.3j])
    assert abs(tt.riemann_theta(z, B2) - tt.riemann_theta(-z, B2)) < 1e-13


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4))
@settings(max_examples=40, deadline=None)
def test_truncation_increment_within_tail_bound(x1, x2, y1, y2):
    z = np.array([x1 + 1j * y1, x2 + 1j * y2])
    ynorm = float(np.linalg.norm(z.imag))
    mu = float(np.linalg.eigvalsh(B2.imag).min())
    R = tt.truncation_radius(B2, ynorm)
    step = abs(tt.riemann_theta(z, B2, R + 1) - tt.riemann_theta(z, B2, R))
    assert step <= tt.theta_tail_bound(mu, 2, ynorm, R) * max(1.0, np.exp(np.pi * ynorm**2 / mu)) + 1e-15


def test_riemann_matrix_checks():
    with pytest.raises(ConvergenceError):
        tt.riemann_theta([0.0], [[-1j]])
    with pytest.raises(ConvergenceError):
        tt.riemann_theta([0.0, 0.0], [[1j, 0], [0, 0.5]])
    with pytest.raises(ValidationError):
        tt.riemann_theta([0.0, 0.0], [[1j, 0.1], [0.2, 1j]])


def test_spectral_data_validation():
    good = dict(genus=1, B=[1j], U=[1.0], V=[1.0], D=[0j], kappa=1.0, lattice=[[6.0, 0], [0, 1]])
    assert tt.SpectralData(**good).parameter_count == 3
    with pytest.raises(SpectralDataError):
        tt.SpectralData(**{**good, "D": [0.1 + 0j]})
    with pytest.raises(SpectralDataError):
        tt.SpectralData(**{**good, "lattice": [[1, 0], [2, 0]]})
    with pytest.raises(SpectralDataError):
        tt.SpectralData(**{**good, "branch_points": [1j]})
    assert tt.SpectralData(genus=2, B=B2, U=[1, 1], V=[1, 1], D=[0, 0], kappa=1.0,
                           lattice=[[1, 0], [0, 1]]).parameter_count == 6


def test_non_real_data_rejected():
    d = tt.SpectralData(1, [1j], [1.0 + 0.5j], [1.0 + 0.5j], [0j], 1.0, [[6.0, 0], [0, 1]])
    with pytest.raises(SpectralDataError):
        tt.dp_solution(d, np.linspace(0.1, 3, 10), np.linspace(0.2, 1, 10))


def test_theta_zero_reported():
    # theta(zeta | i) vanishes at zeta = (1 + i) / 2, i.e. w = 2 pi i zeta = -pi + i pi
    d = tt.SpectralData(1, [1j], [1.0], [-1.0], [1j * np.pi], 1.0, [[6.0, 0], [0, 1]])
    # W = Im(U z) + D; Im z = -pi puts W at the zero
    with pytest.raises(SingularSolutionError):
        tt.dp_solution(d, 0.0, -np.pi)


@pytest.mark.parametrize("name", tt.BUNDLED)
def test_bundled_datasets_pass(name):
    rep = tt.validate_dataset(tt.bundled_dataset(name))
    assert rep.reality < 1e-8
    assert rep.periodicity < 1e-8
    assert rep.residual < 1e-5
    assert rep.passed()


@pytest.mark.parametrize("name", tt.BUNDLED)
def test_bundled_residual_second_order(name):
    d = tt.bundled_dataset(name)
    coarse = tt.validate_dataset(d, 256, 16).residual
    fine = tt.validate_dataset(d, 512, 16).residual
    assert 3.5 < coarse / fine < 4.5


def test_dataset_round_trip(tmp_path):
    d = tt.bundled_dataset("genus1_rotated")
    path = tmp_path / "copy.txt"
    path.write_text(tt.format_spectral_data(d))
    back = tt.read_spectral_data(path)
    for attr in ("B", "U", "V", "D", "lattice"):
        assert np.array_equal(getattr(back, attr), getattr(d, attr))
    assert back.kappa == d.kappa


def test_malformed_dataset(tmp_path):
    with pytest.raises(SpectralDataError):
        tt.parse_spectral_data("genus = 1\nB = 0,1\n")
    with pytest.raises(SpectralDataError):
        tt.parse_spectral_data("genus = 1\nB = 0,1\nU = x\nV = 1\nD = 0\nkappa = 1\nlattice = 1,0 0,1\n")
    with pytest.raises(SpectralDataError):
        tt.read_spectral_data(tmp_path / "missing.txt")
    with pytest.raises(ValidationError):
        tt.bundled_dataset("genus7")


def test_skew_laplacian_on_plane_wave():
    lattice = np.array([[2.0, 0.3], [0.5, 1.7]])
    k = 2 * np.pi * np.linalg.inv(lattice).T[0]  # dual vector: k.w1 = 2 pi, k.w2 = 0
    errs = []
    for n in (32, 64):
        g = tt.torus_grid(lattice, n, n)
        f = np.cos(k[0] * g.x + k[1] * g.y)
        errs.append(np.max(np.abs(tt.periodic_laplacian(f, lattice) + (k @ k) * f)))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_grid_size_guard():
    with pytest.raises(ValidationError):
        tt.torus_grid([[1, 0], [0, 1]], 8, 16)


def test_libration_small_amplitude_limit():
    prof = tt.libration_oracle(1e-4, kappa=2.0, n=64)
    assert prof.period == pytest.approx(np.pi, rel=1e-7)


def test_libration_energy_and_symmetry():
    prof = tt.libration_oracle(0.8, kappa=1.3, n=256)
    assert np.ptp(prof.energy()) < 1e-12
    assert prof.alpha[0] == pytest.approx(0.8, abs=1e-14)
    np.testing.assert_allclose(prof.alpha[1:], prof.alpha[1:][::-1], atol=1e-12)


def test_libration_residual_and_convergence():
    res = []
    for n in (128, 256, 512):
        alpha, lattice = tt.libration_oracle(0.1, 1.0, n).on_lattice(16)
        res.append(tt.pde_residual_grid(alpha, 1.0, lattice))
    assert res[1] < 1e-5
    assert 3.5 < res[0] / res[1] < 4.5
    assert 3.5 < res[1] / res[2] < 4.5


def test_libration_reproduces_theta_solution():
    d = tt.bundled_dataset("genus1_square")
    amp = float(tt.dp_solution(d, 0.0, 0.0))
    prof = tt.libration_oracle(amp, d.kappa, 128)
    assert prof.period == pytest.approx(d.lattice[0, 0], rel=1e-10)
    np.testing.assert_allclose(prof.alpha, tt.dp_solution(d, prof.t, 0 * prof.t), atol=1e-10)


def test_theta_value_at_origin():
    direct = sum(np.exp(-np.pi * n * n) for n in range(-10, 11))
    assert abs(tt.riemann_theta([0.0], [[1j]]) - direct) < 1e-15
    assert tt.riemann_theta([0.0], [[1j]]).real == pytest.approx(1.08643481, abs=1e-8)


def test_constant_solution_without_wavevectors():
    d = tt.SpectralData(1, [1j], [0.0], [0.0], [0.4j], 1.0, [[1, 0], [0, 1]])
    vals = tt.dp_solution(d, np.linspace(-2, 2, 7), np.linspace(1, 3, 7))
    expect = np.log(tt.theta_exp([0.4j], [[1j]]) / tt.theta_exp([0.4j + 1j * np.pi], [[1j]])).real
    np.testing.assert_allclose(vals, expect, atol=1e-14)


def test_reality_at_random_points():
    d = tt.bundled_dataset("genus1_rotated")
    rng = np.random.default_rng(1)
    x, y = rng.uniform(-10, 10, (2, 100))
    assert np.max(np.abs(tt.dp_solution_complex(d, x, y).imag)) < 1e-8


def test_zero_field_residual():
    assert tt.pde_residual_grid(np.zeros((32, 16)), 1.0, [[3.0, 0.0], [0.2, 1.0]]) == 0.0


def test_dataset_residual_fine_grid():
    d = tt.bundled_dataset("genus1_square")
    grid = tt.sample_solution(d, 1024, 16)
    assert np.max(np.abs(grid.residual)) < 1e-6
