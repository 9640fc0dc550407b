"""Doubly periodic sinh-Gordon solutions from Riemann theta functions.

Theta convention (used everywhere in this module)::

    theta(z | B) = sum_{n in Z^g} exp(2 pi i (n.B.n / 2 + n.z)),   Im B > 0,

so theta(z + e_j) = theta(z) and
theta(z + B e_j) = exp(-2 pi i (z_j + B_jj / 2)) theta(z).

Spectral data (U, V, D) live in the exponential normalisation
``theta_exp(w) = theta(w / (2 pi i) | B) = sum exp(pi i n.B.n + n.w)``, in
which Delta = i pi (1, ..., 1) flips the sign of odd terms and an imaginary D is
a real translation. The torus
solution is

    alpha(z) = log(theta_exp(W + D) / theta_exp(W + D + Delta)),
    W = -i (U z + V conj(z)) / 2,

which solves lap(alpha) + (k**2/2) sinh(2 alpha) = 0 for consistent data.
Computing U and V from the spectral curve is not done here: data are read
from files and checked (reality, periodicity, PDE residual).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import (
    ConvergenceError,
    SingularSolutionError,
    SpectralDataError,
    ValidationError,
)

THETA_TOL = 1e-12
REALITY_TOL = 1e-8
ZERO_TOL = 1e-10


# -- Riemann theta -------------------------------------------------------------

def _check_riemann_matrix(B) -> tuple[np.ndarray, float]:
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValidationError(f"Riemann matrix must be square, got shape {B.shape}")
    if not np.allclose(B, B.T, rtol=0, atol=1e-12):
        raise ValidationError("Riemann matrix must be symmetric")
    mu = float(np.linalg.eigvalsh(B.imag).min())
    if mu <= 0:
        raise ConvergenceError("imaginary part of the Riemann matrix is not positive definite")
    return B, mu


def theta_tail_bound(mu: float, genus: int, y_norm: float, radius: int) -> float:
    """Upper bound on the terms with |n| > radius, relative to the largest term.

    Uses |term| <= exp(-pi mu |n|**2 + 2 pi |n| |Im z|), at most (2k + 1)**g
    lattice points with k - 1 < |n| <= k, and exp(pi |Im z|**2 / mu) as an
    upper bound for the largest term.
    """
    if radius < y_norm / mu + 1:
        return np.inf
    k = np.arange(radius + 1, radius + 400, dtype=float)
    t = k - 1
    log_terms = genus * np.log(2 * k + 1) - np.pi * mu * t**2 + 2 * np.pi * t * y_norm
    log_scale = max(0.0, np.pi * y_norm**2 / mu)
    return float(np.exp(log_terms - log_scale).sum())


def truncation_radius(B, y_norm: float = 0.0, tol: float = THETA_TOL) -> int:
    B, mu = _check_riemann_matrix(B)
    R = max(1, math.ceil(y_norm / mu + 1))
    while theta_tail_bound(mu, B.shape[0], y_norm, R) > tol:
        R += 1
    return R


def lattice_points(genus: int, radius: int) -> np.ndarray:
    rng = range(-radius, radius + 1)
    pts = np.array(list(itertools.product(rng, repeat=genus)), dtype=float)
    return pts[np.einsum("ij,ij->i", pts, pts) <= radius**2]


def riemann_theta(z, B, trunc_radius: int | None = None, tol: float = THETA_TOL):
    """theta(z | B) for z of shape (g,) or (N, g).

    Sums over |n| <= trunc_radius; by default the radius is the smallest one
    whose tail bound is below ``tol`` relative to the largest term.
    """
    B, mu = _check_riemann_matrix(B)
    g = B.shape[0]
    z = np.asarray(z, dtype=complex)
    single = z.ndim <= 1
    z = z.reshape(-1, g)
    if trunc_radius is None:
        y_norm = float(np.linalg.norm(z.imag, axis=1).max())
        trunc_radius = truncation_radius(B, y_norm, tol)
    n = lattice_points(g, trunc_radius)
    quad_form = 0.5 * np.einsum("ki,ij,kj->k", n, B, n)
    out = np.exp(2j * np.pi * (quad_form[None, :] + z @ n.T)).sum(axis=1)
    return out[0] if single else out


def theta_exp(w, B, tol: float = THETA_TOL):
    """sum exp(pi i n.B.n + n.w), i.e. theta(w / (2 pi i) | B)."""
    return riemann_theta(np.asarray(w, dtype=complex) / (2j * np.pi), B, tol=tol)


# -- spectral data -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectralData:
    genus: int
    B: np.ndarray
    U: np.ndarray
    V: np.ndarray
    D: np.ndarray
    kappa: float
    lattice: np.ndarray
    branch_points: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        g = int(self.genus)
        if g < 1:
            raise ValidationError("genus must be at least 1")
        conv = {
            "B": np.asarray(self.B, dtype=complex).reshape(g, g),
            "U": np.asarray(self.U, dtype=complex).reshape(g),
            "V": np.asarray(self.V, dtype=complex).reshape(g),
            "D": np.asarray(self.D, dtype=complex).reshape(g),
            "lattice": np.asarray(self.lattice, dtype=float).reshape(2, 2),
        }
        for k, v in conv.items():
            object.__setattr__(self, k, v)
        _check_riemann_matrix(self.B)
        if np.any(np.abs(self.D.real) > 1e-12):
            raise SpectralDataError("D must be purely imaginary")
        if not self.kappa > 0:
            raise SpectralDataError("kappa must be positive")
        if abs(np.linalg.det(self.lattice)) < 1e-12:
            raise SpectralDataError("lattice vectors are degenerate")
        if self.branch_points is not None:
            bp = np.asarray(self.branch_points, dtype=complex).reshape(g)
            if np.any(np.isclose(np.abs(bp), 1.0)):
                raise SpectralDataError("branch points must satisfy |lambda_k| != 1")
            object.__setattr__(self, "branch_points", bp)

    @property
    def delta(self) -> np.ndarray:
        return 1j * np.pi * np.ones(self.genus)

    @property
    def parameter_count(self) -> int:
        """Real parameters: g complex branch points plus g imaginary entries of D."""
        return 2 * self.genus + self.genus


def _theta_ratio(data: SpectralData, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(x, y).shape
    z = (np.broadcast_to(x, shape) + 1j * np.broadcast_to(y, shape)).reshape(-1)
    W = -0.5j * (np.outer(z, data.U) + np.outer(np.conj(z), data.V)) + data.D
    t1 = np.atleast_1d(theta_exp(W, data.B))
    t2 = np.atleast_1d(theta_exp(W + data.delta, data.B))
    if np.any(np.abs(t1) < ZERO_TOL) or np.any(np.abs(t2) < ZERO_TOL):
        raise SingularSolutionError("a theta factor vanishes: singular solution")
    return (t1 / t2).reshape(shape)


def dp_solution_complex(data: SpectralData, x, y):
    """Complex log of the theta ratio; its imaginary part measures reality defects."""
    return np.log(_theta_ratio(data, x, y))


def dp_solution(data: SpectralData, x, y):
    """Real torus solution alpha(x, y); raises if the data do not give a real field."""
    val = dp_solution_complex(data, x, y)
    bad = float(np.max(np.abs(val.imag)))
    if bad > REALITY_TOL:
        raise SpectralDataError(f"solution is not real (|Im alpha| = {bad:.3g})")
    return val.real


def periodicity_defect(data: SpectralData, n_points: int = 100, seed: int = 0) -> float:
    """max |alpha(z + w_k) - alpha(z)| over random points and both lattice vectors."""
    rng = np.random.default_rng(seed)
    st = rng.random((n_points, 2))
    pts = st @ data.lattice
    base = dp_solution(data, pts[:, 0], pts[:, 1])
    defect = 0.0
    for w in data.lattice:
        moved = dp_solution(data, pts[:, 0] + w[0], pts[:, 1] + w[1])
        defect = max(defect, float(np.abs(moved - base).max()))
    return defect


# -- torus grids ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TorusGrid:
    nx: int
    ny: int
    lattice: np.ndarray
    x: np.ndarray
    y: np.ndarray
    alpha: np.ndarray | None = None
    residual: np.ndarray | None = None


def torus_grid(lattice, nx: int, ny: int) -> TorusGrid:
    """Nodes (i/nx) w1 + (j/ny) w2 of the fundamental cell, arrays indexed [i, j]."""
    if nx < 16 or ny < 16:
        raise ValidationError("torus grids need nx, ny >= 16")
    lat = np.asarray(lattice, dtype=float).reshape(2, 2)
    s = np.arange(nx) / nx
    t = np.arange(ny) / ny
    S, T = np.meshgrid(s, t, indexing="ij")
    x = S * lat[0, 0] + T * lat[1, 0]
    y = S * lat[0, 1] + T * lat[1, 1]
    return TorusGrid(nx, ny, lat, x, y)


def sample_solution(data: SpectralData, nx: int, ny: int) -> TorusGrid:
    grid = torus_grid(data.lattice, nx, ny)
    alpha = dp_solution(data, grid.x, grid.y)
    res = pde_residual_field(alpha, data.kappa, data.lattice)
    return TorusGrid(nx, ny, grid.lattice, grid.x, grid.y, alpha, res)


def periodic_laplacian(f, lattice) -> np.ndarray:
    """Second-order periodic Laplacian of samples on a (possibly skew) lattice grid.

    With x = s w1 + t w2 the Laplacian is sum G^{ab} d_a d_b in (s, t),
    G = J^T J for J = [w1 w2].
    """
    f = np.asarray(f, dtype=float)
    nx, ny = f.shape
    J = np.asarray(lattice, dtype=float).reshape(2, 2).T
    Ginv = np.linalg.inv(J.T @ J)
    ds, dt = 1.0 / nx, 1.0 / ny
    fss = (np.roll(f, -1, 0) - 2 * f + np.roll(f, 1, 0)) / ds**2
    ftt = (np.roll(f, -1, 1) - 2 * f + np.roll(f, 1, 1)) / dt**2
    lap = Ginv[0, 0] * fss + Ginv[1, 1] * ftt
    if abs(Ginv[0, 1]) > 0:
        fp = np.roll(f, -1, 0)
        fm = np.roll(f, 1, 0)
        fst = (np.roll(fp, -1, 1) - np.roll(fp, 1, 1)
               - np.roll(fm, -1, 1) + np.roll(fm, 1, 1)) / (4 * ds * dt)
        lap = lap + 2 * Ginv[0, 1] * fst
    return lap


def pde_residual_field(alpha, kappa: float, lattice) -> np.ndarray:
    """lap(alpha) + (k**2/2) sinh(2 alpha) at every grid node."""
    alpha = np.asarray(alpha, dtype=float)
    return periodic_laplacian(alpha, lattice) + kappa**2 / 2 * np.sinh(2 * alpha)


def pde_residual_grid(alpha, kappa: float, lattice) -> float:
    return float(np.max(np.abs(pde_residual_field(alpha, kappa, lattice))))


# -- one-dimensional positive control -----------------------------------------

@dataclass(frozen=True, eq=False)
class LibrationProfile:
    amplitude: float
    kappa: float
    period: float
    t: np.ndarray
    alpha: np.ndarray
    dalpha: np.ndarray

    def energy(self) -> np.ndarray:
        return 0.5 * self.dalpha**2 + self.kappa**2 / 4 * (np.cosh(2 * self.alpha) - 1)

    def on_lattice(self, ny: int, width: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
        """Embed as a y-independent field; returns (samples [nx, ny], lattice)."""
        alpha = np.repeat(self.alpha[:, None], ny, axis=1)
        return alpha, np.array([[self.period, 0.0], [0.0, width]])


def _shc(x):
    """sinh(x)/x, continuous at 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    return np.where(small, 1 + x * x / 6, np.sinh(safe) / safe)


def libration_oracle(amplitude: float, kappa: float = 1.0, n: int = 256,
                     rtol: float = 1e-13) -> LibrationProfile:
    """Periodic solution of alpha'' = -(k**2/2) sinh(2 alpha) through the turning point.

    Energy conservation gives |alpha'| = k sqrt(sinh(a0 (1 + c)) sinh(a0 (1 - c)))
    for alpha = a0 c. With alpha = a0 cos u the phase u obeys a regular
    first-order equation on [0, pi/2]; the quarter period comes from its
    quadrature and the rest of the orbit from the symmetries
    alpha(T/2 - t) = -alpha(t), alpha(T - t) = alpha(t).

    Returns ``n`` samples at t = k T / n, k = 0..n-1, starting at alpha = a0.
    """
    a0 = float(amplitude)
    if not a0 > 0:
        raise ValidationError("amplitude must be positive")

    def speed(u):
        w = np.sin(u / 2)
        return (kappa * np.sqrt(np.sinh(a0 * (1 + np.cos(u))) * 2 * a0 * _shc(2 * a0 * w * w))
                / (2 * a0 * np.cos(u / 2)))

    quarter, _ = quad(lambda u: 1.0 / speed(u), 0.0, np.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)
    period = 4 * quarter

    phase = solve_ivp(lambda t, u: speed(u), (0.0, quarter), [0.0], method="DOP853",
                      rtol=rtol, atol=rtol, dense_output=True)
    t = np.arange(n) * period / n

    def first_quarter(tq):
        u = np.clip(phase.sol(tq)[0], 0.0, np.pi / 2)
        c = np.cos(u)
        a = a0 * c
        da = -kappa * np.sqrt(np.sinh(a0 * (1 + c)) * np.sinh(a0 * (1 - c)))
        return a, da

    alpha = np.empty(n)
    dalpha = np.empty(n)
    half = period / 2
    for i, ti in enumerate(t):
        tr, sgn_d = (ti, 1.0) if ti <= half else (period - ti, -1.0)
        if tr <= quarter:
            a, da = first_quarter(tr)
        else:
            a, da = first_quarter(half - tr)
            a = -a
        alpha[i] = a
        dalpha[i] = sgn_d * da
    return LibrationProfile(a0, kappa, period, t, alpha, dalpha)


# -- dataset files -------------------------------------------------------------

def _parse_complex(tok: str) -> complex:
    parts = tok.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) != 2:
        raise SpectralDataError(f"bad complex entry {tok!r}; expected 're,im'")
    return complex(float(parts[0]), float(parts[1]))


def parse_spectral_data(text: str, name: str = "") -> SpectralData:
    """Parse the key = value dataset format (see README)."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpectralDataError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.lower()] = val
    required = ("genus", "b", "u", "v", "d", "kappa", "lattice")
    missing = [k for k in required if k not in values]
    if missing:
        raise SpectralDataError(f"missing keys: {', '.join(missing)}")
    try:
        g = int(values["genus"])
        vec = {k: [_parse_complex(t) for t in values[k].split()] for k in ("b", "u", "v", "d")}
        lattice = [[float(c) for c in t.split(",")] for t in values["lattice"].split()]
        kappa = float(values["kappa"])
        bp = None
        if "branch_points" in values:
            bp = [_parse_complex(t) for t in values["branch_points"].split()]
    except ValueError as exc:
        raise SpectralDataError(f"malformed dataset: {exc}") from exc
    if len(vec["b"]) != g * g or any(len(vec[k]) != g for k in "uvd"):
        raise SpectralDataError("entry counts do not match the genus")
    if len(lattice) != 2 or any(len(w) != 2 for w in lattice):
        raise SpectralDataError("lattice needs two 'x,y' vectors")
    return SpectralData(g, vec["b"], vec["u"], vec["v"], vec["d"], kappa, lattice, bp, name)


def read_spectral_data(path) -> SpectralData:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpectralDataError(f"cannot read dataset {path}: {exc}") from exc
    return parse_spectral_data(text, name=path.stem)


def format_spectral_data(data: SpectralData) -> str:
    def r(v):
        return f"{float(v):.17g}"

    def c(z):
        return f"{r(z.real)},{r(z.imag)}"

    lines = [
        f"genus = {data.genus}",
        "B = " + " ".join(c(z) for z in data.B.reshape(-1)),
        "U = " + " ".join(c(z) for z in data.U),
        "V = " + " ".join(c(z) for z in data.V),
        "D = " + " ".join(c(z) for z in data.D),
        f"kappa = {r(data.kappa)}",
        "lattice = " + " ".join(f"{r(w[0])},{r(w[1])}" for w in data.lattice),
    ]
    if data.branch_points is not None:
        lines.append("branch_points = " + " ".join(c(z) for z in data.branch_points))
    return "\n".join(lines) + "\n"


BUNDLED = ("genus1_square", "genus1_rotated")


def bundled_dataset(name: str) -> SpectralData:
    if name not in BUNDLED:
        raise ValidationError(f"unknown dataset {name!r}; choose from {BUNDLED}")
    text = resources.files("hitchin").joinpath("data").joinpath(f"{name}.txt").read_text()
    return parse_spectral_data(text, name=name)


@dataclass(frozen=True)
class DatasetReport:
    name: str
    reality: float
    periodicity: float
    residual: float
    nx: int
    ny: int

    def passed(self, periodicity_tol=1e-8, residual_tol=1e-5) -> bool:
        return (self.reality < REALITY_TOL and self.periodicity < periodicity_tol
                and self.residual < residual_tol)


def validate_dataset(data: SpectralData, nx: int = 512, ny: int = 16) -> DatasetReport:
    grid = torus_grid(data.lattice, nx, ny)
    reality = float(np.abs(dp_solution_complex(data, grid.x, grid.y).imag).max())
    alpha = dp_solution(data, grid.x, grid.y)
    return DatasetReport(
        name=data.name,
        reality=reality,
        periodicity=periodicity_defect(data),
        residual=pde_residual_grid(alpha, data.kappa, data.lattice),
        nx=nx,
        ny=ny,
    )
