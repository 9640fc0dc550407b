"""Radial sinh-Gordon and sine-Gordon profiles.

For alpha = alpha(r) the reduced equations become

    sinh:  alpha'' + alpha'/r + s (k**2/2) sinh(2 alpha) = 0,   s = +1 (top) or -1 (bottom)
    sine:  alpha'' + alpha'/r + (k**2/2) sin(2 alpha) = 0

Both are singular at r = 0, so integration starts at a small r0 from the
regular power series with alpha(0) = a, alpha'(0) = 0. U = exp(alpha)
(resp. V = exp(i alpha)) maps them onto the third Painleve equation.

Top-sign sinh solutions decay like c sin(phi(k r) - theta0) / sqrt(k r)
with phi(z) = z + (c**2/4) ln z; c and theta0 follow from a in closed form.

Field dictionary used for observables (g, h and the signature realising
each equation with f1 = -d_y alpha, f2 = d_x alpha):

    sinh top     g = k cosh a, h = k sinh a, signature (1, 0)
    sinh bottom  g = k cosh a, h = k sinh a, signature (0, 0)
    sine         g = k cos a,  h = k sin a,  signature (1, 1)
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.integrate import solve_ivp
from scipy.optimize import least_squares

from .errors import DivergenceError, SeedAccuracyError, ValidationError, WindowError
from .fields import field_equation_residual_from_derivatives, oscillation_estimate
from .gamma import arg_gamma_imag

BLOWUP_ALPHA = 50.0
SAMPLES_PER_PERIOD = 40
# the solver runs at tol / TOL_SAFETY: its global error and the error of the
# differentiated dense output both exceed the local tolerance by 10-100x
TOL_SAFETY = 100.0


@dataclass(frozen=True)
class RadialProblem:
    kind: str = "sinh"
    sign: str = "top"
    kappa: float = 1.0
    a: float = -4.0
    r0: float = 1e-3
    r_max: float = 200.0
    tol: float = 1e-10

    def __post_init__(self):
        if self.kind not in ("sinh", "sine"):
            raise ValidationError(f"kind must be 'sinh' or 'sine', got {self.kind!r}")
        if self.sign not in ("top", "bottom"):
            raise ValidationError(f"sign must be 'top' or 'bottom', got {self.sign!r}")
        if self.kind == "sine" and self.sign != "top":
            raise ValidationError("the sine-Gordon equation has no sign choice")
        if not self.kappa > 0:
            raise ValidationError("kappa must be positive")
        if not 0 < self.r0 < self.r_max:
            raise ValidationError("need 0 < r0 < r_max")
        if not 1e-12 <= self.tol < 1e-3:
            raise ValidationError("tol must lie in [1e-12, 1e-3)")

    @property
    def s(self) -> int:
        return 1 if self.sign == "top" else -1

    @property
    def signature(self) -> tuple[int, int]:
        if self.kind == "sine":
            return (1, 1)
        return (1, 0) if self.sign == "top" else (0, 0)

    def nonlinearity(self, alpha):
        k2 = self.kappa**2 / 2
        if self.kind == "sinh":
            return self.s * k2 * np.sinh(2 * alpha)
        return k2 * np.sin(2 * alpha)

    def nonlinearity_prime(self, alpha):
        k2 = self.kappa**2
        if self.kind == "sinh":
            return self.s * k2 * np.cosh(2 * alpha)
        return k2 * np.cos(2 * alpha)

    def second_derivative(self, r, alpha, dalpha):
        return -dalpha / r - self.nonlinearity(alpha)

    def rhs(self, r, y):
        return np.array([y[1], self.second_derivative(r, y[0], y[1])])

    def replace(self, **kw) -> "RadialProblem":
        return replace(self, **kw)


def series_coefficients(problem: RadialProblem) -> tuple[float, float, float]:
    """(a, b2, b4) with alpha = a + b2 r**2 + b4 r**4 + O(r**6).

    Plugging the series into the ODE gives b2 = -N(a)/4 and
    b4 = -N'(a) b2 / 16 for the nonlinearity N.
    """
    a, k = problem.a, problem.kappa
    if problem.kind == "sinh":
        return a, -problem.s * k**2 / 8 * np.sinh(2 * a), k**4 / 256 * np.sinh(4 * a)
    return a, -k**2 / 8 * np.sin(2 * a), k**4 / 256 * np.sin(4 * a)


def series_seed(problem: RadialProblem) -> tuple[float, float]:
    """alpha(r0) and alpha'(r0) from the truncated series."""
    if problem.kappa**2 * problem.r0**2 >= 0.01:
        raise SeedAccuracyError(
            f"kappa**2 r0**2 = {problem.kappa**2 * problem.r0**2:.3g} >= 0.01; "
            "reduce r0 for an accurate series seed")
    a, b2, b4 = series_coefficients(problem)
    r = problem.r0
    return a + b2 * r**2 + b4 * r**4, 2 * b2 * r + 4 * b4 * r**3


@dataclass(frozen=True)
class Observables:
    sigma: np.ndarray
    cumulative_action: np.ndarray
    F12: np.ndarray
    J_theta: np.ndarray


@dataclass(frozen=True, eq=False)
class RadialSolution:
    r: np.ndarray
    alpha: np.ndarray
    dalpha: np.ndarray
    problem: RadialProblem
    n_steps: int = 0
    dense: object = field(default=None, repr=False)

    @cached_property
    def d2alpha(self) -> np.ndarray:
        return self.problem.second_derivative(self.r, self.alpha, self.dalpha)

    def __call__(self, r):
        """(alpha, alpha') at arbitrary radii inside the integration range."""
        return self.dense(r)

    @cached_property
    def d2alpha_interp(self) -> np.ndarray:
        """alpha'' from differentiating the integrator's dense output.

        Inside each accepted step the interpolant of alpha' is a polynomial;
        it is resampled at Chebyshev nodes of that step and differentiated,
        so the result does not use the right-hand side of the ODE.
        """
        if self.dense is None:
            raise ValidationError("solution has no dense output")
        ts = self.dense.ts
        m = 9
        ref = 0.5 * (1 - np.cos(np.pi * (np.arange(m) + 0.5) / m))
        idx = np.clip(np.searchsorted(ts, self.r, side="right") - 1, 0, len(ts) - 2)
        lo, hi = ts[idx], ts[idx + 1]
        nodes = lo[:, None] + (hi - lo)[:, None] * ref
        vals = self.dense(nodes.ravel())[1].reshape(nodes.shape)
        coef = np.linalg.solve(cheb.chebvander(2 * ref - 1, m - 1), vals.T)
        dcoef = cheb.chebder(coef, axis=0)
        x = 2 * (self.r - lo) / (hi - lo) - 1
        # Clenshaw on each column
        out = np.array([cheb.chebval(xi, dcoef[:, i]) for i, xi in enumerate(x)])
        return out * 2 / (hi - lo)

    @cached_property
    def observables(self) -> Observables:
        return observables(self)

    def columns(self) -> dict[str, np.ndarray]:
        ob = self.observables
        return {"r": self.r, "alpha": self.alpha, "dalpha": self.dalpha,
                "sigma": ob.sigma, "cumulative_action": ob.cumulative_action,
                "F12": ob.F12, "J_theta": ob.J_theta}


def sample_grid(problem: RadialProblem, samples_per_period: int = SAMPLES_PER_PERIOD) -> np.ndarray:
    """Geometric spacing near the origin, then uniform at period/samples_per_period."""
    dr = 2 * np.pi / problem.kappa / samples_per_period
    inner = np.geomspace(problem.r0, min(problem.r_max, 1.0 / problem.kappa), 64)
    outer = np.arange(0.0, problem.r_max, dr)
    r = np.concatenate([inner, outer[outer > inner[-1]], [problem.r_max]])
    return np.unique(r)


def integrate(problem: RadialProblem, samples_per_period: int = SAMPLES_PER_PERIOD) -> RadialSolution:
    """Integrate from the series seed at r0 out to r_max.

    Raises DivergenceError (carrying the radius) if |alpha| exceeds the
    blow-up threshold or the step size collapses.
    """
    seed = series_seed(problem)

    def blowup(r, y):
        return abs(y[0]) - BLOWUP_ALPHA
    blowup.terminal = True

    sol = solve_ivp(problem.rhs, (problem.r0, problem.r_max), seed, method="DOP853",
                    rtol=problem.tol / TOL_SAFETY, atol=problem.tol / TOL_SAFETY,
                    dense_output=True, events=blowup)
    if sol.status == 1:
        r_b = float(sol.t_events[0][0])
        raise DivergenceError(f"|alpha| exceeded {BLOWUP_ALPHA} at r = {r_b:.6g}", radius=r_b)
    if sol.status != 0:
        r_b = float(sol.t[-1])
        raise DivergenceError(f"integration failed at r = {r_b:.6g}: {sol.message}", radius=r_b)

    r = sample_grid(problem, samples_per_period)
    y = sol.sol(r)
    y[:, 0] = seed
    return RadialSolution(r=r, alpha=y[0], dalpha=y[1], problem=problem,
                          n_steps=int(sol.t.size - 1), dense=sol.sol)


# -- Painleve III --------------------------------------------------------------

def painleve_residuals(sol: RadialSolution, r_min: float | None = None) -> np.ndarray:
    """Relative residual of the Painleve III form along the samples.

    sinh: U'' - U'**2/U + U'/r + s (k**2/4)(U**3 - 1/U), U = exp(alpha)
    sine: V'' - V'**2/V + V'/r + (k**2/4)(V**3 - 1/V),  V = exp(i alpha)

    U and U' come from the sampled state, U'' from the derivative of the
    dense output (not from the radial ODE). Each value is divided by the
    sum of the magnitudes of the five terms.
    """
    p = sol.problem
    mask = sol.r >= (2 * p.r0 if r_min is None else r_min)
    r, a, da = sol.r[mask], sol.alpha[mask], sol.dalpha[mask]
    dda = sol.d2alpha_interp[mask]
    k4 = p.kappa**2 / 4
    if p.kind == "sinh":
        W = np.exp(a)
        dW = da * W
        ddW = (dda + da**2) * W
        c = p.s * k4
    else:
        W = np.exp(1j * a)
        dW = 1j * da * W
        ddW = (1j * dda - da**2) * W
        c = k4
    terms = (ddW, -dW**2 / W, dW / r, c * W**3, -c / W)
    return np.abs(sum(terms)) / sum(np.abs(t) for t in terms)


def painleve_residual(sol: RadialSolution, r_min: float | None = None) -> float:
    return float(np.max(np.abs(painleve_residuals(sol, r_min))))


def painleve_rhs(problem: RadialProblem):
    """First-order system for (W, W') with W = U (sinh) or V (sine)."""
    k4 = problem.kappa**2 / 4
    c = problem.s * k4 if problem.kind == "sinh" else k4

    def rhs(r, y):
        w, dw = y
        return np.array([dw, dw * dw / w - dw / r - c * (w**3 - 1 / w)])
    return rhs


def painleve_cross_check(sol: RadialSolution, r_end: float | None = None) -> float:
    """Integrate the Painleve III form directly and compare with exp(alpha).

    Returns the maximum relative deviation over samples up to ``r_end``.
    Independent of the alpha integration apart from the shared seed.
    """
    p = sol.problem
    r_end = p.r_max if r_end is None else r_end
    a0, da0 = sol.alpha[0], sol.dalpha[0]
    if p.kind == "sinh":
        y0 = np.array([np.exp(a0), da0 * np.exp(a0)])
        target = np.exp(sol.alpha)
    else:
        y0 = np.array([np.exp(1j * a0), 1j * da0 * np.exp(1j * a0)])
        target = np.exp(1j * sol.alpha)
    out = solve_ivp(painleve_rhs(p), (sol.r[0], r_end), y0, method="DOP853",
                    rtol=p.tol, atol=p.tol * abs(y0[0]), dense_output=True)
    mask = sol.r <= r_end
    w = out.sol(sol.r[mask])[0]
    return float(np.max(np.abs(w - target[mask]) / np.abs(target[mask])))


# -- asymptotics ---------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticFit:
    c: float
    theta0: float
    fit_window: tuple[float, float] | None = None
    fit_residual: float = 0.0


def exact_asymptotics(a: float, kappa: float = 1.0) -> AsymptoticFit:
    """Closed-form tail parameters of the regular top-sign sinh solution.

    c**2 = (4/pi) ln cosh a,
    theta0 = -(c**2/2) ln 2 - pi/4 + arg Gamma(i c**2/4) + (pi/2) sign(a)  (mod 2 pi).
    Independent of kappa once r is measured as kappa r.
    """
    if a == 0:
        return AsymptoticFit(0.0, 0.0)
    c2 = 4 / np.pi * np.log(np.cosh(a))
    theta0 = (-c2 / 2 * np.log(2) - np.pi / 4 + arg_gamma_imag(c2 / 4)
              + np.pi / 2 * np.sign(a))
    return AsymptoticFit(float(np.sqrt(c2)), float(theta0 % (2 * np.pi)))


def tail_model(r, c, theta0, kappa):
    z = kappa * np.asarray(r, dtype=float)
    return c * np.sin(z + c**2 / 4 * np.log(z) - theta0) / np.sqrt(z)


def fit_tail_samples(r, alpha, kappa, guess: AsymptoticFit | None = None) -> AsymptoticFit:
    """Least-squares fit of (c, theta0) to samples of the decaying tail."""
    r = np.asarray(r, dtype=float)
    alpha = np.asarray(alpha, dtype=float)

    def resid(p):
        return tail_model(r, p[0], p[1], kappa) - alpha

    c0 = float(np.max(np.abs(alpha) * np.sqrt(kappa * r)))
    starts = [(c0, th) for th in np.linspace(0, 2 * np.pi, 8, endpoint=False)]
    if guess is not None and guess.c > 0:
        starts.insert(0, (guess.c, guess.theta0))
    best = None
    for start in starts:
        res = least_squares(resid, start, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if best is None or res.cost < best.cost:
            best = res
    c, th = best.x
    if c < 0:
        c, th = -c, th + np.pi
    rms = float(np.sqrt(np.mean(best.fun**2)))
    return AsymptoticFit(float(c), float(th % (2 * np.pi)), (float(r[0]), float(r[-1])), rms)


def fit_tail(sol: RadialSolution) -> AsymptoticFit:
    """Fit the decaying-tail model on the upper half [r_max/2, r_max]."""
    p = sol.problem
    if p.kappa * p.r_max < 50:
        raise WindowError(f"kappa r_max = {p.kappa * p.r_max:.3g} < 50: tail window too short")
    mask = sol.r >= p.r_max / 2
    guess = None
    if p.kind == "sinh" and p.sign == "top" and p.a != 0:
        guess = exact_asymptotics(p.a, p.kappa)
    return fit_tail_samples(sol.r[mask], sol.alpha[mask], p.kappa, guess)


def action_bracket(sol: RadialSolution) -> np.ndarray:
    """r sinh(2 alpha) alpha' (sinh) or r sin(2 alpha) alpha' (sine)."""
    f = np.sinh if sol.problem.kind == "sinh" else np.sin
    return sol.r * f(2 * sol.alpha) * sol.dalpha


def tail_oscillation(sol: RadialSolution) -> tuple[float, float]:
    """(amplitude, angular frequency) of the action bracket over [r_max/2, r_max]."""
    mask = sol.r >= sol.problem.r_max / 2
    amp, freq, _ = oscillation_estimate(sol.r[mask], action_bracket(sol)[mask])
    return amp, freq


# -- observables ---------------------------------------------------------------

def _g_squared_derivatives(sol: RadialSolution):
    p = sol.problem
    a, da, dda = sol.alpha, sol.dalpha, sol.d2alpha
    k2 = p.kappa**2
    if p.kind == "sinh":
        g2 = k2 * np.cosh(a) ** 2
        d1 = k2 * np.sinh(2 * a) * da
        d2 = k2 * (2 * np.cosh(2 * a) * da**2 + np.sinh(2 * a) * dda)
    else:
        g2 = k2 * np.cos(a) ** 2
        d1 = -k2 * np.sin(2 * a) * da
        d2 = -k2 * (2 * np.cos(2 * a) * da**2 + np.sin(2 * a) * dda)
    return g2, d1, d2


def observables(sol: RadialSolution) -> Observables:
    """Action density, cumulative action, F12 and J_theta at every sample.

    sigma = (-1)**n1 lap(g**2) / (16 pi**2); the cumulative action
    2 pi int sigma r dr is evaluated as the boundary term
    (-1)**n1 [r d(g**2)/dr] / (8 pi) between r0 and R. F12 = lap(alpha)
    and J_theta = -dF12/dr.
    """
    p = sol.problem
    eps1 = -1 if p.signature[0] else 1
    _, d1, d2 = _g_squared_derivatives(sol)
    r = sol.r
    sigma = eps1 / (16 * np.pi**2) * (d2 + d1 / r)
    bracket = eps1 / (8 * np.pi) * r * d1
    F12 = -p.nonlinearity(sol.alpha)
    J = p.nonlinearity_prime(sol.alpha) * sol.dalpha
    return Observables(sigma, bracket - bracket[0], F12, J)


def field_equation_residuals(sol: RadialSolution, min_gap: float = 1e-3) -> np.ndarray:
    """Scalar field equation for g evaluated on the profile.

    Samples where |g**2 - k**2| < min_gap k**2 (zeros of sinh or sin of
    alpha) are skipped since the equation degenerates there.
    """
    p = sol.problem
    g2, d1, d2 = _g_squared_derivatives(sol)
    k2 = p.kappa**2
    keep = np.abs(g2 - k2) > min_gap * k2
    a, da, dda, r = sol.alpha[keep], sol.dalpha[keep], sol.d2alpha[keep], sol.r[keep]
    if p.kind == "sinh":
        g = p.kappa * np.cosh(a)
        dg = p.kappa * np.sinh(a) * da
        ddg = p.kappa * (np.cosh(a) * da**2 + np.sinh(a) * dda)
    else:
        g = p.kappa * np.cos(a)
        dg = -p.kappa * np.sin(a) * da
        ddg = -p.kappa * (np.cos(a) * da**2 + np.sin(a) * dda)
    return field_equation_residual_from_derivatives(g, dg**2, ddg + dg / r, p.kappa, p.signature)
