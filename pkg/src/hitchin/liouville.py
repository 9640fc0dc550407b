"""Exact solutions with kappa = 0 (the Liouville case).

With h = g the reduced equations collapse to f1 = -d_y ln g,
f2 = d_x ln g and lap(ln g) = (-1)**n1 g**2, so lambda = g**2 solves

    lap(ln lambda) + 2 s lambda = 0,

s = +1 (top sign, SO(2,1), signature (1, 0)) or s = -1 (bottom sign,
SU(2), signature (0, 0)). Liouville's general real solution is

    lambda = 4 |xi'(z)|**2 / (1 + s |xi(z)|**2)**2

for an analytic function xi.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from . import fields
from .algebra import _generator_matrices
from .errors import AccuracyError, IntegralityError, SingularPointError, ValidationError
from .fields import AnsatzField, HitchinPair

TOP, BOTTOM = 1, -1


def _sign(sign) -> int:
    if sign in ("top", "+", 1):
        return TOP
    if sign in ("bottom", "-", -1):
        return BOTTOM
    raise ValidationError(f"sign must be 'top' or 'bottom', got {sign!r}")


def signature_for(sign) -> tuple[int, int]:
    return (1, 0) if _sign(sign) == TOP else (0, 0)


@dataclass(frozen=True)
class LiouvilleSolution:
    """Analytic data xi, xi', xi'' (vectorised over complex z) and a sign."""

    xi: Callable
    dxi: Callable
    d2xi: Callable
    sign: int = TOP
    nu: float | None = None
    roots: tuple = field(default=())

    @classmethod
    def monomial(cls, nu: float, sign="top") -> "LiouvilleSolution":
        if nu == 0:
            raise ValidationError("nu must be nonzero")
        nu = float(nu)
        return cls(
            xi=lambda z: np.asarray(z, dtype=complex) ** nu,
            dxi=lambda z: nu * np.asarray(z, dtype=complex) ** (nu - 1),
            d2xi=lambda z: nu * (nu - 1) * np.asarray(z, dtype=complex) ** (nu - 2),
            sign=_sign(sign),
            nu=nu,
        )

    @classmethod
    def polynomial(cls, roots, sign="top") -> "LiouvilleSolution":
        roots = tuple(complex(r) for r in roots)
        if len(roots) == 0:
            raise ValidationError("need at least one root")
        if len(set(roots)) != len(roots):
            raise ValidationError("roots must be distinct")
        c = np.poly(roots)
        dc, d2c = np.polyder(c), np.polyder(c, 2)
        return cls(
            xi=lambda z: np.polyval(c, z),
            dxi=lambda z: np.polyval(dc, z),
            d2xi=lambda z: np.polyval(d2c, z) if d2c.size else np.zeros_like(np.asarray(z, dtype=complex)),
            sign=_sign(sign),
            roots=roots,
        )

    @property
    def sig(self) -> tuple[int, int]:
        return signature_for(self.sign)


def lambda_general(sol: LiouvilleSolution, z, pole_tol: float = 1e-12):
    """lambda = 4 |xi'|**2 / (1 + s |xi|**2)**2 at complex ``z``."""
    xi = sol.xi(z)
    denom = 1.0 + sol.sign * np.abs(xi) ** 2
    if sol.sign == BOTTOM and np.any(np.abs(denom) < pole_tol):
        raise SingularPointError("1 - |xi|**2 vanishes: pole of the bottom-sign solution")
    return 4.0 * np.abs(sol.dxi(z)) ** 2 / denom**2


def liouville_residual(sol: LiouvilleSolution, x, y, step: float = 1e-3):
    """lap(ln lambda) + 2 s lambda by fourth-order differences."""
    loglam = lambda xx, yy: np.log(lambda_general(sol, xx + 1j * yy))  # noqa: E731
    return fields.laplacian(loglam, x, y, step) + 2 * sol.sign * lambda_general(sol, x + 1j * y)


# -- axisymmetric family -----------------------------------------------------

def g_squared_radial(nu, sign, r):
    """4 nu**2 r**(2 nu - 2) / (1 + s r**(2 nu))**2."""
    s = _sign(sign)
    r = np.asarray(r, dtype=float)
    return 4 * nu**2 * r ** (2 * nu - 2) / (1 + s * r ** (2 * nu)) ** 2


def dg_squared_radial(nu, sign, r):
    s = _sign(sign)
    r = np.asarray(r, dtype=float)
    p = r ** (2 * nu)
    return (4 * nu**2 * r ** (2 * nu - 3)
            * ((2 * nu - 2) * (1 + s * p) - 4 * s * nu * p) / (1 + s * p) ** 3)


def connection_coefficient(nu, sign, r):
    """Coefficient of tau_1 d(theta) in the polar gauge: nu - 1 - 2 s nu r^2nu / (1 + s r^2nu)."""
    s = _sign(sign)
    p = np.asarray(r, dtype=float) ** (2 * nu)
    return nu - 1 - 2 * s * nu * p / (1 + s * p)


def _polar(a_theta: Callable):
    """Cartesian f1, f2 for a connection a(r) d(theta)."""
    def f1(x, y):
        r2 = x * x + y * y
        return -a_theta(np.sqrt(r2)) * y / r2

    def f2(x, y):
        r2 = x * x + y * y
        return a_theta(np.sqrt(r2)) * x / r2

    return f1, f2


def hitchin_pair_polar(nu: float, sign="top") -> AnsatzField:
    """Axisymmetric pair from xi = z**nu, as an ansatz field (h = g).

    Regular away from r = 0 for every nonzero real nu; the bottom sign is
    additionally singular on r = 1.
    """
    if nu == 0:
        raise ValidationError("nu must be nonzero")
    s = _sign(sign)
    f1, f2 = _polar(lambda r: connection_coefficient(nu, s, r))

    def g(x, y):
        r = np.sqrt(x * x + y * y)
        return 2 * abs(nu) * r ** (nu - 1) / np.abs(1 + s * r ** (2 * nu))

    return AnsatzField.from_callables(signature_for(s), f1, f2, g, g)


# -- patches on the sphere ---------------------------------------------------

def _require_integer(nu):
    if not (float(nu).is_integer() and nu >= 1):
        raise IntegralityError(
            f"nu = {nu!r}: the Higgs field contains z**(nu - 1), which is single "
            "valued only for integer nu, so the patches do not glue for non-integer nu")
    return int(nu)


def _theta_pair(a_theta, phi_coeff, sig):
    t1, t2, t3 = _generator_matrices(sig)
    f1, f2 = _polar(a_theta)
    lower = t2 - 1j * t3
    return HitchinPair(
        sig,
        lambda x, y: np.multiply.outer(np.asarray(f1(x, y), dtype=complex), t1),
        lambda x, y: np.multiply.outer(np.asarray(f2(x, y), dtype=complex), t1),
        lambda x, y: np.multiply.outer(np.asarray(phi_coeff(x, y), dtype=complex), lower),
    )


def polar_pair(nu: float) -> HitchinPair:
    """Top-sign polar-gauge pair as a matrix-valued HitchinPair."""
    def phi(x, y):
        r = np.hypot(x, y)
        return abs(nu) * r ** (nu - 1) / (1 + r ** (2 * nu))
    return _theta_pair(lambda r: connection_coefficient(nu, TOP, r), phi, (1, 0))


def patch_pair(nu) -> tuple[HitchinPair, HitchinPair]:
    """Gauges of the top-sign solution regular at the origin and at infinity.

    The two are related by the gauge transformation exp(2 nu theta tau_1).
    """
    nu = _require_integer(nu)

    def a0(r):
        p = r ** (2 * nu)
        return -2 * nu * p / (1 + p)

    def ainf(r):
        return 2 * nu / (1 + r ** (2 * nu))

    def phi0(x, y):
        z = x + 1j * y
        return nu * z ** (nu - 1) / (1 + np.abs(z) ** (2 * nu))

    def phiinf(x, y):
        z = x + 1j * y
        r2 = np.abs(z) ** 2
        return nu * np.conj(z) ** (nu + 1) / (r2 * (1 + r2**nu))

    return _theta_pair(a0, phi0, (1, 0)), _theta_pair(ainf, phiinf, (1, 0))


def rotation_gauge(n: float, sig=(1, 0)):
    """q = exp(n theta tau_1) and its partial derivatives, theta in (-pi, pi]."""
    t1 = _generator_matrices(sig)[0]
    w, v = np.linalg.eig(t1)

    def q(x, y):
        th = np.arctan2(y, x)
        e = np.exp(np.multiply.outer(n * th, w))
        return np.einsum("ij,...j,jk->...ik", v, e, np.linalg.inv(v))

    def dqx(x, y):
        return q(x, y) @ (n * t1) * (-y / (x * x + y * y))[..., None, None]

    def dqy(x, y):
        return q(x, y) @ (n * t1) * (x / (x * x + y * y))[..., None, None]

    return q, (dqx, dqy)


def patch_transition_error(nu, r: float = 1.0, n_theta: int = 64) -> float:
    """Max entrywise mismatch between the infinity patch and the gauge-rotated origin patch."""
    nu = _require_integer(nu)
    origin, infinity = patch_pair(nu)
    q, dq = rotation_gauge(2 * nu)
    moved = origin.gauge_transform(q, dq)
    th = np.linspace(-np.pi, np.pi, n_theta, endpoint=False) + np.pi / n_theta
    x, y = r * np.cos(th), r * np.sin(th)
    err = 0.0
    for a, b in ((moved.ax, infinity.ax), (moved.ay, infinity.ay), (moved.phi, infinity.phi)):
        err = max(err, float(np.abs(a(x, y) - b(x, y)).max()))
    return err


# -- flux and multi-center solutions -----------------------------------------

def field_strength_radial(nu, r):
    """Coefficient of tau_1 dx^dy for the top-sign family."""
    return -g_squared_radial(nu, TOP, r)


def flux(nu, numerical: bool = False, rtol: float = 1e-10) -> float:
    """Total flux of the top-sign axisymmetric solution.

    Analytic: -4 pi nu. Numerical: 2 pi int_0^inf F(r) r dr by adaptive
    quadrature, split at r = 1.
    """
    if nu <= 0:
        raise ValidationError("flux is defined here for positive nu")
    if not numerical:
        return -4 * np.pi * nu
    total, err = 0.0, 0.0
    for lo, hi in ((0.0, 1.0), (1.0, np.inf)):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, e = integrate.quad(lambda r: field_strength_radial(nu, r) * r, lo, hi,
                                        epsabs=0.0, epsrel=rtol, limit=200)
            except integrate.IntegrationWarning as exc:
                raise AccuracyError(f"flux quadrature did not converge: {exc}") from exc
        total += val
        err += e
    if err > 1e3 * rtol * abs(total):
        raise AccuracyError(f"flux quadrature error estimate {err:.3g} too large")
    return 2 * np.pi * total


def multicenter_lambda(roots, z, sign="top"):
    """lambda for xi = prod (z - z_k)."""
    sol = LiouvilleSolution.polynomial(roots, sign)
    dxi = sol.dxi(z)
    if np.any(np.abs(dxi) < 1e-14):
        warnings.warn("xi' vanishes at the evaluation point; lambda is zero there",
                      RuntimeWarning, stacklevel=2)
    return lambda_general(sol, z)


def multicenter_field(roots) -> AnsatzField:
    """Top-sign ansatz field f1 = -d_y ln g, f2 = d_x ln g, h = g, derivatives exact."""
    sol = LiouvilleSolution.polynomial(roots, "top")

    def parts(x, y):
        z = x + 1j * y
        xi, d1, d2 = sol.xi(z), sol.dxi(z), sol.d2xi(z)
        q = 1 + np.abs(xi) ** 2
        ratio = d2 / d1
        cross = np.conj(xi) * d1
        dlx = ratio.real - 2 * cross.real / q
        dly = -ratio.imag + 2 * cross.imag / q
        return dlx, dly

    def g(x, y):
        z = x + 1j * y
        return 2 * np.abs(sol.dxi(z)) / (1 + np.abs(sol.xi(z)) ** 2)

    return AnsatzField.from_callables(
        (1, 0),
        lambda x, y: -parts(x, y)[1],
        lambda x, y: parts(x, y)[0],
        g, g)


def multicenter_flux(roots, rtol: float = 1e-9) -> float:
    """-int lambda dx dy over the plane, in polar coordinates."""
    sol = LiouvilleSolution.polynomial(roots, "top")
    rmid = max(2.0, 2 * max(abs(r) for r in sol.roots))

    def ring(r):
        val, _ = integrate.quad(
            lambda th: lambda_general(sol, r * np.exp(1j * th)) * r,
            0.0, 2 * np.pi, epsabs=0.0, epsrel=rtol * 1e-1, limit=200)
        return val

    total, err = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            for lo, hi in ((0.0, rmid), (rmid, np.inf)):
                val, e = integrate.quad(ring, lo, hi, epsabs=0.0, epsrel=rtol, limit=400)
                total += val
                err += e
        except integrate.IntegrationWarning as exc:
            raise AccuracyError(f"flux quadrature did not converge: {exc}") from exc
    return -total


def reduced_action(nu, sign="top", r_min=1e-6, r_max=1e6, n=20001):
    """Boundary-term reduced action of the axisymmetric family on [r_min, r_max]."""
    r = np.geomspace(r_min, r_max, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = g_squared_radial(nu, sign, r)
        dg2 = dg_squared_radial(nu, sign, r)
    return fields.reduced_action_radial(r, g2, signature_for(sign), dg2dr=dg2, blowup=1e4)
