"""Ansatz fields, curvature, Hitchin residuals and action densities.

The ansatz is

    A = (f1 dx + f2 dy) tau_1 + g du tau_2 + h dv tau_3

with f1, f2, g, h real functions of (x, y). Hitchin's equations then
reduce to five scalar equations:

    d_x g = (-1)**n2 f2 h          d_y g = -(-1)**n2 f1 h
    d_x h = f2 g                   d_y h = -f1 g
    d_x f2 - d_y f1 = (-1)**n1 g h

Fields are supplied either as vectorised callables ``f(x, y)``, whose
derivatives are taken by central differences with a step chosen here, or
as samples on a uniform grid, whose derivatives use second-order central
stencils at the grid spacing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import (
    LieElement,
    RealFormSignature,
    _generator_matrices,
    real_form_conjugate,
)
from .errors import DomainError, SingularLocusError

#: Step for first derivatives of callable fields.
DEFAULT_STEP = 1e-4
#: Step for second derivatives; 1e-4 would lose ~8 digits to cancellation.
DEFAULT_STEP2 = 1e-3

SINGULAR_GUARD = 1e-10


# -- differentiation ---------------------------------------------------------

_D1 = {2: ((1, 0.5), (-1, -0.5)),
       4: ((2, -1 / 12), (1, 8 / 12), (-1, -8 / 12), (-2, 1 / 12))}
_D2 = {2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
       4: ((2, -1 / 12), (1, 16 / 12), (0, -30 / 12), (-1, 16 / 12), (-2, -1 / 12))}


def _shifted(func, x, y, axis, k, h):
    if axis == 0:
        return func(x + k * h, y)
    return func(x, y + k * h)


def partial(func: Callable, x, y, axis: int, step: float = DEFAULT_STEP, order: int = 4):
    """Central-difference first derivative along ``axis`` (0 = x, 1 = y)."""
    return sum(w * _shifted(func, x, y, axis, k, step) for k, w in _D1[order]) / step


def second_partial(func: Callable, x, y, axis: int, step: float = DEFAULT_STEP2, order: int = 4):
    return sum(w * _shifted(func, x, y, axis, k, step) for k, w in _D2[order]) / step**2


def laplacian(func: Callable, x, y, step: float = DEFAULT_STEP2, order: int = 4):
    return second_partial(func, x, y, 0, step, order) + second_partial(func, x, y, 1, step, order)


class CallableScalar:
    """A scalar field given by a vectorised function of (x, y)."""

    def __init__(self, func, step=DEFAULT_STEP, step2=DEFAULT_STEP2, order=4):
        self.func = func
        self.step = step
        self.step2 = step2
        self.order = order

    def __call__(self, x, y):
        return self.func(x, y)

    def value(self, x, y):
        return self.func(x, y)

    def grad(self, x, y):
        return (partial(self.func, x, y, 0, self.step, self.order),
                partial(self.func, x, y, 1, self.step, self.order))

    def laplacian(self, x, y):
        return laplacian(self.func, x, y, self.step2, self.order)

    def squared(self):
        f = self.func
        return CallableScalar(lambda x, y: f(x, y) ** 2, self.step, self.step2, self.order)


class GridScalar:
    """A scalar field sampled at ``origin + (i dx, j dy)``; array index [i, j]."""

    def __init__(self, values, dx, dy, origin=(0.0, 0.0)):
        self.values = np.asarray(values, dtype=float)
        self.dx = float(dx)
        self.dy = float(dy)
        self.origin = (float(origin[0]), float(origin[1]))

    def _index(self, x, y):
        fi = (np.asarray(x, dtype=float) - self.origin[0]) / self.dx
        fj = (np.asarray(y, dtype=float) - self.origin[1]) / self.dy
        i, j = np.rint(fi).astype(int), np.rint(fj).astype(int)
        if np.any(np.abs(fi - i) > 1e-6) or np.any(np.abs(fj - j) > 1e-6):
            raise DomainError("point does not lie on a grid node")
        nx, ny = self.values.shape
        if np.any((i < 1) | (i > nx - 2) | (j < 1) | (j > ny - 2)):
            raise DomainError("point is not an interior grid node")
        return i, j

    def __call__(self, x, y):
        return self.value(x, y)

    def value(self, x, y):
        i, j = self._index(x, y)
        return self.values[i, j]

    def grad(self, x, y):
        i, j = self._index(x, y)
        v = self.values
        return ((v[i + 1, j] - v[i - 1, j]) / (2 * self.dx),
                (v[i, j + 1] - v[i, j - 1]) / (2 * self.dy))

    def laplacian(self, x, y):
        i, j = self._index(x, y)
        v = self.values
        return ((v[i + 1, j] - 2 * v[i, j] + v[i - 1, j]) / self.dx**2
                + (v[i, j + 1] - 2 * v[i, j] + v[i, j - 1]) / self.dy**2)

    def squared(self):
        return GridScalar(self.values**2, self.dx, self.dy, self.origin)


def as_scalar(obj, step=DEFAULT_STEP, step2=DEFAULT_STEP2, order=4):
    if isinstance(obj, (CallableScalar, GridScalar)):
        return obj
    return CallableScalar(obj, step, step2, order)


# -- ansatz fields -----------------------------------------------------------

@dataclass(frozen=True)
class AnsatzField:
    sig: RealFormSignature
    f1: CallableScalar | GridScalar
    f2: CallableScalar | GridScalar
    g: CallableScalar | GridScalar
    h: CallableScalar | GridScalar

    @classmethod
    def from_callables(cls, sig, f1, f2, g, h, step=DEFAULT_STEP, order=4):
        wrap = lambda f: as_scalar(f, step=step, order=order)  # noqa: E731
        return cls(RealFormSignature.coerce(sig), wrap(f1), wrap(f2), wrap(g), wrap(h))

    @classmethod
    def from_grid(cls, sig, f1, f2, g, h, dx, dy, origin=(0.0, 0.0)):
        wrap = lambda a: GridScalar(a, dx, dy, origin)  # noqa: E731
        return cls(RealFormSignature.coerce(sig), wrap(f1), wrap(f2), wrap(g), wrap(h))

    @classmethod
    def zero(cls, sig=(1, 0)):
        z = lambda x, y: np.zeros(np.broadcast(x, y).shape)  # noqa: E731
        return cls.from_callables(sig, z, z, z, z)

    def values(self, x, y):
        return tuple(c.value(x, y) for c in (self.f1, self.f2, self.g, self.h))

    def to_pair(self) -> "HitchinPair":
        """The same configuration as a matrix-valued Hitchin pair (callables only)."""
        t1, t2, t3 = _generator_matrices(self.sig)
        f1, f2, g, h = self.f1, self.f2, self.g, self.h

        def mat(coef, t):
            return np.multiply.outer(np.asarray(coef, dtype=complex), t)

        return HitchinPair(
            self.sig,
            lambda x, y: mat(f1(x, y), t1),
            lambda x, y: mat(f2(x, y), t1),
            lambda x, y: 0.5 * (mat(g(x, y), t2) - 1j * mat(h(x, y), t3)),
        )


@dataclass(frozen=True)
class CurvatureComponents:
    F12: LieElement
    F13: LieElement
    F14: LieElement
    F23: LieElement
    F24: LieElement
    F34: LieElement

    def as_dict(self):
        return {k: getattr(self, k) for k in ("F12", "F13", "F14", "F23", "F24", "F34")}


@dataclass(frozen=True)
class HitchinResidual:
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    r4: np.ndarray
    r5: np.ndarray

    def as_tuple(self):
        return (self.r1, self.r2, self.r3, self.r4, self.r5)

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(r)) for r in self.as_tuple()))


def _partials(field: AnsatzField, x, y):
    out = {}
    for name in ("f1", "f2", "g", "h"):
        comp = getattr(field, name)
        out[name] = comp.value(x, y)
        out[name + "_x"], out[name + "_y"] = comp.grad(x, y)
    return out


def curvature(field: AnsatzField, point) -> CurvatureComponents:
    """Components F_{mu nu} of F = dA + A ^ A at a single point."""
    x, y = point
    p = _partials(field, x, y)
    s = field.sig
    t1, t2, t3 = _generator_matrices(s)
    f1, f2, g, h = p["f1"], p["f2"], p["g"], p["h"]

    def L(m):
        return LieElement(m, s)

    return CurvatureComponents(
        F12=L((p["f2_x"] - p["f1_y"]) * t1),
        F13=L(p["g_x"] * t2 + f1 * g * t3),
        F14=L(p["h_x"] * t3 - s.eps2 * f1 * h * t2),
        F23=L(p["g_y"] * t2 + f2 * g * t3),
        F24=L(p["h_y"] * t3 - s.eps2 * f2 * h * t2),
        F34=L(s.eps1 * g * h * t1),
    )


def hitchin_residual(field: AnsatzField, point) -> HitchinResidual:
    """Left minus right hand sides of the five reduced equations.

    ``point`` may hold arrays of coordinates; residuals then come back as
    arrays of the broadcast shape.
    """
    x, y = point
    p = _partials(field, x, y)
    e1, e2 = field.sig.eps1, field.sig.eps2
    return HitchinResidual(
        r1=p["g_x"] - e2 * p["f2"] * p["h"],
        r2=p["g_y"] + e2 * p["f1"] * p["h"],
        r3=p["h_x"] - p["f2"] * p["g"],
        r4=p["h_y"] + p["f1"] * p["g"],
        r5=p["f2_x"] - p["f1_y"] - e1 * p["g"] * p["h"],
    )


def self_duality_residual(field: AnsatzField, point) -> float:
    """max ||F12 - F34||, ||F13 + F24||, ||F14 - F23|| from the curvature matrices."""
    F = curvature(field, point)
    return max((F.F12 - F.F34).norm(), (F.F13 + F.F24).norm(), (F.F14 - F.F23).norm())


def kappa_squared(g, h, sig):
    """Conserved combination g**2 - (-1)**n2 h**2."""
    sig = RealFormSignature.coerce(sig)
    return np.asarray(g) ** 2 - sig.eps2 * np.asarray(h) ** 2


def field_equation_residual_from_derivatives(g, grad_sq, lap, kappa, sig):
    """Residual of the scalar equation for g given g, |grad g|**2 and lap g.

    lap g - g |grad g|**2 / (g**2 - k**2) - (-1)**n1 g (g**2 - k**2)
    """
    sig = RealFormSignature.coerce(sig)
    g = np.asarray(g, dtype=float)
    d = g**2 - kappa**2
    if np.any(np.abs(d) < SINGULAR_GUARD * max(1.0, kappa**2)):
        raise SingularLocusError("g**2 - kappa**2 vanishes at the evaluation point")
    return lap - g * grad_sq / d - sig.eps1 * g * d


def field_equation_residual_g(gfield, kappa, sig, point):
    g = as_scalar(gfield)
    x, y = point
    gx, gy = g.grad(x, y)
    return field_equation_residual_from_derivatives(
        g.value(x, y), gx**2 + gy**2, g.laplacian(x, y), kappa, sig)


# -- action ------------------------------------------------------------------

def action_density(gfield, sig, point):
    """sigma = (-1)**n1 / (16 pi**2) lap(g**2)."""
    sig = RealFormSignature.coerce(sig)
    g2 = as_scalar(gfield).squared()
    return sig.eps1 / (16 * np.pi**2) * g2.laplacian(*point)


def action_integrand_raw(field: AnsatzField, point):
    """On-shell action integrand in terms of f1, f2, g, h (per unit 4-volume)."""
    f1, f2, g, h = field.values(*point)
    e1, e2 = field.sig.eps1, field.sig.eps2
    return ((e2 * (g * h) ** 2 + e1 * e2 * (f1**2 + f2**2) * (g**2 + e2 * h**2))
            / (8 * np.pi**2))


def action_integrand_g(gfield, kappa, sig, point):
    """Action integrand after eliminating f1, f2 and h in favour of g."""
    sig = RealFormSignature.coerce(sig)
    g = as_scalar(gfield)
    gx, gy = g.grad(*point)
    gv = g.value(*point)
    d = gv**2 - kappa**2
    if np.any(np.abs(d) < SINGULAR_GUARD * max(1.0, kappa**2)):
        raise SingularLocusError("g**2 - kappa**2 vanishes at the evaluation point")
    return (gv**2 * d + sig.eps1 * (gx**2 + gy**2) * (2 * gv**2 - kappa**2) / d) / (8 * np.pi**2)


def action_integrand_curvature(field: AnsatzField, point) -> float:
    """-(1/8 pi**2) sum_{mu<nu} tr(F_{mu nu}**2), valid off shell as well."""
    F = curvature(field, point)
    total = sum(np.trace(c.matrix @ c.matrix) for c in F.as_dict().values())
    return float(np.real(-total / (8 * np.pi**2)))


@dataclass(frozen=True)
class ReducedAction:
    value: float
    upper: float
    lower: float
    regular: bool
    oscillating: bool
    amplitude: float = 0.0
    frequency: float = 0.0

    @property
    def converged(self) -> bool:
        return self.regular and not self.oscillating


def oscillation_estimate(r, y):
    """(amplitude, angular frequency, crossings) of ``y`` about its mean.

    Frequency comes from linearly interpolated zero crossings; amplitude is
    half the peak-to-peak range.
    """
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    yc = y - y.mean()
    s = np.signbit(yc)
    idx = np.nonzero(s[1:] != s[:-1])[0]
    if idx.size < 2:
        return 0.5 * float(np.ptp(y)), 0.0, int(idx.size)
    r0, r1, y0, y1 = r[idx], r[idx + 1], yc[idx], yc[idx + 1]
    zeros = r0 - y0 * (r1 - r0) / (y1 - y0)
    freq = np.pi * (zeros.size - 1) / (zeros[-1] - zeros[0])
    return 0.5 * float(np.ptp(y)), float(freq), int(zeros.size)


def reduced_action_radial(r, g2, sig, dg2dr=None, blowup=1e6) -> ReducedAction:
    """Boundary form of the reduced action for a radial profile.

    S' = (-1)**n1 / (8 pi) [r d(g**2)/dr] between r[0] and r[-1]. The
    divergence theorem needs g regular in between: profiles with non-finite
    samples or interior peaks ``blowup`` times above the end values are
    reported as irregular. An oscillating bracket over the outer half of
    the range is flagged together with its amplitude and frequency.
    """
    sig = RealFormSignature.coerce(sig)
    r = np.asarray(r, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    if dg2dr is None:
        dg2dr = np.gradient(g2, r, edge_order=2)
    bracket = sig.eps1 / (8 * np.pi) * r * np.asarray(dg2dr, dtype=float)

    finite = np.all(np.isfinite(g2)) and np.all(np.isfinite(bracket))
    scale = max(1.0, abs(g2[0]), abs(g2[-1])) if finite else np.inf
    regular = bool(finite and np.max(np.abs(g2)) < blowup * scale)

    tail = r >= 0.5 * (r[0] + r[-1])
    amp, freq, crossings = (0.0, 0.0, 0)
    if finite and tail.sum() > 8:
        amp, freq, crossings = oscillation_estimate(r[tail], bracket[tail])
    oscillating = bool(crossings >= 4 and amp > 1e-12)
    return ReducedAction(
        value=float(bracket[-1] - bracket[0]) if finite else np.nan,
        upper=float(bracket[-1]),
        lower=float(bracket[0]),
        regular=regular,
        oscillating=oscillating,
        amplitude=amp if oscillating else 0.0,
        frequency=freq if oscillating else 0.0,
    )


# -- general Hitchin pairs and the flat connection ---------------------------

@dataclass(frozen=True)
class HitchinPair:
    """Connection A_x dx + A_y dy and Higgs field Phi = phi dz, matrix valued.

    Each attribute is a callable (x, y) -> array of shape (..., 2, 2).
    This form survives gauge transformations that leave the ansatz.
    """

    sig: RealFormSignature
    ax: Callable
    ay: Callable
    phi: Callable
    step: float = DEFAULT_STEP

    def gauge_transform(self, q: Callable, dq: tuple[Callable, Callable]) -> "HitchinPair":
        """A -> q^-1 A q + q^-1 dq, Phi -> q^-1 Phi q."""

        def conj(f):
            def inner(x, y):
                qv = q(x, y)
                return np.linalg.inv(qv) @ f(x, y) @ qv
            return inner

        def conn(f, dqf):
            def inner(x, y):
                qi = np.linalg.inv(q(x, y))
                return qi @ f(x, y) @ q(x, y) + qi @ dqf(x, y)
            return inner

        return HitchinPair(self.sig, conn(self.ax, dq[0]), conn(self.ay, dq[1]),
                           conj(self.phi), self.step)


def pair_residuals(pair: HitchinPair, point) -> tuple[float, float]:
    """Norms of F_A + 2i[phi, phi^c] and (d_x + i d_y) phi + [A_x + i A_y, phi].

    These are the curvature equation F = -[Phi, Phi*] and d_A Phi = 0 in
    components, with phi^c the conjugate with respect to the real form.
    """
    x, y = point
    h = pair.step
    ax, ay, phi = pair.ax(x, y), pair.ay(x, y), pair.phi(x, y)
    F = (partial(pair.ay, x, y, 0, h) - partial(pair.ax, x, y, 1, h)
         + ax @ ay - ay @ ax)
    phic = real_form_conjugate(phi, pair.sig)
    curv = F + 2j * (phi @ phic - phic @ phi)
    dbar = partial(pair.phi, x, y, 0, h) + 1j * partial(pair.phi, x, y, 1, h)
    a = ax + 1j * ay
    holo = dbar + a @ phi - phi @ a
    return (float(np.max(np.linalg.norm(curv, axis=(-2, -1)))),
            float(np.max(np.linalg.norm(holo, axis=(-2, -1)))))


def _flat_components(pair: HitchinPair):
    """B = A + Phi + Phi*: B_x = A_x + phi - phi^c, B_y = A_y + i (phi + phi^c)."""
    sig = pair.sig

    def bx(x, y):
        p = pair.phi(x, y)
        return pair.ax(x, y) + p - real_form_conjugate(p, sig)

    def by(x, y):
        p = pair.phi(x, y)
        return pair.ay(x, y) + 1j * (p + real_form_conjugate(p, sig))

    return bx, by


def flat_connection_residual(field, point) -> float:
    """||dB + B ^ B|| at ``point`` for B built from a Hitchin pair.

    Accepts an AnsatzField (derivatives from its components, so grid
    fields work) or a HitchinPair (derivatives of the matrices).
    """
    x, y = point
    if isinstance(field, HitchinPair):
        bx, by = _flat_components(field)
        h = field.step
        F = (partial(by, x, y, 0, h) - partial(bx, x, y, 1, h)
             + bx(x, y) @ by(x, y) - by(x, y) @ bx(x, y))
        return float(np.max(np.linalg.norm(F, axis=(-2, -1))))

    p = _partials(field, x, y)
    t1, t2, t3 = _generator_matrices(field.sig)

    def m(c, t):
        return np.multiply.outer(np.asarray(c, dtype=complex), t)

    bx = m(p["f1"], t1) - 1j * m(p["h"], t3)
    by = m(p["f2"], t1) + 1j * m(p["g"], t2)
    dx_by = m(p["f2_x"], t1) + 1j * m(p["g_x"], t2)
    dy_bx = m(p["f1_y"], t1) - 1j * m(p["h_y"], t3)
    F = dx_by - dy_bx + bx @ by - by @ bx
    return float(np.max(np.linalg.norm(F, axis=(-2, -1))))
