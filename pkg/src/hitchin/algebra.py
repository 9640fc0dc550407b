"""Generators of the real forms of sl(2, C).

A signature ``(n1, n2)`` with entries in {0, 1} selects the real form. The
generators are

    tau_1 = i**n2 E_1,   tau_2 = i**n1 E_2,   tau_3 = i**(n1 + n2) E_3,

with ``E_k = sigma_k / (2i)`` built from the Pauli matrices, and they obey

    [tau_2, tau_3] = (-1)**n1 tau_1
    [tau_3, tau_1] = (-1)**n2 tau_2
    [tau_1, tau_2] = tau_3.

(0, 0) is su(2); the other three signatures are copies of so(2, 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Union

import numpy as np

from .errors import ValidationError

ATOL = 1e-12

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

#: Standard su(2) generators E_k = sigma_k / (2i).
E1, E2, E3 = (s / 2j for s in PAULI)

SIGNATURES = ((0, 0), (1, 0), (0, 1), (1, 1))


class RealFormSignature(NamedTuple):
    n1: int
    n2: int

    @classmethod
    def coerce(cls, sig) -> "RealFormSignature":
        n1, n2 = sig
        if n1 not in (0, 1) or n2 not in (0, 1):
            raise ValidationError(f"signature entries must be 0 or 1, got {sig!r}")
        return cls(int(n1), int(n2))

    @property
    def name(self) -> str:
        return "su(2)" if self == (0, 0) else "so(2,1)"

    @property
    def eps1(self) -> int:
        """(-1)**n1"""
        return -1 if self.n1 else 1

    @property
    def eps2(self) -> int:
        """(-1)**n2"""
        return -1 if self.n2 else 1


def _generator_matrices(sig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n1, n2 = RealFormSignature.coerce(sig)
    return (1j**n2 * E1, 1j**n1 * E2, 1j**(n1 + n2) * E3)


@dataclass(frozen=True, eq=False)
class LieElement:
    """A traceless 2x2 complex matrix, optionally tied to a signature.

    The matrix is authoritative; ``coeffs`` (components along tau_k) are
    derived from it on first access and require ``sig``.
    """

    matrix: np.ndarray
    sig: RealFormSignature | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 matrix, got shape {m.shape}")
        if abs(np.trace(m)) > ATOL * max(1.0, np.abs(m).max()):
            raise ValidationError("Lie algebra element must be traceless")
        object.__setattr__(self, "matrix", m)
        if self.sig is not None:
            object.__setattr__(self, "sig", RealFormSignature.coerce(self.sig))

    @classmethod
    def from_coeffs(cls, coeffs, sig) -> "LieElement":
        taus = _generator_matrices(sig)
        m = sum(c * t for c, t in zip(coeffs, taus))
        return cls(m, sig)

    @cached_property
    def coeffs(self) -> np.ndarray:
        if self.sig is None:
            raise ValidationError("coefficients need a signature")
        return tau_coefficients(self.matrix, self.sig)

    def __add__(self, other):
        return LieElement(self.matrix + _as_matrix(other), self.sig)

    def __sub__(self, other):
        return LieElement(self.matrix - _as_matrix(other), self.sig)

    def __mul__(self, scalar):
        return LieElement(scalar * self.matrix, self.sig)

    __rmul__ = __mul__

    def __neg__(self):
        return LieElement(-self.matrix, self.sig)

    def allclose(self, other, atol: float = ATOL) -> bool:
        return bool(np.allclose(self.matrix, _as_matrix(other), rtol=0.0, atol=atol))

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


Matrixish = Union[LieElement, np.ndarray]


def _as_matrix(x: Matrixish) -> np.ndarray:
    return x.matrix if isinstance(x, LieElement) else np.asarray(x, dtype=complex)


def make_generators(sig) -> tuple[LieElement, LieElement, LieElement]:
    """Return (tau_1, tau_2, tau_3) for the real form selected by ``sig``."""
    sig = RealFormSignature.coerce(sig)
    return tuple(LieElement(m, sig) for m in _generator_matrices(sig))


def bracket(x: Matrixish, y: Matrixish):
    """Matrix commutator ``xy - yx``.

    Returns a LieElement when either argument is one, otherwise an array.
    Works elementwise on stacks of matrices shaped (..., 2, 2).
    """
    mx, my = _as_matrix(x), _as_matrix(y)
    out = mx @ my - my @ mx
    for arg in (x, y):
        if isinstance(arg, LieElement):
            return LieElement(out, arg.sig)
    return out


def killing_metric(sig) -> tuple[int, int, int]:
    """Diagonal of g_ij, defined by tr(tau_i tau_j) = -g_ij / 2."""
    sig = RealFormSignature.coerce(sig)
    return (sig.eps2, sig.eps1, sig.eps1 * sig.eps2)


def trace_form(sig) -> np.ndarray:
    """The full 3x3 matrix -2 tr(tau_i tau_j), computed from the generators."""
    taus = _generator_matrices(sig)
    return np.array([[-2.0 * np.trace(a @ b) for b in taus] for a in taus])


def structure_constants(sig) -> np.ndarray:
    """Array ``c[i, j, k]`` with [tau_i, tau_j] = sum_k c[i, j, k] tau_k."""
    taus = _generator_matrices(sig)
    c = np.zeros((3, 3, 3), dtype=complex)
    for i, a in enumerate(taus):
        for j, b in enumerate(taus):
            c[i, j] = tau_coefficients(a @ b - b @ a, sig)
    return c


def tau_coefficients(m: np.ndarray, sig) -> np.ndarray:
    """Complex components of a traceless matrix (or stack) along tau_1..tau_3."""
    taus = _generator_matrices(sig)
    g = killing_metric(sig)
    m = np.asarray(m, dtype=complex)
    return np.stack(
        [-2.0 * gk * np.einsum("...ij,ji->...", m, t) for gk, t in zip(g, taus)],
        axis=-1,
    )


def real_form_conjugate(m: np.ndarray, sig) -> np.ndarray:
    """Conjugation fixing the real span of the tau_k.

    Writes ``m = sum c_k tau_k`` and returns ``sum conj(c_k) tau_k``.
    """
    taus = np.stack(_generator_matrices(sig))
    c = tau_coefficients(m, sig)
    return np.einsum("...k,kij->...ij", np.conj(c), taus)


def bracket_table(sig) -> dict[str, float]:
    """Entrywise errors of the three defining brackets, keyed by name."""
    sig = RealFormSignature.coerce(sig)
    t1, t2, t3 = _generator_matrices(sig)
    expect = {
        "[t2,t3]": (t2 @ t3 - t3 @ t2, sig.eps1 * t1),
        "[t3,t1]": (t3 @ t1 - t1 @ t3, sig.eps2 * t2),
        "[t1,t2]": (t1 @ t2 - t2 @ t1, t3),
    }
    return {k: float(np.abs(a - b).max()) for k, (a, b) in expect.items()}
