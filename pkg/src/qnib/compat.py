"""Joint measurability of biased, unsharp qubit observables.

An observable ``A^(x, eta) = x I + eta a.sigma`` has effects
``(1/2)((1 +- x) I +- eta a.sigma)``; both are positive iff ``|x| + eta <= 1``.
"""
from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import DomainError, UnsupportedInputError
from .channels import apply_heisenberg, require_cp
from .qmat import PAULI

JM_TOL = 1e-12
IBC2_THRESHOLD = 1 / math.sqrt(2)


@dataclass(frozen=True)
class UnsharpObservable:
    x: float
    eta_vec: tuple
    check: bool = True

    def __post_init__(self):
        v = tuple(float(c) for c in self.eta_vec)
        if len(v) != 3:
            raise DomainError("sharpness vector must have three components")
        object.__setattr__(self, "eta_vec", v)
        object.__setattr__(self, "x", float(self.x))
        if self.check and abs(self.x) + self.eta > 1.0 + JM_TOL:
            raise DomainError(f"|x| + eta = {abs(self.x) + self.eta:.12g} > 1: effects not positive")

    @classmethod
    def along(cls, x, eta, axis):
        axis = np.asarray(axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        return cls(x, tuple(eta * axis))

    @classmethod
    def sharp(cls, axis):
        return cls.along(0.0, 1.0, axis)

    @property
    def eta(self):
        return math.sqrt(sum(c * c for c in self.eta_vec))

    @property
    def axis(self):
        e = self.eta
        return tuple(c / e for c in self.eta_vec) if e > 0 else (0.0, 0.0, 1.0)

    def operator(self):
        return self.x * PAULI[0] + sum(c * s for c, s in zip(self.eta_vec, PAULI[1:]))

    def effects(self):
        op = self.operator()
        return 0.5 * (PAULI[0] + op), 0.5 * (PAULI[0] - op)


def s_func(p, q, tol=1e-14):
    """``(sqrt((1+p)^2 - q^2) + sqrt((1-p)^2 - q^2)) / 2``."""
    r1 = (1 + p) ** 2 - q * q
    r2 = (1 - p) ** 2 - q * q
    if r1 < -tol or r2 < -tol:
        raise DomainError(f"invalid bias/sharpness pair (p={p}, q={q}): negative radicand")
    return 0.5 * (math.sqrt(max(r1, 0.0)) + math.sqrt(max(r2, 0.0)))


def busch_functional(eta_vec, xi_vec):
    """``|eta + xi| + |eta - xi|``; at most 2 for compatible unbiased pairs."""
    a = np.asarray(eta_vec, dtype=float)
    b = np.asarray(xi_vec, dtype=float)
    return float(np.linalg.norm(a + b) + np.linalg.norm(a - b))


def _bias_ratio(x, s):
    if x == 0.0:
        return 0.0
    return x * x / (s * s)


def jointly_measurable(a, b, tol=JM_TOL):
    """Whether two unsharp observables admit a joint observable.

    Unbiased pairs use ``|eta + xi| + |eta - xi| <= 2``. Biased pairs use

        (1 - S_a^2 - S_b^2) (1 - x^2/S_a^2 - y^2/S_b^2) <= (eta.xi - x y)^2

    with ``S_a = s_func(x, |eta|)``. Boundary cases count as compatible.
    """
    if a.x == 0.0 and b.x == 0.0:
        return busch_functional(a.eta_vec, b.eta_vec) <= 2.0 + tol
    sa = s_func(a.x, a.eta)
    sb = s_func(b.x, b.eta)
    lhs = (1 - sa * sa - sb * sb) * (1 - _bias_ratio(a.x, sa) - _bias_ratio(b.x, sb))
    rhs = (float(np.dot(a.eta_vec, b.eta_vec)) - a.x * b.x) ** 2
    return lhs <= rhs + tol


def joint_observable(a, b):
    """Explicit joint POVM ``{G(i, j)}`` for a compatible unbiased pair, else None.

    ``G(i, j) = (1/4)((1 + i j c) I + (i eta + j xi).sigma)``; positivity of
    all four needs ``|eta + xi| - 1 <= c <= 1 - |eta - xi|`` and the midpoint
    of that interval is used. Keys are ``(i, j)`` with ``i, j in {+1, -1}``.
    """
    if a.x != 0.0 or b.x != 0.0:
        raise UnsupportedInputError("explicit joint observable only built for unbiased pairs")
    if not jointly_measurable(a, b):
        return None
    e = np.asarray(a.eta_vec)
    f = np.asarray(b.eta_vec)
    c = 0.5 * (np.linalg.norm(e + f) - np.linalg.norm(e - f))
    out = {}
    for i in (1, -1):
        for j in (1, -1):
            vec = i * e + j * f
            out[(i, j)] = 0.25 * ((1 + i * j * c) * PAULI[0] + sum(v * s for v, s in zip(vec, PAULI[1:])))
    return out


def white_noise_ibc_threshold(d, n):
    """Largest white-noise visibility that is n-incompatibility breaking in dimension d."""
    if d < 2 or n < 2:
        raise DomainError("need d >= 2 and n >= 2")
    return Fraction(n + d, n * (d + 1))


def is_n_ibc_white_noise(eta, d, n, tol=1e-12):
    """``eta <= (n + d) / (n (d + 1))``; exact for Fraction/int ``eta``, within ``tol`` for floats."""
    bound = white_noise_ibc_threshold(d, n)
    if isinstance(eta, (Fraction, int)):
        return Fraction(eta) <= bound
    return float(eta) <= float(bound) + tol


def _require_unital_cp(ch):
    if not ch.is_unital:
        raise UnsupportedInputError("only unital channels are supported here")
    require_cp(ch)


def is_2ibc_unital(ch):
    """Whether a unital channel's conjugate makes every pair of sharp qubit observables compatible.

    Conjugate outputs are unbiased with sharpness vectors ``T a`` and ``T b``;
    the worst pair is orthogonal in the plane of the two largest ``|eta_i|``,
    giving ``eta_(1)^2 + eta_(2)^2 <= 1``.
    """
    _require_unital_cp(ch)
    e1, e2, _ = sorted((abs(v) for v in ch.T), reverse=True)
    return e1 * e1 + e2 * e2 <= 1.0 + JM_TOL


def fibonacci_sphere(n):
    """``n`` nearly uniform unit vectors (golden-angle spiral)."""
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    r = np.sqrt(1 - z * z)
    phi = math.pi * (3 - math.sqrt(5)) * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def worst_pair_busch(ch, n_axes=100):
    """Max of the Busch functional over all ordered pairs of ``n_axes`` sharp axes.

    Brute-force counterpart of :func:`is_2ibc_unital`; the channel is pairwise
    incompatibility breaking on this grid iff the result is <= 2.
    """
    axes = fibonacci_sphere(n_axes)
    out = axes * np.asarray(ch.T)
    plus = np.linalg.norm(out[:, None, :] + out[None, :, :], axis=2)
    minus = np.linalg.norm(out[:, None, :] - out[None, :, :], axis=2)
    return float(np.max(plus + minus))


def conjugate_outputs_compatible(ch, a_axis, b_axis):
    a = apply_heisenberg(ch, UnsharpObservable.sharp(a_axis))
    b = apply_heisenberg(ch, UnsharpObservable.sharp(b_axis))
    return jointly_measurable(a, b)


def biased_ibc_threshold(x_a):
    """Sharpness below which two orthogonal observables with bias ``x_a`` are compatible."""
    if abs(x_a) >= 1:
        raise DomainError("bias must satisfy |x| < 1")
    return (1 - x_a * x_a) / math.sqrt(2)
