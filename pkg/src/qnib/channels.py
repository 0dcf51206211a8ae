"""Qubit channels in the Pauli transfer-matrix form ``[1, 0; t, T]``.

``T`` is diagonal, so a channel is two real 3-vectors: the translation ``t``
and the contraction factors ``(eta_1, eta_2, eta_3)``. In the Schrödinger
picture ``I -> I + t.sigma`` and ``sigma_j -> eta_j sigma_j``; the conjugate
map sends ``sigma_j -> t_j I + eta_j sigma_j`` and fixes ``I``.
"""
from dataclasses import dataclass
import math
import re

import numpy as np

from .errors import DomainError, NotCPError, UnsupportedInputError
from .qmat import PAULI, hermitian_eigenvalues
from .states import n_qubits

CP_TOL = 1e-12

# Choi-matrix building blocks: I (x) I, I (x) sigma_k and sigma_k^T (x) sigma_k
_CHOI_ID = np.kron(PAULI[0], PAULI[0])
_CHOI_T = np.stack([np.kron(PAULI[0], s) for s in PAULI[1:]])
_CHOI_ETA = np.stack([np.kron(s.T, s) for s in PAULI[1:]])


@dataclass(frozen=True)
class CPCheck:
    """Result of :func:`is_cp`; truthy iff the channel is completely positive."""

    ok: bool
    witness: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class QubitChannel:
    t: tuple = (0.0, 0.0, 0.0)
    T: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        t = tuple(float(v) for v in self.t)
        T = tuple(float(v) for v in self.T)
        if len(t) != 3 or len(T) != 3:
            raise DomainError("t and T must both be 3-vectors")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "T", T)

    @classmethod
    def identity(cls):
        return cls()

    @classmethod
    def unital(cls, ex, ey, ez):
        return cls((0.0, 0.0, 0.0), (ex, ey, ez))

    @classmethod
    def isotropic(cls, eta):
        """White-noise channel ``rho -> eta rho + (1 - eta) I/2``."""
        return cls((0.0, 0.0, 0.0), (eta, eta, eta))

    @property
    def is_unital(self):
        return self.t == (0.0, 0.0, 0.0)

    def transfer_matrix(self):
        m = np.zeros((4, 4))
        m[0, 0] = 1.0
        m[1:, 0] = self.t
        m[1:, 1:] = np.diag(self.T)
        return m

    def conjugate_transfer_matrix(self):
        return self.transfer_matrix().T

    def conjugate(self):
        """The Heisenberg-picture map as a channel; only defined for unital channels."""
        if not self.is_unital:
            raise UnsupportedInputError("the conjugate of a nonunital channel is not trace preserving")
        return QubitChannel(self.t, self.T)

    def __call__(self, op):
        """Linear action on an arbitrary 2x2 operator."""
        op = np.asarray(op, dtype=complex)
        coeffs = [0.5 * np.trace(s @ op) for s in PAULI]
        out = coeffs[0] * (PAULI[0] + sum(tj * s for tj, s in zip(self.t, PAULI[1:])))
        for j in range(3):
            out = out + coeffs[j + 1] * self.T[j] * PAULI[j + 1]
        return out

    def choi(self):
        """Unnormalized Choi matrix ``sum_ij |i><j| (x) E(|i><j|)``.

        Expanding ``|i><j|`` in the Pauli basis gives the closed form
        ``(1/2) [I (x) (I + t.sigma) + sum_k T_k sigma_k^T (x) sigma_k]``.
        """
        c = _CHOI_ID + np.tensordot(self.t, _CHOI_T, 1) + np.tensordot(self.T, _CHOI_ETA, 1)
        return 0.5 * c

    def to_text(self):
        t = ",".join(repr(v) for v in self.t)
        T = ",".join(repr(v) for v in self.T)
        return f"t=({t});T=({T})"

    @classmethod
    def from_text(cls, text):
        """Parse ``t=(tx,ty,tz);T=(nx,ny,nz)``, ``iso:eta`` or ``diag:ex,ey,ez``."""
        s = text.strip()
        low = s.lower()
        try:
            if low.startswith("iso:"):
                return cls.isotropic(float(s[4:]))
            if low.startswith("diag:"):
                vals = [float(v) for v in s[5:].split(",")]
                if len(vals) != 3:
                    raise ValueError
                return cls.unital(*vals)
        except ValueError:
            raise DomainError(f"malformed channel {text!r}") from None
        parts = {}
        for chunk in filter(None, (c.strip() for c in s.split(";"))):
            m = re.fullmatch(r"([tT])\s*=\s*\(([^)]*)\)", chunk)
            if not m:
                raise DomainError(f"malformed channel field {chunk!r}")
            try:
                vals = tuple(float(v) for v in m.group(2).split(","))
            except ValueError:
                raise DomainError(f"channel field {m.group(1)} has a non-numeric entry") from None
            if len(vals) != 3:
                raise DomainError(f"channel field {m.group(1)} needs three entries")
            parts[m.group(1)] = vals
        if "T" not in parts:
            raise DomainError(f"channel {text!r} lacks the T=(...) field")
        return cls(parts.get("t", (0.0, 0.0, 0.0)), parts["T"])


@dataclass(frozen=True)
class NoiseVector:
    """Per-axis contraction factors of a diagonal unital channel."""

    ex: float
    ey: float
    ez: float

    @property
    def eta(self):
        return math.sqrt(self.ex ** 2 + self.ey ** 2 + self.ez ** 2)

    def as_tuple(self):
        return (self.ex, self.ey, self.ez)

    def channel(self):
        return QubitChannel.unital(self.ex, self.ey, self.ez)

    def is_cp(self):
        return tetrahedron_ok(self.ex, self.ey, self.ez)


def tetrahedron_violation(ex, ey, ez, tol=CP_TOL):
    """Name of the first violated ``|ex +- ey| <= |1 +- ez|`` inequality, or ''."""
    for sign, lhs, rhs in (
        ("+", abs(ex + ey), abs(1 + ez)),
        ("-", abs(ex - ey), abs(1 - ez)),
    ):
        if lhs > rhs + tol:
            return f"|eta_x {sign} eta_y| = {lhs:.12g} > |1 {sign} eta_z| = {rhs:.12g}"
    return ""


def tetrahedron_ok(ex, ey, ez, tol=CP_TOL):
    return not tetrahedron_violation(ex, ey, ez, tol)


def is_cp(ch, tol=CP_TOL):
    """Complete-positivity test with a human-readable witness on failure.

    Unital channels use the four tetrahedron inequalities. Nonunital channels
    must additionally have a positive semidefinite Choi matrix.
    """
    why = tetrahedron_violation(*ch.T, tol=tol)
    if why:
        return CPCheck(False, why)
    if not ch.is_unital:
        lo = hermitian_eigenvalues(ch.choi())[-1]
        if lo < -tol:
            return CPCheck(False, f"Choi matrix has eigenvalue {lo:.12g} < 0")
    return CPCheck(True)


def require_cp(ch):
    check = is_cp(ch)
    if not check:
        raise NotCPError(check.witness)
    return ch


def bloch_vector(rho):
    rho = np.asarray(rho)
    return np.array([np.real(np.trace(rho @ s)) for s in PAULI[1:]])


def from_bloch(w):
    return 0.5 * (PAULI[0] + sum(wj * s for wj, s in zip(w, PAULI[1:])))


def apply_schrodinger(ch, rho):
    """Single-qubit action ``w -> T w + t`` on the Bloch vector."""
    require_cp(ch)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DomainError("apply_schrodinger takes a single-qubit state")
    w = bloch_vector(rho)
    return from_bloch(np.array(ch.T) * w + np.array(ch.t))


def apply_heisenberg(ch, obs):
    """Conjugate action on ``x I + eta_vec . sigma``.

    The new bias is ``x + t . eta_vec`` and the sharpness vector becomes
    ``T eta_vec`` componentwise.
    """
    from .compat import UnsharpObservable

    v = np.asarray(obs.eta_vec, dtype=float)
    x = obs.x + float(np.dot(ch.t, v))
    return UnsharpObservable(x, tuple(np.asarray(ch.T) * v), check=False)


def liouville(ch):
    """4-index tensor ``L[a, b, c, d]`` with ``E(rho)[a, b] = sum L[a, b, c, d] rho[c, d]``."""
    L = np.zeros((2, 2, 2, 2), dtype=complex)
    for c in range(2):
        for d in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[c, d] = 1.0
            L[:, :, c, d] = ch(unit)
    return L


def apply_to_party(ch, rho, parties):
    """Apply ``ch`` independently to each listed party (0-based) of ``rho``."""
    require_cp(ch)
    if isinstance(parties, int):
        parties = (parties,)
    parties = tuple(sorted(set(parties)))
    if not parties:
        raise DomainError("party set must be nonempty")
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits(rho)
    if parties[0] < 0 or parties[-1] >= n:
        raise DomainError(f"party indices {parties} out of range for {n} qubits")
    L = liouville(ch)
    t = rho.reshape((2,) * (2 * n))
    for p in parties:
        t = np.tensordot(L, t, axes=([2, 3], [p, n + p]))
        # tensordot puts the new (row, col) axes first; move them back
        t = np.moveaxis(t, (0, 1), (p, n + p))
    d = 2 ** n
    return t.reshape(d, d)
