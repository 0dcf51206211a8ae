"""CHSH, Mermin and Svetlichny operators, correlation tensors and the see-saw oracle.

Every Bell operator here is a sum of products of sharp dichotomic
observables ``v.sigma``, one per party and setting. It is stored as a
coefficient array ``g`` over setting indices, e.g. CHSH is
``A1B1 + A1B2 + A2B1 - A2B2`` so ``g = [[1, 1], [1, -1]]``.
"""
from dataclasses import dataclass
from functools import lru_cache
import itertools
import math

import numpy as np

from .channels import QubitChannel, apply_to_party
from .compat import _require_unital_cp
from .errors import DomainError
from .qmat import PAULI, kron_all, singular_values_3x3, singular_values_3x9
from .states import bell_state, n_qubits

SQRT2 = math.sqrt(2)

CHSH = "CHSH"
MERMIN = "Mermin"
SVETLICHNY = "Svetlichny"

_COEFFS = {
    CHSH: np.array([[1, 1], [1, -1]], dtype=float),
    # A1B1C2 + A1B2C1 + A2B1C1 - A2B2C2
    MERMIN: np.array([[[0, 1], [1, 0]], [[1, 0], [0, -1]]], dtype=float),
    # A1[(B1+B2)C1 + (B1-B2)C2] + A2[(B1-B2)C1 - (B1+B2)C2]
    SVETLICHNY: np.array([[[1, 1], [1, -1]], [[1, -1], [-1, -1]]], dtype=float),
}

_ARITY = {CHSH: 2, MERMIN: 3, SVETLICHNY: 3}


def operator_coefficients(which):
    try:
        return _COEFFS[_canonical(which)]
    except KeyError:
        raise DomainError(f"unknown Bell operator {which!r}") from None


def _canonical(which):
    for name in _COEFFS:
        if which.lower() == name.lower():
            return name
    raise DomainError(f"unknown Bell operator {which!r}")


@dataclass(frozen=True, eq=False)
class MeasurementSetting:
    """Two unit measurement directions per party; ``directions`` has shape (n, 2, 3)."""

    directions: np.ndarray

    def __post_init__(self):
        d = np.array(self.directions, dtype=float)
        if d.ndim != 3 or d.shape[1:] != (2, 3):
            raise DomainError("directions must have shape (n_parties, 2, 3)")
        norms = np.linalg.norm(d, axis=2)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise DomainError("every measurement direction must be a unit vector")
        d.setflags(write=False)
        object.__setattr__(self, "directions", d)

    @property
    def n_parties(self):
        return self.directions.shape[0]

    def observable(self, party, setting):
        v = self.directions[party, setting]
        return sum(c * s for c, s in zip(v, PAULI[1:]))


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """``M[i, j, k] = Tr[rho (sigma_i (x) sigma_j (x) sigma_k)]`` with 0-based Pauli indices."""

    entries: np.ndarray

    @property
    def flattening(self):
        """3x9 matrix with row ``j`` and column ``3 i + k``."""
        return np.transpose(self.entries, (1, 0, 2)).reshape(3, 9)

    def singular_values(self):
        return singular_values_3x9(self.flattening)

    def scaled(self, etas, party=0):
        """Tensor after diagonal unital noise ``etas`` on ``party``."""
        shape = [1, 1, 1]
        shape[party] = 3
        return CorrelationTensor(self.entries * np.reshape(etas, shape))


@lru_cache(maxsize=None)
def _pauli_triples():
    ops = np.empty((27, 8, 8), dtype=complex)
    for n, (i, j, k) in enumerate(itertools.product(range(3), repeat=3)):
        ops[n] = kron_all(PAULI[i + 1], PAULI[j + 1], PAULI[k + 1])
    ops.setflags(write=False)
    return ops


def correlation_tensor(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (8, 8):
        raise DomainError("correlation_tensor needs a three-qubit state")
    # Tr[rho P] = sum_ab rho[a, b] P[b, a]
    vals = np.einsum("ab,nba->n", rho, _pauli_triples()).real
    return CorrelationTensor(vals.reshape(3, 3, 3))


def correlation_matrix_2q(rho):
    """``T[i, j] = Tr[rho (sigma_i (x) sigma_j)]`` for a two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError("correlation_matrix_2q needs a two-qubit state")
    out = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            out[i, j] = np.trace(rho @ np.kron(PAULI[i + 1], PAULI[j + 1])).real
    return out


def mermin_svetlichny_bounds(t):
    """``(2 sqrt2 lambda_1, 4 lambda_1)``: upper bounds on the Mermin and Svetlichny maxima."""
    lam1 = t.singular_values()[0]
    return 2 * SQRT2 * lam1, 4 * lam1


def chsh_max(rho):
    """Maximal CHSH value ``2 sqrt(s1^2 + s2^2)`` from the two largest correlation singular values."""
    s1, s2, _ = singular_values_3x3(correlation_matrix_2q(rho))
    return 2 * math.sqrt(s1 * s1 + s2 * s2)


def bell_operator(setting, which):
    which = _canonical(which)
    if setting.n_parties != _ARITY[which]:
        raise DomainError(f"{which} needs {_ARITY[which]} parties, setting has {setting.n_parties}")
    g = _COEFFS[which]
    dim = 2 ** setting.n_parties
    op = np.zeros((dim, dim), dtype=complex)
    for idx in itertools.product(range(2), repeat=setting.n_parties):
        c = g[idx]
        if c:
            op += c * kron_all(*(setting.observable(p, x) for p, x in enumerate(idx)))
    return op


def operator_value(rho, setting, which):
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits(rho)
    if n != setting.n_parties:
        raise DomainError(f"state has {n} qubits but setting has {setting.n_parties} parties")
    return float(np.real(np.trace(rho @ bell_operator(setting, which))))


def pauli_expectations(rho):
    """All-Pauli expectation tensor via a direct index contraction (no Kronecker products)."""
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits(rho)
    sig = np.stack(PAULI[1:])
    t = rho.reshape((2,) * (2 * n))
    letters = "abcdef"
    rows, cols = letters[:n], letters[n:2 * n]
    paulis = ",".join(f"{p}{cols[q]}{rows[q]}" for q, p in enumerate("ijk"[:n]))
    return np.einsum(f"{rows}{cols},{paulis}->{'ijk'[:n]}", t, *([sig] * n)).real


def _party_kernels(g, t):
    """For each party ``p`` a matrix mapping the other parties' stacked directions to ``v_p``.

    Entry ``K[(x, i), (y, j), (z, k)] = g[x, y, z] t[i, j, k]`` with the active
    party's indices first; the kernel is flattened so one update is at most
    two batched matrix products.
    """
    n = g.ndim
    full = np.multiply.outer(g, t)   # axes x, y, (z,) i, j, (k)
    kernels = []
    for p in range(n):
        order = [p, n + p] + [a for q in range(n) if q != p for a in (q, n + q)]
        kernels.append(np.ascontiguousarray(np.transpose(full, order)).reshape((6,) * n))
    return kernels


def _coefficients(kernels, dirs, p):
    """Coefficient vectors ``v[r, x, :]`` of party ``p``'s two directions.

    The Bell value is ``sum_x v[r, x] . dirs[r, p, x]`` for every restart ``r``.
    """
    r, n = dirs.shape[:2]
    others = [dirs[:, q].reshape(r, 6) for q in range(n) if q != p]
    k = kernels[p]
    if n == 2:
        return (others[0] @ k.T).reshape(r, 2, 3)
    h = (others[1] @ k.reshape(36, 6).T).reshape(r, 6, 6)
    return np.matmul(h, others[0][:, :, None]).reshape(r, 2, 3)


def _value(kernels, dirs):
    v = _coefficients(kernels, dirs, 0)
    return np.einsum("rxi,rxi->r", v, dirs[:, 0])


def _random_directions(rng, shape):
    v = rng.standard_normal(shape + (3,))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _normalize_rows(v, fallback):
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    # near-zero coefficient vector: keep the previous direction
    keep = norm < 1e-14
    return np.where(keep, fallback, v / np.where(keep, 1.0, norm))


def _sweep(kernels, d):
    n = d.shape[1]
    for p in range(n):
        v = _coefficients(kernels, d, p)
        d[:, p] = _normalize_rows(v, d[:, p])
    return np.einsum("rxi,rxi->r", v, d[:, n - 1])


def seesaw_max(rho, which, restarts=64, rng_seed=0, tol=1e-9, max_sweeps=5000):
    """Lower bound on the maximal Bell value by alternating exact party updates.

    With all other parties fixed the value is linear in each of the active
    party's two directions, so each is set to its normalized coefficient
    vector. Plain alternation crawls along flat ridges, so after every sweep an
    extrapolated point ``d + w (d - d_prev)`` is tried and kept only where it
    raises the value; the ascent stays monotone. Restarts run as one batch
    and each stops once an iteration changes its value by less than ``tol``.
    The best restart (lowest index on ties) is returned as
    ``(value, MeasurementSetting)``.
    """
    which = _canonical(which)
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits(rho)
    if n != _ARITY[which]:
        raise DomainError(f"{which} needs a {_ARITY[which]}-qubit state")
    kernels = _party_kernels(_COEFFS[which], pauli_expectations(rho))
    rng = np.random.default_rng(rng_seed)
    dirs = _random_directions(rng, (restarts, n, 2))
    value = _value(kernels, dirs)
    step = np.ones(restarts)
    active = np.arange(restarts)
    for _ in range(max_sweeps):
        d = dirs[active]
        prev = d.copy()
        new = _sweep(kernels, d)
        w = step[active][:, None, None, None]
        ext = _normalize_rows(d + w * (d - prev), d)
        ext_val = _value(kernels, ext)
        better = ext_val > new
        d[better] = ext[better]
        new = np.where(better, ext_val, new)
        step[active] = np.where(better, step[active] * 1.5, 1.0)
        dirs[active] = d
        moving = np.abs(new - value[active]) >= tol
        value[active] = new
        active = active[moving]
        if active.size == 0:
            break
    best = int(np.argmax(value))
    return float(value[best]), MeasurementSetting(dirs[best])


def chsh_biased_condition(x_a, eta_a, x_b, eta_b):
    """CHSH satisfied by biased unsharp observables on the singlet at the optimal angles."""
    return 2 * x_a * x_b + 2 * SQRT2 * eta_a * eta_b <= 2.0 + 1e-12


def is_chsh_nbc_unital(ch, tol=1e-10):
    """Whether a unital channel on one half of ``Phi+`` leaves every CHSH value at most 2."""
    _require_unital_cp(ch)
    rho = apply_to_party(ch, bell_state("phi+"), [0])
    return chsh_max(rho) <= 2.0 + tol


def canonical_ghz_setting():
    """Svetlichny-optimal directions for ``(|000> + |111>)/sqrt2`` in the x-y plane."""
    def d(angle):
        return (math.cos(angle), math.sin(angle), 0.0)

    q = math.pi / 4
    return MeasurementSetting([[d(0), d(2 * q)], [d(0), d(2 * q)], [d(-q), d(q)]])
