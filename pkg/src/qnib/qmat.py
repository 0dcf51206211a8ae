"""Small dense linear algebra for operators on at most three qubits.

Matrices are plain numpy arrays. Only two routines are written by hand: the
cyclic Jacobi solver for real symmetric 3x3 matrices and the singular values
of 3x9 correlation flattenings built on top of it.
"""
import math

import numpy as np

from .errors import DimensionOverflowError, DomainError

MAX_DIM = 8

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

#: sigma_0 .. sigma_3
PAULI = (I2, SX, SY, SZ)


def kron(a, b):
    """Kronecker product, refusing results larger than 8x8."""
    a = np.asarray(a)
    b = np.asarray(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > MAX_DIM or cols > MAX_DIM:
        raise DimensionOverflowError(f"kron result {rows}x{cols} exceeds {MAX_DIM}x{MAX_DIM}")
    return np.kron(a, b)


def kron_all(*mats):
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = kron(out, m)
    return out


def is_hermitian(a, tol=1e-12):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def hermitian_eigenvalues(a, tol=1e-10):
    """Real spectrum of a Hermitian matrix, sorted descending."""
    a = np.asarray(a, dtype=complex)
    if not is_hermitian(a, tol):
        raise DomainError("hermitian_eigenvalues requires a Hermitian matrix")
    h = 0.5 * (a + a.conj().T)
    return np.linalg.eigvalsh(h)[::-1]


def jacobi_eigenvalues_sym3(s, max_sweeps=64, tol=1e-15):
    """Eigenvalues of a real symmetric 3x3 matrix by cyclic Jacobi rotations.

    Returns the three eigenvalues sorted descending. Each sweep annihilates
    the (0,1), (0,2), (1,2) entries in turn; iteration stops when the
    off-diagonal mass is negligible relative to the Frobenius norm.
    """
    a = [[float(s[i][j]) for j in range(3)] for i in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            avg = 0.5 * (a[i][j] + a[j][i])
            a[i][j] = a[j][i] = avg
    scale = math.sqrt(sum(a[i][j] ** 2 for i in range(3) for j in range(3)))
    if scale == 0.0:
        return (0.0, 0.0, 0.0)
    for _ in range(max_sweeps):
        off = a[0][1] ** 2 + a[0][2] ** 2 + a[1][2] ** 2
        if math.sqrt(off) <= tol * scale:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p][q]
            if apq == 0.0:
                continue
            theta = (a[q][q] - a[p][p]) / (2.0 * apq)
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            sn = t * c
            # A <- J^T A J with J the (p, q) Givens rotation
            for k in range(3):
                akp, akq = a[k][p], a[k][q]
                a[k][p] = c * akp - sn * akq
                a[k][q] = sn * akp + c * akq
            for k in range(3):
                apk, aqk = a[p][k], a[q][k]
                a[p][k] = c * apk - sn * aqk
                a[q][k] = sn * apk + c * aqk
            a[p][q] = a[q][p] = 0.0
    return tuple(sorted((a[0][0], a[1][1], a[2][2]), reverse=True))


def _row_jacobi_norms(rows, max_sweeps=64, tol=3e-15):
    """Singular values of a 3-row matrix by one-sided cyclic Jacobi.

    Rotating row pairs ``(p, q)`` by the angle that zeroes the Gram entry
    ``r_p . r_q`` is the cyclic Jacobi method applied to ``m @ m.T`` without
    ever forming it, so tiny singular values keep full relative accuracy
    instead of bottoming out near ``sqrt(eps) * lam_1``.
    """
    r = [[float(x) for x in row] for row in rows]
    for _ in range(max_sweeps):
        rotated = False
        for p, q in ((0, 1), (0, 2), (1, 2)):
            rp, rq = r[p], r[q]
            alpha = sum(x * x for x in rp)
            beta = sum(x * x for x in rq)
            gamma = sum(x * y for x, y in zip(rp, rq))
            if gamma == 0.0 or abs(gamma) <= tol * math.sqrt(alpha * beta):
                continue
            rotated = True
            zeta = (beta - alpha) / (2.0 * gamma)
            t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(zeta * zeta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            sn = t * c
            r[p] = [c * x - sn * y for x, y in zip(rp, rq)]
            r[q] = [sn * x + c * y for x, y in zip(rp, rq)]
        if not rotated:
            break
    return tuple(sorted((math.sqrt(sum(x * x for x in row)) for row in r), reverse=True))


def singular_values_3x9(m):
    """Singular values of a real 3x9 matrix, descending (one-sided Jacobi on the rows)."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 9):
        raise DomainError(f"expected a 3x9 matrix, got {m.shape}")
    return _row_jacobi_norms(m.tolist())


def singular_values_3x3(m):
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise DomainError(f"expected a 3x3 matrix, got {m.shape}")
    return _row_jacobi_norms(m.tolist())
