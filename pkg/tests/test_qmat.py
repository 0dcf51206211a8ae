import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qnib.errors import DimensionOverflowError, DomainError
from qnib.qmat import (I2, PAULI, SX, SZ, hermitian_eigenvalues, jacobi_eigenvalues_sym3, kron,
                       kron_all, singular_values_3x3, singular_values_3x9)
from qnib.states import ghz, make_state, partial_trace, w_state

from oracles import classical_jacobi

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_kron_zz_is_diagonal():
    assert np.array_equal(kron(SZ, SZ), np.diag([1, -1, -1, 1]).astype(complex))


def test_kron_identity_left_is_block_diagonal():
    a = np.array([[1, 2j], [3, 4]])
    out = kron(I2, a)
    assert np.array_equal(out[:2, :2], a)
    assert np.array_equal(out[2:, 2:], a)
    assert not out[:2, 2:].any() and not out[2:, :2].any()


def test_xxx_expectation_on_ghz_is_one():
    v = np.zeros(8)
    v[0] = v[7] = 1 / math.sqrt(2)
    op = kron_all(SX, SX, SX)
    assert abs(v @ op @ v - 1.0) < 1e-15


def test_kron_rejects_more_than_three_qubits():
    with pytest.raises(DimensionOverflowError):
        kron(np.eye(8), I2)
    with pytest.raises(DimensionOverflowError):
        kron_all(I2, I2, I2, I2)


@given(arrays(float, (2, 2), elements=finite), arrays(float, (4, 4), elements=finite))
def test_trace_of_kron_factorizes(a, b):
    assert abs(np.trace(kron(a, b)) - np.trace(a) * np.trace(b)) <= 1e-12 * max(1.0, abs(np.trace(a) * np.trace(b)))


def test_pauli_spectra():
    assert hermitian_eigenvalues(SX) == pytest.approx([1, -1], abs=1e-15)
    assert hermitian_eigenvalues(np.diag([1.0, 0.0])) == pytest.approx([1, 0], abs=1e-15)


def test_hermitian_eigenvalues_rejects_non_hermitian():
    with pytest.raises(DomainError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))


def test_reduced_w_state_is_positive():
    rho = partial_trace(make_state(w_state()), 0)
    assert min(hermitian_eigenvalues(rho)) >= -1e-12


def test_example_ghz_flattening_singular_values():
    s = 1 / math.sqrt(2)
    m = np.zeros((3, 9))
    m[0, 0], m[0, 4] = 2 * s * s, -2 * s * s
    m[1, 1] = m[1, 3] = -2 * s * s
    assert singular_values_3x9(m) == pytest.approx((math.sqrt(2), math.sqrt(2), 0.0), abs=1e-12)


def test_zero_matrix():
    assert singular_values_3x9(np.zeros((3, 9))) == (0.0, 0.0, 0.0)


def test_jacobi_matches_classical_jacobi_and_svd():
    rng = np.random.default_rng(11)
    for _ in range(100):
        m = rng.standard_normal((3, 9))
        gram = m @ m.T
        ours = jacobi_eigenvalues_sym3(gram)
        assert ours == pytest.approx(classical_jacobi(gram), abs=1e-10)
        assert singular_values_3x9(m) == pytest.approx(np.linalg.svd(m, compute_uv=False), abs=1e-10)


def test_jacobi_handles_degenerate_spectra():
    q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((3, 3)))
    a = q @ np.diag([2.0, 2.0, 1e-9]) @ q.T
    assert jacobi_eigenvalues_sym3(a) == pytest.approx((2.0, 2.0, 1e-9), abs=1e-13)


def test_singular_values_3x3_matches_svd():
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = rng.standard_normal((3, 3))
        assert singular_values_3x3(m) == pytest.approx(np.linalg.svd(m, compute_uv=False), abs=1e-10)


@settings(max_examples=200)
@given(arrays(float, (3, 9), elements=finite), st.permutations(range(3)),
       arrays(float, 9, elements=st.sampled_from([-1.0, 1.0])))
def test_singular_values_invariances_and_frobenius(m, perm, signs):
    lam = singular_values_3x9(m)
    assert lam[0] >= lam[1] >= lam[2] >= 0
    assert singular_values_3x9(m[list(perm)] * signs) == pytest.approx(lam, abs=1e-10)
    fro = float(np.linalg.norm(m))
    assert lam[0] <= fro + 1e-10
    assert fro <= math.sqrt(3) * lam[0] + 1e-10


def test_pauli_tuple_order():
    assert PAULI[0] is I2 and PAULI[3] is SZ
    assert np.allclose(PAULI[1] @ PAULI[2], 1j * PAULI[3])


def test_ghz_reduced_single_qubit_is_maximally_mixed():
    rho = partial_trace(partial_trace(make_state(ghz()), 0), 0)
    assert np.allclose(rho, I2 / 2, atol=1e-15)
