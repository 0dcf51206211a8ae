import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from qnib.bell import correlation_tensor
from qnib.errors import DomainError, SpecValidationError
from qnib.states import (StateSpec, acin_spec_from_rng, bell_state, check_density_matrix, ghz,
                         make_state, partial_trace, purity, sample_acin_state, state_vector, w_state)


def test_ghz_product_limit_is_pure_projector():
    rho = make_state(ghz(1.0, 0.0))
    expected = np.zeros((8, 8))
    expected[0, 0] = 1
    assert np.array_equal(rho, expected)
    assert np.allclose(rho @ rho, rho)


def test_mixed_ghz_p1_is_ghz():
    assert np.allclose(make_state(StateSpec("MixedGHZ", {"p": 1.0})), make_state(ghz()), atol=1e-15)


def test_symmetric_w_correlation_positions():
    m = correlation_tensor(make_state(w_state())).flattening
    for pos in [(0, 2), (0, 6), (1, 5), (1, 7), (2, 0), (2, 4)]:
        assert m[pos] == pytest.approx(2 / 3, abs=1e-12)
    assert m[2, 8] == pytest.approx(-1.0, abs=1e-12)
    zero = np.ones_like(m, dtype=bool)
    for pos in [(0, 2), (0, 6), (1, 5), (1, 7), (2, 0), (2, 4), (2, 8)]:
        zero[pos] = False
    assert np.max(np.abs(m[zero])) < 1e-12


def test_big_endian_ordering():
    v = state_vector(StateSpec("W", {"a": 1.0, "b": 0.0, "c": 0.0}))
    assert v[4] == 1.0  # |100>


def test_spec_validation():
    with pytest.raises(SpecValidationError):
        StateSpec("GHZ", {"a": 0.5, "b": 0.5})
    with pytest.raises(SpecValidationError):
        StateSpec("GHZ", {"a": 1.0})
    with pytest.raises(SpecValidationError):
        StateSpec("Cluster", {})
    with pytest.raises(SpecValidationError):
        StateSpec("MixedGHZ", {"p": 1.5})


def test_text_round_trip_and_renormalize():
    spec = w_state()
    assert StateSpec.from_text(spec.to_text()) == spec
    spec = StateSpec.from_text("GHZ:a=0.7071,b=0.7071", renormalize=True)
    assert spec["a"] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert spec["b"] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    with pytest.raises(SpecValidationError):
        StateSpec.from_text("GHZ:a=0.7071,b=0.7071")
    with pytest.raises(SpecValidationError):
        StateSpec.from_text("GHZ:a=0.9,b=0.9", renormalize=True)
    with pytest.raises(SpecValidationError, match="'a'"):
        StateSpec.from_text("GHZ:a=x,b=1")


def test_sampler_is_deterministic():
    assert sample_acin_state(42) == sample_acin_state(42)
    assert sample_acin_state(42) != sample_acin_state(43)


def test_sampler_normalization_and_means():
    rng = np.random.default_rng(2024)
    sq = np.empty((10**4, 5))
    for n in range(len(sq)):
        spec = acin_spec_from_rng(rng)
        sq[n] = [spec[f"l{i}"] ** 2 for i in range(5)]
        assert abs(sq[n].sum() - 1) <= 1e-12
        check_density_matrix(make_state(spec))
    assert np.max(np.abs(sq.mean(axis=0) - 0.2)) < 0.01


def test_sampler_marginal_matches_beta_1_4():
    for seed in (1, 2):
        rng = np.random.default_rng(seed)
        l0 = np.array([acin_spec_from_rng(rng)["l0"] ** 2 for _ in range(10**5)])
        assert stats.kstest(l0, stats.beta(1, 4).cdf).statistic < 0.02


def test_partial_traces():
    two = partial_trace(make_state(ghz()), 0)
    assert np.allclose(partial_trace(two, 0), np.eye(2) / 2, atol=1e-15)
    assert np.allclose(partial_trace(two, 1), np.eye(2) / 2, atol=1e-15)
    rho_p = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    prod = np.kron(np.diag([1.0, 0.0]), rho_p)
    assert np.allclose(partial_trace(prod, 0), rho_p)
    w2 = partial_trace(make_state(w_state()), 0)
    assert sorted(np.linalg.eigvalsh(w2), reverse=True) == pytest.approx([2 / 3, 1 / 3, 0, 0], abs=1e-12)
    with pytest.raises(DomainError):
        partial_trace(w2, 2)


@given(st.floats(0.0, 1.0), st.floats(0.0, 2 * math.pi))
def test_pure_families_have_unit_purity(t, u):
    a, b = math.cos(u), math.sin(u)
    for spec in (ghz(a, b), StateSpec("MS", {"a": a, "b": b}),
                 StateSpec("W", {"a": a * math.cos(t), "b": a * math.sin(t), "c": b})):
        rho = make_state(spec)
        check_density_matrix(rho)
        assert purity(rho) == pytest.approx(1.0, abs=1e-10)


@given(st.floats(0.01, 0.99))
def test_mixed_ghz_is_mixed(p):
    rho = make_state(StateSpec("MixedGHZ", {"p": p}))
    check_density_matrix(rho)
    assert purity(rho) < 1.0


def test_bell_states_are_orthonormal_projectors():
    names = ["phi+", "phi-", "psi+", "psi-"]
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            assert np.trace(bell_state(a) @ bell_state(b)).real == pytest.approx(float(i == j), abs=1e-15)
