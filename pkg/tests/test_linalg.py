import numpy as np
import pytest

from qrouter.constants import ATOL_EIGEN, ATOL_EXACT
from qrouter.errors import CapacityError
from qrouter.gates import PAULI_1Q
from qrouter.linalg import (
    fidelity,
    is_density_matrix,
    is_state_vector,
    is_unitary,
    partial_trace,
    psd_sqrt,
    tensor_product,
    trace_distance,
)

from conftest import haar_unitary, random_density_matrix

I2 = np.eye(2)


class TestTensorProduct:
    def test_identity_case(self):
        np.testing.assert_allclose(tensor_product(I2, I2), np.eye(4))

    def test_x_tensor_identity_layout(self):
        # expanded by definition: nonzero entries of X (x) I2
        m = tensor_product(PAULI_1Q["X"], I2)
        expected_ones = {(2, 0), (3, 1), (0, 2), (1, 3)}
        nz = {tuple(ix) for ix in np.argwhere(np.abs(m) > 0.5)}
        assert nz == expected_ones
        rows, cols = zip(*sorted(expected_ones))
        np.testing.assert_allclose(m[list(rows), list(cols)], 1.0)

    def test_bilinearity_identity(self, rng):
        for _ in range(20):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            u = rng.normal(size=2) + 1j * rng.normal(size=2)
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            lhs = tensor_product(a, b) @ np.kron(u, v)
            rhs = np.kron(a @ u, b @ v)
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_associativity(self, rng):
        for _ in range(10):
            a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
            lhs = tensor_product(tensor_product(a, b), c)
            rhs = tensor_product(a, tensor_product(b, c))
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_capacity_error(self):
        big = np.eye(2**7)
        with pytest.raises(CapacityError):
            tensor_product(big, big)


class TestPartialTrace:
    def test_product_state(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0  # |00><00|
        reduced = partial_trace(rho, {0}, 2)
        np.testing.assert_allclose(reduced, [[1, 0], [0, 0]], atol=1e-14)

    def test_bell_state_either_side(self):
        v = np.zeros(4, dtype=complex)
        v[0] = v[3] = 1 / np.sqrt(2)
        rho = np.outer(v, v.conj())
        for q in (0, 1):
            np.testing.assert_allclose(partial_trace(rho, {q}, 2), I2 / 2, atol=1e-12)

    def test_identity_case(self, rng):
        rho = random_density_matrix(4, rng)
        np.testing.assert_allclose(partial_trace(rho, {0, 1}, 2), rho, atol=1e-14)

    def test_trace_and_psd_preserved(self, rng):
        for _ in range(10):
            rho = random_density_matrix(8, rng)
            red = partial_trace(rho, {1, 2}, 3)
            assert abs(np.trace(red) - 1.0) < ATOL_EXACT
            assert np.min(np.linalg.eigvalsh(red)) >= -ATOL_EIGEN

    def test_bad_args(self):
        rho = np.eye(4) / 4
        with pytest.raises(ValueError):
            partial_trace(rho, set(), 2)
        with pytest.raises(ValueError):
            partial_trace(rho, {5}, 2)


class TestPsdSqrt:
    def test_identity(self):
        np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-12)

    def test_diagonal(self):
        np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 0.0])), np.diag([2.0, 0.0]), atol=1e-12)

    def test_eigendecomposition_oracle(self, rng):
        # oracle: build rho = V diag(p) V^dag, expect V diag(sqrt p) V^dag
        for _ in range(10):
            v = haar_unitary(4, rng)
            p = rng.uniform(0, 1, size=4)
            p /= p.sum()
            rho = (v * p) @ v.conj().T
            expected = (v * np.sqrt(p)) @ v.conj().T
            got = psd_sqrt(rho)
            assert np.max(np.abs(got - expected)) < 1e-9
            assert np.max(np.abs(got @ got - rho)) < 1e-9

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            psd_sqrt(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_below_floor(self):
        with pytest.raises(ValueError):
            psd_sqrt(np.diag([1.0, -1e-3]))


class TestFidelity:
    def test_self_fidelity(self, rng):
        for _ in range(5):
            rho = random_density_matrix(4, rng)
            assert abs(fidelity(rho, rho) - 1.0) < 1e-9

    def test_orthogonal_pure_states(self):
        assert fidelity(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) < 1e-12

    def test_pure_vs_maximally_mixed(self):
        assert abs(fidelity(np.diag([1.0, 0.0]), I2 / 2) - 0.5) < 1e-10

    def test_symmetry(self, rng):
        for _ in range(10):
            a = random_density_matrix(4, rng)
            b = random_density_matrix(4, rng)
            assert abs(fidelity(a, b) - fidelity(b, a)) < 1e-9

    def test_pure_state_overlap(self, rng):
        for _ in range(10):
            u = haar_unitary(4, rng)[:, 0]
            v = haar_unitary(4, rng)[:, 0]
            f = fidelity(np.outer(u, u.conj()), np.outer(v, v.conj()))
            assert abs(f - abs(np.vdot(u, v)) ** 2) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(np.eye(2) / 2, np.eye(4) / 4)


def test_predicates(rng):
    assert is_unitary(haar_unitary(4, rng))
    assert not is_unitary(np.ones((2, 2)))
    assert is_density_matrix(random_density_matrix(4, rng))
    assert not is_density_matrix(np.eye(2))
    assert is_state_vector(np.array([1.0, 0.0]))
    assert not is_state_vector(np.array([1.0, 1.0]))


def test_trace_distance_basics(rng):
    a = random_density_matrix(4, rng)
    assert trace_distance(a, a) < 1e-12
    b = np.diag([1.0, 0, 0, 0]).astype(complex)
    c = np.diag([0, 1.0, 0, 0]).astype(complex)
    assert abs(trace_distance(b, c) - 1.0) < 1e-12
