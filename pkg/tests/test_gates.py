from math import pi, sqrt

import numpy as np
import pytest

from qrouter.gates import GateKind, gate_arity, gate_matrix
from qrouter.linalg import is_unitary

from conftest import haar_unitary


def _all_kinds_sampled(rng):
    yield GateKind.I, ()
    yield GateKind.X, ()
    yield GateKind.SX, ()
    yield GateKind.H, ()
    yield GateKind.T, ()
    yield GateKind.CX, ()
    yield GateKind.SWAP, ()
    yield GateKind.CSWAP, ()
    for _ in range(5):
        yield GateKind.RZ, (rng.uniform(-2 * pi, 2 * pi),)
        yield GateKind.H_THETA, (rng.uniform(-pi, pi),)
        yield GateKind.UG, (rng.uniform(0, 1),)


def test_every_kind_is_unitary(rng):
    for kind, params in _all_kinds_sampled(rng):
        assert is_unitary(gate_matrix(kind, params)), kind


def test_ug_gamma_zero_is_identity():
    np.testing.assert_allclose(gate_matrix(GateKind.UG, (0.0,)), np.eye(4), atol=1e-15)


def test_ug_gamma_one_frozen():
    expected = np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, 1]], dtype=complex
    )
    np.testing.assert_allclose(gate_matrix(GateKind.UG, (1.0,)), expected, atol=1e-15)


def test_ug_structure(rng):
    # middle block is the plane rotation with cos = sqrt(1-g), sin = sqrt(g)
    for g in rng.uniform(0, 1, size=5):
        m = gate_matrix(GateKind.UG, (g,))
        assert abs(m[1, 1] - sqrt(1 - g)) < 1e-12
        assert abs(m[1, 2] - sqrt(g)) < 1e-12
        assert abs(m[2, 1] + sqrt(g)) < 1e-12


def test_h_theta_quarter_pi():
    expected = (1 / sqrt(2)) * np.array([[1, -1], [1, 1]], dtype=complex)
    np.testing.assert_allclose(gate_matrix(GateKind.H_THETA, (pi / 4,)), expected, atol=1e-15)


def test_h_theta_inverse_pairs(rng):
    for th in rng.uniform(-pi, pi, size=8):
        prod = gate_matrix(GateKind.H_THETA, (th,)) @ gate_matrix(GateKind.H_THETA, (-th,))
        assert np.max(np.abs(prod - np.eye(2))) < 1e-12


def test_t_gate_phase():
    m = gate_matrix(GateKind.T)
    assert m[0, 0] == 1.0
    assert abs(m[1, 1] - np.exp(1j * pi / 4)) < 1e-15


def test_cx_action_on_basis():
    m = gate_matrix(GateKind.CX)
    # big-endian (control, target): |10> -> |11>, |11> -> |10>
    np.testing.assert_allclose(m @ np.eye(4)[:, 2], np.eye(4)[:, 3], atol=1e-15)
    np.testing.assert_allclose(m @ np.eye(4)[:, 3], np.eye(4)[:, 2], atol=1e-15)
    np.testing.assert_allclose(m @ np.eye(4)[:, 0], np.eye(4)[:, 0], atol=1e-15)


def test_cswap_exhaustive_basis_action():
    m = gate_matrix(GateKind.CSWAP)
    for c in (0, 1):
        for a in (0, 1):
            for b in (0, 1):
                src = (c << 2) | (a << 1) | b
                dst = (c << 2) | ((b << 1) | a if c else (a << 1) | b)
                expected = np.zeros(8)
                expected[dst] = 1.0
                np.testing.assert_allclose(m[:, src], expected, atol=1e-15)


def test_ug_rejects_out_of_range_gamma():
    for g in (-0.1, 1.1):
        with pytest.raises(ValueError):
            gate_matrix(GateKind.UG, (g,))


def test_param_count_enforced():
    with pytest.raises(ValueError):
        gate_matrix(GateKind.RZ, ())
    with pytest.raises(ValueError):
        gate_matrix(GateKind.H, (0.3,))


def test_custom_gate_arity(rng):
    m = haar_unitary(8, rng)
    assert gate_arity(GateKind.CUSTOM, m) == 3
    got = gate_matrix(GateKind.CUSTOM, matrix=m)
    np.testing.assert_allclose(got, m)
    with pytest.raises(ValueError):
        gate_matrix(GateKind.CUSTOM, matrix=np.ones((3, 3)))
    with pytest.raises(ValueError):
        gate_matrix(GateKind.CUSTOM)
