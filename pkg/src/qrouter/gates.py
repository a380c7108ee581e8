"""Gate library.

Matrices use the big-endian index convention of this package: the first
qubit an operation names is the most significant bit of the matrix index.
``UG`` is the tunable two-qubit channel primitive acting on a
(system, environment) pair; ``H_THETA`` is the real rotation used by the
correction stage.
"""

import enum
from math import cos, pi, sin, sqrt

import numpy as np

_SQ2 = 1.0 / sqrt(2.0)


class GateKind(str, enum.Enum):
    I = "I"
    X = "X"
    SX = "SX"
    RZ = "RZ"
    H = "H"
    T = "T"
    H_THETA = "H_THETA"
    UG = "UG"
    CX = "CX"
    SWAP = "SWAP"
    CSWAP = "CSWAP"
    CUSTOM = "CUSTOM"


# Device-native kinds ("basis gates"); everything else must transpile to these.
BASIS_KINDS = frozenset({GateKind.I, GateKind.RZ, GateKind.SX, GateKind.X, GateKind.CX})

GATE_ARITY = {
    GateKind.I: 1,
    GateKind.X: 1,
    GateKind.SX: 1,
    GateKind.RZ: 1,
    GateKind.H: 1,
    GateKind.T: 1,
    GateKind.H_THETA: 1,
    GateKind.UG: 2,
    GateKind.CX: 2,
    GateKind.SWAP: 2,
    GateKind.CSWAP: 3,
}

GATE_NPARAMS = {kind: 0 for kind in GATE_ARITY}
GATE_NPARAMS[GateKind.RZ] = 1
GATE_NPARAMS[GateKind.H_THETA] = 1
GATE_NPARAMS[GateKind.UG] = 1

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_CSWAP = np.eye(8, dtype=complex)
_CSWAP[[5, 6]] = _CSWAP[[6, 5]]  # |101> <-> |110>; control block |0ab> untouched


def gate_matrix(kind, params=(), matrix=None):
    """Exact unitary for a gate kind; always a fresh complex128 array."""
    kind = GateKind(kind)
    if kind is GateKind.CUSTOM:
        if matrix is None:
            raise ValueError("CUSTOM gates carry their own matrix")
        m = np.array(matrix, dtype=complex)
        dim = m.shape[0]
        if m.ndim != 2 or m.shape[0] != m.shape[1] or dim & (dim - 1) or dim < 2:
            raise ValueError("custom matrix must be square with power-of-two dimension")
        return m
    if len(params) != GATE_NPARAMS[kind]:
        raise ValueError(f"{kind.value} takes {GATE_NPARAMS[kind]} parameter(s), got {len(params)}")
    if kind is GateKind.I:
        return np.eye(2, dtype=complex)
    if kind is GateKind.X:
        return PAULI_1Q["X"].copy()
    if kind is GateKind.SX:
        return 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
    if kind is GateKind.RZ:
        lam = float(params[0])
        return np.diag([np.exp(-0.5j * lam), np.exp(0.5j * lam)]).astype(complex)
    if kind is GateKind.H:
        return _SQ2 * np.array([[1, 1], [1, -1]], dtype=complex)
    if kind is GateKind.T:
        return np.diag([1.0, np.exp(1j * pi / 4)]).astype(complex)
    if kind is GateKind.H_THETA:
        th = float(params[0])
        return np.array([[cos(th), -sin(th)], [sin(th), cos(th)]], dtype=complex)
    if kind is GateKind.UG:
        g = float(params[0])
        if not 0.0 <= g <= 1.0:
            raise ValueError(f"UG parameter must lie in [0, 1], got {g}")
        c, s = sqrt(1.0 - g), sqrt(g)
        return np.array(
            [[1, 0, 0, 0], [0, c, s, 0], [0, -s, c, 0], [0, 0, 0, 1]], dtype=complex
        )
    if kind is GateKind.CX:
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if kind is GateKind.SWAP:
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
    if kind is GateKind.CSWAP:
        return _CSWAP.copy()
    raise ValueError(f"unhandled gate kind {kind!r}")


def gate_arity(kind, matrix=None):
    kind = GateKind(kind)
    if kind is GateKind.CUSTOM:
        if matrix is None:
            raise ValueError("CUSTOM gates carry their own matrix")
        return int(np.log2(np.asarray(matrix).shape[0]))
    return GATE_ARITY[kind]
