"""State tomography and readout-error mitigation.

Settings are per-qubit measurement bases from {X, Y, Z}; an n-qubit state
needs all 3**n of them. Expectation values of Pauli strings are estimated by
parity sums, averaging over every compatible setting (a setting is
compatible when it matches the string on all non-identity positions), so all
collected counts contribute. Reconstruction is linear inversion
rho = 2**-n sum <P> P followed by eigenvalue clipping and trace
renormalization to land on a physical density matrix.

Mitigation inverts a column-stochastic calibration matrix
M[i][j] = P(read i | prepared j); negative entries of the corrected vector
are clipped and the vector renormalized.

Bit conventions match the sampler: probability-vector index i carries clbit
k (= measured qubit k of the tomography target) in bit k.
"""

import itertools
from math import pi

import numpy as np

from .circuit import Circuit, Gate, Measure
from .constants import MAX_CALIBRATION_COND
from .errors import CapacityError, ConditioningError, IncompleteDataError
from .gates import GateKind, PAULI_1Q
from .linalg import dagger
from .sim import NoiseSpec, sample_shots

_MAX_TOMO_QUBITS = 5


def settings(n):
    """All 3**n per-qubit basis choices in lexicographic (X < Y < Z) order."""
    if not 1 <= n <= _MAX_TOMO_QUBITS:
        raise CapacityError(f"tomography supports 1..{_MAX_TOMO_QUBITS} qubits, got {n}")
    return [tuple(s) for s in itertools.product("XYZ", repeat=n)]


def measurement_rotation(setting, qubits, register="c0"):
    """Ops rotating each qubit's basis onto Z, then measuring into ``register``.

    X-basis: H; Y-basis: RZ(-pi/2) then H; Z-basis: nothing. Clbit i of the
    register records qubits[i].
    """
    if len(setting) != len(qubits):
        raise ValueError("setting and qubit list lengths differ")
    ops = []
    for basis, q in zip(setting, qubits):
        if basis == "X":
            ops.append(Gate(GateKind.H, (q,)))
        elif basis == "Y":
            ops.append(Gate(GateKind.RZ, (q,), (-pi / 2,)))
            ops.append(Gate(GateKind.H, (q,)))
        elif basis != "Z":
            raise ValueError(f"unknown basis {basis!r}")
    ops.extend(Measure(q, register, i) for i, q in enumerate(qubits))
    return tuple(ops)


def _freq_vector(counts, n):
    """Counts dict (little-endian bitstrings) or array -> frequency vector."""
    dim = 2**n
    if isinstance(counts, dict):
        v = np.zeros(dim)
        for bits, c in counts.items():
            v[int(bits, 2)] = c
    else:
        v = np.asarray(counts, dtype=float)
        if v.shape != (dim,):
            raise ValueError(f"expected a vector of length {dim}")
    total = v.sum()
    if total <= 0:
        raise IncompleteDataError("a setting has no recorded shots")
    return v / total


def _parities(n, mask):
    idx = np.arange(2**n)
    acc = np.zeros(2**n, dtype=np.int64)
    for k in range(n):
        if mask & (1 << k):
            acc ^= (idx >> k) & 1
    return 1.0 - 2.0 * acc


def expectations_from_counts(counts_by_setting):
    """Pauli-string expectations from per-setting counts (or probability vectors).

    Returns {pauli string like "XIZ": value} for all 4**n strings; the
    identity string is pinned to 1. Raises IncompleteDataError unless every
    one of the 3**n settings is present with data.
    """
    keys = list(counts_by_setting)
    if not keys:
        raise IncompleteDataError("no settings provided")
    n = len(keys[0])
    freqs = {}
    for s in settings(n):
        if s not in counts_by_setting:
            raise IncompleteDataError(f"missing tomography setting {''.join(s)}")
        freqs[s] = _freq_vector(counts_by_setting[s], n)

    out = {}
    for pauli in itertools.product("IXYZ", repeat=n):
        name = "".join(pauli)
        support = [i for i, p in enumerate(pauli) if p != "I"]
        if not support:
            out[name] = 1.0
            continue
        mask = sum(1 << i for i in support)
        par = _parities(n, mask)
        compat = [
            s for s in freqs if all(s[i] == pauli[i] for i in support)
        ]
        out[name] = float(np.mean([par @ freqs[s] for s in compat]))
    return out


def reconstruct(expectations):
    """Linear-inversion density matrix with PSD projection.

    rho_raw = 2**-n sum <P> P over all 4**n strings; negative eigenvalues are
    clipped to zero and the trace renormalized to 1.
    """
    n = len(next(iter(expectations)))
    rho = np.zeros((2**n, 2**n), dtype=complex)
    count = 0
    for pauli in itertools.product("IXYZ", repeat=n):
        name = "".join(pauli)
        if name not in expectations:
            raise IncompleteDataError(f"missing expectation value for {name}")
        mat = PAULI_1Q[pauli[0]]
        for p in pauli[1:]:
            mat = np.kron(mat, PAULI_1Q[p])
        rho += expectations[name] * mat
        count += 1
    rho /= 2**n
    w, v = np.linalg.eigh(0.5 * (rho + dagger(rho)))
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        return np.eye(2**n, dtype=complex) / 2**n
    w /= w.sum()
    rho = (v * w) @ dagger(v)
    return 0.5 * (rho + dagger(rho))


def confusion_matrix_1q(p01, p10):
    """Column-stochastic single-qubit confusion matrix."""
    return np.array([[1.0 - p01, p10], [p01, 1.0 - p10]])


def build_calibration(n, readout_noise=None, shots=None):
    """Calibration matrix M[i][j] = P(read i | prepared j).

    Analytic mode (shots=None) returns the exact tensor product of per-qubit
    confusion matrices. Measured mode prepares each of the 2**n basis states
    and estimates columns from sampled frequencies.
    """
    if not 1 <= n <= _MAX_TOMO_QUBITS:
        raise CapacityError(f"calibration supports 1..{_MAX_TOMO_QUBITS} qubits, got {n}")
    noise = readout_noise or NoiseSpec()
    pairs = noise.readout_confusion or (((0.0, 0.0),) * n)
    if len(pairs) != n:
        raise ValueError(f"readout_confusion has {len(pairs)} entries for {n} qubits")
    if shots is None:
        m = confusion_matrix_1q(*pairs[n - 1])
        for q in range(n - 2, -1, -1):
            # vector index holds qubit k in bit k, so qubit n-1 is the
            # leftmost Kronecker factor
            m = np.kron(m, confusion_matrix_1q(*pairs[q]))
        return m
    m = np.zeros((2**n, 2**n))
    for j in range(2**n):
        ops = [Gate(GateKind.X, (q,)) for q in range(n) if (j >> q) & 1]
        ops += [Measure(q, "cal", q) for q in range(n)]
        circ = Circuit(n, ops, {"cal": n})
        rec = sample_shots(circ, shots, NoiseSpec(pairs, 0.0, noise.rng_seed + j))
        for bits, c in rec.counts["cal"].items():
            m[int(bits, 2), j] = c / shots
    return m


def mitigate(counts, cal):
    """Invert the calibration matrix on observed counts/probabilities.

    Returns a clipped, renormalized probability vector. Raises
    ConditioningError when the calibration matrix is too ill-conditioned.
    """
    cal = np.asarray(cal, dtype=float)
    n = int(np.log2(cal.shape[0]))
    p_obs = _freq_vector(counts, n)
    if np.linalg.cond(cal) >= MAX_CALIBRATION_COND:
        raise ConditioningError("calibration matrix condition number exceeds the limit")
    p = np.linalg.solve(cal, p_obs)
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if total <= 0:
        raise ConditioningError("mitigated distribution vanished after clipping")
    return p / total
