"""Dense complex linear algebra for small multi-qubit systems.

Qubit 0 is the leftmost label in ket notation everywhere: flat index
``i`` of a statevector or density-matrix row encodes qubit ``q`` in bit
``n-1-q``. Conversion to little-endian measurement bitstrings happens once,
at the sampler's register boundary (see ``sim.bits_to_string``).

All functions are pure; arrays are never mutated in place.
"""

import string

import numpy as np

from .constants import ATOL_EIGEN, ATOL_EXACT, MAX_DIM
from .errors import CapacityError


def tensor_product(a, b):
    """Kronecker product with the package-wide capacity limit enforced."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError("tensor_product expects two vectors or two matrices")
    for k in range(a.ndim):
        if a.shape[k] * b.shape[k] > MAX_DIM:
            raise CapacityError(
                f"tensor product dimension {a.shape[k] * b.shape[k]} exceeds {MAX_DIM}"
            )
    return np.kron(a, b)


def dagger(m):
    return np.conj(np.asarray(m)).T


def is_unitary(m, atol=ATOL_EXACT):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))) < atol


def is_hermitian(m, atol=ATOL_EXACT):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - dagger(m))) < atol


def is_density_matrix(m, atol=ATOL_EXACT, eig_floor=-ATOL_EIGEN):
    """Hermitian, unit trace, and PSD up to the eigenvalue floor."""
    m = np.asarray(m)
    if not is_hermitian(m, atol):
        return False
    if abs(np.trace(m) - 1.0) >= atol:
        return False
    return float(np.min(np.linalg.eigvalsh(m))) >= eig_floor


def is_state_vector(v, atol=ATOL_EXACT):
    v = np.asarray(v)
    return v.ndim == 1 and abs(np.linalg.norm(v) - 1.0) < atol


def partial_trace(rho, keep, n):
    """Reduce an n-qubit density matrix to the qubits in ``keep``.

    The result's qubit order is ``sorted(keep)``. Trace is preserved.
    """
    rho = np.asarray(rho, dtype=complex)
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if any(q < 0 or q >= n for q in keep):
        raise ValueError(f"keep {keep} out of range for {n} qubits")
    dim = 2**n
    if rho.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix for {n} qubits, got {rho.shape}")
    letters = string.ascii_letters
    dropped = set(range(n)) - set(keep)
    row = [letters[q] for q in range(n)]
    col = [row[q] if q in dropped else letters[n + q] for q in range(n)]
    out = [row[q] for q in keep] + [letters[n + q] for q in keep]
    t = np.einsum("".join(row + col) + "->" + "".join(out), rho.reshape((2,) * (2 * n)))
    k = len(keep)
    return t.reshape(2**k, 2**k)


def psd_sqrt(m, eig_floor=-ATOL_EIGEN):
    """Principal square root of a Hermitian PSD matrix via eigendecomposition.

    Eigenvalues in [eig_floor, 0) are clipped to zero; anything below the
    floor violates the PSD precondition and raises.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, atol=ATOL_EIGEN):
        raise ValueError("psd_sqrt requires a Hermitian matrix")
    w, v = np.linalg.eigh(m)
    if w[0] < eig_floor:
        raise ValueError(f"matrix has eigenvalue {w[0]:.3e} below the PSD floor {eig_floor:.0e}")
    w = np.clip(w, 0.0, None)
    r = (v * np.sqrt(w)) @ dagger(v)
    return 0.5 * (r + dagger(r))


def fidelity(sigma, sigma_prime):
    """Uhlmann fidelity (Tr sqrt(sqrt(s) s' sqrt(s)))**2, clamped to [0, 1].

    Evaluated as the squared nuclear norm of sqrt(s') sqrt(s): the trace of
    sqrt(B^dag B) is the singular-value sum of B, which avoids taking square
    roots of eigenvalue-level noise and keeps the result exactly symmetric.
    """
    sigma = np.asarray(sigma, dtype=complex)
    sigma_prime = np.asarray(sigma_prime, dtype=complex)
    if sigma.shape != sigma_prime.shape:
        raise ValueError(f"dimension mismatch: {sigma.shape} vs {sigma_prime.shape}")
    b = psd_sqrt(sigma_prime) @ psd_sqrt(sigma)
    f = float(np.linalg.svd(b, compute_uv=False).sum() ** 2)
    return min(max(f, 0.0), 1.0)


def trace_distance(a, b):
    """Half the trace norm of (a - b) for Hermitian a, b."""
    d = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + dagger(d))))))
