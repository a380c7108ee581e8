# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector and counter-RNG kernels.

Mirrors the API and semantics of ``numpy_backend``; the RNG is bit-identical,
amplitudes agree to floating-point round-off (summation order differs).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef unsigned long long u64

cdef u64 _MASK64 = 0xFFFFFFFFFFFFFFFFULL
cdef u64 _GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline u64 _mix(u64 z) nogil:
    z ^= z >> 30
    z *= 0xBF58476D1CE4E5B9ULL
    z ^= z >> 27
    z *= 0x94D049BB133111EBULL
    z ^= z >> 31
    return z


def uniform_block(seed, start, count, draw):
    """Uniforms in [0, 1) for shots [start, start+count) at stream position draw.

    The seed is mixed before the shot index is added, so numerically adjacent
    seeds (successive repetitions, settings) produce unrelated streams.
    """
    cdef u64 s = _mix(<u64> (int(seed) & _MASK64))
    cdef u64 doff = <u64> ((int(draw) * _GOLDEN) & _MASK64)
    cdef long long lo = int(start)
    cdef long long m = int(count)
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] ov = out
    cdef long long i
    cdef u64 z
    with nogil:
        for i in range(m):
            z = _mix(s + <u64> (lo + i))
            z = _mix(z ^ doff)
            ov[i] = <double> (z >> 11) * (2.0 ** -53)
    return out


def apply_unitary(amps, gate, axes, n):
    """Apply a 2**k x 2**k unitary to tensor axes ``axes`` of a statevector.

    Same contract as the numpy backend: returns a fresh array, supports an
    optional trailing batch dimension, gate index is big-endian over axes.
    """
    cdef int nn = n
    cdef int k = len(axes)
    cdef long long dim = 1LL << nn
    a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef long long batch = 1
    if a.ndim == 2:
        batch = a.shape[1]
    elif a.ndim != 1:
        raise ValueError("amps must be 1- or 2-dimensional")
    g = np.ascontiguousarray(gate, dtype=np.complex128)
    out = a.reshape(dim, batch).copy()
    cdef double complex[:, ::1] av = out
    cdef double complex[:, ::1] gv = g
    cdef long long kdim = 1LL << k

    # bit position (LSB-based) of each gate axis; gate axis j is the j-th
    # most significant bit of the gate's own index
    pos_arr = np.empty(k, dtype=np.int64)
    cdef long long[::1] pos = pos_arr
    cdef int j
    for j in range(k):
        pos[j] = nn - 1 - axes[j]
    sorted_pos = np.sort(pos_arr)[::-1].copy()  # descending for bit insertion
    cdef long long[::1] spos = sorted_pos

    offs_arr = np.zeros(kdim, dtype=np.int64)
    cdef long long[::1] offs = offs_arr
    cdef long long r
    for r in range(kdim):
        for j in range(k):
            if (r >> (k - 1 - j)) & 1:
                offs[r] |= 1LL << pos[j]

    buf_arr = np.empty(kdim, dtype=np.complex128)
    cdef double complex[::1] buf = buf_arr
    cdef long long nbase = dim >> k
    cdef long long m, base, low, c, rr
    cdef int p
    cdef double complex acc
    with nogil:
        for m in range(nbase):
            base = m
            for p in range(k - 1, -1, -1):  # ascending positions
                low = base & ((1LL << spos[p]) - 1)
                base = ((base >> spos[p]) << (spos[p] + 1)) | low
            for c in range(batch):
                for r in range(kdim):
                    buf[r] = av[base + offs[r], c]
                for r in range(kdim):
                    acc = 0
                    for rr in range(kdim):
                        acc = acc + gv[r, rr] * buf[rr]
                    av[base + offs[r], c] = acc
    return out.reshape(a.shape)
