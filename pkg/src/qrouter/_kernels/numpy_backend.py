"""Pure-numpy implementations of the hot kernels.

Semantics are shared with the compiled backend in ``_core.pyx``:

- statevectors are complex128 arrays of shape (2**n,) or (2**n, batch),
  indexed big-endian (tensor axis q corresponds to qubit q, axis 0 is the
  most significant bit of the flat index);
- ``uniform_block`` is a counter-based generator: the stream for shot ``k``
  is keyed by ``seed + k`` and the position within the stream by ``draw``,
  so any chunking of the shot range yields bit-identical values.
"""

import numpy as np

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def _mix(z):
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    z = z ^ (z >> np.uint64(31))
    return z


def _mix_int(z):
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def uniform_block(seed, start, count, draw):
    """Uniforms in [0, 1) for shots [start, start+count) at stream position draw.

    The seed is mixed before the shot index is added, so numerically adjacent
    seeds (successive repetitions, settings) produce unrelated streams.
    """
    base = _mix_int(int(seed) & _MASK64)
    keys = np.arange(start, start + count, dtype=np.uint64) + np.uint64(base)
    z = _mix(keys)
    z = _mix(z ^ np.uint64((draw * _GOLDEN) & _MASK64))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def apply_unitary(amps, gate, axes, n):
    """Apply a 2**k x 2**k unitary to tensor axes ``axes`` of a statevector.

    ``amps`` may carry a trailing batch dimension. Returns a fresh array;
    callers must rebind. The gate's own index is big-endian over ``axes``
    (first axis listed = most significant bit of the gate index).
    """
    k = len(axes)
    batch = amps.shape[1:]
    t = amps.reshape((2,) * n + batch)
    t = np.moveaxis(t, axes, range(k))
    rest = t.shape[k:]
    out = gate @ t.reshape(2**k, -1)
    out = np.moveaxis(out.reshape((2,) * k + rest), range(k), axes)
    return np.ascontiguousarray(out).reshape(amps.shape)
