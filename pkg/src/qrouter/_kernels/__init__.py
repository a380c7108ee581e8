"""Kernel backend selection.

When the compiled Cython extension is present, the default (``auto``) mode
uses it for the counter RNG and for gate application on small unbatched
statevectors (the shot-sampling regime, where it benchmarks 1.3-17x faster),
and falls through to the BLAS-backed numpy kernels for wide or batched
states where matmul wins. Set ``QROUTE_KERNELS`` to ``numpy`` or
``compiled`` to force one backend everywhere (``compiled`` raises if the
extension is missing).
"""

import os

from . import numpy_backend

# above this statevector size the BLAS path outperforms the compiled loop
_HYBRID_DIM_CUTOFF = 512


def available_backends():
    out = {"numpy": numpy_backend}
    try:
        from . import _core

        out["compiled"] = _core
    except ImportError:
        pass
    return out


def _hybrid(compiled):
    def apply_unitary(amps, gate, axes, n):
        if amps.ndim == 1 and amps.shape[0] <= _HYBRID_DIM_CUTOFF:
            return compiled.apply_unitary(amps, gate, axes, n)
        return numpy_backend.apply_unitary(amps, gate, axes, n)

    return apply_unitary


def _select():
    pref = os.environ.get("QROUTE_KERNELS", "auto").lower()
    backends = available_backends()
    if pref == "auto":
        if "compiled" in backends:
            compiled = backends["compiled"]
            return _hybrid(compiled), compiled.uniform_block, "compiled"
        return numpy_backend.apply_unitary, numpy_backend.uniform_block, "numpy"
    if pref in backends:
        b = backends[pref]
        return b.apply_unitary, b.uniform_block, pref
    if pref == "compiled":
        raise ImportError(
            "QROUTE_KERNELS=compiled but the extension is not built; "
            "reinstall with a working C toolchain"
        )
    raise ValueError(f"QROUTE_KERNELS must be 'auto', 'numpy' or 'compiled', got {pref!r}")


apply_unitary, uniform_block, BACKEND_NAME = _select()
