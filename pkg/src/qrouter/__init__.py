"""qrouter: desk-scale simulation of an error-corrected quantum router.

Subpackages map onto the pipeline: linalg (dense complex primitives),
gates/circuit (IR), sim (statevector engine and shot sampler), correction
(channel + error-correction fragments and analytics), transpile (basis
lowering and routing), tomo (state tomography and readout mitigation),
experiment (the full router protocol), config/sweep/cli (the harness).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND_NAME as kernel_backend  # noqa: F401
