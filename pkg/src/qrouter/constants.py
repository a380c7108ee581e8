"""Central numerical tolerances and capacity limits.

Two tolerance tiers: ATOL_EXACT for quantities defined by exact arithmetic
(gate unitarity, norms, branch probabilities), ATOL_EIGEN for anything that
passes through an eigendecomposition (matrix square roots, fidelity,
reconstruction).
"""

ATOL_EXACT = 1e-10
ATOL_EIGEN = 1e-9

# Widest register the dense engines accept (dimension 2**12 = 4096).
MAX_QUBITS = 12
MAX_DIM = 2**MAX_QUBITS

# Post-selecting a branch with less probability than this is treated as
# selecting an impossible outcome.
MIN_BRANCH_PROB = 1e-12

# Euler-angle extraction: below this the middle rotation is treated as zero
# and the outer Z rotations are merged (gimbal lock).
EULER_ATOL = 1e-12

# Calibration matrices with a worse condition number than this are refused.
MAX_CALIBRATION_COND = 1e6
