"""Exception types shared across the package.

Plain ValueError is used for garden-variety bad arguments (dimension
mismatches, out-of-range parameters); the classes here name failure modes a
caller may reasonably want to catch specifically.
"""


class QRouterError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(QRouterError):
    """Operation would exceed the configured maximum register width."""


class BuildError(QRouterError):
    """Circuit construction violated an IR invariant."""


class ContractError(QRouterError):
    """Operation called on a circuit that does not satisfy its precondition."""


class ConfigError(QRouterError):
    """Experiment configuration document is invalid."""


class ImpossibleBranchError(QRouterError):
    """Post-selection of an outcome whose branch probability is ~zero."""


class DegenerateParameterError(QRouterError):
    """Parameter choice makes the protocol ill-defined (e.g. gamma_guess = 1)."""


class IncompleteDataError(QRouterError):
    """Tomography input is missing one or more measurement settings."""


class ConditioningError(QRouterError):
    """Calibration matrix is too ill-conditioned to invert."""


class UnsupportedGateError(QRouterError):
    """No decomposition rule exists for the given gate."""
