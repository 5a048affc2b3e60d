"""Exception hierarchy shared across the package.

Exit-code convention for the command line front end: input and
configuration problems map to exit code 2, numerical failures
(non-convergence, bracket loss, unreachable calibration targets)
map to exit code 3.
"""


class RobustLrtError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InputError(RobustLrtError):
    """Malformed or inconsistent user input (files, dimensions, config)."""

    exit_code = 2


class ConfigError(InputError):
    """Run configuration failed validation."""


class GridMismatchError(InputError):
    """Two grid-based objects do not share the same intensity grid."""


class DomainError(InputError):
    """Argument outside the mathematical domain of an operation."""


class FitError(InputError):
    """Parameter estimation failed (degenerate or insufficient data)."""


class TrainingError(InputError):
    """Training-set extraction produced an unusable split."""


class SeedError(InputError):
    """Region-growing seed is unusable (out of bounds or zero intensity)."""


class InfeasibleBandError(InputError):
    """Requested envelopes violate the mass feasibility conditions."""


class NumericError(RobustLrtError):
    """Base class for numerical failures."""

    exit_code = 3


class NumericInputError(NumericError):
    """Non-finite values fed into a numeric kernel."""


class BracketError(NumericError):
    """Root bracket does not straddle zero."""


class ConvergenceError(NumericError):
    """Iteration budget exhausted before reaching tolerance."""


class CalibrationError(NumericError):
    """Requested false-alarm level cannot be realised by any threshold."""
