"""Exception types. The CLI maps each to its exit code."""


class McCatchError(Exception):
    exit_code = 1


class InputError(McCatchError, ValueError):
    """Unreadable or unparseable input, or an invalid dataset."""

    exit_code = 2


class DegenerateDatasetError(McCatchError, ValueError):
    """The dataset admits no radii ladder or no scoring (n < 2, zero diameter, no inliers)."""

    exit_code = 3


class ConfigurationError(McCatchError, ValueError):
    """Inconsistent or missing configuration."""

    exit_code = 4


class ContractViolation(McCatchError, ValueError):
    """A caller broke an operation's precondition."""

    exit_code = 2
