"""Exception types shared across the package."""


class SetBlendError(Exception):
    """Base class for package-specific errors."""


class GridMismatchError(SetBlendError, ValueError):
    """Operands live on different grids; call ``align`` first."""


class NotNestedError(SetBlendError, ValueError):
    """Operation requires one operand to contain the other."""


class NotSimplyDifferentError(SetBlendError, ValueError):
    """Difference region has several components; use ``nested_average``."""


class EmptyInputError(SetBlendError, ValueError):
    """Operation is undefined for an empty set."""


class DomainClippedError(SetBlendError, RuntimeError):
    """Result reaches the grid border, so part of it may lie off-grid."""


class PnmFormatError(SetBlendError, ValueError):
    """Malformed PBM/PGM data."""
