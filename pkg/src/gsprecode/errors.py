"""Exception types raised by the library."""

import numpy as np


class InvalidArgumentError(ValueError):
    """A dimension, range or enumerated argument is outside its domain."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Cholesky factorization hit a non-positive pivot."""

    def __init__(self, pivot: int):
        self.pivot = pivot
        super().__init__(f"matrix is not positive definite (pivot {pivot} is not positive)")


class SingularTriangularError(np.linalg.LinAlgError):
    """A triangular system has a zero on its diagonal."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"triangular matrix is singular (zero diagonal at index {index})")


class PreconditionError(ValueError):
    """An analysis check was called outside the regime it is defined for."""


class ConfigError(ValueError):
    """Invalid simulation configuration.

    ``field`` names the offending key; ``line`` is the 1-based line of the
    config text when the error came from parsing a file.
    """

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.message = message
        self.field = field
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"{field}: "
        super().__init__(prefix + message)
