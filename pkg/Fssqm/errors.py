"""Exception types raised by the library.

Everything derives from ``FssqmError`` (a ``ValueError``), so callers that
only care about "bad input" can catch one type. The CLI maps these to exit
code 1; relation failures are never exceptions (see ``Fssqm.audit``).
"""
from __future__ import annotations


class FssqmError(ValueError):
    """Base class for all library errors."""


class ConfigError(FssqmError):
    """Malformed or schema-invalid model configuration."""


class StructureFunctionError(FssqmError):
    """F(n) violates F(0) = 0, F(n) > 0, or is not finite."""

    def __init__(self, message: str, n: int | None = None):
        super().__init__(message)
        self.n = n


class AlphaSumError(FssqmError):
    """C_lambda-extended parameters do not sum to zero."""


class PhiPositivityError(FssqmError):
    """phi(n) = prod_i f_i(n) is not real positive for some n >= lambda - 1."""

    def __init__(self, message: str, n: int):
        super().__init__(message)
        self.n = n


class DimensionError(FssqmError):
    """Operand shapes disagree, or the Fock space is too small for a request."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class UnsupportedOrderError(FssqmError):
    """The requested construction has no closed form for this lambda."""


class InvariantViolation(FssqmError):
    """A construction produced a value its defining relations forbid."""


class NonHermitianError(FssqmError):
    """A Hermitian-only routine received a non-Hermitian matrix."""


class BlockMismatchError(FssqmError):
    """A sector operator disagrees with the matching block of U X U^dagger."""


class SpectrumMismatchError(FssqmError):
    """Two independent spectrum computations disagree."""
