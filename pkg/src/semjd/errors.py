"""Exception types shared across the package.

Two families: :class:`SpecError` for structurally invalid models, configs or
input files, and :class:`NumericalError` for failures of numerical operations
on otherwise valid inputs.  The CLI maps these to exit codes 2 and 3.
"""


class SemjdError(Exception):
    """Base class for all package-specific errors."""


class SpecError(SemjdError):
    """A model specification, config file or data file is invalid."""


class NumericalError(SemjdError):
    """A numerical operation failed on structurally valid input."""


class GapInParamIndices(SpecError):
    """Free-parameter indices do not cover 0..q-1 without gaps."""


class AsymmetricEntryMap(SpecError):
    """A symmetric matrix block was authored with contradictory cells."""


class NonzeroBDiagonal(SpecError):
    """The factor-regression matrix has a non-fixed-zero diagonal cell."""


class DimensionMismatch(SpecError):
    """Array shapes are inconsistent with the declared dimensions."""


class NonOrthonormalF(SpecError):
    """A nesting embedding matrix does not have orthonormal columns."""


class EmptyCandidateList(SpecError):
    """Model selection was requested over an empty candidate list."""


class ConfigError(SpecError):
    """A config file could not be parsed or is incomplete."""


class NonUniformGrid(SpecError):
    """Observation times in a CSV file are not equally spaced."""


class MalformedRow(SpecError):
    """A CSV row has the wrong arity or a non-numeric field."""


class TooFewRows(SpecError):
    """A CSV file has too few observation rows to define increments."""


class SingularPsi(NumericalError):
    """I - B is numerically singular; the factor regression has no solution."""


class NotPositiveDefinite(NumericalError):
    """The implied covariance is not positive definite at this parameter."""


class InitNotPD(NumericalError):
    """The optimizer starting point does not yield a positive definite covariance."""


class AllStartsFailed(NumericalError):
    """Every start of a multi-start fit failed to produce a result."""
