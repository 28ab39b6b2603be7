"""Exception and warning classes raised by specfact."""


class SpecfactError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(SpecfactError):
    """A coefficient file or bench config does not match the expected layout."""


class NumericalError(SpecfactError):
    """Base class for failures of a numerical step (CLI exit code 2)."""


class AliasError(NumericalError, ValueError):
    pass


class SingularMatrixError(NumericalError):
    pass


class SingularNodeError(SingularMatrixError):
    """A polynomial matrix is numerically singular at a DFT node."""


class NotPositiveDefiniteError(NumericalError):
    pass


class NotHermitianError(NumericalError, ValueError):
    pass


class NonPositiveSampleError(NumericalError, ValueError):
    pass


class DivergenceError(NumericalError):
    pass


class PoleOnCircleError(NumericalError):
    pass


class IllConditionedV0Error(NumericalError):
    pass


class AllNodesSingularError(NumericalError):
    pass


class NegativePowerError(NumericalError):
    pass


class SingularDeltaError(NumericalError):
    pass


class IllConditionedDeltaError(SingularDeltaError):
    pass


class SingularAtZeroError(NumericalError):
    pass


class UnknownFixtureError(SpecfactError, KeyError):
    pass


class ConditioningWarning(UserWarning):
    """Input lies outside the range where a routine is known to be accurate."""
