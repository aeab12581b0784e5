class TorsionAlgebraError(Exception):
    """Base class for every error raised by the algebra core."""


class DimensionMismatchError(TorsionAlgebraError):
    pass


class ScalarModeError(TorsionAlgebraError):
    pass


class DegreeError(TorsionAlgebraError):
    pass


class NotSkewError(TorsionAlgebraError):
    pass


class NotInvariantError(TorsionAlgebraError):
    """A tensor is not annihilated by the isotropy action."""


class NotEquivariantError(TorsionAlgebraError):
    pass


class NotSubalgebraError(TorsionAlgebraError):
    pass


class NotReductiveError(TorsionAlgebraError):
    pass


class IndeterminateSplitError(TorsionAlgebraError):
    """Eigenvalue clustering could not certify an invariant splitting."""


class DegenerateFormError(TorsionAlgebraError):
    pass


class NotAmbroseSingerError(TorsionAlgebraError):
    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class ZeroTorsionSquareError(TorsionAlgebraError):
    pass


class UnknownSuiteError(TorsionAlgebraError):
    pass


class UnknownModelError(TorsionAlgebraError):
    pass


class MalformedInputError(TorsionAlgebraError):
    pass


class UnsupportedMetricError(TorsionAlgebraError):
    """The operation is only defined for an orthonormal basis."""
