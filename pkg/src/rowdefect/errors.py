"""Exception classes raised across the package."""


class RowDefectError(ValueError):
    """Base class for all errors raised by ``rowdefect``."""


class DimensionMismatchError(RowDefectError):
    """Raised when operands live in spaces of different dimension."""


class NotHermitianError(RowDefectError):
    """Raised when a matrix that must be Hermitian is not."""


class NotPSDError(RowDefectError):
    """Raised when a Hermitian matrix has an eigenvalue below ``-identity_atol``."""


class NotRowContractionError(RowDefectError):
    """Raised when ``||sum_i T_i T_i^*|| > 1 + identity_atol``."""

    def __init__(self, msg, row_norm):
        super().__init__(msg)
        self.row_norm = row_norm


class CommutatorError(RowDefectError):
    """Raised when a tuple flagged as commuting has a large commutator."""

    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


class NoDefectError(RowDefectError):
    """Raised when an operation needs ``Delta_T >= 1`` but the tuple has no defect."""


class CoinvarianceError(RowDefectError):
    """Raised when a subspace is not co-invariant for the creation tuple."""

    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


class CertificationError(RowDefectError):
    """Raised when a request exceeds what a truncation can certify."""


class HypothesisViolation(RowDefectError):
    """Raised when the hypotheses of a test battery are not met by its input."""
