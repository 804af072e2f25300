"""Exception types raised by the estimation library."""


class EstimationError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(EstimationError):
    """Matrix or vector shapes are inconsistent with the model set."""


class NotPositiveDefinite(EstimationError):
    """A weight matrix failed the symmetric positive-definite test."""


class EmptyModelSet(EstimationError):
    """The candidate model family contains no models."""


class NonpositiveGamma(EstimationError):
    """The attenuation level gamma must be strictly positive."""


class FactorizationFailure(EstimationError):
    """A matrix that must be positive definite could not be factorized.

    For valid inputs the affected matrices are positive definite by
    construction, so this signals numerically corrupted data.
    """


class NoConvergence(EstimationError):
    """An iterative solver hit its iteration cap before reaching tolerance.

    The best iterate found is attached as ``last`` for diagnostics.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class ModelMismatch(EstimationError):
    """Precomputed gain data is dimensioned for a different model set."""


class HorizonExceeded(EstimationError):
    """A filter step was requested past the precomputed gain horizon."""


class IndexOutOfRange(EstimationError):
    """A model index is outside the family."""


class SingularSystem(EstimationError):
    """The inner maximization is not strictly concave; gamma-feasibility fails."""


class GammaInfeasible(EstimationError):
    """The condition lambda_max(H P H^T) < gamma^2 is violated.

    Carries ``lambda_max`` and ``gamma_sq``; ``model`` and ``t`` are set when
    the violation is located inside a recursion.
    """

    def __init__(self, message, lambda_max=None, gamma_sq=None, model=None, t=None):
        super().__init__(message)
        self.lambda_max = lambda_max
        self.gamma_sq = gamma_sq
        self.model = model
        self.t = t


class PreconditionViolated(EstimationError):
    """A closed-form identity was invoked outside its validity region."""


class EmptyPieceList(EstimationError):
    """The minimax solver needs at least one quadratic piece."""


class ConfigError(EstimationError):
    """An experiment configuration file could not be parsed or validated."""
