class KplumeBaseException(Exception):
    """General base exception for errors raised by kplume itself."""

    pass


class ParameterException(KplumeBaseException, ValueError):
    """Generic exception indicating a model or run parameter is invalid."""

    pass


class DegenerateChain(ParameterException):
    """Adsorption and desorption probabilities are both zero (no stationary distribution)."""

    pass


class InvalidProbability(ParameterException):
    """A probability lies outside [0, 1] or a probability law is not normalised."""

    pass


class InvalidDispersion(ParameterException):
    """Dispersion weights are invalid (alpha + beta != 1/2, or non-positive Gaussian scale)."""

    pass


class InvalidXi(ParameterException):
    """Nearest-neighbour diagonal weight xi lies outside the open interval (0, 1/4)."""

    pass


class InvalidStepCount(ParameterException):
    """Requested number of time steps is below the minimum for the operation."""

    pass


class SupportOverflow(KplumeBaseException):
    """Convolution table would exceed the configured point budget."""

    pass


class AllMassAtomic(KplumeBaseException):
    """Every particle is still at the origin, so the conditional variance is undefined."""

    pass


class ConfigInvalidException(KplumeBaseException):
    """Exception raised for invalid configuration error."""

    pass


class VerificationFailure(KplumeBaseException):
    """One or more verification checks failed."""

    pass
