"""Exception hierarchy. Each family carries the CLI exit code it maps to."""


class SpinQEDError(Exception):
    exit_code = 1


class ConfigurationError(SpinQEDError, ValueError):
    exit_code = 2


class InvalidDomainError(ConfigurationError):
    """A parameter lies outside the mathematical domain of an operation."""


class PreconditionError(SpinQEDError):
    exit_code = 3


class NumericError(SpinQEDError, ArithmeticError):
    exit_code = 4


class SingularResolventError(NumericError):
    def __init__(self, message, occupation=None, subset=None):
        super().__init__(message)
        self.occupation = occupation
        self.subset = subset


class QuadratureError(NumericError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class EigensolverError(NumericError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class HermiticityError(NumericError):
    pass


class ResourceError(SpinQEDError):
    exit_code = 5

    def __init__(self, message, dimension=None):
        super().__init__(message)
        self.dimension = dimension
