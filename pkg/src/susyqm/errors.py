"""Exception hierarchy shared by every susyqm module."""


class SusyQMError(Exception):
    """Base class for all library errors."""


class NumericalError(SusyQMError):
    """Failure of a numerical procedure (maps to CLI exit code 3)."""


class DomainError(SusyQMError, ValueError):
    """Argument outside the domain where the quantity is defined."""


class NonConvergence(NumericalError):
    pass


class PoleInDenominator(NumericalError, ValueError):
    pass


class SingularWronskian(NumericalError):
    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class SingularPotential(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class NotNormalizable(NumericalError):
    pass


class DeletedLevel(SusyQMError, ValueError):
    """Requested isospectral state whose H0 partner is annihilated by the intertwiner."""


class DimMismatch(SusyQMError, ValueError):
    pass


class ConfigError(SusyQMError, ValueError):
    """Malformed model or transform string (maps to CLI exit code 2)."""
