"""Exception hierarchy shared by all modules."""


class DipolarError(ValueError):
    """Base class for every error raised by this package."""


class NotHermitian(DipolarError):
    pass


class NotPSD(DipolarError):
    pass


class DimensionMismatch(DipolarError):
    pass


class SiteOutOfRange(DipolarError):
    pass


class GeometryMismatch(DipolarError):
    pass


class NotDensityMatrix(DipolarError):
    pass


class NotXState(DipolarError):
    pass


class DomainError(DipolarError):
    """Parameters outside the domain where a formula is defined."""


class NoRootInBracket(DipolarError):
    pass


class InsufficientEntangledPoints(DipolarError):
    pass


class UnknownFigure(DipolarError):
    pass
