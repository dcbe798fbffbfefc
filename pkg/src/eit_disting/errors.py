"""Exception types raised on invalid input."""


class EITDistingError(ValueError):
    """Base class for all errors raised by this package."""


class InvalidParameterError(EITDistingError):
    pass


class InvalidGeometryError(EITDistingError):
    """The inclusion does not lie strictly inside the unit disk."""


class InvalidIndexError(EITDistingError):
    pass


class InvalidInputError(EITDistingError):
    pass


class SingularityError(EITDistingError):
    pass
