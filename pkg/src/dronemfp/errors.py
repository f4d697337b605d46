"""Exception hierarchy shared by every module."""


class DroneMFPError(Exception):
    """Base class for all package errors."""


class ConfigurationError(DroneMFPError, ValueError):
    pass


class GeometryError(DroneMFPError, ValueError):
    pass


class PayloadError(DroneMFPError, ValueError):
    pass


class NumericalError(DroneMFPError, ArithmeticError):
    pass


class TraceError(DroneMFPError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class PathError(DroneMFPError, ValueError):
    pass


class ParseError(DroneMFPError, ValueError):
    pass


class ValidationError(DroneMFPError, ValueError):
    pass


class GenerationError(DroneMFPError, RuntimeError):
    pass


class ResourceError(DroneMFPError, RuntimeError):
    pass
