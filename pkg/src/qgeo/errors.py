"""Exception hierarchy shared by every qgeo module."""


class QGeoError(Exception):
    """Base class for all qgeo errors."""


class ContractError(QGeoError, ValueError):
    """An argument violates an operation's precondition."""


class ResolutionError(ContractError):
    """A packet is too narrow for the grid spacing."""


class DomainError(ContractError):
    """A point or packet lies outside (or leaks out of) the periodic domain."""


class SingularityError(QGeoError, ValueError):
    """Evaluation at, or integration through, a singular flux or cone apex."""


class StepSizeError(QGeoError, RuntimeError):
    """A stepping scheme failed to converge or lost unitarity."""


class RangeError(ContractError):
    """A finite-difference displacement is outside its validity range."""


class RegimeError(QGeoError, ValueError):
    """A geometric configuration does not support the requested quantity."""


class SchemaError(QGeoError, ValueError):
    """A scenario configuration failed schema validation."""

    def __init__(self, message, path=()):
        self.path = tuple(path)
        where = "/".join(str(p) for p in self.path) or "<root>"
        super().__init__(f"{where}: {message}")
