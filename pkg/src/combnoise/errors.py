"""Exception hierarchy shared across the package."""


class CombNoiseError(Exception):
    """Base class for all package errors."""


class DomainError(CombNoiseError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateModeError(DomainError):
    """A mode profile has no support on the analysis zones."""


class ProtocolError(CombNoiseError):
    """A measurement set is incomplete, duplicated or inconsistent."""


class ConvergenceError(CombNoiseError, ArithmeticError):
    """An iterative numerical routine hit its iteration cap."""


class UndefinedFractionError(DomainError):
    """No eigenvalue rises above the shot-noise floor."""


class SingularCorrectionError(DomainError):
    """The cavity decoupling factor vanishes, so the correction diverges."""


class InputError(DomainError):
    """A file or config could not be parsed or violates its schema.

    ``line`` is the 1-based line the problem was traced to, when known.
    """

    def __init__(self, message: str, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        where = ":".join(str(x) for x in (source, line) if x is not None)
        super().__init__(f"{where}: {message}" if where else message)
