"""Exception hierarchy shared by the library and the command line front-end."""


class NewtonElimError(Exception):
    """Base class for all library errors."""


class PreconditionError(NewtonElimError, ValueError):
    """An operation was called on inputs that violate its contract."""


class DimensionMismatch(PreconditionError):
    """Ambient dimensions or matrix shapes do not agree."""


class DegenerateConfiguration(PreconditionError):
    """The geometric data is too degenerate for the requested formula."""


class NotGeneric(PreconditionError):
    """A covector hits a wall of the relevant normal fan."""


class NotWellDefined(PreconditionError):
    """An unbounded mixed volume depends on the chosen stabilization."""


class NotDeveloped(PreconditionError):
    """Polytopes (or lifts) fail the developed condition."""


class OracleFailure(NewtonElimError, RuntimeError):
    """The numeric oracle could not produce a trustworthy answer."""
