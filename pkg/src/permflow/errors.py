"""Exception types raised across the package."""


class PermflowError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(PermflowError, ValueError):
    """A lattice, subset or ordered pair violates its invariants."""


class NotFullError(PermflowError, ValueError):
    """An operation that needs a full ordered pair (a group element) got a partial one."""


class StateSpaceTooLarge(PermflowError):
    """N! exceeds the configured dense-table cap."""


class CapExceeded(PermflowError):
    """A combinatorial enumeration would exceed its size cap."""


class ConditionNotApplicable(PermflowError, ValueError):
    """The optional zero-sum condition on u is only defined for |S| > 1."""


class DegenerateContext(PermflowError, ValueError):
    """Duality needs a context set with 1 <= |s| <= N - 1."""
