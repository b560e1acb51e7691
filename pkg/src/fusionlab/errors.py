"""Exception types raised across the package."""


class FusionLabError(Exception):
    """Base class for all package errors."""


class MalformedPermutation(FusionLabError):
    pass


class OrderCapExceeded(FusionLabError):
    pass


class NotAPGroup(FusionLabError):
    pass


class SubgroupCapExceeded(FusionLabError):
    pass


class NotNormal(FusionLabError):
    pass


class NotASubgroup(FusionLabError):
    pass


class IndexCapExceeded(FusionLabError):
    pass


class InvalidModule(FusionLabError):
    pass


class NotConstrained(FusionLabError):
    pass


class ClosureCapExceeded(FusionLabError):
    pass


class CellCapExceeded(FusionLabError):
    """Raised when a cochain complex would exceed the nonzero-entry budget."""

    def __init__(self, message, census=None):
        super().__init__(message)
        self.census = census


class IncompatibleAction(FusionLabError):
    """The module action does not kill O^p(C_G(P)) for some collection member.

    ``witness`` holds the offending ``(P, g)`` pair when known.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidCollection(FusionLabError):
    pass


class InconsistentSystem(FusionLabError):
    pass
