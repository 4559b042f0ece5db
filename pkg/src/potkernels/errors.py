"""Exception hierarchy shared by all modules."""


class KernelError(Exception):
    """Base class for library errors."""


class GeometryError(KernelError, ValueError):
    """Invalid or degenerate boundary description.

    ``curve`` is the index of the offending curve in the user's ordering
    (``None`` when the problem is not tied to one curve).
    """

    def __init__(self, reason, curve=None):
        self.reason = reason
        self.curve = curve
        msg = reason if curve is None else f"curve {curve}: {reason}"
        super().__init__(msg)


class OnBoundaryError(GeometryError):
    pass


class OutsideDomainError(GeometryError):
    pass


class NumericalError(KernelError, ArithmeticError):
    """A linear system, root search or accuracy check failed."""
