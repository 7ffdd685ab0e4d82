"""Exception types raised across the package."""


class CutLocusError(ValueError):
    """The logarithm was requested at -I, where it is not defined."""


class ClosureError(RuntimeError):
    """Group closure exceeded its cap or produced colliding elements."""


class PresentationError(RuntimeError):
    """Generators fail their defining relations beyond tolerance."""


class NotAMemberError(LookupError):
    """A quaternion is not within tolerance of any group element."""


class DisconnectedGraphError(RuntimeError):
    """A neighbour graph is disconnected; the edge radius is too small."""


class ConvergenceError(RuntimeError):
    """An iterative reduction did not finish within its iteration budget."""
