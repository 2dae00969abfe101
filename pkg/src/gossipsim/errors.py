"""Exception types raised across the package.

Everything derives from :class:`GossipSimError` so callers can catch one
base class at the CLI boundary and report the concrete class name.
"""


class GossipSimError(Exception):
    """Base class for all errors raised by gossipsim."""


class DimensionMismatch(GossipSimError):
    """Operands have incompatible shapes."""


class SingularMatrix(GossipSimError):
    """A linear solve hit a negligible pivot or an unusable residual."""


class NotBalanced(GossipSimError):
    """Right-hand side is not orthogonal to the all-ones vector."""


class NotSchurStable(GossipSimError):
    """A fixed point was requested for a system without a stability certificate."""


class NotSubstochastic(GossipSimError):
    """Matrix has a negative entry or a row/column sum above one."""


class NotStochastic(GossipSimError):
    """Vector is not a probability vector."""


class NotRowStochastic(GossipSimError):
    """Row sums of an influence matrix differ from one."""


class NegativeEntry(GossipSimError):
    """A matrix that must be nonnegative has a negative entry."""


class TauTooLarge(GossipSimError):
    """Gradient step size at or above the divergence threshold."""


class EdgeNotInGraph(GossipSimError):
    """A gossip update was requested on an edge the graph does not contain."""


class AssumptionViolated(GossipSimError):
    """A convergence assumption (e.g. stubborn reachability) does not hold."""


class InvariantViolation(GossipSimError):
    """A constructed object violates one of its documented invariants."""


class DegenerateProduct(GossipSimError):
    """A sampled matrix product collapsed to zero norm (log-norm is -inf)."""


class ValidationError(GossipSimError):
    """An input object violates a structural invariant."""


class DanglingNode(ValidationError):
    """A directed graph node has no outgoing links."""

    def __init__(self, node: int, message: str | None = None):
        self.node = node
        super().__init__(message or f"node {node} has no outgoing links")


class ParseError(GossipSimError):
    """A text input could not be parsed; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class ConfigError(GossipSimError):
    """Scenario configuration is incomplete or out of domain."""


class EmptyLog(GossipSimError):
    """A trajectory log holds no rows."""
