"""Exception types shared across the package."""


class QnetcapError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QnetcapError, ValueError):
    """A numeric argument lies outside its physical domain."""


class EmptyCompoundError(DomainError):
    """A compound-channel reduction was requested for zero channels."""


class FamilyError(QnetcapError, TypeError):
    """Channel families (amplitude damping vs thermal loss) were mixed or ambiguous."""


class KrausError(QnetcapError, ValueError):
    """A Kraus set does not describe a trace-preserving channel."""


class NodeNotFoundError(QnetcapError, KeyError):
    """A node id is not present in the graph."""


class SizeError(QnetcapError, ValueError):
    """A brute-force oracle was asked to enumerate a graph beyond its size cap."""


class MonotonicityError(QnetcapError, ValueError):
    """A capacity function handed to the threshold solver is not monotone on its bracket."""


class NotAttainableError(QnetcapError, ValueError):
    """No physical parameter value reaches the requested capacity target."""


class ValidationError(QnetcapError, ValueError):
    """A network description violates structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
