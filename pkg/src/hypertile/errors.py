"""Exception hierarchy shared by every hypertile module."""


class HypertileError(Exception):
    """Base class for all errors raised by hypertile."""


class ArityError(HypertileError, ValueError):
    """A vertex set has a size outside the range an operation accepts."""


class PreconditionError(HypertileError, ValueError):
    """Parameters violate an operation's documented preconditions."""


class DivisibilityError(PreconditionError):
    """The pattern order does not divide the number of vertices."""


class ResourceCapError(HypertileError):
    """An instance exceeds a configured desk-scale cap."""


class OverlapError(PreconditionError):
    """Sets that must be pairwise disjoint intersect."""


class InfeasibleError(HypertileError):
    """No certificate of the requested kind exists on this host."""


class AssignmentError(HypertileError):
    """Leftover t-sets could not be matched to distinct absorbers."""

    def __init__(self, message, stuck=None):
        super().__init__(message)
        self.stuck = stuck


class HypergraphParseError(HypertileError, ValueError):
    """Base class for malformed hypergraph text files."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MalformedHeaderError(HypergraphParseError):
    pass


class EdgeArityError(HypergraphParseError):
    pass


class DuplicateEdgeError(HypergraphParseError):
    pass


class VertexRangeError(HypergraphParseError):
    pass
