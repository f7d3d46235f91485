"""Exception taxonomy shared by every pathcount module.

Each error carries a short machine-readable ``tag`` which the command line
front-ends print to stderr.
"""

from __future__ import annotations


class PathCountError(Exception):
    tag = "error"


class InstanceError(PathCountError, ValueError):
    """Raised when an instance file or object violates the format/invariants."""

    tag = "invalid_instance"

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class MalformedLine(InstanceError):
    tag = "malformed_line"


class HeaderMismatch(InstanceError):
    tag = "header_mismatch"


class DuplicateEdge(InstanceError):
    tag = "duplicate_edge"


class SelfLoop(InstanceError):
    tag = "self_loop"


class VertexOutOfRange(InstanceError):
    tag = "vertex_out_of_range"


class MissingHeader(InstanceError):
    tag = "missing_header"


class MissingLength(InstanceError):
    tag = "missing_length"


class DuplicateDirective(InstanceError):
    tag = "duplicate_directive"


class IdenticalTerminals(InstanceError):
    tag = "identical_terminals"


class InvalidLength(InstanceError):
    tag = "invalid_length"


class Cancelled(PathCountError):
    tag = "cancelled"


class Timeout(Cancelled):
    tag = "timeout"


class BudgetExceeded(PathCountError):
    tag = "budget_exceeded"


class MemoryBudgetExceeded(PathCountError):
    tag = "memory_budget_exceeded"


class OrderMismatch(PathCountError, ValueError):
    tag = "order_mismatch"


class InvalidSpec(PathCountError, ValueError):
    tag = "invalid_spec"


class DegenerateGraph(PathCountError, ValueError):
    tag = "degenerate_graph"


class InfeasibleRewire(UserWarning):
    """Emitted (as a warning) when a graph cannot be rewired; the input is returned unchanged."""


class ResultMismatch(PathCountError):
    """Two counting strategies disagreed on the same instance."""

    tag = "result_mismatch"
