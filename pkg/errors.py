"""
Error types for the community detection toolkit

Every error carries the exit code the command-line interface returns for it:
1 usage, 2 data/parse, 3 invariant or non-convergence.
"""

from typing import Iterable, Optional


class CommunityDetectionError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 1


class UsageError(CommunityDetectionError):
    """Invalid parameters or flag combinations"""

    exit_code = 1


class ParameterError(UsageError):
    """Invalid algorithm parameter (k < 1, negative radius, empty range...)"""


class GraphParseError(CommunityDetectionError):
    """Malformed graph input"""

    exit_code = 2

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class GroundTruthError(CommunityDetectionError):
    """Ground truth or label file does not match the graph"""

    exit_code = 2

    def __init__(self, message: str, nodes: Iterable[str] = ()):
        self.nodes = list(nodes)
        if self.nodes:
            shown = ", ".join(self.nodes[:10])
            more = f" (+{len(self.nodes) - 10} more)" if len(self.nodes) > 10 else ""
            message = f"{message}: {shown}{more}"
        super().__init__(message)


class ConvergenceError(CommunityDetectionError):
    """Iteration cap reached before the medoid sets stabilised"""

    exit_code = 3

    def __init__(self, message: str, previous=None, current=None):
        self.previous = sorted(previous) if previous is not None else None
        self.current = sorted(current) if current is not None else None
        if self.previous is not None and self.current is not None:
            message = f"{message} (last sets: {self.previous} -> {self.current})"
        super().__init__(message)


class InvariantViolation(CommunityDetectionError):
    """An internal invariant did not hold"""

    exit_code = 3
