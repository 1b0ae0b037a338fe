"""Exception hierarchy shared by all divkit modules."""

from __future__ import annotations


class DivkitError(Exception):
    """Base class for every error raised by divkit."""


class TreeError(DivkitError, ValueError):
    """A head assignment violates the dependency-tree invariants."""


class CycleError(TreeError):
    pass


class NoRootError(TreeError):
    pass


class MultipleRootError(TreeError):
    pass


class DanglingHeadError(TreeError):
    pass


class TokenError(DivkitError, ValueError):
    """A token sequence is malformed (bad indices, empty forms)."""


class AlignmentError(DivkitError, ValueError):
    """An alignment link points outside the trees it connects."""


class CorpusError(DivkitError, ValueError):
    pass


class ParseError(DivkitError, ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class LastTokenError(DivkitError, ValueError):
    pass


class NotAnEdgeError(DivkitError, ValueError):
    pass


class DegenerateTreeError(DivkitError, ValueError):
    pass


class ProjectionDegenerateError(DivkitError, ValueError):
    pass


class TokenMismatchError(DivkitError, ValueError):
    pass


class EmptySplitError(DivkitError, ValueError):
    pass
