"""Exceptions shared by the problem modules."""

from __future__ import annotations


class InstanceError(ValueError):
    """The problem input is malformed or violates an instance invariant."""


class WindowTooShort(InstanceError):
    """A job window cannot hold the job at all."""


class AssignmentFailure(RuntimeError):
    """The greedy assignment could not fill a skeleton.

    Never raised on solver output unless there is a bug.
    """


class MalformedProfile(ValueError):
    pass


class Violations(Exception):
    """A solution failed independent verification; ``problems`` lists why."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


class SizeGuard(ValueError):
    """Instance too large for brute-force enumeration."""
