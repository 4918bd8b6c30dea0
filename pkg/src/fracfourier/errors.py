"""Exception types shared across the package.

The CLI maps these onto process exit codes: validation errors exit 2,
budget errors exit 3, failed verifications exit 4.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Malformed input: bad rationals, empty IFS, out-of-domain parameters."""


class BudgetExceededError(RuntimeError):
    """A refinement loop hit its cell/leaf/recursion budget.

    Carries whatever partial result was available so callers can still
    report the best enclosure seen.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class VerificationFailed(RuntimeError):
    """A requested certificate or bound check did not hold."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
