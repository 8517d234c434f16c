"""Exception hierarchy shared by services and commands.

Every error carries a stable ``code`` so command handlers can map failures to
exit statuses without string matching.
"""

from typing import Optional


class IdealForgeError(Exception):
    code = "IDEALFORGE_ERROR"

    def __init__(self, message: str, *, code: Optional[str] = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code


class InvalidInputError(IdealForgeError, ValueError):
    """A precondition of a public operation was violated."""

    code = "INVALID_INPUT"


class BudgetExceededError(IdealForgeError):
    """An exact counter or search was asked to go past its configured budget."""

    code = "BUDGET_EXCEEDED"

    def __init__(self, message: str, *, size: int, budget: int) -> None:
        super().__init__(message)
        self.size = size
        self.budget = budget


class NotFoundWithinBudgetError(BudgetExceededError):
    code = "NOT_FOUND_WITHIN_BUDGET"


class CertificateError(IdealForgeError):
    """A build trace failed to recount; names the node and the side condition."""

    code = "CERTIFICATE_INVALID"

    def __init__(self, message: str, *, node: str, condition: str) -> None:
        super().__init__(f"{node}: {condition}: {message}")
        self.node = node
        self.condition = condition


class BoundViolationError(IdealForgeError):
    """A block-count or member-count bound failed on a constructed value."""

    code = "BOUND_VIOLATION"

    def __init__(self, message: str, *, value: int, bound: int) -> None:
        super().__init__(f"{message} (value={value}, bound={bound})")
        self.value = value
        self.bound = bound
