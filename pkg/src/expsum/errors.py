"""Error hierarchy shared by the library and the CLI.

Library code raises; only `expsum.cli` turns these into exit codes. Each class carries
the exit code the CLI reports for it, so the mapping lives next to the error.
"""

from __future__ import annotations


class ExpsumError(Exception):
    exit_code = 5


class InvalidFunctionError(ExpsumError, ValueError):
    """The raw pole/coefficient data violates the partial-fraction invariants."""

    exit_code = 2

    def __init__(self, violations: list[str]) -> None:
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))

    def __reduce__(self) -> tuple[type[InvalidFunctionError], tuple[list[str]]]:
        return type(self), (self.violations,)


class SpecFileError(ExpsumError, ValueError):
    exit_code = 2


class BadPrimeError(ExpsumError, ValueError):
    """p is not a good prime for the function; `condition` names the failed check."""

    exit_code = 3

    def __init__(self, p: int, condition: str) -> None:
        self.p = p
        self.condition = condition
        super().__init__(f"bad prime {p}: {condition}")

    def __reduce__(self) -> tuple[type[BadPrimeError], tuple[int, str]]:
        return type(self), (self.p, self.condition)


class BudgetExceededError(ExpsumError):
    exit_code = 4

    def __init__(self, size: int, budget: int, what: str = "enumeration") -> None:
        self.size = size
        self.budget = budget
        self.what = what
        super().__init__(f"{what} of {size} elements exceeds budget {budget}")

    def __reduce__(self) -> tuple[type[BudgetExceededError], tuple[int, int, str]]:
        return type(self), (self.size, self.budget, self.what)


class InsufficientPrecisionError(ExpsumError):
    """A p-adic computation could not certify its result at the working precision."""


class InvariantViolationError(ExpsumError, AssertionError):
    """An asserted mathematical invariant failed: a bug or a bad prime slipped through."""
