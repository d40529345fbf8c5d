from __future__ import annotations


class DomainError(ValueError):
    pass


class SingularMatrixError(DomainError):
    pass


class PreconditionError(ValueError):
    pass


class UnsupportedConfigurationError(ValueError):
    pass


class InvalidCocycleError(ValueError):
    pass


class ExponentRangeError(ValueError):
    pass


class InconsistentLiftError(ValueError):
    pass


class NotComplementaryError(ValueError):
    pass


class ModelValidationError(ValueError):
    def __init__(self, problems: list[str]) -> None:
        joined = "; ".join(problems) if problems else "unknown problem"
        super().__init__(f"Model validation failed: {joined}")
        self.problems = list(problems)


class CannotAdjustError(RuntimeError):
    pass


class ModelInconsistencyError(RuntimeError):
    def __init__(
        self, message: str, *, prime: str | None = None, stage: int | None = None
    ) -> None:
        super().__init__(message)
        self.prime = prime
        self.stage = stage


class PartialSearchError(RuntimeError):
    def __init__(self, message: str, *, examined: int, total: int) -> None:
        super().__init__(message)
        self.examined = examined
        self.total = total
