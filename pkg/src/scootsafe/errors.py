"""Exception hierarchy.  Every error raised deliberately by the package derives from ScootsafeError."""
from __future__ import annotations



class ScootsafeError(Exception):
    pass


class UndefinedBearingError(ScootsafeError, ValueError):
    pass


class ProjectionDomainError(ScootsafeError, ValueError):
    pass


class DegenerateTrajectoryError(ScootsafeError, ValueError):
    """Too few fixes survive validation or conditioning."""


class NoOverlapError(ScootsafeError, ValueError):
    pass


class EmptyInputError(ScootsafeError, ValueError):
    pass


class UnclassifiableError(ScootsafeError, ValueError):
    """No usable heading information inside the interaction phase."""


class InfeasibleSpecError(ScootsafeError, ValueError):
    pass


class IngestError(ScootsafeError):
    """File-level or case-level problem found while reading trajectory CSV."""

    def __init__(self, message: str, case_id: str | None = None):
        super().__init__(message if case_id is None else f"case {case_id!r}: {message}")
        self.case_id = case_id


class MissingColumnsError(IngestError):
    pass


class NonMonotoneTimeError(IngestError):
    pass


class MissingAgentError(IngestError):
    pass
