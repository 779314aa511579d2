"""Exception types raised by hdchain."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(DomainError):
    """A request needs more harmonic-table entries than were precomputed."""
