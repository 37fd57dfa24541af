"""Exception and warning types shared across the package."""


class ParseError(ValueError):
    """Malformed expression text; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownVariableError(ParseError):
    pass


class DegreeCapError(ValueError):
    def __init__(self, message: str, cap: int, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.cap = cap
        self.position = position


class ModeMismatchError(ValueError):
    pass


class CutoffError(ValueError):
    """A Fock cutoff is too small; ``minimal_cutoff`` is the smallest adequate one."""

    def __init__(self, message: str, minimal_cutoff: int):
        super().__init__(f"{message}; minimal adequate cutoff is {minimal_cutoff}")
        self.minimal_cutoff = minimal_cutoff


class TruncationWarning(UserWarning):
    pass
