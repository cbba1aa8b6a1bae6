"""Exception hierarchy shared by all modules."""


class CapboundError(Exception):
    """Base class for library errors."""


class FieldError(CapboundError, ValueError):
    pass


class PolyParseError(CapboundError, ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


class GuardExceeded(CapboundError):
    """A computation would exceed a configured size guard."""
