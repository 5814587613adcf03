class ConfigurationError(ValueError):
    """Inputs with mismatched shapes, invalid constants or unparseable config."""


class CoverageError(ValueError):
    """A mapped real depth range does not cover the fixed depth range."""


class FormatError(ValueError):
    """Malformed tensor file. ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
