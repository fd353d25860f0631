"""Exception types shared across the package."""


class InputError(ValueError):
    """An argument violates an operation's precondition."""


class DegenerateInputError(InputError):
    """Input is structurally valid but numerically degenerate
    (all-zero spectrum, zero reference matrix, zero sub-band)."""


class ConfigError(ValueError):
    """A config file is malformed, has unknown keys, or holds bad values."""


class DataError(ValueError):
    """A dataset is inconsistent with the requested experiment."""


class FormatError(ValueError):
    """A binary file failed validation. Carries the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
