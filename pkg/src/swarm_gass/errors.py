"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class InvalidState(RuntimeError):
    """A computation reached a state it cannot continue from."""


class ConfigError(ValueError):
    """A configuration value is invalid or inconsistent.

    ``key`` names the offending setting when it is known.
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class CheckpointError(ValueError):
    """A checkpoint file is unreadable, corrupt or does not fit the run."""
