"""Exception hierarchy shared by the library and the command-line front end."""


class ZitterError(Exception):
    """Base class for every error raised by this package."""


class PhysicsError(ZitterError, ValueError):
    """An input violates a physical or numerical precondition."""


class MasslessParticleError(PhysicsError):
    """A zitter period was requested for a particle without rest mass."""


class NotNormalizedError(PhysicsError):
    """An observable was requested on a packet whose total norm is not 1."""


class ConfigError(ZitterError):
    """Base class for configuration problems; ``key`` names the offending field."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class UnknownKeyError(ConfigError):
    pass


class MissingFieldError(ConfigError):
    pass


class NonFiniteError(ConfigError):
    pass


class InvalidValueError(ConfigError):
    pass


class UnknownCommandError(ConfigError):
    pass
