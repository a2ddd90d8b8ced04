"""Exception types shared across the package."""


class LrmError(ValueError):
    """Base class for rejected inputs."""


class ConfigurationMismatch(LrmError):
    """Two operators (or an operator and a group) live on different local configurations."""


class CapExceeded(LrmError):
    """A brute-force routine was asked to exceed its size limit."""

    def __init__(self, what: str, value: int, limit: int) -> None:
        super().__init__(f"{what} = {value} exceeds the limit of {limit}")
        self.what = what
        self.value = value
        self.limit = limit


class UnsupportedConfiguration(LrmError):
    """The operation is only implemented for all-qubit configurations."""


class ValidationError(LrmError):
    """A stabilizer group, code, or logical basis violates an invariant."""
