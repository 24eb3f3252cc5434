"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Field or scheme parameters are out of range or mutually inconsistent."""


class InsufficientDataError(ValueError):
    """Fewer coded symbols than needed to determine the message."""


class CorruptionError(RuntimeError):
    """Received symbols are inconsistent with every codeword."""


class ProtocolError(RuntimeError):
    """A symbol or message entry required by the protocol is missing."""


class CapExceededError(RuntimeError):
    """Requested enumeration is larger than the configured cap."""

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate
