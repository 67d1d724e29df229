"""Exception types shared across the package."""


class BlabError(Exception):
    """Base class for all errors raised by blab."""


class ValidationError(BlabError):
    """A structure failed validation."""


class MalformedPermutation(ValidationError):
    pass


class NotTriangular(ValidationError):
    pass


class NotSphere(ValidationError):
    pass


class Disconnected(ValidationError):
    pass


class NotFlippable(BlabError):
    """Raised by :func:`blab.sampler.flip_edge`.

    ``reason`` is one of ``"same-face"``, ``"loop"``, ``"existing-edge"``.
    """

    def __init__(self, reason, message=None):
        self.reason = reason
        super().__init__(message or f"edge is not flippable ({reason})")


class ResourceLimit(BlabError):
    """A search exceeded its node budget."""


class DegenerateWindow(BlabError):
    pass


class EmptySet(BlabError):
    pass


class InsufficientData(BlabError):
    pass


class ParseError(BlabError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class VersionMismatch(ParseError):
    pass
