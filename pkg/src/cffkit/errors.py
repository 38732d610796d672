"""Exception types shared by every builder and verifier."""


class InvalidParams(ValueError):
    """Raised when parameters violate a builder's or verifier's precondition."""


class CapacityError(RuntimeError):
    """Raised when an object is too large to build or materialize at this scale."""


class VerificationFailed(RuntimeError):
    """Raised by builders that refuse to return an object failing its own check."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
