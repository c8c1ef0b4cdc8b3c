"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input. ``path`` locates the offending field."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class VerificationError(ArithmeticError):
    """A numerical check failed; ``residual`` carries the measured defect."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class NotSpecialisable(VerificationError):
    pass


class NoWitness(VerificationError):
    pass
