"""Exception types raised across the package."""


class SmcError(Exception):
    """Base class; ``code`` is the machine-readable name used by the CLI."""

    code = "SmcError"


class InvalidInput(SmcError, ValueError):
    code = "InvalidInput"


class EmptyRoi(SmcError):
    code = "EmptyRoi"


class EmptyGlcm(SmcError):
    code = "EmptyGlcm"


class DegenerateClass(SmcError, ValueError):
    code = "DegenerateClass"


class TooFewSubclusters(SmcError):
    code = "TooFewSubclusters"


class IoError(SmcError, OSError):
    code = "IoError"


class FoldError(SmcError):
    """A cross-validation fold failed; wraps the original error."""

    code = "FoldError"

    def __init__(self, fold, cause):
        self.fold = fold
        self.cause = cause
        super().__init__(f"fold {fold} failed: {type(cause).__name__}: {cause}")
