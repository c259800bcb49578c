"""Exception hierarchy shared across the package."""


class SuperarcError(Exception):
    """Base class for all package errors."""


class UsageError(SuperarcError):
    """Invalid parameters or configuration (CLI exit code 2)."""


class ResourceCapError(SuperarcError):
    """A configured resource cap was exceeded; results are never silently truncated."""


class MismatchedContextError(SuperarcError):
    """Two fields from different free-field contexts were combined."""


class NonVirasoroError(SuperarcError):
    """A self-OPE failed the Virasoro shape test.

    `pole` records the first offending pole order.
    """

    def __init__(self, pole, detail=""):
        self.pole = pole
        super().__init__(f"self-OPE is not Virasoro-shaped at pole {pole}" + (f": {detail}" if detail else ""))


class CriticalLevelError(SuperarcError):
    """Sugawara construction requested at a critical level."""


class DegenerateFormError(SuperarcError):
    """The invariant bilinear form is degenerate where a dual basis is required."""


class RealizationSolveError(SuperarcError):
    """The linear system fixing current normalizations is inconsistent.

    This signals a structure-constant or contraction convention bug, never
    a recoverable condition.
    """


class PresentationError(SuperarcError):
    """A quotient presentation cannot be certified at the requested degrees."""
