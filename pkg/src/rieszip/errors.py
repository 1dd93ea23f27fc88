"""Exception types shared across the package."""


class RieszIPError(Exception):
    """Base class for all errors raised by this package."""


class PrecisionError(RieszIPError):
    """An enclosure could not be made tight enough at the requested precision."""


class InvariantViolation(RieszIPError):
    """A checked mathematical invariant failed.

    ``check`` names the failing check so that reports and the CLI can point
    at it directly.
    """

    def __init__(self, check: str, message: str):
        super().__init__(f"[{check}] {message}")
        self.check = check


class DissociationError(RieszIPError):
    def __init__(self, k: int, deficit: int):
        super().__init__(
            f"dissociation fails at k={k}: n_(k+1) - 2*sum m_j n_j = {1 - deficit} < 1"
        )
        self.k = k
        self.deficit = deficit


class SequenceError(RieszIPError, ValueError):
    """A generator was given parameters that violate its hypotheses."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class InfeasibleError(RieszIPError):
    """No admissible parameter choice exists on the supplied horizon."""


class GuardError(RieszIPError, ValueError):
    """An enumeration guard (subset width, spectrum size) was exceeded."""


class WitnessError(RieszIPError):
    def __init__(self, step: int, message: str):
        super().__init__(f"refinement empty at step l={step}: {message}")
        self.step = step
