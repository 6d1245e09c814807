"""Shared exception types."""

from __future__ import annotations


class StabDecompError(Exception):
    """Base class for all package errors."""


class PrimeMismatch(StabDecompError):
    """Two values over different prime fields were combined."""


class DimensionMismatch(StabDecompError):
    """Matrix shapes are incompatible for the requested operation."""


class PolyParseError(StabDecompError):
    """Syntax error in a polynomial string.

    Carries the 0-based character offset into the parsed text.
    """

    def __init__(self, message: str, pos: int):
        super().__init__(message)
        self.pos = pos


class CodeFormatError(StabDecompError):
    """Syntax or consistency error in a code or circuit document."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.col = col


class NonCommutingCode(StabDecompError):
    """A generator pair fails to commute; carries a witness."""

    def __init__(self, i: int, j: int, witness):
        super().__init__(
            f"generators {i} and {j} do not commute; dagger(sigma)*lambda*sigma "
            f"entry is {witness}"
        )
        self.pair = (i, j)
        self.witness = witness


class UndecidedMembership(StabDecompError):
    """Image membership could not be decided within the box cap."""


class NormalizationFailed(StabDecompError):
    """No coarse-graining up to m_cap gave movers for every basis charge."""


class NoCharges(StabDecompError):
    """An operation that needs a nontrivial charge found none (k = 0)."""


class TheoremViolation(StabDecompError):
    """A quantity the theory pins down came out otherwise: odd charge
    count, a spin that fails to stabilize, or a missing boson.  Signals
    an input outside the valid class, or a bug."""


class InvalidInput(StabDecompError):
    """Arguments violate a documented precondition of the called routine."""


class NotTopologicallyOrdered(StabDecompError):
    """The empirical torus check failed; decomposition is refused."""

    def __init__(self, report):
        super().__init__(f"torus check failed: {report}")
        self.report = report


class ExtractionStuck(StabDecompError):
    """Extraction hit a state the theory rules out for valid inputs."""


class ScaleRetry(ExtractionStuck):
    """The current unit cell is too small; coarse-grain and retry.

    Subclasses ExtractionStuck so a caller that does not retry still sees
    the extraction failure; the decomposition driver catches this subclass
    and restarts at a doubled cell.
    """


class ParityObstruction(ScaleRetry):
    """Internal: p=2 self-phase with nonzero constant term; needs a larger cell."""
