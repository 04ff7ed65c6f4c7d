"""Exception types shared across the package."""

from __future__ import annotations


class SpectrumError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(SpectrumError, ValueError):
    """A parameter, code or word failed validation."""


class PrecisionExhausted(SpectrumError):
    """The working precision cannot resolve a required sign or separation."""


class BracketFailure(PrecisionExhausted):
    """A root bracket does not show the expected sign change."""


class OrbitOverflow(SpectrumError):
    """A trace value left the representable exponent range."""

    def __init__(self, last_index: int):
        super().__init__(f"orbit magnitude overflow after index {last_index}")
        self.last_index = last_index


class UnresolvedOrder(PrecisionExhausted):
    """Two intervals could not be ordered at the current precision."""


class EvolutionViolation(SpectrumError):
    """Children of a typed band disagree with the type graph."""


class InadmissibleWord(InvalidInput):
    """A word contains a transition that is not an edge of the type graph."""


class NotGapEdgeClass(InvalidInput):
    """A symbolic point is outside the domain of the requested partner map."""
