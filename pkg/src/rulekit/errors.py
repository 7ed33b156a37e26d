"""Exception types shared across the package."""

from __future__ import annotations


class RulekitError(Exception):
    """Base class for rulekit-specific failures."""


class UniverseMismatch(RulekitError, ValueError):
    """Two objects built over different universes were combined."""


class GuaranteeViolation(RulekitError):
    """A constructed object failed the very property it certifies.

    This is never a user-input problem: it means a construction re-verified
    its own postcondition and found it false.  Treat as a bug in the artifact
    (or in hand-supplied certificates) and abort loudly.
    """


class NoWitnessWithinDepth(RulekitError, ValueError):
    """A tree oracle ran out of depth before a single block could be built."""


class FragmentShortfall(RulekitError):
    """A finite family was too small to supply the requested structure.

    Carries what was actually found so callers can retry with a richer
    fragment or accept the partial result.
    """

    def __init__(self, message: str, found: int, wanted: int, partial=None):
        super().__init__(message)
        self.found = found
        self.wanted = wanted
        self.partial = partial
