"""Exception hierarchy shared by every module of the package."""


class AAutError(Exception):
    """Base class for all errors raised by :mod:`aaut`."""


class ShapeError(AAutError, ValueError):
    """Operands live on trees with different ``(d, k)``."""


class DomainError(AAutError, ValueError):
    """An argument lies outside the domain of an operation."""


class PartialityError(DomainError):
    """A partially defined function was evaluated outside its domain."""


class PrefixError(AAutError, ValueError):
    """One address is a proper prefix of the other."""


class OverlapError(AAutError, ValueError):
    """Two parts of a would-be partition intersect."""


class IncompleteError(AAutError, ValueError):
    """A prefix code does not cover the whole boundary."""


class NotAdmissibleError(AAutError, ValueError):
    """A partition is not admissible for an element.

    ``part`` holds the offending ball address.
    """

    def __init__(self, message, part=None):
        super().__init__(message)
        self.part = part


class ParseError(AAutError, ValueError):
    """Malformed textual input (addresses, partitions, element files)."""


class NotBijectiveError(AAutError, ValueError):
    """A leaf map is not a bijection between its two codes."""


class NotDeepEnoughError(AAutError, ValueError):
    """An address is a proper prefix of domain leaves, so no single image exists."""


class IterationCapExceeded(AAutError, RuntimeError):
    """The refinement engine hit its iteration cap."""


class SizeCapExceeded(AAutError, RuntimeError):
    """A permutation closure grew past its cap."""


class CertificateError(AAutError, ValueError):
    """A certificate failed verification."""


class ConstructionFailure(AAutError, RuntimeError):
    """A constructor could not produce an element satisfying its contract."""


class PreconditionError(AAutError, ValueError):
    """Inputs violate the documented preconditions of an experiment."""


class VerificationError(AAutError, ValueError):
    """A defining clause of a predicate failed; ``clause`` names it."""

    def __init__(self, message, clause=None):
        super().__init__(message)
        self.clause = clause


class UnsupportedShape(AAutError, ValueError):
    """The requested construction only exists for particular shapes."""
