"""Exception types shared across the package."""


class OespError(Exception):
    """Base class for all errors raised by this package."""


class RangeError(OespError, IndexError):
    """A position or ordinal argument is outside its valid range."""


class NotFoundError(OespError, LookupError):
    """A requested occurrence, node or symbol does not exist."""


class StateError(OespError, RuntimeError):
    """Operation invoked in the wrong lifecycle state (e.g. before finalize)."""


class StructureError(OespError, ValueError):
    """An operation would violate a structural invariant."""


class FormatError(OespError, ValueError):
    """A serialized index is malformed, truncated or of the wrong version."""


class EmptyInputError(OespError, ValueError):
    """The index was finalized without any input text."""


class EmptyPatternError(OespError, ValueError):
    """A query pattern of length zero was supplied."""
