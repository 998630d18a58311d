"""Exception types shared across the package.

Input problems (bad frames, malformed documents, broken invariants) raise
subclasses of :class:`InputError`.  Situations where the mathematics itself
degenerates (total conflict, zero evidence, intractable labeling spaces)
raise subclasses of :class:`DegenerateError` so callers can tell the two
apart with one except clause each.
"""


class CtxfuseError(Exception):
    """Base class for every error raised by this package."""


class InputError(CtxfuseError):
    """The caller supplied something malformed."""


class DegenerateError(CtxfuseError):
    """The computation is well-posed only for other inputs."""


# --- evidence / possibility / fusion ---

class EmptyFocal(InputError):
    """Positive mass was assigned to the empty set."""


class NotNormalized(InputError):
    """A probability-like map does not sum to 1 within tolerance."""


class BadFrame(InputError):
    """A subset or element does not belong to the expected frame."""


class FrameMismatch(InputError):
    """Two mass functions live on different frames."""


class TotalConflict(DegenerateError):
    """Dempster combination is undefined: the conflict mass is 1."""


class NotNormal(InputError):
    """A possibility distribution whose maximum is not 1."""


class AllZero(InputError):
    """A possibility distribution with no positive value anywhere."""


class ZeroEvidence(DegenerateError):
    """Every positive-probability element has zero plausibility."""


class UnknownLabel(InputError):
    """A label does not occur on the referenced axis or entity."""


# --- graphs / labeling ---

class MalformedGraph(InputError):
    """A connection graph violates its structural invariants."""


class TooLarge(InputError):
    """Exhaustive enumeration was requested beyond its size bound."""


class TooManyLabelings(DegenerateError):
    """The joint labeling space exceeds the configured cap."""


# --- document I/O ---

class SchemaError(InputError):
    """Input JSON does not match the problem or graph schema."""


class InvariantError(InputError):
    """Structurally valid JSON with semantically inconsistent content."""


class BadRegex(InputError):
    """A rule carries an uncompilable regular expression."""
