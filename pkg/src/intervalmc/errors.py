"""Exception types shared across the toolkit."""


class IntervalMcError(Exception):
    """Base class for all toolkit errors."""


class ModelError(IntervalMcError):
    """A model violates a structural invariant."""


class AbsorbingStateError(ModelError):
    """Jump-chain probabilities requested for a state with exit rate 0."""


class OutOfIntervalError(ModelError):
    """A supplied rate lies outside its transition's interval."""


class ParseError(IntervalMcError):
    """Malformed model file or property string.

    ``location`` is a JSON path ("transitions[2].rate.lo") or a character
    offset into a property string, depending on what was being parsed.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class InvalidArityError(IntervalMcError):
    """A closed-form estimator was called with an unsupported band count."""


class SingularSystemError(IntervalMcError):
    """A linear system that should be regular failed to solve accurately."""


class NoAbsorptionError(IntervalMcError):
    """Until-absorption reward requested on a model with a recurrent
    non-absorbing component."""


class TooManyIntervalsError(IntervalMcError):
    """Corner enumeration refused: too many interval-valued transitions."""
