"""Exception types shared across the package."""


class HETreeError(Exception):
    """Base class for all errors raised by this package."""


class DataError(HETreeError):
    """Input data cannot be turned into a usable dataset."""


class EmptyDatasetError(DataError):
    """No eligible objects were found in the input."""


class MixedKindError(DataError):
    """Numeric and temporal values are mixed under one predicate."""

    def __init__(self, predicate: str):
        super().__init__(f"predicate {predicate!r} mixes numeric and temporal values")
        self.predicate = predicate


class ParameterError(HETreeError):
    """Construction parameters are invalid for the given dataset."""


class DegenerateRangeError(ParameterError):
    """All values are equal; a range-based tree cannot be built.

    Callers should fall back to the content-based variant.
    """


class NoCandidateError(ParameterError):
    """Parameter estimation found no perfect-tree setting in range."""


class ExplorationError(HETreeError):
    """An exploration operation cannot be applied to the current state."""


class UnknownResourceError(ExplorationError):
    """The requested resource is not present in the dataset."""


class EmptyRangeError(ExplorationError):
    """The requested range does not intersect the data range."""


class StaleOperationError(ExplorationError):
    """The operation refers to an element that is not currently rendered."""


class TopOfTreeError(ExplorationError):
    """Rolling up past the root is not possible."""


class AdaptationError(HETreeError):
    """The requested reshaping cannot be classified or applied."""


class NoChangeError(AdaptationError):
    """Neither the degree nor the leaf count changed."""


class BothChangedError(AdaptationError):
    """Only one parameter may change per adaptation step."""
