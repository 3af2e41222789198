"""Exception types shared across the package."""


class UnsupportedDimension(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class DimensionMismatch(ValueError):
    pass


class ConstructionFailure(RuntimeError):
    pass


class DegenerateProjector(ConstructionFailure):
    pass


class SubspaceConstructionFailure(ConstructionFailure):
    pass


class SearchFailure(RuntimeError):
    pass


class NoFeasiblePoint(SearchFailure):
    pass


class UnknownAnchorState(KeyError):
    pass


class UnclassifiableBasis(ValueError):
    pass


class IncompleteSet(UserWarning):
    """Raised as a warning when a census finds fewer states than expected."""
