"""Exception types shared across the package."""


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


class DuplicateRowError(ValueError):
    """Two rows carry the same (ticker, date) key."""


class SegmentMismatchError(ValueError):
    """Windows passed to a multigraph do not cover the same time segment."""


class GraphIntegrityError(RuntimeError):
    """A constructed graph violates a structural invariant (e.g. isolated node)."""


class UndefinedMetricError(ValueError):
    """A metric is undefined on the given input (e.g. single-class labels)."""
