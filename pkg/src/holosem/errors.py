"""Exception hierarchy shared by every holosem module."""


class HolosemError(Exception):
    """Base class for library errors."""


class DimensionError(HolosemError, ValueError):
    """Operands have incompatible dimensions."""


class InvalidDimensionError(DimensionError):
    """A requested dimension is not a positive integer."""


class UndefinedSimilarityError(HolosemError, ValueError):
    """Cosine similarity requested for a zero vector."""


class EmptyStructureError(HolosemError, ValueError):
    """An encoding, lexicon build or memory received no items."""


class SingularRolesError(HolosemError, ValueError):
    """Role vectors are (numerically) linearly dependent.

    The Gram matrix condition estimate is kept on ``condition``.
    """

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class CategoryError(HolosemError, TypeError):
    """A lexical entry has the wrong grammatical category for an operation."""


class ConfigError(HolosemError, ValueError):
    """Invalid run configuration."""
