"""Exception types shared across the package."""


class InvalidDimensionError(ValueError):
    """Simplex dimension N must be >= 2."""


class InvalidLetterError(ValueError):
    """Word letter outside {1..N}."""


class InvalidPairError(ValueError):
    """Vertex pair (j, k) must satisfy j != k."""


class AmbiguousAddressError(ValueError):
    """Empty word does not address a point."""


class DepthLimitError(ValueError):
    """Requested word length or refinement depth exceeds the configured cap."""


class ResourceGuardError(RuntimeError):
    """Requested level would exceed the configured cell-count cap."""
