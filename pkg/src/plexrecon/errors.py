"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed edge-list input; message includes the offending line number."""


class EmptyNetworkError(ParseError):
    """Edge-list input contained no usable edges."""


class EmptyLayerError(ValueError):
    """Layer statistics requested for a layer with no active nodes."""


class CoverageError(ValueError):
    """Requested observation coverage rounds to an empty observed set."""


class GenerationError(RuntimeError):
    """Synthetic generation cannot reach the requested edge count."""


class SolverError(RuntimeError):
    """Solver precondition failure or degenerate state during iteration."""


class FeasibilityError(SolverError):
    """Exact degree update has no real solution (hub condition violated)."""
