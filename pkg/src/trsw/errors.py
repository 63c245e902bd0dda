"""Exception types shared across the solver."""


class TrswError(Exception):
    """Base class for solver errors."""


class StaleGhostsError(TrswError):
    """A stencil operation was applied to a field whose ghost frame is stale."""


class NonPositiveDepthError(TrswError):
    """Fluid depth h or buoyancy Theta lost positivity."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class NegativeRadicandError(TrswError):
    """Propagation-speed radicand went negative beyond round-off."""


class NoConvergenceError(TrswError):
    """Iterative elliptic solve did not reach the requested tolerance."""

    def __init__(self, iterations, residual):
        super().__init__(
            f"elliptic solve stalled after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual


class DimensionMismatchError(TrswError):
    """Fields on incompatible grids were combined."""


class BlowUpError(TrswError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, time, cell, stage=""):
        where = f" at cell {cell}" if cell is not None else ""
        when = f" ({stage})" if stage else ""
        super().__init__(f"solution blew up at t={time:.6g}{where}{when}")
        self.time = time
        self.cell = cell
        self.stage = stage
