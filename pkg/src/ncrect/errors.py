"""Exception types shared across the library."""


class NcrectError(Exception):
    """Base class for all library-specific errors."""


class InconsistentValuesError(NcrectError, ValueError):
    """Gauss-point values violate the linear relation beyond tolerance."""

    def __init__(self, residual, tol):
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"Gauss values violate the consistency relation: "
            f"|residual| = {residual:.3e} > tol = {tol:.3e}"
        )


class EmptySpaceError(NcrectError, ValueError):
    """The requested finite element space has no degrees of freedom."""


class OutOfDomainError(NcrectError, ValueError):
    """A point lies outside the meshed domain."""


class ConfigurationError(NcrectError, ValueError):
    """Invalid run configuration, problem name, or kind/bc mismatch."""


class SolverError(NcrectError, RuntimeError):
    """Base class for linear solver failures."""


class NonConvergenceError(SolverError):
    """Iteration limit reached before the residual target."""

    def __init__(self, iterations, residual_history):
        self.iterations = iterations
        self.residual_history = residual_history
        last = residual_history[-1] if len(residual_history) else float("nan")
        super().__init__(
            f"conjugate gradients did not converge in {iterations} iterations "
            f"(last relative residual {last:.3e})"
        )


class IndefiniteSystemError(SolverError):
    """Negative or zero curvature detected; the matrix is not SPD."""

    def __init__(self, message, residual_history=None):
        self.residual_history = residual_history or []
        super().__init__(message)
