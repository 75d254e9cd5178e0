"""Exception types shared across the solver modules."""


class VorStokesError(Exception):
    """Base class for all library errors."""


class DomainError(VorStokesError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class QuadratureError(VorStokesError):
    """An integral failed to converge to the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConfigError(VorStokesError, ValueError):
    """A run configuration is malformed or violates an invariant."""


class StagnationDomainError(VorStokesError):
    """lambda + 2*Gamma(p) is not positive, so the flow coefficient is undefined."""


class AdmissibilityError(VorStokesError):
    """A state left the admissible set O_delta.

    Carries the violated clause and, when applicable, the grid node at
    which it failed.
    """

    def __init__(self, clause, node=None, value=None):
        self.clause = clause
        self.node = node
        self.value = value
        where = f" at node {node}" if node is not None else ""
        val = f" (value {value:.6g})" if value is not None else ""
        super().__init__(f"admissibility violated: {clause}{where}{val}")


class NoDiscreteEigenvalue(VorStokesError):
    """The lowest Rayleigh value is not below the continuous spectrum."""


class BifurcationAbsentError(VorStokesError):
    """No bifurcation parameter was found in the admissible bracket."""


class NewtonDivergenceError(VorStokesError):
    """Newton iteration exceeded its budget without meeting the tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularJacobianError(VorStokesError):
    """A linearization was numerically singular (near-fold signal)."""
