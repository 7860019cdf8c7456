"""Exception types raised by the solver and the command line."""


class NumericalDiagnosticError(RuntimeError):
    """A numerical self-check failed (convergence, symplecticity, fit quality)."""


class ConvergenceError(NumericalDiagnosticError):
    """Doubling the integration step count changed the result too much."""


class CalibrationError(NumericalDiagnosticError):
    """A least-squares fit did not converge or returned an unphysical optimum."""


class ConfigError(ValueError):
    """Invalid or unknown configuration entry."""
