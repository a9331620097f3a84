"""Error hierarchy shared by the numerical modules and the commands."""


class BergmanLabError(Exception):
    """Base class for every error raised by bergman_lab."""


class InputError(BergmanLabError, ValueError):
    """Invalid argument or construction."""


class ConfigError(InputError):
    """Unknown or malformed RunConfig entry."""


class GrammarError(InputError):
    """Text that does not parse as a SymbolicFunction."""


class NumericalError(BergmanLabError):
    """Failure of a numerical computation (exit code 2 on the CLI)."""


class NonIntegrableMeasureError(NumericalError):
    """dV_alpha with alpha <= -1 gives boxes infinite measure."""

    def __init__(self, alpha):
        self.alpha = alpha
        super().__init__(f"alpha={alpha!r} must be > -1 for dV_alpha to be locally finite")


class DivergenceError(NumericalError):
    """An integral is infinite by its analytic decay rates."""


class ToleranceNotMetError(NumericalError):
    """Refinement stopped at max depth before meeting the tolerance."""

    def __init__(self, message, result):
        self.result = result
        super().__init__(f"{message} (best estimate {result.value!r}, "
                         f"error {result.error_estimate!r}, tail {result.tail_bound!r})")


class QuadratureDomainError(NumericalError):
    """The integrand returned a non-finite value."""

    def __init__(self, x, y, value):
        self.point = (x, y)
        super().__init__(f"integrand is {value!r} at z=({x!r}, {y!r})")


class WeightNotInClassError(NumericalError):
    """A box integral of the weight diverges."""

    def __init__(self, interval, reason):
        self.interval = interval
        super().__init__(f"weight not in class on interval {interval}: {reason}")


class DegenerateAverageError(NumericalError):
    """Zero or infinite denominator in a box average."""


class InfeasibleError(NumericalError):
    """No Schur parameters exist for the configuration."""
