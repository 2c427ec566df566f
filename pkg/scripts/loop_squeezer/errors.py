"""Exceptions and warning categories for loop-squeezer."""


class LoopSqueezerError(Exception):
    """Base class for loop-squeezer errors."""


class ConfigError(LoopSqueezerError):
    """Experiment config failed to load or validate."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class StateError(LoopSqueezerError, ValueError):
    """Density matrix is not a valid state (hermiticity, trace, positivity)."""


class DimensionMismatchError(StateError):
    """Operands have incompatible mode counts or cutoffs."""


class DegenerateGateError(LoopSqueezerError, ValueError):
    """Gate parameters describe no squeezing (R in {0, 1}, r = 0) or mix quadratures."""


class QuadratureConvergenceError(LoopSqueezerError):
    """Measurement-outcome integration did not settle as nodes were doubled."""


class HeraldError(LoopSqueezerError):
    """Herald event has numerically zero probability."""


class ScheduleError(LoopSqueezerError, ValueError):
    """Program cannot be compiled to a control schedule."""


class ModeFitError(LoopSqueezerError, ValueError):
    """Temporal mode parameters or sampling grid are unusable."""


class CutoffWarning(UserWarning):
    """Population in the top Fock levels exceeds the adequacy threshold."""


class ConvergenceWarning(UserWarning):
    """An iterative routine stopped at its cap before meeting its tolerance."""


class IllPosedWarning(UserWarning):
    """Data cannot determine the requested reconstruction."""
