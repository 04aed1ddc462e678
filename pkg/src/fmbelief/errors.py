"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Array dimensions are inconsistent or a matrix is not symmetric."""


class NotPSDError(ValueError):
    """A matrix has an eigenvalue below the PSD tolerance."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class ConditioningError(RuntimeError):
    """A matrix that must be inverted is singular or nearly so."""


class DivergenceError(RuntimeError):
    def __init__(self, seed, step, value):
        super().__init__(
            f"rollout diverged: seed={seed} step={step} |x|max={value:.3e}")
        self.seed = seed
        self.step = step


class InsufficientDataError(ValueError):
    """Too few usable points for a regression fit or estimate."""


class ConfigError(ValueError):
    def __init__(self, message, line=None, source=None):
        where = ""
        if source is not None and line is not None:
            where = f"{source}:{line}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.line = line
