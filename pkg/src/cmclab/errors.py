"""Exception types shared across cmclab."""


class CMCLabError(Exception):
    """Base class for all cmclab errors."""


class GridError(CMCLabError, ValueError):
    """Invalid grid parameters or array shapes that do not match a grid."""


class NonFiniteError(CMCLabError, ValueError):
    """An input or intermediate array contains NaN or inf."""


class HOutOfRange(CMCLabError, ValueError):
    """Requested mean curvature admits no graph solution (or lies outside the solver window)."""

    def __init__(self, H, limit, message=None):
        self.H = H
        self.limit = limit
        super().__init__(message or f"|H| = {abs(H):.6g} exceeds the admissible bound {limit:.6g}")


class NonConvergence(CMCLabError, RuntimeError):
    """Newton iteration failed to reach the residual target."""

    def __init__(self, message, residual_history=(), H=None):
        self.residual_history = list(residual_history)
        self.H = H
        super().__init__(message)


class FieldFormatError(CMCLabError, ValueError):
    """Malformed persisted height-field file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(CMCLabError, ValueError):
    """Invalid experiment configuration; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)
