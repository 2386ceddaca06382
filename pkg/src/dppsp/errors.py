"""Exception types raised across the package."""


class DPPSPError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(DPPSPError, ValueError):
    pass


class SpectrumViolation(DPPSPError, ValueError):
    """Mixing matrix has an eigenvalue outside (0, 1]."""


class Disconnected(DPPSPError, ValueError):
    """Eigenvalue 1 of the mixing matrix is not simple."""


class NumericalError(DPPSPError, ArithmeticError):
    pass


class OracleFailure(DPPSPError, RuntimeError):
    """A user-supplied gradient oracle raised or returned garbage."""


class NoConvergence(DPPSPError, RuntimeError):
    def __init__(self, residual, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")


class StepSizeViolation(DPPSPError, ValueError):
    """alpha * rho >= 1, so the local resolvent is not well-defined."""


class SingularSystem(DPPSPError, ArithmeticError):
    pass


class SingularKKT(SingularSystem):
    pass


class RegimeViolation(DPPSPError, ValueError):
    pass


class EmptyTrace(DPPSPError, ValueError):
    pass


class DegenerateFit(DPPSPError, ValueError):
    def __init__(self, message, floor_round=None):
        self.floor_round = floor_round
        super().__init__(message)


class OracleInconclusive(DPPSPError, RuntimeError):
    pass


class ConstructionFailed(DPPSPError, RuntimeError):
    pass


class ParseError(DPPSPError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class ValidationError(DPPSPError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
