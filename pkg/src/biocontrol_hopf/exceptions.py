"""Exception hierarchy.

Every error carries a short ``category`` string; the command-line front end
prints it as ``error: <category>: <message>``.
"""


class BifurcationError(Exception):
    category = "error"


class InvalidInputError(BifurcationError, ValueError):
    category = "invalid-input"


class DomainError(BifurcationError, ValueError):
    category = "domain"


class ConvergenceError(BifurcationError, ArithmeticError):
    category = "iteration-failure"


class DegeneracyError(BifurcationError, ArithmeticError):
    category = "degenerate"


class SingularityError(BifurcationError, ArithmeticError):
    """Raised when a shifted matrix is (numerically) singular."""

    category = "singular"

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NotOnSigmaError(BifurcationError, ValueError):
    category = "not-on-sigma"


class ConsistencyError(BifurcationError, AssertionError):
    category = "internal-consistency"


class IntegrationError(BifurcationError, ArithmeticError):
    category = "integration-failure"

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class OrbitNotFoundError(BifurcationError, ArithmeticError):
    category = "not-found"

    def __init__(self, message, residuals=()):
        super().__init__(message)
        self.residuals = list(residuals)


class AccuracyError(BifurcationError, ArithmeticError):
    category = "accuracy"


class ConfigError(BifurcationError, ValueError):
    category = "parse"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
