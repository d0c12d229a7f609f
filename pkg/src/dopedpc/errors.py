"""Exceptions raised by the solver stack."""


class SingularityError(ZeroDivisionError):
    """A denominator fell below the singularity floor."""


class ConvergenceError(RuntimeError):
    """The damped fixed-point iteration did not converge."""

    def __init__(self, message, u_f=None, iterations=None, residual=None):
        super().__init__(message)
        self.u_f = u_f
        self.iterations = iterations
        self.residual = residual


SINGULAR_FLOOR = 1e-30
