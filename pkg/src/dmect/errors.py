"""Exception types shared across the solver stack."""


class DmectError(Exception):
    """Base class for all library errors."""


class InfeasibleError(DmectError):
    """No feasible solution exists for the requested problem.

    Carries the offending entity when known, e.g. the receiver that no
    sender can reach within one slot.
    """

    def __init__(self, message, *, receiver=None, nodes=None):
        super().__init__(message)
        self.receiver = receiver
        self.nodes = nodes


class DisconnectedError(InfeasibleError):
    """The gain graph does not connect the source to every required node."""


class CapExceededError(DmectError):
    """A brute-force routine was asked to exceed its combinatorial cap."""


class SolverConvergenceError(DmectError):
    """An iterative solver failed to converge; carries diagnostics."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class DegenerateDrawError(DmectError):
    """Random topology generation could not separate coincident nodes."""
