"""Exception hierarchy shared by the solvers, samplers and front ends."""


class LabError(Exception):
    """Base class for every error raised by tfree-lab."""


class InvalidInputError(LabError, ValueError):
    """An argument violates an operation's precondition."""


class InstanceTooLargeError(LabError):
    """An exact solver refused an instance beyond its feasibility guard."""

    def __init__(self, what: str, limit: str) -> None:
        super().__init__(f"{what} exceeds exact-solver limit ({limit})")
        self.what = what
        self.limit = limit


class BudgetExceededError(LabError):
    """A search ran out of nodes before it could certify its answer."""


class SolverInvariantError(LabError, RuntimeError):
    """A solved instance failed one of its own certificates."""
