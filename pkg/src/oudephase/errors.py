"""Exception types shared by all modules."""


class DephasingError(Exception):
    """Base class for every error raised by this package."""


class InvalidState(DephasingError):
    """A matrix does not qualify as a two-qubit density matrix."""


class NotHermitian(InvalidState):
    """Hermiticity violated beyond tolerance."""


class TraceNotOne(InvalidState):
    """Trace differs from one beyond tolerance."""


class NotPositive(InvalidState):
    """An eigenvalue is negative beyond tolerance."""


class NoConvergence(DephasingError):
    """Iterative eigensolver hit its sweep cap."""


class NegativeTime(DephasingError):
    """A time argument that must be >= 0 was negative."""


class InvalidStep(DephasingError):
    """A step size that must be > 0 was not."""


class InsufficientData(DephasingError):
    """Too few samples or paths for the requested estimate."""


class IncompleteKrausSet(DephasingError):
    """Kraus operators do not resolve the identity within tolerance."""


class TooFewTrajectories(DephasingError):
    """Monte Carlo averaging needs at least two trajectories."""
