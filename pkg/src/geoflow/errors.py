"""Exception hierarchy shared by every geoflow module.

Numerical terminations (shock, blow-up, loss of the diffeomorphism
property) carry the time and step at which they were detected so that
callers such as the scenario runner can report them without re-running.
"""


class GeoflowError(Exception):
    """Base class for all errors raised by geoflow."""


class DimensionError(GeoflowError, ValueError):
    """Operands have incompatible shapes or an unsupported dimension."""


class DegenerateFormError(GeoflowError, ValueError):
    """A bilinear form is degenerate for the requested dimension."""


class SingularInertiaError(GeoflowError):
    """The inertia operator cannot be inverted (some eigenvalue pair sums to ~0)."""


class ConditioningError(GeoflowError):
    """A linear solve is too ill-conditioned to be trusted."""


class ConsistencyError(GeoflowError):
    """Two representations of the same state disagree beyond tolerance."""


class ConfigError(GeoflowError, ValueError):
    """Invalid scenario document."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class TerminationError(GeoflowError):
    """A simulation stopped for a physical or numerical reason.

    ``status`` is the machine-readable label used in run reports.
    """

    status = "blowup"

    def __init__(self, message, time=None, step=None):
        self.time = time
        self.step = step
        super().__init__(message)


class DivergenceError(TerminationError):
    """Non-finite values appeared during time stepping."""

    status = "blowup"


class ShockError(TerminationError):
    """Requested time is at or past the Burgers breaking time."""

    status = "shock"


class DiffeomorphismLossError(TerminationError):
    """The flow map's derivative dropped below the configured floor."""

    status = "diffeo_loss"


class OutOfDomainError(GeoflowError):
    """The exponential map is not defined for the given initial velocity."""


class NonFiniteError(GeoflowError, ArithmeticError):
    """A user-supplied scalar field returned a non-finite value."""
