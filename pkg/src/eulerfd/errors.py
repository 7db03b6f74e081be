"""Shared exception types."""


class EulerFDError(Exception):
    """Base class for solver errors."""


class InvalidStateError(EulerFDError):
    """A state with non-positive density or pressure was encountered.

    Carries the offending values and, when known, the flat cell index and
    simulation time so failures in long runs can be located.
    """

    def __init__(self, message, *, index=None, value=None, time=None):
        self.index = index
        self.value = value
        self.time = time
        parts = [message]
        if index is not None:
            parts.append(f"cell={index}")
        if value is not None:
            parts.append(f"value={value}")
        if time is not None:
            parts.append(f"t={time}")
        super().__init__("; ".join(str(p) for p in parts))


class ConfigurationError(EulerFDError):
    """Invalid grid, boundary, problem, or run configuration."""


class StencilBoundsError(EulerFDError):
    """A stencil was applied to a region without enough valid cells."""


class VacuumError(EulerFDError):
    """The exact Riemann solver detected vacuum formation."""
