"""Exception hierarchy for the transport simulator."""

from typing import Optional


class TransportError(Exception):
    """Base class for every error raised by the simulator."""


class CircuitError(TransportError):
    """Invalid gate, qubit index or register layout."""


class MissingRngError(CircuitError):
    """A circuit with RESET/MEASURE was applied without a random stream."""


class PostselectionError(TransportError):
    """Post-selection removed all of the probability mass."""


class GeometryError(TransportError):
    """Invalid grid, material, source or detector."""


class ConfigError(GeometryError):
    """Configuration file could not be parsed or validated."""

    def __init__(self, msg: str, path: Optional[str] = None):
        self.msg = msg
        self.path = path
        ctx = "" if path is None else f" (in {path})"
        super().__init__(f"{msg}{ctx}")


class ConvergenceError(TransportError):
    """Iterative solver hit its iteration cap."""


class AmplificationError(TransportError):
    """Amplitude amplification cannot be applied."""


class SimulationBudgetError(TransportError):
    """Requested instance needs more qubits than the dense simulator allows."""
