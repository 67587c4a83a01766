"""Dense statevector engine and gate/circuit IR."""

from src.quantum.circuit import Circuit, Control, GateKind, GateOp, Register
from src.quantum.qasm import to_qasm
from src.quantum.qft import build_qft
from src.quantum.statevector import (
    StateVector,
    apply_circuit,
    circuit_unitary,
    marginal_probabilities,
    probability_of,
    sample_positions,
)

__all__ = [
    "Circuit",
    "Control",
    "GateKind",
    "GateOp",
    "Register",
    "StateVector",
    "apply_circuit",
    "build_qft",
    "circuit_unitary",
    "marginal_probabilities",
    "probability_of",
    "sample_positions",
    "to_qasm",
]
