"""Reflective boundary conditions."""

from src.geometry import Direction
from src.quantum.circuit import Circuit, cnot, controls_for_value, mcx
from src.walk.coin import COIN_CODES
from src.walk.registers import WalkRegisters


def build_boundary_conditions(registers: WalkRegisters) -> Circuit:
    """Turn every move that would leave the grid into the opposite move.

    One multi-controlled X per prohibited (edge, direction) pair marks the
    boundary ancilla; a CNOT from the ancilla then flips ``c0``, which swaps
    right with left and up with down. The ancilla is left set; resetting it
    belongs to the step.
    """
    regs = registers
    anc = regs.boundary[0]
    coin = regs.coin.qubits
    x_max = (1 << regs.n_x) - 1
    y_max = (1 << regs.n_y) - 1
    prohibited = [
        (regs.x.qubits, x_max, Direction.RIGHT),
        (regs.x.qubits, 0, Direction.LEFT),
        (regs.y.qubits, y_max, Direction.UP),
        (regs.y.qubits, 0, Direction.DOWN),
    ]
    circuit = Circuit(regs.n_qubits, register_map=regs.register_map())
    for axis, edge, direction in prohibited:
        controls = controls_for_value(axis, edge) + controls_for_value(coin, COIN_CODES[direction])
        circuit.append(mcx(controls, anc))
    circuit.append(cnot(anc, coin[0]))
    return circuit
