"""QFT-based conditional shift."""

from typing import List, Sequence

import numpy as np

from src.geometry import Direction
from src.quantum.circuit import Circuit, GateOp, controls_for_value, mc_phase, qft_block
from src.quantum.qft import qft_ops
from src.walk.coin import COIN_CODES
from src.walk.registers import WalkRegisters


def adder_phases(
    register: Sequence[int], coin: Sequence[int], code: int, sign: int
) -> List[GateOp]:
    """Phase ladder adding ``sign`` to ``register`` in Fourier space when the coin holds ``code``.

    Qubit ``i`` of an ``n``-qubit register gets the angle ``sign * pi / 2**(n - 1 - i)``.
    """
    n = len(register)
    controls = controls_for_value(coin, code)
    return [
        mc_phase(sign * np.pi / 2 ** (n - 1 - i), controls, q) for i, q in enumerate(register)
    ]


def build_shift(registers: WalkRegisters, use_qft_blocks: bool = True) -> Circuit:
    """Move the walker one cell in the direction held by the coin.

    Each axis is conjugated by its QFT; the coin-controlled phase ladders then
    add or subtract one. A stay coin (``c2 = 0``) fires no ladder, so the
    position is untouched. Arithmetic is modulo the axis length.

    Args:
        registers: Walk register layout
        use_qft_blocks: Emit QFT blocks instead of their gate sequence

    Returns:
        Unitary shift circuit
    """
    regs = registers
    coin = regs.coin.qubits
    circuit = Circuit(regs.n_qubits, register_map=regs.register_map())
    axes = [
        (regs.x.qubits, Direction.RIGHT, Direction.LEFT),
        (regs.y.qubits, Direction.UP, Direction.DOWN),
    ]
    for axis, forward, backward in axes:
        if use_qft_blocks:
            circuit.append(qft_block(axis))
        else:
            circuit.extend(qft_ops(axis))
        circuit.extend(adder_phases(axis, coin, COIN_CODES[forward], +1))
        circuit.extend(adder_phases(axis, coin, COIN_CODES[backward], -1))
        if use_qft_blocks:
            circuit.append(qft_block(axis, inverse=True))
        else:
            circuit.extend(qft_ops(axis, inverse=True))
    return circuit
