"""Quantum Fourier transform circuits."""

from typing import List, Optional, Sequence

import numpy as np

from src.errors import CircuitError
from src.quantum.circuit import Circuit, Control, GateOp, h, mc_phase, swap


def qft_ops(qubits: Sequence[int], inverse: bool = False) -> List[GateOp]:
    """Gate sequence of the QFT on ``qubits`` (``qubits[0]`` least significant).

    Hadamard and controlled-phase ladder from the most significant qubit down,
    followed by the bit-reversal swaps. The result maps ``|x>`` to
    ``sum_k exp(2 pi i x k / 2**n) |k> / sqrt(2**n)``.
    """
    if len(qubits) == 0:
        raise CircuitError("QFT needs a non-empty qubit range")
    n = len(qubits)
    ops: List[GateOp] = []
    for t in range(n - 1, -1, -1):
        ops.append(h(qubits[t]))
        for m in range(t - 1, -1, -1):
            ops.append(mc_phase(np.pi / 2 ** (t - m), [Control(qubits[m], 1)], qubits[t]))
    for i in range(n // 2):
        ops.append(swap(qubits[i], qubits[n - 1 - i]))
    if inverse:
        ops = [op.inverse() for op in reversed(ops)]
    return ops


def build_qft(
    qubits: Sequence[int],
    inverse: bool = False,
    n_qubits: Optional[int] = None,
) -> Circuit:
    """Build the (inverse) QFT circuit on a qubit range.

    Args:
        qubits: Register, least significant qubit first
        inverse: Emit the adjoint instead
        n_qubits: Width of the returned circuit (default: smallest that fits)

    Returns:
        Gate-level QFT circuit
    """
    if len(qubits) == 0:
        raise CircuitError("QFT needs a non-empty qubit range")
    width = n_qubits if n_qubits is not None else max(qubits) + 1
    return Circuit(width, qft_ops(qubits, inverse))
