"""Source preparation on the position register."""

import logging

import numpy as np

from src.errors import GeometryError
from src.geometry import GridGeometry, SourceKind, SourceSpec, flatten_cells
from src.quantum.circuit import Circuit, controls_for_value, mc_ry, ry, x
from src.walk.registers import WalkRegisters

logger = logging.getLogger(__name__)


def build_source_prep(
    source: SourceSpec, registers: WalkRegisters, geometry: GridGeometry
) -> Circuit:
    """Circuit preparing ``sum_c sqrt(w_c / W) |c>`` from ``|0...0>``.

    A point source only needs X gates on the set bits of its position value.
    A weighted source is loaded with a binary tree of uniformly-controlled
    RY rotations, from the most significant position qubit down.

    Args:
        source: Point or weighted source
        registers: Walk register layout
        geometry: Grid the source lives on

    Returns:
        Unitary circuit acting on the position register only
    """
    if (geometry.n_x, geometry.n_y) != (registers.n_x, registers.n_y):
        raise GeometryError("register layout does not match the grid")
    circuit = Circuit(registers.n_qubits, register_map=registers.register_map())
    qubits = registers.position

    if source.kind is SourceKind.POINT:
        value = geometry.position_index(source.cell)
        for i, q in enumerate(qubits):
            if (value >> i) & 1:
                circuit.append(x(q))
        return circuit

    weights = flatten_cells(source.distribution(geometry))
    n = len(qubits)
    for level in range(n):
        target = qubits[n - 1 - level]
        higher = qubits[n - level :]
        masses = weights.reshape(1 << level, 2, -1).sum(axis=2)
        for prefix, (m0, m1) in enumerate(masses):
            if m1 == 0.0:
                continue
            theta = 2.0 * np.arctan2(np.sqrt(m1), np.sqrt(m0))
            if level == 0:
                circuit.append(ry(theta, target))
            else:
                circuit.append(mc_ry(theta, controls_for_value(higher, prefix), target))
    logger.debug("source preparation: %d rotations", len(circuit))
    return circuit
