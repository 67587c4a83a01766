"""Position-dependent coin with post-selected diagonal amplitudes.

The coin register ``(c0, c1, c2)`` holds the basis value ``k = c0 + 2 c1 + 4 c2``.
``c2 = 0`` means stay (four degenerate states), otherwise ``k`` encodes a move:

    4 = |100> right    5 = |101> left    6 = |110> up    7 = |111> down

From a cleared coin register the operator applies H on every coin qubit, then
for each position ``|x, y>`` and coin value ``k`` rotates the coin ancilla by
``RY(2 arccos f)`` with ``f = sqrt(8 * scale) * d_k``. The ancilla branch
``|0>`` is the success branch; conditioned on it the coin distribution is
``d_k**2`` for every cell, and the success probability is ``scale``.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict

import numpy as np

from src.errors import CircuitError
from src.geometry import Direction, GridGeometry, flatten_cells
from src.quantum.circuit import Circuit, controls_for_value, h, mc_ry
from src.quantum.statevector import (
    StateVector,
    apply_circuit,
    apply_uniformly_controlled_ry,
)
from src.tolerances import STRUCTURAL_TOL
from src.walk.registers import WalkRegisters

logger = logging.getLogger(__name__)

N_COIN_STATES = 8

COIN_CODES: Dict[Direction, int] = {
    Direction.RIGHT: 4,
    Direction.LEFT: 5,
    Direction.UP: 6,
    Direction.DOWN: 7,
}


class CoinMode(Enum):
    GATE = "gate-level"
    FAST = "amplitude-fast-path"


@dataclass(frozen=True)
class CoinSpec:
    """Diagonal amplitudes ``d[k, x, y]`` and the global rotation scale."""

    amplitudes: np.ndarray
    scale: float

    @property
    def target_probabilities(self) -> np.ndarray:
        return self.amplitudes**2

    def rotation_factors(self) -> np.ndarray:
        """``f[k, x, y]``: cosine of the half rotation angle."""
        f = np.sqrt(N_COIN_STATES * self.scale) * self.amplitudes
        if np.any(f > 1.0 + STRUCTURAL_TOL) or np.any(f < 0.0):
            raise CircuitError("coin amplitude outside [0, 1] after scaling")
        return np.clip(f, 0.0, 1.0)


def build_coin_spec(geometry: GridGeometry) -> CoinSpec:
    p_a = geometry.absorption_map()
    probs = np.empty((N_COIN_STATES,) + geometry.shape)
    probs[:4] = p_a / 4.0
    probs[4:] = (1.0 - p_a) / 4.0
    largest = N_COIN_STATES * probs.max()
    return CoinSpec(np.sqrt(probs), 1.0 / largest)


class CoinOperator:
    """Coin preparation plus diagonal coin for one step's registers."""

    def __init__(self, spec: CoinSpec, registers: WalkRegisters, mode: CoinMode):
        self.spec = spec
        self.registers = registers
        self.mode = mode
        self._factors = spec.rotation_factors()

    @property
    def success_probability(self) -> float:
        return self.spec.scale

    def preparation(self) -> Circuit:
        circuit = Circuit(self.registers.n_qubits, register_map=self.registers.register_map())
        circuit.extend(h(q) for q in self.registers.coin.qubits)
        return circuit

    @cached_property
    def circuit(self) -> Circuit:
        """Gate-level form: one multi-controlled RY per (cell, coin value)."""
        regs = self.registers
        circuit = self.preparation()
        target = regs.coin_ancilla[0]
        for k in range(N_COIN_STATES):
            coin_controls = controls_for_value(regs.coin.qubits, k)
            column = flatten_cells(self._factors[k])
            for pos, f in enumerate(column):
                theta = 2.0 * np.arccos(f)
                if theta == 0.0:
                    continue
                controls = controls_for_value(regs.position, pos) + coin_controls
                circuit.append(mc_ry(theta, controls, target))
        return circuit

    def apply(self, state: StateVector, postselect: bool = False) -> float:
        """Apply the coin to ``state`` in place.

        Args:
            state: State on this operator's registers, coin register cleared
            postselect: Project the coin ancilla onto ``|0>`` afterwards

        Returns:
            Success probability of the projection (1.0 when not post-selecting)
        """
        if self.mode is CoinMode.GATE:
            apply_circuit(state, self.circuit)
        else:
            apply_circuit(state, self.preparation())
            self._apply_fast(state)
        if postselect:
            return state.postselect([self.registers.coin_ancilla[0]], 0)
        return 1.0

    def _apply_fast(self, state: StateVector) -> None:
        regs = self.registers
        # Control value is pos + (k << n_pos), matching a C-order flatten of f[k, pos].
        f = np.stack([flatten_cells(self._factors[k]) for k in range(N_COIN_STATES)])
        apply_uniformly_controlled_ry(
            state, regs.position + regs.coin.qubits, regs.coin_ancilla[0], f.reshape(-1)
        )


def build_position_coin(
    geometry: GridGeometry,
    registers: WalkRegisters,
    mode: CoinMode = CoinMode.FAST,
) -> CoinOperator:
    """Build the position-dependent coin for ``geometry`` on ``registers``."""
    if (geometry.n_x, geometry.n_y) != (registers.n_x, registers.n_y):
        raise CircuitError("register layout does not match the grid")
    spec = build_coin_spec(geometry)
    logger.debug("coin scale %.6g (post-selection success probability)", spec.scale)
    return CoinOperator(spec, registers, mode)
