"""One full walk step: coin, boundary conditions, shift."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import CircuitError, MissingRngError
from src.geometry import GridGeometry
from src.quantum.circuit import Circuit, reset
from src.quantum.statevector import StateVector, apply_circuit, probability_of
from src.tolerances import STRUCTURAL_TOL
from src.walk.boundary import build_boundary_conditions
from src.walk.coin import CoinMode, CoinOperator, build_position_coin
from src.walk.registers import WalkRegisters
from src.walk.shift import build_shift

logger = logging.getLogger(__name__)

POSTSELECTION_NOTE = "coin-ancilla is post-selected on |0>; reset keeps only that branch"


@dataclass(frozen=True)
class WalkStepCircuit:
    """Components of a step and their compositions."""

    registers: WalkRegisters
    coin: CoinOperator
    boundary: Circuit
    shift: Circuit

    @property
    def unitary_circuit(self) -> Circuit:
        """Coin, boundary and shift without any reset (needs fresh ancillas per step)."""
        return self.coin.circuit.compose(self.boundary).compose(self.shift)

    @property
    def reset_circuit(self) -> Circuit:
        regs = self.registers
        circuit = Circuit(regs.n_qubits, register_map=regs.register_map())
        circuit.append(reset(regs.boundary[0]))
        circuit.extend(reset(q) for q in regs.coin.qubits)
        circuit.append(reset(regs.coin_ancilla[0]))
        return circuit

    @property
    def circuit(self) -> Circuit:
        """Full step ending with resets of both ancillas and the coin register."""
        return self.unitary_circuit.compose(self.reset_circuit)

    def check_cleared(self, state: StateVector) -> None:
        regs = self.registers
        checks = [
            ("boundary ancilla", regs.boundary.qubits),
            ("coin register", regs.coin.qubits),
            ("coin ancilla", regs.coin_ancilla.qubits),
        ]
        for name, qubits in checks:
            if 1.0 - probability_of(state, qubits, 0) > STRUCTURAL_TOL:
                raise CircuitError(f"{name} is not cleared on entry to the walk step")

    def apply(
        self,
        state: StateVector,
        rng: Optional[np.random.Generator] = None,
        postselect: bool = True,
        resets: bool = False,
    ) -> float:
        """Advance ``state`` by one step in place.

        Args:
            state: State on this step's registers, ancillas and coin cleared
            rng: Random stream, required when ``resets`` is set
            postselect: Keep only the coin-ancilla success branch
            resets: Reset the ancillas and the coin register at the end

        Returns:
            Post-selection success probability of this step
        """
        if resets and rng is None:
            raise MissingRngError("resetting the step registers needs a random stream")
        self.check_cleared(state)
        success = self.coin.apply(state, postselect=postselect)
        apply_circuit(state, self.boundary.compose(self.shift))
        if resets:
            apply_circuit(state, self.reset_circuit, rng)
        return success


def build_walk_step(
    geometry: GridGeometry,
    registers: WalkRegisters,
    mode: CoinMode = CoinMode.FAST,
    use_qft_blocks: bool = True,
) -> WalkStepCircuit:
    """Assemble the coin, boundary and shift stages for ``geometry``.

    Args:
        geometry: Grid geometry
        registers: Registers this step acts on
        mode: How the coin is applied by ``WalkStepCircuit.apply``
        use_qft_blocks: Emit QFT blocks in the shift

    Returns:
        The step and its components
    """
    coin = build_position_coin(geometry, registers, mode)
    step = WalkStepCircuit(
        registers,
        coin,
        build_boundary_conditions(registers),
        build_shift(registers, use_qft_blocks),
    )
    logger.debug(
        "walk step on %d qubits: %d boundary ops, %d shift ops",
        registers.n_qubits,
        len(step.boundary),
        len(step.shift),
    )
    return step
