"""Amplitude-amplified walk.

``A`` prepares the source and runs every step on its own coin register and
ancillas, so it is unitary. Good states have the walker inside the detector
and every coin ancilla in its success branch ``|0>``. The Grover iterate
``Q = -A S_0 A^dagger S_good`` rotates ``A|0>`` towards the good subspace:
after ``k`` rounds the good probability is ``sin^2((2k + 1) theta)`` with
``sin^2(theta) = a``.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np

from src.errors import AmplificationError
from src.geometry import DetectorRegion, GridGeometry, SourceSpec
from src.quantum.circuit import Circuit
from src.quantum.statevector import StateVector, apply_circuit
from src.solvers.base_solver import BaseSolver, SolverResult
from src.solvers.rng import RngStream
from src.walk.coin import CoinMode
from src.walk.registers import allocate_unrolled_registers
from src.walk.source import build_source_prep
from src.walk.step import build_walk_step

logger = logging.getLogger(__name__)

AUTO = "auto"


def amplified_probability(a: float, k: int) -> float:
    """Good-state probability after ``k`` Grover iterates from baseline ``a``."""
    theta = np.arcsin(np.sqrt(a))
    return float(np.sin((2 * k + 1) * theta) ** 2)


def optimal_iterations(a: float) -> int:
    """``floor(pi / (4 theta))``; 0 when ``a > 0.5``, where amplification overshoots."""
    if a <= 0.0:
        raise AmplificationError("good-state probability is zero, nothing to amplify")
    if a > 0.5:
        logger.warning("good-state probability %.4g exceeds 0.5; using k = 0", a)
        return 0
    theta = np.arcsin(np.sqrt(a))
    return int(np.floor(np.pi / (4.0 * theta)))


@dataclass
class AmplificationResult:
    amplified_probability: float
    baseline_probability: float
    k: int

    @property
    def theta(self) -> float:
        return float(np.arcsin(np.sqrt(self.baseline_probability)))

    @property
    def analytic_probability(self) -> float:
        return amplified_probability(self.baseline_probability, self.k)


class WalkAmplifier:
    """Walk operator ``A`` on unrolled registers together with its Grover iterate."""

    def __init__(
        self,
        geometry: GridGeometry,
        source: SourceSpec,
        detector: DetectorRegion,
        n_steps: int,
    ):
        detector.validate(geometry)
        self.geometry = geometry
        self.detector = detector
        self.n_steps = n_steps
        self.registers = allocate_unrolled_registers(geometry.n_x, geometry.n_y, n_steps)
        self.n_qubits = self.registers[0].n_qubits

        circuit = build_source_prep(source, self.registers[0], geometry)
        for regs in self.registers:
            step = build_walk_step(geometry, regs, CoinMode.GATE)
            circuit = circuit.compose(step.unitary_circuit)
        self.operator: Circuit = circuit
        logger.debug(
            "walk operator: %d qubits, %d operations over %d steps",
            self.n_qubits,
            len(circuit),
            n_steps,
        )

    @cached_property
    def inverse_operator(self) -> Circuit:
        return self.operator.inverse()

    @cached_property
    def good_mask(self) -> np.ndarray:
        """Boolean mask over basis indices of the good subspace."""
        index = np.arange(1 << self.n_qubits)
        n_pos = self.geometry.n_x + self.geometry.n_y
        cells = np.zeros(1 << n_pos, dtype=bool)
        for cell in self.detector.cells:
            cells[self.geometry.position_index(cell)] = True
        mask = cells[index & ((1 << n_pos) - 1)]
        for regs in self.registers:
            mask &= ((index >> regs.coin_ancilla[0]) & 1) == 0
        return mask

    def prepare(self) -> StateVector:
        """``A|0>``."""
        state = StateVector(self.n_qubits)
        return apply_circuit(state, self.operator)

    def postselected_state(self) -> StateVector:
        """``A|0>`` projected onto every coin ancilla succeeding."""
        state = self.prepare()
        for regs in self.registers:
            state.postselect(regs.coin_ancilla.qubits, 0)
        return state

    def good_probability(self, state: StateVector) -> float:
        probs = np.abs(state.amplitudes) ** 2
        return float(probs[self.good_mask].sum() / state.norm2)

    def grover_iterate(self, state: StateVector) -> StateVector:
        """Apply ``Q = -A S_0 A^dagger S_good`` in place."""
        state.amplitudes[self.good_mask] *= -1.0
        apply_circuit(state, self.inverse_operator)
        state.amplitudes[0] *= -1.0
        apply_circuit(state, self.operator)
        state.amplitudes *= -1.0
        return state

    def run(self, k: Union[int, str] = AUTO) -> AmplificationResult:
        """Amplify ``k`` rounds (``"auto"`` picks the analytic optimum).

        Returns:
            AmplificationResult with the probabilities before and after
        """
        state = self.prepare()
        baseline = self.good_probability(state)
        if baseline <= 1e-15:
            raise AmplificationError(
                f"detector unreachable in {self.n_steps} steps: good-state probability is zero"
            )
        rounds = optimal_iterations(baseline) if k == AUTO else int(k)
        if rounds < 0:
            raise AmplificationError("number of Grover iterations must be nonnegative")
        for _ in range(rounds):
            self.grover_iterate(state)
        amplified = self.good_probability(state)
        logger.info(
            "amplification: a = %.6g, k = %d, amplified = %.6g", baseline, rounds, amplified
        )
        return AmplificationResult(amplified, baseline, rounds)


def run_amplified_walk(
    geometry: GridGeometry,
    source: SourceSpec,
    n_steps: int,
    detector: DetectorRegion,
    k: Union[int, str] = AUTO,
) -> AmplificationResult:
    """Amplify the probability of finding the walker in ``detector`` after ``n_steps``.

    Args:
        geometry: Grid geometry
        source: Particle source
        n_steps: Number of unrolled walk steps
        detector: Detector region
        k: Number of Grover iterates or ``"auto"``

    Returns:
        AmplificationResult (amplified probability, baseline probability, k used)
    """
    return WalkAmplifier(geometry, source, detector, n_steps).run(k)


class AmplifiedWalkSolver(BaseSolver):
    """Amplified walk as a solver; reports probabilities, no flux map."""

    stochastic = False

    def __init__(
        self,
        geometry: GridGeometry,
        source: SourceSpec,
        detector: DetectorRegion,
        n_steps: int = 2,
        k: Union[int, str] = AUTO,
    ):
        super().__init__("walk-amplified", geometry, source, detector)
        self.n_steps = n_steps
        self.k = k

    def solve(self, stream: Optional[RngStream] = None) -> SolverResult:
        result = run_amplified_walk(
            self.geometry, self.source, self.n_steps, self.detector, self.k
        )
        summary = {
            "steps": self.n_steps,
            "k": result.k,
            "baseline_probability": result.baseline_probability,
            "amplified_probability": result.amplified_probability,
            "analytic_probability": result.analytic_probability,
        }
        return SolverResult(self.solver_name, None, summary, result)
