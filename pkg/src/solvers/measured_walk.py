"""Measured quantum walk: measure the position after every step and restart from the shots."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from src.geometry import GridGeometry, SourceSpec, unflatten_cells
from src.quantum.statevector import (
    StateVector,
    apply_circuit,
    marginal_probabilities,
    sample_positions,
)
from src.solvers.base_solver import BaseSolver, FluxMap, Normalization, SolverResult
from src.solvers.kernel import AbsorbMode
from src.solvers.rng import RngStream
from src.walk.coin import CoinMode
from src.walk.registers import allocate_registers
from src.walk.source import build_source_prep
from src.walk.step import WalkStepCircuit, build_walk_step

logger = logging.getLogger(__name__)


@dataclass
class WalkRunReport:
    """Result of a measured walk run."""

    flux: FluxMap
    step_histograms: List[np.ndarray]
    success_rates: List[float]
    absorbed: List[int] = field(default_factory=list)
    failures: List[int] = field(default_factory=list)
    seed: Optional[int] = None
    config: Dict[str, Any] = field(default_factory=dict)
    n_steps: int = 0

    @property
    def steps_completed(self) -> int:
        return len(self.step_histograms)

    @property
    def truncated(self) -> bool:
        return self.steps_completed < self.n_steps

    def to_dict(self) -> Dict[str, Any]:
        """Plain structure for YAML output; histograms as nested lists indexed [x][y]."""
        return {
            "seed": self.seed,
            "config": dict(self.config),
            "n_steps": self.n_steps,
            "steps_completed": self.steps_completed,
            "truncated": self.truncated,
            "total_tallies": self.flux.total,
            "steps": [
                {
                    "step": i + 1,
                    "success_rate": float(self.success_rates[i]),
                    "failed_attempts": int(self.failures[i]),
                    "absorbed": int(self.absorbed[i]),
                    "histogram": self.step_histograms[i].astype(int).tolist(),
                }
                for i in range(self.steps_completed)
            ],
        }


class _StepOutcomes:
    """Per-position outcome distribution of one step, computed on demand."""

    def __init__(self, step: WalkStepCircuit):
        self.step = step
        regs = step.registers
        self.qubits = regs.position + [regs.coin[2]]
        self._cache: Dict[int, np.ndarray] = {}

    def __call__(self, position: int) -> np.ndarray:
        """Joint distribution of (position, c2) after one post-selected step from ``position``.

        Index ``pos + (c2 << n_pos)``: the first half holds stay outcomes.
        """
        if position not in self._cache:
            state = StateVector.basis(self.step.registers.n_qubits, position)
            self.step.apply(state, postselect=True)
            self._cache[position] = marginal_probabilities(state, self.qubits)
        return self._cache[position]


def run_measured_walk(
    geometry: GridGeometry,
    source: SourceSpec,
    n_steps: int,
    n_shots: int,
    rng: np.random.Generator,
    absorb_mode: AbsorbMode = AbsorbMode.SELF_LOOP,
    mode: CoinMode = CoinMode.FAST,
    seed: Optional[int] = None,
    config: Optional[Dict[str, Any]] = None,
) -> WalkRunReport:
    """Run the measured walk.

    Shots with the same position are advanced together: the step from a
    basis state has a fixed outcome distribution, so the histogram of the
    next positions is one multinomial draw per distinct position. Each shot
    adds one tally at its measured position after every step.

    Args:
        geometry: Grid geometry
        source: Particle source
        n_steps: Number of walk steps
        n_shots: Number of shots
        rng: Random generator
        absorb_mode: SELF_LOOP keeps stay outcomes; KILL removes those shots
        mode: Coin application mode
        seed: Seed echoed in the report
        config: Configuration echoed in the report

    Returns:
        WalkRunReport with the per-step-sum flux map
    """
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")

    registers = allocate_registers(geometry.n_x, geometry.n_y)
    step = build_walk_step(geometry, registers, mode)
    outcomes = _StepOutcomes(step)
    success_probability = step.coin.success_probability
    n_cells = geometry.n_cells

    initial = StateVector(registers.n_qubits)
    apply_circuit(initial, build_source_prep(source, registers, geometry))
    shots = sample_positions(initial, registers.position, n_shots, rng)

    report = WalkRunReport(
        flux=FluxMap(np.zeros(geometry.shape), n_shots, Normalization.PER_STEP_SUM),
        step_histograms=[],
        success_rates=[],
        seed=seed,
        config=dict(config or {}),
        n_steps=n_steps,
    )
    for t in range(1, n_steps + 1):
        histogram = np.zeros(n_cells, dtype=np.int64)
        absorbed = 0
        failures = 0
        for position in sorted(shots):
            count = shots[position]
            draws = rng.multinomial(count, outcomes(position))
            failures += int(rng.negative_binomial(count, success_probability))
            stay, move = draws[:n_cells], draws[n_cells:]
            if absorb_mode is AbsorbMode.KILL:
                histogram += move
                absorbed += int(stay.sum())
            else:
                histogram += stay + move
        alive = int(histogram.sum())
        attempts = alive + absorbed + failures
        report.success_rates.append((alive + absorbed) / attempts)
        report.failures.append(failures)
        report.absorbed.append(absorbed)
        report.step_histograms.append(unflatten_cells(histogram, geometry.shape))
        logger.debug(
            "step %d: %d shots alive, %d absorbed, %d failed post-selections",
            t,
            alive,
            absorbed,
            failures,
        )
        if alive == 0:
            logger.warning("all shots absorbed after %d of %d steps", t, n_steps)
            break
        shots = {int(p): int(c) for p, c in enumerate(histogram) if c > 0}

    report.flux.tallies = np.sum(report.step_histograms, axis=0).astype(np.float64)
    return report


class MeasuredWalkSolver(BaseSolver):
    """Measured walk as a flux solver."""

    def __init__(
        self,
        geometry: GridGeometry,
        source: SourceSpec,
        n_steps: int = 10,
        n_shots: int = 1000,
        absorb_mode: AbsorbMode = AbsorbMode.SELF_LOOP,
        mode: CoinMode = CoinMode.FAST,
    ):
        super().__init__("walk-measured", geometry, source)
        self.n_steps = n_steps
        self.n_shots = n_shots
        self.absorb_mode = absorb_mode
        self.mode = mode

    def solve(self, stream: Optional[RngStream] = None) -> SolverResult:
        rng = self._generator(stream)
        report = run_measured_walk(
            self.geometry,
            self.source,
            self.n_steps,
            self.n_shots,
            rng,
            absorb_mode=self.absorb_mode,
            mode=self.mode,
            seed=stream.seed,
            config={
                "steps": self.n_steps,
                "shots": self.n_shots,
                "absorb_mode": self.absorb_mode.value,
                "coin_mode": self.mode.value,
            },
        )
        summary = {
            "steps_completed": report.steps_completed,
            "total_tallies": report.flux.total,
            "mean_success_rate": float(np.mean(report.success_rates)),
        }
        return SolverResult(self.solver_name, report.flux, summary, report)
