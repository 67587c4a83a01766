"""Experiment orchestration: run the selected solvers and write every output."""

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, Optional

from src.comparison import ComparisonReport, build_comparison
from src.config import ExperimentConfig
from src.errors import TransportError
from src.report_generator import ReportGenerator, format_trajectories
from src.solvers.amplified_walk import AmplifiedWalkSolver
from src.solvers.base_solver import BaseSolver, FluxMap
from src.solvers.finite_difference import FiniteDifferenceSolver
from src.solvers.measured_walk import MeasuredWalkSolver
from src.solvers.monte_carlo import MonteCarloSolver, trace_particles
from src.solvers.rng import RngStream
from src.solvers.swap_test import SwapScoreSolver

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    comparison: ComparisonReport
    fluxes: Dict[str, FluxMap] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.comparison.ok


def build_solver(name: str, config: ExperimentConfig) -> BaseSolver:
    """Instantiate a solver from the configuration."""
    geometry, source, detector = config.geometry, config.source, config.detector
    if name == "mc":
        return MonteCarloSolver(
            geometry, source, config.particles, config.max_collisions, config.mc_lattice
        )
    if name == "fd":
        return FiniteDifferenceSolver(
            geometry, source, config.fd_tol, config.fd_floor, config.fd_iterations
        )
    if name == "walk-measured":
        return MeasuredWalkSolver(
            geometry, source, config.steps, config.shots, config.absorb_mode, config.coin_mode
        )
    if name == "walk-amplified":
        return AmplifiedWalkSolver(
            geometry, source, detector, config.amplified_steps, config.grover_k
        )
    if name == "swap-score":
        return SwapScoreSolver(geometry, source, detector, config.swap_steps, config.swap_shots)
    raise ValueError(f"unknown solver {name!r}")


def run_experiment(
    config: ExperimentConfig, reference: Optional[str] = None
) -> ExperimentResult:
    """Run every selected solver and write flux CSVs, slices, report and manifest.

    A failing solver does not stop the others; it is marked failed in the
    manifest and the result reports ``ok = False``.

    Args:
        config: Validated or raw experiment configuration
        reference: Compare every map against this solver only (default: all pairs)

    Returns:
        ExperimentResult with the comparison report and paths of written files
    """
    config.validate()
    stream = RngStream(config.seed)
    generator = ReportGenerator(config.output_dir)
    runtimes: Dict[str, float] = {}
    failures: Dict[str, str] = {}
    summaries: Dict[str, Dict] = {}
    fluxes: Dict[str, FluxMap] = {}
    outputs: Dict[str, str] = {}
    manifest_solvers = []

    for name in config.solvers:
        start = time.perf_counter()
        entry = {"solver": name, "status": "ok", "outputs": []}
        try:
            solver = build_solver(name, config)
            result = solver.solve(stream.for_solver(name))
        except (TransportError, ValueError) as e:
            failures[name] = str(e)
            entry.update(status="failed", error=str(e))
            logger.error("%s failed: %s", name, e)
        else:
            summaries[name] = result.summary
            if result.flux is not None:
                fluxes[name] = result.flux
                outputs[f"flux_{name}"] = generator.write_flux(name, result.flux)
                entry["outputs"].append(outputs[f"flux_{name}"])
            if name == "walk-measured":
                outputs["walk_report"] = generator.write_walk_report(result.report)
                entry["outputs"].append(outputs["walk_report"])
            if name == "mc" and config.trace_particles:
                trajectories = trace_particles(
                    config.geometry,
                    config.source,
                    config.trace_particles,
                    stream.for_solver("mc-trace").generator(),
                    config.max_collisions,
                )
                outputs["trajectories"] = generator.write_text(
                    "trajectories_mc.txt", format_trajectories(trajectories)
                )
                entry["outputs"].append(outputs["trajectories"])
            entry["summary"] = result.summary
        runtimes[name] = time.perf_counter() - start
        entry["runtime_s"] = round(runtimes[name], 6)
        manifest_solvers.append(entry)

    cell_size = config.geometry.cell_size
    comparison = build_comparison(
        fluxes, config.slice_axis, config.slice_coordinate, cell_size, reference
    )
    comparison.runtimes = runtimes
    comparison.failures = failures
    comparison.summaries = summaries

    flux_files = {name: outputs[f"flux_{name}"] for name in fluxes}
    for name, flux_slice in comparison.slices.items():
        outputs[f"slice_{name}"] = generator.write_slice(name, flux_slice)
    if flux_files:
        outputs["plot_manifest"] = generator.write_plot_manifest(comparison, flux_files)
    outputs["report"] = generator.generate_report(comparison, config.to_dict(), config.seed)

    manifest = {
        "status": "ok" if not failures else "failed",
        "seed": config.seed,
        "config": config.to_dict(),
        "solvers": manifest_solvers,
        "comparison": {
            pair: {"cosine": m.cosine, "total_variation": m.total_variation}
            for pair, m in comparison.metrics.items()
        },
    }
    outputs["manifest"] = generator.write_yaml("manifest.yaml", manifest)
    return ExperimentResult(comparison, fluxes, outputs)
