"""Output files for transport experiments: flux CSVs, reports and manifests."""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import yaml

from src.comparison import ComparisonReport, FluxSlice
from src.errors import ConfigError
from src.solvers.base_solver import FluxMap, Normalization
from src.solvers.measured_walk import WalkRunReport
from src.solvers.monte_carlo import Trajectory


def write_flux_csv(flux: FluxMap, path: Union[str, Path]) -> Path:
    """Write a flux map as CSV.

    The header is ``# nx,ny,normalization`` and ``# samples=N``, followed by
    ``ny`` rows (``y = 0`` first) of ``nx`` values.
    """
    path = Path(path)
    nx, ny = flux.shape
    header = f"{nx},{ny},{flux.normalization.value}\nsamples={flux.n_samples}"
    np.savetxt(path, flux.tallies.T, fmt="%.17g", delimiter=",", header=header, comments="# ")
    return path


def read_flux_csv(path: Union[str, Path]) -> FluxMap:
    """Read a flux map written by ``write_flux_csv``."""
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        dims = f.readline().lstrip("#").strip()
        samples = f.readline().lstrip("#").strip()
    try:
        nx, ny, normalization = dims.split(",")
        n_samples = int(samples.split("=", 1)[1])
        norm = Normalization(normalization)
    except (ValueError, IndexError) as e:
        raise ConfigError(f"malformed flux CSV header: {dims!r}", str(path)) from e
    rows = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if rows.shape != (int(ny), int(nx)):
        raise ConfigError(
            f"flux CSV body has shape {rows.shape}, header says {ny}x{nx}", str(path)
        )
    return FluxMap(rows.T.copy(), n_samples, norm)


def format_trajectories(trajectories: List[Trajectory]) -> str:
    """One line per collision: ``particle collision x y termination``."""
    lines = ["# particle collision x_cm y_cm termination"]
    for i, traj in enumerate(trajectories):
        for j, (x, y) in enumerate(traj.points):
            lines.append(f"{i} {j} {x:.17g} {y:.17g} {traj.termination.value}")
    return "\n".join(lines) + "\n"


class ReportGenerator:
    """Writes every output file of an experiment into one directory."""

    def __init__(self, output_dir: Union[str, Path] = "output"):
        """Initialize report generator.

        Args:
            output_dir: Directory to save outputs
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def write_flux(self, name: str, flux: FluxMap) -> str:
        return str(write_flux_csv(flux, self.output_dir / f"flux_{name}.csv"))

    def write_slice(self, name: str, flux_slice: FluxSlice) -> str:
        path = self.output_dir / f"slice_{name}.csv"
        table = np.column_stack([flux_slice.centers, flux_slice.values])
        header = (
            f"{flux_slice.axis}={flux_slice.coordinate:g} cm (index {flux_slice.index})\n"
            "center_cm,flux"
        )
        np.savetxt(path, table, fmt="%.17g", delimiter=",", header=header, comments="# ")
        return str(path)

    def write_yaml(self, filename: str, data: Dict[str, Any]) -> str:
        path = self.output_dir / filename
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(data, f, sort_keys=False)
        return str(path)

    def write_walk_report(self, report: WalkRunReport) -> str:
        return self.write_yaml("walk_measured_report.yaml", report.to_dict())

    def write_text(self, filename: str, text: str) -> str:
        path = self.output_dir / filename
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return str(path)

    def write_plot_manifest(self, comparison: ComparisonReport, flux_files: Dict[str, str]) -> str:
        """Data needed to plot maps and slices; no rendering happens here."""
        entries = []
        for name in sorted(flux_files):
            flux_slice = comparison.slices.get(name)
            entries.append(
                {
                    "label": name,
                    "flux_csv": Path(flux_files[name]).name,
                    "slice_csv": f"slice_{name}.csv" if flux_slice else None,
                    "slice_axis": flux_slice.axis if flux_slice else None,
                    "slice_coordinate_cm": flux_slice.coordinate if flux_slice else None,
                }
            )
        return self.write_yaml("plot_manifest.yaml", {"plots": entries})

    def _format_metrics(self, title: str, metrics: Dict[str, Any]) -> str:
        if not metrics:
            return ""
        md = f"## {title}\n\n"
        md += "| Pair | Cosine | TV distance |\n|---|---|---|\n"
        for pair, m in metrics.items():
            md += f"| {pair} | {m.cosine:.6f} | {m.total_variation:.6f} |\n"
        return md + "\n"

    def generate_report(
        self,
        comparison: ComparisonReport,
        config: Dict[str, Any],
        seed: Optional[int] = None,
    ) -> str:
        """Generate the markdown comparison report.

        Args:
            comparison: Metrics, slices and runtimes
            config: Effective configuration
            seed: Root seed of the run

        Returns:
            Path to generated report file
        """
        report = "# Flux Comparison Report\n\n"
        report += f"**Solvers:** {', '.join(config.get('solvers', []))}\n\n"
        if seed is not None:
            report += f"**Seed:** {seed}\n\n"
        report += "---\n\n"

        report += "## Runtime\n\n"
        for name, seconds in comparison.runtimes.items():
            status = "✗ failed" if name in comparison.failures else "✓"
            report += f"- **{name}:** {seconds:.3f} s {status}\n"
        report += "\n"

        report += self._format_metrics("Full maps (unit-sum normalized)", comparison.metrics)
        report += self._format_metrics("Slices (unit-sum normalized)", comparison.slice_metrics)

        if comparison.summaries:
            report += "## Solver summaries\n\n"
            for name, summary in comparison.summaries.items():
                report += f"### {name}\n\n"
                for key, value in summary.items():
                    report += f"- {key}: {value}\n"
                report += "\n"

        if comparison.failures:
            report += "## Failures\n\n"
            for name, error in comparison.failures.items():
                report += f"- **{name}:** {error}\n"
            report += "\n"

        return self.write_text("comparison_report.md", report)
