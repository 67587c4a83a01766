"""Flux-map comparison metrics and slices."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.errors import GeometryError
from src.solvers.base_solver import FluxMap
from src.tolerances import STRUCTURAL_TOL

logger = logging.getLogger(__name__)


@dataclass
class MapMetrics:
    cosine: float
    total_variation: float


@dataclass
class FluxSlice:
    """One row or column of a flux map with its cell-center coordinates (cm)."""

    axis: str
    coordinate: float
    index: int
    centers: np.ndarray
    values: np.ndarray


@dataclass
class ComparisonReport:
    """Pairwise metrics, slices and runtimes of one experiment."""

    metrics: Dict[str, MapMetrics] = field(default_factory=dict)
    slice_metrics: Dict[str, MapMetrics] = field(default_factory=dict)
    slices: Dict[str, FluxSlice] = field(default_factory=dict)
    runtimes: Dict[str, float] = field(default_factory=dict)
    summaries: Dict[str, Dict] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def _unit(values: np.ndarray, name: str) -> np.ndarray:
    total = float(np.sum(values))
    if total <= 0:
        raise GeometryError(f"{name} is all zero and cannot be normalized")
    return np.asarray(values, dtype=np.float64) / total


def compare_vectors(a: np.ndarray, b: np.ndarray) -> MapMetrics:
    """Cosine similarity and total-variation distance after unit-sum normalization."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise GeometryError(f"shape mismatch: {a.shape} vs {b.shape}")
    pa = _unit(a, "first map")
    pb = _unit(b, "second map")
    cosine = float(np.dot(pa.ravel(), pb.ravel()) / (np.linalg.norm(pa) * np.linalg.norm(pb)))
    tv = 0.5 * float(np.abs(pa - pb).sum())
    return MapMetrics(float(np.clip(cosine, 0.0, 1.0)), float(np.clip(tv, 0.0, 1.0)))


def compare_maps(a: FluxMap, b: FluxMap) -> MapMetrics:
    """Compare two flux maps of the same shape.

    Args:
        a: First flux map
        b: Second flux map

    Returns:
        MapMetrics with cosine similarity and total-variation distance
    """
    return compare_vectors(a.tallies, b.tallies)


def extract_slice(
    flux: FluxMap, axis: str, coordinate: float, cell_size: float = 1.25
) -> FluxSlice:
    """Cells whose extent contains ``coordinate`` along ``axis``.

    ``axis="x"`` returns the column at that x (values along y). A coordinate on
    a cell boundary belongs to the upper cell, except the far domain edge,
    which belongs to the last cell.

    Args:
        flux: Flux map
        axis: "x" or "y"
        coordinate: Position in cm
        cell_size: Cell edge in cm

    Returns:
        FluxSlice with values and cell-center coordinates
    """
    if axis not in ("x", "y"):
        raise GeometryError(f"axis must be 'x' or 'y', got {axis!r}")
    along = 0 if axis == "x" else 1
    n = flux.shape[along]
    length = n * cell_size
    if not 0.0 <= coordinate <= length:
        raise GeometryError(f"{axis} = {coordinate} cm outside the domain [0, {length}]")
    # ratios such as 0.3 / 0.1 land just below the integer
    index = min(int(np.floor(coordinate / cell_size + STRUCTURAL_TOL)), n - 1)
    values = flux.tallies[index, :] if along == 0 else flux.tallies[:, index]
    centers = (np.arange(values.size) + 0.5) * cell_size
    return FluxSlice(axis, float(coordinate), index, centers, values.copy())


def build_comparison(
    fluxes: Dict[str, FluxMap],
    axis: str,
    coordinate: float,
    cell_size: float,
    reference: Optional[str] = None,
) -> ComparisonReport:
    """Pairwise metrics of every flux map, full and along one slice."""
    report = ComparisonReport()
    names: List[str] = sorted(fluxes)
    for name in names:
        report.slices[name] = extract_slice(fluxes[name], axis, coordinate, cell_size)
    pairs = [(a, b) for i, a in enumerate(names) for b in names[i + 1 :]]
    if reference is not None:
        pairs = [(reference, b) for b in names if b != reference]
    for a, b in pairs:
        key = f"{a} vs {b}"
        try:
            report.metrics[key] = compare_maps(fluxes[a], fluxes[b])
            report.slice_metrics[key] = compare_vectors(
                report.slices[a].values, report.slices[b].values
            )
        except GeometryError as e:
            logger.warning("cannot compare %s: %s", key, e)
    return report
