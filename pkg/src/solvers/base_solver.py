"""Base solver class and the flux map every solver produces."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.errors import GeometryError
from src.geometry import DetectorRegion, GridGeometry, SourceSpec
from src.solvers.rng import RngStream


class Normalization(Enum):
    PER_SHOT = "per-shot"
    PER_STEP_SUM = "per-step-sum"
    UNIT_SUM = "unit-sum"


@dataclass
class FluxMap:
    """Per-cell collision tallies, ``tallies[x, y]``."""

    tallies: np.ndarray
    n_samples: int
    normalization: Normalization

    def __post_init__(self):
        self.tallies = np.asarray(self.tallies, dtype=np.float64)
        if self.tallies.ndim != 2:
            raise GeometryError(f"flux map must be 2D, got shape {self.tallies.shape}")
        if np.any(self.tallies < 0) or not np.all(np.isfinite(self.tallies)):
            raise GeometryError("flux tallies must be finite and nonnegative")
        if self.normalization is Normalization.UNIT_SUM and abs(self.total - 1.0) > 1e-9:
            raise GeometryError(f"unit-sum flux map sums to {self.total}")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.tallies.shape

    @property
    def total(self) -> float:
        return float(self.tallies.sum())

    def unit_sum(self) -> "FluxMap":
        total = self.total
        if total <= 0:
            raise GeometryError("cannot normalize an all-zero flux map")
        return FluxMap(self.tallies / total, self.n_samples, Normalization.UNIT_SUM)

    def __repr__(self) -> str:
        return (
            f"FluxMap(shape={self.shape}, n_samples={self.n_samples}, "
            f"normalization={self.normalization.value!r}, total={self.total:.6g})"
        )


@dataclass
class SolverResult:
    """Outcome of one solver run."""

    solver: str
    flux: Optional[FluxMap] = None
    summary: Dict[str, Any] = field(default_factory=dict)
    report: Any = None


class BaseSolver(ABC):
    """Abstract base class for all transport solvers."""

    # Whether ``solve`` draws random numbers.
    stochastic = True

    def __init__(
        self,
        solver_name: str,
        geometry: GridGeometry,
        source: SourceSpec,
        detector: Optional[DetectorRegion] = None,
    ):
        """Initialize solver.

        Args:
            solver_name: Name used in reports and output files (e.g., "mc", "fd")
            geometry: Grid geometry
            source: Particle source
            detector: Detector region, for solvers that score one
        """
        source.validate(geometry)
        if detector is not None:
            detector.validate(geometry)
        self.solver_name = solver_name
        self.geometry = geometry
        self.source = source
        self.detector = detector

    @abstractmethod
    def solve(self, stream: Optional[RngStream] = None) -> SolverResult:
        """Run the solver.

        Args:
            stream: Random stream; required by stochastic solvers

        Returns:
            SolverResult with the flux map and/or scalar summary
        """
        pass

    def _generator(self, stream: Optional[RngStream]) -> np.random.Generator:
        if stream is None:
            raise ValueError(f"{self.solver_name} needs a random stream")
        return stream.generator()
