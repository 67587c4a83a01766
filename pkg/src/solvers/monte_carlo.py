"""Analog Monte Carlo transport on the continuous 2D domain.

Flights use delta tracking with the majorant ``max sigma_t`` of the grid, so
material interfaces need no surface crossing. Walls reflect. Every real
collision adds one tally to the cell containing it (collision estimator).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np

from src.geometry import GridGeometry, Material, SourceKind, SourceSpec
from src.solvers.base_solver import BaseSolver, FluxMap, Normalization, SolverResult
from src.solvers.rng import RngStream

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 100_000

RngLike = Union[np.random.Generator, RngStream]


class Termination(Enum):
    ABSORBED = "absorbed"
    CAPPED = "leaked-capped"


@dataclass
class Trajectory:
    """Collision points (cm) of one particle."""

    points: List[Tuple[float, float]] = field(default_factory=list)
    termination: Termination = Termination.ABSORBED


@dataclass
class CollisionOutcome:
    absorbed: bool
    angle: Optional[float] = None


@dataclass
class MonteCarloTally:
    flux: FluxMap
    n_capped: int
    n_collisions: int


def flight_distance(u, sigma_t: float):
    """Inverse CDF of ``Exp(sigma_t)`` for ``u`` in ``(0, 1]``."""
    return -np.log(u) / sigma_t


def sample_flight(sigma_t: float, rng: np.random.Generator, size=None):
    if sigma_t <= 0:
        raise ValueError("sigma_t must be positive")
    u = 1.0 - rng.random(size)
    return flight_distance(u, sigma_t)


def sample_collision(material: Material, rng: np.random.Generator) -> CollisionOutcome:
    """Scatter isotropically with probability ``sigma_s / sigma_t``, otherwise absorb."""
    if rng.random() < material.sigma_s / material.sigma_t:
        return CollisionOutcome(False, float(rng.uniform(0.0, 2.0 * np.pi)))
    return CollisionOutcome(True)


def sample_source(
    source: SourceSpec,
    geometry: GridGeometry,
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> np.ndarray:
    """Starting points in cm, shape ``(2,)`` or ``(size, 2)``.

    A point source emits from its cell center; a weighted source picks cells
    in proportion to their weight and a uniform point inside the cell.
    """
    n = 1 if size is None else size
    dist = source.distribution(geometry).reshape(-1)
    if source.kind is SourceKind.POINT:
        x, y = source.cell
        cells = np.tile([x, y], (n, 1)).astype(np.float64)
        points = (cells + 0.5) * geometry.cell_size
    else:
        flat = rng.choice(dist.size, size=n, p=dist)
        cells = np.stack(np.unravel_index(flat, geometry.shape), axis=1).astype(np.float64)
        points = (cells + rng.random((n, 2))) * geometry.cell_size
    return points[0] if size is None else points


def _reflect(coord: np.ndarray, direction: np.ndarray, length: float):
    """Fold positions into ``[0, length]`` by mirror reflection, flipping direction on odd folds."""
    m = np.mod(coord, 2.0 * length)
    flipped = m >= length
    return np.where(flipped, 2.0 * length - m, m), np.where(flipped, -direction, direction)


def _cells(points: np.ndarray, geometry: GridGeometry) -> Tuple[np.ndarray, np.ndarray]:
    idx = np.floor(points / geometry.cell_size).astype(np.int64)
    return np.clip(idx[:, 0], 0, geometry.nx - 1), np.clip(idx[:, 1], 0, geometry.ny - 1)


def _transport_batch(
    geometry: GridGeometry,
    source: SourceSpec,
    n: int,
    rng: np.random.Generator,
    max_collisions: int,
    tallies: np.ndarray,
) -> Tuple[int, int]:
    sigma_t = geometry.sigma_t_map()
    p_scatter = np.array([m.sigma_s / m.sigma_t for m in geometry.materials])[
        geometry.cell_material
    ]
    majorant = float(sigma_t.max())
    lx, ly = geometry.extent

    pos = sample_source(source, geometry, rng, n)
    angle = rng.uniform(0.0, 2.0 * np.pi, n)
    direction = np.stack([np.cos(angle), np.sin(angle)], axis=1)
    collisions = np.zeros(n, dtype=np.int64)
    n_capped = 0
    total = 0

    while pos.shape[0]:
        pos = pos + sample_flight(majorant, rng, pos.shape[0])[:, None] * direction
        pos[:, 0], direction[:, 0] = _reflect(pos[:, 0], direction[:, 0], lx)
        pos[:, 1], direction[:, 1] = _reflect(pos[:, 1], direction[:, 1], ly)
        cx, cy = _cells(pos, geometry)

        real = rng.random(pos.shape[0]) * majorant < sigma_t[cx, cy]
        np.add.at(tallies, (cx[real], cy[real]), 1.0)
        collisions += real
        total += int(real.sum())

        scatter = rng.random(pos.shape[0]) < p_scatter[cx, cy]
        absorbed = real & ~scatter
        rescatter = real & scatter
        new_angle = rng.uniform(0.0, 2.0 * np.pi, int(rescatter.sum()))
        direction[rescatter] = np.stack([np.cos(new_angle), np.sin(new_angle)], axis=1)

        capped = ~absorbed & (collisions >= max_collisions)
        n_capped += int(capped.sum())
        keep = ~absorbed & ~capped
        pos, direction, collisions = pos[keep], direction[keep], collisions[keep]
    return n_capped, total


def _hop_batch(
    geometry: GridGeometry,
    source: SourceSpec,
    n: int,
    rng: np.random.Generator,
    max_collisions: int,
    tallies: np.ndarray,
) -> Tuple[int, int]:
    p_absorb = geometry.absorption_map()
    moves = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]])
    upper = np.array([geometry.nx - 1, geometry.ny - 1])

    flat = rng.choice(geometry.n_cells, size=n, p=source.distribution(geometry).reshape(-1))
    cells = np.stack(np.unravel_index(flat, geometry.shape), axis=1)
    collisions = np.zeros(n, dtype=np.int64)
    n_capped = 0
    total = 0

    while cells.shape[0]:
        cx, cy = cells[:, 0], cells[:, 1]
        np.add.at(tallies, (cx, cy), 1.0)
        collisions += 1
        total += cells.shape[0]
        absorbed = rng.random(cells.shape[0]) < p_absorb[cx, cy]
        step = moves[rng.integers(0, 4, cells.shape[0])]
        target = cells + step
        outside = np.any((target < 0) | (target > upper), axis=1)
        target[outside] = cells[outside] - step[outside]
        capped = ~absorbed & (collisions >= max_collisions)
        n_capped += int(capped.sum())
        keep = ~absorbed & ~capped
        cells, collisions = target[keep], collisions[keep]
    return n_capped, total


def simulate_particles(
    geometry: GridGeometry,
    source: SourceSpec,
    n_particles: int,
    rng: RngLike,
    max_collisions: int = 1000,
    lattice: bool = False,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> MonteCarloTally:
    """Transport ``n_particles`` and tally collisions.

    Args:
        geometry: Grid geometry
        source: Particle source
        n_particles: Number of histories
        rng: Generator, or an RngStream whose child ``b`` drives batch ``b``
        max_collisions: Collisions after which a history is stopped and counted as capped
        lattice: Replace free flights by one-cell hops along the axes
        batch_size: Histories per vectorized batch

    Returns:
        MonteCarloTally with the per-shot flux map and counters
    """
    if n_particles < 1:
        raise ValueError("n_particles must be at least 1")
    source.validate(geometry)
    tallies = np.zeros(geometry.shape)
    kernel = _hop_batch if lattice else _transport_batch
    n_capped = 0
    n_collisions = 0
    for b, start in enumerate(range(0, n_particles, batch_size)):
        n = min(batch_size, n_particles - start)
        gen = rng.child(b).generator() if isinstance(rng, RngStream) else rng
        capped, total = kernel(geometry, source, n, gen, max_collisions, tallies)
        n_capped += capped
        n_collisions += total
    if n_capped:
        logger.warning(
            "%d of %d histories hit the %d-collision cap", n_capped, n_particles, max_collisions
        )
    logger.debug("%d particles, %d collisions", n_particles, n_collisions)
    flux = FluxMap(tallies / n_particles, n_particles, Normalization.PER_SHOT)
    return MonteCarloTally(flux, n_capped, n_collisions)


def run_mc(
    geometry: GridGeometry,
    source: SourceSpec,
    n_particles: int,
    rng: RngLike,
    max_collisions: int = 1000,
    lattice: bool = False,
) -> FluxMap:
    """Per-shot collision-tally flux map; see ``simulate_particles``."""
    return simulate_particles(geometry, source, n_particles, rng, max_collisions, lattice).flux


def trace_particles(
    geometry: GridGeometry,
    source: SourceSpec,
    n_particles: int,
    rng: np.random.Generator,
    max_collisions: int = 1000,
) -> List[Trajectory]:
    """Follow particles one at a time and record every real collision."""
    majorant = float(geometry.sigma_t_map().max())
    lx, ly = geometry.extent
    trajectories = []
    for _ in range(n_particles):
        pos = sample_source(source, geometry, rng)
        angle = rng.uniform(0.0, 2.0 * np.pi)
        direction = np.array([np.cos(angle), np.sin(angle)])
        traj = Trajectory()
        while True:
            pos = pos + sample_flight(majorant, rng) * direction
            pos[0], direction[0] = _reflect(pos[0], direction[0], lx)
            pos[1], direction[1] = _reflect(pos[1], direction[1], ly)
            cx, cy = _cells(pos[None, :], geometry)
            material = geometry.material_at((int(cx[0]), int(cy[0])))
            if rng.random() * majorant >= material.sigma_t:
                continue
            traj.points.append((float(pos[0]), float(pos[1])))
            outcome = sample_collision(material, rng)
            if outcome.absorbed:
                break
            if len(traj.points) >= max_collisions:
                traj.termination = Termination.CAPPED
                break
            direction = np.array([np.cos(outcome.angle), np.sin(outcome.angle)])
        trajectories.append(traj)
    return trajectories


class MonteCarloSolver(BaseSolver):
    """Continuous (or lattice) Monte Carlo as a flux solver."""

    def __init__(
        self,
        geometry: GridGeometry,
        source: SourceSpec,
        n_particles: int = 500_000,
        max_collisions: int = 1000,
        lattice: bool = False,
    ):
        super().__init__("mc", geometry, source)
        self.n_particles = n_particles
        self.max_collisions = max_collisions
        self.lattice = lattice

    def solve(self, stream: Optional[RngStream] = None) -> SolverResult:
        if stream is None:
            raise ValueError(f"{self.solver_name} needs a random stream")
        tally = simulate_particles(
            self.geometry,
            self.source,
            self.n_particles,
            stream,
            self.max_collisions,
            self.lattice,
        )
        summary = {
            "particles": self.n_particles,
            "collisions": tally.n_collisions,
            "capped": tally.n_capped,
        }
        return SolverResult(self.solver_name, tally.flux, summary, tally)
