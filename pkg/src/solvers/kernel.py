"""Classical Markov kernels of the lattice walk.

Matrices are column-stochastic ``scipy.sparse`` matrices over flat cell
indices ``x + y * nx``: entry ``[dest, src]`` is the probability of moving
from ``src`` to ``dest`` in one step. A move that would leave the grid is
replaced by the opposite move.
"""

from enum import Enum
from typing import Tuple

import numpy as np
import scipy.sparse

from src.errors import GeometryError
from src.geometry import Direction, GridGeometry, SourceSpec, flatten_cells, unflatten_cells
from src.solvers.base_solver import FluxMap, Normalization


class AbsorbMode(Enum):
    """What a stay outcome of the coin means for a shot."""

    SELF_LOOP = "self-loop"
    KILL = "kill"


def _move_entries(geometry: GridGeometry) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    nx, ny = geometry.shape
    xs, ys = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    xs, ys = flatten_cells(xs), flatten_cells(ys)
    src = xs + ys * nx
    weight = (1.0 - flatten_cells(geometry.absorption_map())) / 4.0
    rows, cols, vals = [], [], []
    for d in Direction:
        tx, ty = xs + d.dx, ys + d.dy
        outside = (tx < 0) | (tx >= nx) | (ty < 0) | (ty >= ny)
        tx = np.where(outside, xs - d.dx, tx)
        ty = np.where(outside, ys - d.dy, ty)
        rows.append(tx + ty * nx)
        cols.append(src)
        vals.append(weight)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def survival_matrix(geometry: GridGeometry) -> scipy.sparse.csr_matrix:
    """Move-only kernel: each direction carries ``(1 - p_a) / 4``, no self-loop."""
    rows, cols, vals = _move_entries(geometry)
    n = geometry.n_cells
    return scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def transition_matrix(geometry: GridGeometry) -> scipy.sparse.csr_matrix:
    """Full step kernel: the survival kernel plus a self-loop of weight ``p_a``."""
    stay = scipy.sparse.diags(flatten_cells(geometry.absorption_map()))
    return (survival_matrix(geometry) + stay).tocsr()


def _check_distribution(geometry: GridGeometry, distribution: np.ndarray) -> np.ndarray:
    dist = np.asarray(distribution, dtype=np.float64)
    if dist.shape != geometry.shape:
        raise GeometryError(f"distribution has shape {dist.shape}, expected {geometry.shape}")
    if np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-9:
        raise GeometryError("position distribution must be nonnegative and sum to 1")
    return dist


def exact_step_distribution(geometry: GridGeometry, distribution: np.ndarray) -> np.ndarray:
    """Advance a position distribution by one classical walk step.

    Args:
        geometry: Grid geometry
        distribution: ``(nx, ny)`` probabilities summing to 1

    Returns:
        Distribution after one step, same shape
    """
    dist = _check_distribution(geometry, distribution)
    out = transition_matrix(geometry) @ flatten_cells(dist)
    return unflatten_cells(out, geometry.shape)


def iterate_distribution(
    geometry: GridGeometry, distribution: np.ndarray, n_steps: int
) -> np.ndarray:
    dist = _check_distribution(geometry, distribution)
    kernel = transition_matrix(geometry)
    vec = flatten_cells(dist)
    for _ in range(n_steps):
        vec = kernel @ vec
    return unflatten_cells(vec, geometry.shape)


def expected_walk_flux(
    geometry: GridGeometry,
    source: SourceSpec,
    n_steps: int,
    absorb_mode: AbsorbMode = AbsorbMode.SELF_LOOP,
) -> FluxMap:
    """Expected per-shot tallies of the measured walk over steps ``1..n_steps``.

    Self-loop shots follow the full kernel; in kill mode a stay outcome ends
    the shot, leaving the survival kernel.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    if absorb_mode is AbsorbMode.KILL:
        kernel = survival_matrix(geometry)
    else:
        kernel = transition_matrix(geometry)
    vec = flatten_cells(source.distribution(geometry))
    total = np.zeros_like(vec)
    for _ in range(n_steps):
        vec = kernel @ vec
        total += vec
    return FluxMap(unflatten_cells(total, geometry.shape), 1, Normalization.PER_SHOT)
