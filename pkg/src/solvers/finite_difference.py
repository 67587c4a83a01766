"""Deterministic lattice baseline: fixed point of ``phi = K phi + s``."""

import logging
from typing import Optional

import numpy as np
import scipy.sparse.linalg

from src.errors import ConvergenceError
from src.geometry import GridGeometry, SourceSpec, flatten_cells, unflatten_cells
from src.solvers.base_solver import BaseSolver, FluxMap, Normalization, SolverResult
from src.solvers.kernel import survival_matrix
from src.solvers.rng import RngStream

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_FLOOR = 1e-10
DEFAULT_MAX_ITERATIONS = 100_000


def _spectral_radius(kernel) -> float:
    try:
        values = scipy.sparse.linalg.eigs(kernel, k=1, which="LM", return_eigenvectors=False)
        return float(np.abs(values[0]))
    except (scipy.sparse.linalg.ArpackNoConvergence, ValueError, TypeError):
        return float(np.max(np.abs(np.linalg.eigvals(kernel.toarray()))))


def run_fd(
    geometry: GridGeometry,
    source: SourceSpec,
    tol: float = DEFAULT_TOL,
    floor: float = DEFAULT_FLOOR,
    n_iterations: Optional[int] = None,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> FluxMap:
    """Solve the lattice fixed point by iteration.

    ``K`` is the survival kernel (each direction carries ``(1 - p_a) / 4``),
    ``s`` the normalized source. Starting from ``phi = s`` the update
    ``phi <- K phi + s`` runs until the max-norm change drops below ``tol``,
    or for exactly ``n_iterations`` updates when given. Entries below
    ``floor`` are raised to ``floor``.

    Args:
        geometry: Grid geometry
        source: Particle source
        tol: Convergence threshold on the max-norm update
        floor: Smallest reported flux value
        n_iterations: Truncate the series after this many kernel applications
        max_iterations: Iteration cap

    Returns:
        Per-shot flux map
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    kernel = survival_matrix(geometry)
    s = flatten_cells(source.distribution(geometry))
    phi = s.copy()
    if n_iterations is not None:
        for _ in range(n_iterations):
            phi = kernel @ phi + s
        iterations = n_iterations
    else:
        for iterations in range(1, max_iterations + 1):
            nxt = kernel @ phi + s
            delta = float(np.max(np.abs(nxt - phi)))
            phi = nxt
            if delta < tol:
                break
        else:
            radius = _spectral_radius(kernel)
            raise ConvergenceError(
                f"no convergence after {max_iterations} iterations; kernel spectral radius "
                f"{radius:.6g} (a radius of 1 means no absorption anywhere)"
            )
    logger.debug("fd: %d iterations", iterations)
    phi = np.maximum(phi, floor)
    return FluxMap(unflatten_cells(phi, geometry.shape), 1, Normalization.PER_SHOT)


class FiniteDifferenceSolver(BaseSolver):
    """Lattice fixed-point solver."""

    stochastic = False

    def __init__(
        self,
        geometry: GridGeometry,
        source: SourceSpec,
        tol: float = DEFAULT_TOL,
        floor: float = DEFAULT_FLOOR,
        n_iterations: Optional[int] = None,
    ):
        super().__init__("fd", geometry, source)
        self.tol = tol
        self.floor = floor
        self.n_iterations = n_iterations

    def solve(self, stream: Optional[RngStream] = None) -> SolverResult:
        flux = run_fd(self.geometry, self.source, self.tol, self.floor, self.n_iterations)
        return SolverResult(self.solver_name, flux, {"total_flux": flux.total})
