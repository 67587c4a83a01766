"""Grid discretization of the 2D transport problem."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

import numpy as np
import yaml

from src.errors import ConfigError, GeometryError

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]

# Physical extent of the default domain along x, in cm.
DEFAULT_DOMAIN_SIZE = 10.0

ARM = "arm"
OBSTACLE = "obstacle"


class Direction(Enum):
    """Lattice moves; ``y`` grows upwards."""

    RIGHT = (1, 0)
    UP = (0, 1)
    LEFT = (-1, 0)
    DOWN = (0, -1)

    @property
    def dx(self) -> int:
        return self.value[0]

    @property
    def dy(self) -> int:
        return self.value[1]

    @property
    def opposite(self) -> "Direction":
        return Direction((-self.dx, -self.dy))


@dataclass(frozen=True)
class Material:
    """Homogenized macroscopic cross sections (1/cm)."""

    name: str
    sigma_t: float
    sigma_s: float
    sigma_a: float

    def __post_init__(self):
        if self.sigma_t <= 0:
            raise GeometryError(f"material {self.name!r}: sigma_t must be positive")
        if self.sigma_s < 0 or self.sigma_a < 0:
            raise GeometryError(f"material {self.name!r}: cross sections must be nonnegative")
        if abs(self.sigma_s + self.sigma_a - self.sigma_t) > 1e-12:
            raise GeometryError(
                f"material {self.name!r}: sigma_s + sigma_a = "
                f"{self.sigma_s + self.sigma_a!r} differs from sigma_t = {self.sigma_t!r}"
            )

    @property
    def p_absorb(self) -> float:
        return self.sigma_a / (self.sigma_a + self.sigma_s)

    @property
    def p_scatter(self) -> float:
        return self.sigma_s / (self.sigma_a + self.sigma_s)


@dataclass(frozen=True, eq=False)
class GridGeometry:
    """``2**n_x x 2**n_y`` cell grid; ``cell_material[x, y]`` indexes ``materials``."""

    n_x: int
    n_y: int
    cell_size: float
    materials: Tuple[Material, ...]
    cell_material: np.ndarray

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise GeometryError("grid needs at least one qubit per axis")
        if self.cell_size <= 0:
            raise GeometryError("cell_size must be positive")
        shape = (1 << self.n_x, 1 << self.n_y)
        cells = np.array(self.cell_material, dtype=np.int64, copy=True)
        if cells.shape != shape:
            raise GeometryError(f"cell_material has shape {cells.shape}, expected {shape}")
        bad = np.argwhere((cells < 0) | (cells >= len(self.materials)))
        if bad.size:
            x, y = bad[0]
            raise GeometryError(f"cell ({x}, {y}) refers to undefined material {cells[x, y]}")
        cells.setflags(write=False)
        object.__setattr__(self, "cell_material", cells)
        object.__setattr__(self, "materials", tuple(self.materials))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridGeometry):
            return NotImplemented
        return (
            self.n_x == other.n_x
            and self.n_y == other.n_y
            and self.cell_size == other.cell_size
            and self.materials == other.materials
            and np.array_equal(self.cell_material, other.cell_material)
        )

    @property
    def nx(self) -> int:
        """Number of cells along x."""
        return 1 << self.n_x

    @property
    def ny(self) -> int:
        """Number of cells along y."""
        return 1 << self.n_y

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def extent(self) -> Tuple[float, float]:
        """Physical size of the domain in cm."""
        return (self.nx * self.cell_size, self.ny * self.cell_size)

    def contains(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.nx and 0 <= y < self.ny

    def check_cell(self, cell: Cell) -> None:
        if not self.contains(cell):
            raise GeometryError(f"cell {tuple(cell)} outside the {self.nx}x{self.ny} grid")

    def material_at(self, cell: Cell) -> Material:
        self.check_cell(cell)
        return self.materials[self.cell_material[cell[0], cell[1]]]

    def position_index(self, cell: Cell) -> int:
        """Basis value of the position register (x bits low, y bits high)."""
        self.check_cell(cell)
        return int(cell[0]) + (int(cell[1]) << self.n_x)

    def cell_of(self, index: int) -> Cell:
        return (index & (self.nx - 1), index >> self.n_x)

    def absorption_map(self) -> np.ndarray:
        """``p_a`` for every cell, shape ``(nx, ny)``."""
        table = np.array([m.p_absorb for m in self.materials])
        return table[self.cell_material]

    def sigma_t_map(self) -> np.ndarray:
        table = np.array([m.sigma_t for m in self.materials])
        return table[self.cell_material]

    def material_id(self, name: str) -> int:
        for i, m in enumerate(self.materials):
            if m.name == name:
                return i
        raise GeometryError(f"unknown material {name!r}")


def flatten_cells(values: np.ndarray) -> np.ndarray:
    """``(nx, ny)`` array to a vector indexed by position-register value."""
    return np.asarray(values).reshape(-1, order="F")


def unflatten_cells(vector: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    return np.asarray(vector).reshape(shape, order="F")


class SourceKind(Enum):
    POINT = "point"
    WEIGHTED = "weighted"


@dataclass(frozen=True)
class SourceSpec:
    """Point source or nonnegative weights over cells."""

    kind: SourceKind
    weights: Tuple[Tuple[Cell, float], ...]

    @classmethod
    def point(cls, cell: Cell) -> "SourceSpec":
        return cls(SourceKind.POINT, (((int(cell[0]), int(cell[1])), 1.0),))

    @classmethod
    def weighted(cls, weights: Mapping[Cell, float]) -> "SourceSpec":
        items = tuple(((int(c[0]), int(c[1])), float(w)) for c, w in weights.items())
        return cls(SourceKind.WEIGHTED, items)

    @classmethod
    def uniform(cls, geometry: GridGeometry) -> "SourceSpec":
        cells = [(x, y) for y in range(geometry.ny) for x in range(geometry.nx)]
        return cls.weighted({c: 1.0 for c in cells})

    @property
    def cell(self) -> Cell:
        """Cell of a point source."""
        if self.kind is not SourceKind.POINT:
            raise GeometryError("only point sources have a single cell")
        return self.weights[0][0]

    def validate(self, geometry: GridGeometry) -> None:
        if not self.weights:
            raise GeometryError("source has no cells")
        total = 0.0
        for cell, w in self.weights:
            geometry.check_cell(cell)
            if w < 0:
                raise GeometryError(f"source weight {w} at {cell} is negative")
            total += w
        if total <= 0:
            raise GeometryError("source weights sum to zero")

    def distribution(self, geometry: GridGeometry) -> np.ndarray:
        """Normalized source density, shape ``(nx, ny)``."""
        self.validate(geometry)
        dist = np.zeros(geometry.shape)
        for (x, y), w in self.weights:
            dist[x, y] += w
        return dist / dist.sum()


@dataclass(frozen=True)
class DetectorRegion:
    """Set of detector cells."""

    cells: FrozenSet[Cell] = field(default_factory=frozenset)

    @classmethod
    def of(cls, cells: Iterable[Cell]) -> "DetectorRegion":
        return cls(frozenset((int(x), int(y)) for x, y in cells))

    def validate(self, geometry: GridGeometry) -> None:
        if not self.cells:
            raise GeometryError("detector region is empty")
        for cell in self.cells:
            geometry.check_cell(cell)

    def mask(self, geometry: GridGeometry) -> np.ndarray:
        self.validate(geometry)
        mask = np.zeros(geometry.shape, dtype=bool)
        for x, y in self.cells:
            mask[x, y] = True
        return mask


def cell_probabilities(geometry: GridGeometry, cell: Cell) -> Tuple[float, Dict[Direction, float]]:
    """Interaction probabilities of a cell.

    Args:
        geometry: Grid geometry
        cell: ``(x, y)`` cell index

    Returns:
        Tuple of (absorption/stay probability, scattering probability per direction)
    """
    material = geometry.material_at(cell)
    p_dir = material.p_scatter / 4.0
    return material.p_absorb, {d: p_dir for d in Direction}


def bypass_materials() -> Tuple[Material, Material]:
    """Arm and obstacle materials of the bypass problem (both sigma_t = 1)."""
    return (
        Material(ARM, 1.0, 0.9, 0.1),
        Material(OBSTACLE, 1.0, 0.1, 0.9),
    )


def build_bypass_geometry(
    n_x: int,
    n_y: int,
    cell_size: float = 1.0,
    materials: Optional[Tuple[Material, Material]] = None,
) -> GridGeometry:
    """Two-material bypass layout.

    The obstacle fills columns ``[nx/4, 3nx/4)`` and rows ``[ny/4, 3ny/4)``;
    everything else is arm material, leaving channels along all four edges.

    Args:
        n_x: Qubits along x (at least 2)
        n_y: Qubits along y (at least 2)
        cell_size: Cell edge in cm
        materials: Optional (arm, obstacle) pair replacing the default materials

    Returns:
        Bypass geometry
    """
    if n_x < 2 or n_y < 2:
        raise GeometryError("bypass geometry needs at least 2 qubits per axis")
    arm, obstacle = materials or bypass_materials()
    nx, ny = 1 << n_x, 1 << n_y
    cells = np.zeros((nx, ny), dtype=np.int64)
    cells[nx // 4 : 3 * nx // 4, ny // 4 : 3 * ny // 4] = 1
    return GridGeometry(n_x, n_y, float(cell_size), (arm, obstacle), cells)


# Config parsing


def _parse_cell(raw: Any, what: str) -> Cell:
    try:
        x, y = raw
        return (int(x), int(y))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{what}: expected [x, y], got {raw!r}") from e


def _parse_materials(raw: Mapping[str, Any]) -> Tuple[Material, ...]:
    materials = []
    for name, props in raw.items():
        try:
            materials.append(
                Material(
                    str(name),
                    float(props["sigma_t"]),
                    float(props["sigma_s"]),
                    float(props["sigma_a"]),
                )
            )
        except KeyError as e:
            raise ConfigError(f"material {name!r} is missing {e.args[0]}") from e
        except GeometryError as e:
            raise ConfigError(str(e)) from e
    return tuple(materials)


def geometry_from_dict(data: Mapping[str, Any]) -> Tuple[GridGeometry, SourceSpec, DetectorRegion]:
    """Build validated domain objects from a parsed geometry document."""
    if not isinstance(data, Mapping):
        raise ConfigError("geometry config must be a mapping")
    grid = data.get("grid", {})
    try:
        n_x = int(grid["n_x"])
        n_y = int(grid.get("n_y", n_x))
    except KeyError as e:
        raise ConfigError("grid.n_x is required") from e
    if "cell_size" in grid:
        cell_size = float(grid["cell_size"])
    else:
        cell_size = float(grid.get("domain_size", DEFAULT_DOMAIN_SIZE)) / (1 << n_x)

    materials = _parse_materials(data.get("materials", {}))
    layout = data.get("layout", {"preset": "bypass"})
    try:
        if layout.get("preset") == "bypass":
            by_name = {m.name: m for m in materials}
            pair = None
            if ARM in by_name and OBSTACLE in by_name:
                pair = (by_name[ARM], by_name[OBSTACLE])
            geometry = build_bypass_geometry(n_x, n_y, cell_size, pair)
        elif "cells" in layout:
            names = [m.name for m in materials]
            rows = layout["cells"]
            if len(rows) != 1 << n_y:
                raise ConfigError(f"layout.cells needs {1 << n_y} rows, got {len(rows)}")
            cells = np.zeros((1 << n_x, 1 << n_y), dtype=np.int64)
            for y, row in enumerate(rows):
                if len(row) != 1 << n_x:
                    raise ConfigError(f"layout.cells row {y} needs {1 << n_x} entries")
                for x, name in enumerate(row):
                    if name not in names:
                        raise ConfigError(f"cell ({x}, {y}) uses undefined material {name!r}")
                    cells[x, y] = names.index(name)
            geometry = GridGeometry(n_x, n_y, cell_size, materials, cells)
        else:
            raise ConfigError("layout needs either 'preset: bypass' or 'cells'")
    except ConfigError:
        raise
    except GeometryError as e:
        raise ConfigError(str(e)) from e

    source_raw = data.get("source", {"point": [0, geometry.ny // 2]})
    if "point" in source_raw:
        source = SourceSpec.point(_parse_cell(source_raw["point"], "source.point"))
    elif "weighted" in source_raw:
        weights = {
            _parse_cell(entry["cell"], "source.weighted"): float(entry["weight"])
            for entry in source_raw["weighted"]
        }
        source = SourceSpec.weighted(weights)
    elif source_raw.get("uniform"):
        source = SourceSpec.uniform(geometry)
    else:
        raise ConfigError("source needs one of 'point', 'weighted' or 'uniform'")

    detector_raw = data.get("detector", {"cells": [[geometry.nx - 1, geometry.ny // 2]]})
    detector = DetectorRegion.of(
        _parse_cell(c, "detector.cells") for c in detector_raw.get("cells", [])
    )
    try:
        source.validate(geometry)
        detector.validate(geometry)
    except GeometryError as e:
        raise ConfigError(str(e)) from e
    return geometry, source, detector


def load_geometry(
    config: Union[str, Mapping[str, Any]],
) -> Tuple[GridGeometry, SourceSpec, DetectorRegion]:
    """Parse YAML text (or an already-parsed mapping) into validated domain objects.

    Args:
        config: YAML document text or mapping

    Returns:
        Tuple of (geometry, source, detector)
    """
    if isinstance(config, str):
        try:
            data = yaml.safe_load(config)
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse geometry config: {e}") from e
    else:
        data = config
    return geometry_from_dict(data)


def load_geometry_file(path: Union[str, Path]) -> Tuple[GridGeometry, SourceSpec, DetectorRegion]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Geometry file not found: {path}")
    try:
        return load_geometry(path.read_text(encoding="utf-8"))
    except ConfigError as e:
        raise ConfigError(e.msg, str(path)) from e


def geometry_to_dict(
    geometry: GridGeometry,
    source: SourceSpec,
    detector: DetectorRegion,
) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "grid": {"n_x": geometry.n_x, "n_y": geometry.n_y, "cell_size": geometry.cell_size},
        "materials": {
            m.name: {"sigma_t": m.sigma_t, "sigma_s": m.sigma_s, "sigma_a": m.sigma_a}
            for m in geometry.materials
        },
        "layout": {
            "cells": [
                [geometry.materials[geometry.cell_material[x, y]].name for x in range(geometry.nx)]
                for y in range(geometry.ny)
            ]
        },
    }
    if source.kind is SourceKind.POINT:
        data["source"] = {"point": list(source.cell)}
    else:
        data["source"] = {
            "weighted": [{"cell": list(c), "weight": w} for c, w in source.weights]
        }
    data["detector"] = {"cells": [list(c) for c in sorted(detector.cells)]}
    return data


def save_geometry(geometry: GridGeometry, source: SourceSpec, detector: DetectorRegion) -> str:
    """Serialize to YAML text accepted by ``load_geometry``."""
    return yaml.safe_dump(
        geometry_to_dict(geometry, source, detector), sort_keys=False, default_flow_style=None
    )
