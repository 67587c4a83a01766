"""Configuration management for transport experiments."""

from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from src.errors import ConfigError
from src.geometry import DetectorRegion, GridGeometry, SourceSpec, load_geometry
from src.solvers.kernel import AbsorbMode
from src.walk.coin import CoinMode

SOLVERS = ("mc", "fd", "walk-measured", "walk-amplified", "swap-score")
STOCHASTIC_SOLVERS = ("mc", "walk-measured", "swap-score")


class ExperimentConfig:
    """Loads an experiment YAML file and the geometry it references."""

    def __init__(
        self,
        config_path: Union[str, Path] = "config/experiment.yaml",
        overrides: Optional[Dict[str, Any]] = None,
    ):
        """Initialize configuration from a file.

        Args:
            config_path: Path to the experiment configuration YAML file
            overrides: Values replacing individual properties (e.g. from CLI flags)
        """
        self.config_path = Path(config_path)
        self._config: Dict[str, Any] = {}
        self._geometry: Optional[Tuple[GridGeometry, SourceSpec, DetectorRegion]] = None
        self._overrides: Dict[str, Any] = {}
        self.load()
        self.override(**(overrides or {}))

    @classmethod
    def from_dict(
        cls, data: Dict[str, Any], base_dir: Union[str, Path] = "."
    ) -> "ExperimentConfig":
        """Build a configuration from an already-parsed mapping."""
        config = cls.__new__(cls)
        config.config_path = Path(base_dir) / "<inline>"
        config._config = dict(data)
        config._geometry = None
        config._overrides = {}
        return config

    def load(self) -> None:
        """Load configuration from the YAML file."""
        if not self.config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {self.config_path}")

        with open(self.config_path, encoding="utf-8") as f:
            try:
                self._config = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigError(
                    f"cannot parse experiment config: {e}", str(self.config_path)
                ) from e
        self._geometry = None

    def override(self, **values: Any) -> None:
        """Replace properties; ``None`` values are ignored."""
        self._overrides.update({k: v for k, v in values.items() if v is not None})

    def _get(self, key: str, section: Optional[str], name: str, default: Any) -> Any:
        if key in self._overrides:
            return self._overrides[key]
        table = self._config if section is None else (self._config.get(section) or {})
        value = table.get(name, default)
        return default if value is None else value

    # Geometry

    def _load_geometry(self) -> Tuple[GridGeometry, SourceSpec, DetectorRegion]:
        if self._geometry is None:
            ref = self._config.get("geometry")
            if ref is None:
                raise ConfigError("no geometry configured", str(self.config_path))
            if isinstance(ref, dict):
                self._geometry = load_geometry(ref)
            else:
                path = self.config_path.parent / str(ref)
                if not path.exists():
                    raise FileNotFoundError(f"Geometry file not found: {path}")
                try:
                    self._geometry = load_geometry(path.read_text(encoding="utf-8"))
                except ConfigError as e:
                    raise ConfigError(e.msg, str(path)) from e
        return self._geometry

    @property
    def geometry(self) -> GridGeometry:
        return self._load_geometry()[0]

    @property
    def source(self) -> SourceSpec:
        return self._load_geometry()[1]

    @property
    def detector(self) -> DetectorRegion:
        return self._load_geometry()[2]

    # Run

    @property
    def solvers(self) -> List[str]:
        """Selected solvers, in the order given."""
        selected = self._get("solvers", None, "solvers", [])
        if isinstance(selected, str):
            selected = [selected]
        return list(selected)

    @property
    def seed(self) -> int:
        return int(self._get("seed", None, "seed", 12345))

    @property
    def output_dir(self) -> Path:
        return Path(self._get("output_dir", None, "output_dir", "output"))

    # Monte Carlo

    @property
    def particles(self) -> int:
        return int(self._get("particles", "mc", "particles", 500_000))

    @property
    def max_collisions(self) -> int:
        return int(self._get("max_collisions", "mc", "max_collisions", 1000))

    @property
    def mc_lattice(self) -> bool:
        return bool(self._get("lattice", "mc", "lattice", False))

    @property
    def trace_particles(self) -> int:
        """Histories written to the trajectory dump (0 disables it)."""
        value = int(self._get("trace_particles", "mc", "trace", 0))
        if value < 0:
            raise ConfigError("mc.trace must be nonnegative", str(self.config_path))
        return value

    # Finite differences

    @property
    def fd_tol(self) -> float:
        return float(self._get("fd_tol", "fd", "tol", 1e-12))

    @property
    def fd_floor(self) -> float:
        return float(self._get("fd_floor", "fd", "floor", 1e-10))

    @property
    def fd_iterations(self) -> Optional[int]:
        value = self._get("fd_iterations", "fd", "iterations", None)
        return None if value is None else int(value)

    # Walks

    @property
    def steps(self) -> int:
        return int(self._get("steps", "walk", "steps", 10))

    @property
    def shots(self) -> int:
        return int(self._get("shots", "walk", "shots", 1000))

    @property
    def absorb_mode(self) -> AbsorbMode:
        value = self._get("absorb_mode", "walk", "absorb_mode", AbsorbMode.SELF_LOOP.value)
        try:
            return AbsorbMode(value)
        except ValueError as e:
            raise ConfigError(f"unknown absorb mode {value!r}") from e

    @property
    def coin_mode(self) -> CoinMode:
        value = self._get("coin_mode", "walk", "coin_mode", CoinMode.FAST.value)
        try:
            return CoinMode(value)
        except ValueError as e:
            raise ConfigError(f"unknown coin mode {value!r}") from e

    @property
    def amplified_steps(self) -> int:
        return int(self._get("amplified_steps", "amplified", "steps", 2))

    @property
    def grover_k(self) -> Union[int, str]:
        value = self._get("grover_k", "amplified", "k", "auto")
        if value == "auto":
            return value
        try:
            return int(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"grover k must be an integer or 'auto', got {value!r}") from e

    @property
    def swap_steps(self) -> int:
        return int(self._get("swap_steps", "swap", "steps", 2))

    @property
    def swap_shots(self) -> int:
        return int(self._get("swap_shots", "swap", "shots", self.shots))

    # Comparison

    @property
    def slice_axis(self) -> str:
        return str(self._get("slice_axis", "slice", "axis", "x"))

    @property
    def slice_coordinate(self) -> float:
        return float(self._get("slice_coordinate", "slice", "coordinate", 5.0))

    def validate(self) -> None:
        """Check solver selection and seeds; loads the geometry."""
        selected = self.solvers
        if not selected:
            raise ConfigError("no solver selected", str(self.config_path))
        unknown = [s for s in selected if s not in SOLVERS]
        if unknown:
            raise ConfigError(f"unknown solver(s): {', '.join(unknown)}", str(self.config_path))
        if any(s in STOCHASTIC_SOLVERS for s in selected) and self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer", str(self.config_path))
        if self.slice_axis not in ("x", "y"):
            raise ConfigError(f"slice axis must be 'x' or 'y', got {self.slice_axis!r}")
        width, height = self.geometry.extent
        length = width if self.slice_axis == "x" else height
        if not 0.0 <= self.slice_coordinate <= length:
            raise ConfigError(
                f"slice {self.slice_axis} = {self.slice_coordinate:g} cm outside the domain "
                f"[0, {length:g}]",
                str(self.config_path),
            )

    def to_dict(self) -> Dict[str, Any]:
        """Effective configuration, for run manifests."""
        return {
            "solvers": self.solvers,
            "seed": self.seed,
            "mc": {
                "particles": self.particles,
                "max_collisions": self.max_collisions,
                "lattice": self.mc_lattice,
                "trace": self.trace_particles,
            },
            "fd": {"tol": self.fd_tol, "floor": self.fd_floor, "iterations": self.fd_iterations},
            "walk": {
                "steps": self.steps,
                "shots": self.shots,
                "absorb_mode": self.absorb_mode.value,
                "coin_mode": self.coin_mode.value,
            },
            "amplified": {"steps": self.amplified_steps, "k": self.grover_k},
            "swap": {"steps": self.swap_steps, "shots": self.swap_shots},
            "slice": {"axis": self.slice_axis, "coordinate": self.slice_coordinate},
        }
