"""Tests for grids, materials, sources, detectors and geometry config files."""

import numpy as np
import pytest

from src.errors import ConfigError, GeometryError
from src.geometry import (
    DetectorRegion,
    Direction,
    GridGeometry,
    Material,
    SourceSpec,
    build_bypass_geometry,
    cell_probabilities,
    flatten_cells,
    load_geometry,
    load_geometry_file,
    save_geometry,
    unflatten_cells,
)

BYPASS_YAML = """
grid:
  n_x: 3
  n_y: 3
  domain_size: 10.0
materials:
  arm: {sigma_t: 1.0, sigma_s: 0.9, sigma_a: 0.1}
  obstacle: {sigma_t: 1.0, sigma_s: 0.1, sigma_a: 0.9}
layout:
  preset: bypass
source:
  point: [0, 4]
detector:
  cells: [[7, 4]]
"""


def test_bypass_layout(bypass):
    assert bypass.shape == (8, 8)
    assert bypass.cell_size == 1.25
    assert bypass.extent == (10.0, 10.0)
    obstacle = bypass.material_id("obstacle")
    blocked = np.argwhere(bypass.cell_material == obstacle)
    assert len(blocked) == 16
    assert blocked.min(axis=0).tolist() == [2, 2]
    assert blocked.max(axis=0).tolist() == [5, 5]
    assert bypass.material_at((0, 0)).name == "arm"
    assert bypass.material_at((3, 4)).p_absorb == pytest.approx(0.9)


def test_bypass_needs_two_qubits_per_axis():
    with pytest.raises(GeometryError):
        build_bypass_geometry(1, 3)


def test_material_cross_sections_must_add_up():
    with pytest.raises(GeometryError):
        Material("bad", 1.0, 0.5, 0.2)
    with pytest.raises(GeometryError):
        Material("bad", 0.0, 0.0, 0.0)


def test_position_index_puts_x_in_low_bits(bypass):
    assert bypass.position_index((3, 5)) == 3 + 5 * 8
    assert bypass.cell_of(43) == (3, 5)
    values = np.arange(64).reshape(8, 8)
    flat = flatten_cells(values)
    for cell in [(0, 0), (7, 0), (2, 6), (7, 7)]:
        assert flat[bypass.position_index(cell)] == values[cell]
    assert np.array_equal(unflatten_cells(flat, (8, 8)), values)


def test_position_index_outside_grid(bypass):
    with pytest.raises(GeometryError):
        bypass.position_index((8, 0))


def test_cell_probabilities_sum_to_one(bypass):
    p_a, moves = cell_probabilities(bypass, (0, 0))
    assert p_a == pytest.approx(0.1)
    assert set(moves) == set(Direction)
    assert p_a + sum(moves.values()) == pytest.approx(1.0)


def test_direction_opposites():
    assert Direction.RIGHT.opposite is Direction.LEFT
    assert Direction.UP.opposite is Direction.DOWN


def test_weighted_source_distribution(small_bypass):
    source = SourceSpec.weighted({(0, 0): 1.0, (3, 2): 3.0})
    dist = source.distribution(small_bypass)
    assert dist.sum() == pytest.approx(1.0)
    assert dist[3, 2] == pytest.approx(0.75)


def test_source_validation(small_bypass):
    with pytest.raises(GeometryError):
        SourceSpec.weighted({(0, 0): -1.0}).validate(small_bypass)
    with pytest.raises(GeometryError):
        SourceSpec.weighted({(0, 0): 0.0}).validate(small_bypass)
    with pytest.raises(GeometryError):
        SourceSpec.point((4, 0)).validate(small_bypass)
    with pytest.raises(GeometryError):
        _ = SourceSpec.uniform(small_bypass).cell


def test_detector_validation(small_bypass):
    with pytest.raises(GeometryError):
        DetectorRegion.of([]).validate(small_bypass)
    mask = DetectorRegion.of([(1, 2)]).mask(small_bypass)
    assert mask.sum() == 1 and mask[1, 2]


def test_load_bypass_config(bypass):
    geometry, source, detector = load_geometry(BYPASS_YAML)
    assert geometry == bypass
    assert source.cell == (0, 4)
    assert detector.cells == frozenset({(7, 4)})


def test_default_source_and_detector():
    geometry, source, detector = load_geometry({"grid": {"n_x": 2}})
    assert geometry.shape == (4, 4)
    assert geometry.cell_size == pytest.approx(2.5)
    assert source.cell == (0, 2)
    assert detector.cells == frozenset({(3, 2)})


def test_uniform_and_missing_source():
    geometry, source, _ = load_geometry({"grid": {"n_x": 2}, "source": {"uniform": True}})
    assert np.allclose(source.distribution(geometry), 1 / 16)
    with pytest.raises(ConfigError, match="uniform"):
        load_geometry({"grid": {"n_x": 2}, "source": {"line": [0, 0]}})


def test_explicit_layout_round_trip():
    text = """
grid: {n_x: 1, n_y: 1, cell_size: 2.0}
materials:
  water: {sigma_t: 2.0, sigma_s: 1.5, sigma_a: 0.5}
  lead: {sigma_t: 1.0, sigma_s: 0.2, sigma_a: 0.8}
layout:
  cells:
    - [water, lead]
    - [lead, water]
source:
  weighted:
    - {cell: [0, 0], weight: 1.0}
    - {cell: [1, 1], weight: 2.0}
detector:
  cells: [[1, 0]]
"""
    geometry, source, detector = load_geometry(text)
    assert geometry.material_at((1, 0)).name == "lead"
    assert geometry.material_at((0, 1)).name == "lead"
    again = load_geometry(save_geometry(geometry, source, detector))
    assert again == (geometry, source, detector)


def test_missing_material_field_names_material():
    text = BYPASS_YAML.replace(", sigma_a: 0.9}", "}")
    with pytest.raises(ConfigError, match="obstacle"):
        load_geometry(text)


def test_undefined_material_in_layout():
    text = """
grid: {n_x: 1, n_y: 1}
materials:
  arm: {sigma_t: 1.0, sigma_s: 0.9, sigma_a: 0.1}
layout:
  cells: [[arm, steel], [arm, arm]]
"""
    with pytest.raises(ConfigError, match="steel"):
        load_geometry(text)


def test_source_outside_grid_is_config_error():
    with pytest.raises(ConfigError):
        load_geometry(BYPASS_YAML.replace("point: [0, 4]", "point: [9, 4]"))


def test_unparseable_yaml():
    with pytest.raises(ConfigError):
        load_geometry("grid: [unclosed")


def test_geometry_file(tmp_path, bypass):
    path = tmp_path / "bypass.yaml"
    path.write_text(BYPASS_YAML, encoding="utf-8")
    geometry, _, _ = load_geometry_file(path)
    assert geometry == bypass
    with pytest.raises(FileNotFoundError):
        load_geometry_file(tmp_path / "missing.yaml")


def test_grid_copies_the_caller_layout():
    layout = np.zeros((4, 4), dtype=np.int64)
    geometry = GridGeometry(2, 2, 1.0, (Material("arm", 1.0, 0.9, 0.1),), layout)
    assert layout.flags.writeable
    layout[0, 0] = 5
    assert geometry.cell_material[0, 0] == 0
    assert not geometry.cell_material.flags.writeable
