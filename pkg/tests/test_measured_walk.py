"""Tests for the measured quantum walk."""

import numpy as np
import pytest

from src.comparison import compare_maps, compare_vectors, extract_slice
from src.geometry import SourceSpec
from src.solvers.base_solver import Normalization
from src.solvers.finite_difference import run_fd
from src.solvers.kernel import AbsorbMode, expected_walk_flux, iterate_distribution
from src.solvers.measured_walk import MeasuredWalkSolver, run_measured_walk
from src.solvers.rng import RngStream
from src.walk.coin import CoinMode
from tests.conftest import ABSORBER, homogeneous


def test_same_seed_same_flux(small_bypass):
    source = SourceSpec.point((0, 2))
    a = run_measured_walk(small_bypass, source, 5, 500, np.random.default_rng(7))
    b = run_measured_walk(small_bypass, source, 5, 500, np.random.default_rng(7))
    assert np.array_equal(a.flux.tallies, b.flux.tallies)


def test_self_loop_tallies_every_shot_every_step(small_bypass, rng):
    report = run_measured_walk(small_bypass, SourceSpec.point((0, 2)), 6, 300, rng)
    assert report.flux.total == 6 * 300
    assert report.flux.normalization is Normalization.PER_STEP_SUM
    assert report.steps_completed == 6
    assert not report.truncated
    assert all(a == 0 for a in report.absorbed)


def test_kill_mode_accounting(small_bypass, rng):
    report = run_measured_walk(
        small_bypass, SourceSpec.point((0, 2)), 5, 2000, rng, AbsorbMode.KILL
    )
    alive = [int(h.sum()) for h in report.step_histograms]
    assert alive[0] + report.absorbed[0] == 2000
    for t in range(1, report.steps_completed):
        assert alive[t - 1] == alive[t] + report.absorbed[t]


def test_success_rate_tracks_coin_scale(rng):
    geometry = homogeneous(2, 2)
    report = run_measured_walk(geometry, SourceSpec.point((1, 1)), 4, 10_000, rng)
    assert np.mean(report.success_rates) == pytest.approx(1 / 1.8, abs=0.02)


def test_step_histograms_follow_kernel(small_bypass, rng):
    source = SourceSpec.point((0, 2))
    n_shots = 10_000
    report = run_measured_walk(small_bypass, source, 4, n_shots, rng)
    start = source.distribution(small_bypass)
    for t, histogram in enumerate(report.step_histograms, start=1):
        expected = iterate_distribution(small_bypass, start, t)
        tv = 0.5 * np.abs(histogram / n_shots - expected).sum()
        assert tv < 3 / np.sqrt(n_shots)


def test_flux_matches_expected_walk_flux(rng):
    geometry = homogeneous(2, 2)
    source = SourceSpec.point((0, 0))
    report = run_measured_walk(geometry, source, 10, 200_000, rng)
    expected = expected_walk_flux(geometry, source, 10)
    assert compare_maps(report.flux, expected).total_variation < 0.02


@pytest.mark.slow
def test_kill_mode_flux_on_bypass(bypass, rng):
    source = SourceSpec.point((0, 4))
    report = run_measured_walk(bypass, source, 10, 100_000, rng, AbsorbMode.KILL)
    expected = expected_walk_flux(bypass, source, 10, AbsorbMode.KILL)
    assert compare_maps(report.flux, expected).total_variation < 0.05


@pytest.mark.slow
def test_kill_mode_flux_drops_inside_obstacle(bypass, rng):
    report = run_measured_walk(
        bypass, SourceSpec.point((0, 4)), 10, 100_000, rng, AbsorbMode.KILL
    )
    row = report.flux.tallies[:, 4]
    assert row[1] > row[2] > row[4]


def test_gate_mode_matches_fast_mode_distribution(small_bypass):
    source = SourceSpec.point((0, 2))
    fast = run_measured_walk(
        small_bypass, source, 2, 50_000, np.random.default_rng(1), mode=CoinMode.FAST
    )
    gate = run_measured_walk(
        small_bypass, source, 2, 50_000, np.random.default_rng(2), mode=CoinMode.GATE
    )
    assert compare_vectors(fast.flux.tallies, gate.flux.tallies).total_variation < 0.02


def test_all_shots_absorbed_truncates_run(rng):
    geometry = homogeneous(2, 2, ABSORBER)
    report = run_measured_walk(
        geometry, SourceSpec.point((1, 1)), 3, 100, rng, AbsorbMode.KILL
    )
    assert report.steps_completed == 1
    assert report.truncated
    assert report.absorbed == [100]
    assert report.flux.total == 0


def test_report_to_dict(small_bypass, rng):
    report = run_measured_walk(
        small_bypass, SourceSpec.point((0, 2)), 2, 50, rng, seed=3, config={"steps": 2}
    )
    data = report.to_dict()
    assert data["seed"] == 3
    assert data["steps_completed"] == 2
    assert len(data["steps"]) == 2
    assert sum(map(sum, data["steps"][0]["histogram"])) == 50


def test_solver_uses_stream(small_bypass):
    solver = MeasuredWalkSolver(small_bypass, SourceSpec.point((0, 2)), 3, 200)
    first = solver.solve(RngStream(5).for_solver("walk-measured"))
    again = solver.solve(RngStream(5).for_solver("walk-measured"))
    assert np.array_equal(first.flux.tallies, again.flux.tallies)
    assert first.summary["steps_completed"] == 3
    assert first.report.seed == 5
    with pytest.raises(ValueError):
        solver.solve(None)


def test_invalid_shot_count(small_bypass, rng):
    with pytest.raises(ValueError):
        run_measured_walk(small_bypass, SourceSpec.point((0, 2)), 2, 0, rng)


def test_kill_mode_expectation_is_depressed_in_obstacle(bypass):
    flux = expected_walk_flux(bypass, SourceSpec.point((0, 4)), 10, AbsorbMode.KILL).tallies
    obstacle = bypass.cell_material == bypass.material_id("obstacle")
    assert flux[obstacle].mean() < flux[~obstacle].mean()


def test_self_loop_expectation_drifts_from_fd_with_more_steps(bypass):
    source = SourceSpec.point((0, 4))
    cosines = [
        compare_maps(expected_walk_flux(bypass, source, n), run_fd(bypass, source, n_iterations=n))
        .cosine
        for n in (10, 40)
    ]
    assert cosines[1] < cosines[0]


def midline_cosine(geometry, flux, n_steps, source):
    fd = run_fd(geometry, source, n_iterations=n_steps)
    a = extract_slice(flux, "x", 5.0, geometry.cell_size).values
    b = extract_slice(fd, "x", 5.0, geometry.cell_size).values
    return compare_vectors(a, b).cosine


def test_self_loop_walk_drifts_from_fd_between_10_and_40_steps(bypass):
    source = SourceSpec.point((0, 4))
    early = run_measured_walk(bypass, source, 10, 1_000_000, np.random.default_rng(10))
    late = run_measured_walk(bypass, source, 40, 1_000_000, np.random.default_rng(40))
    early_cosine = midline_cosine(bypass, early.flux, 10, source)
    late_cosine = midline_cosine(bypass, late.flux, 40, source)
    assert early_cosine > 0.75
    assert late_cosine < 0.55
    assert late_cosine < early_cosine


@pytest.mark.slow
def test_kill_mode_midline_matches_truncated_fd(bypass, rng):
    source = SourceSpec.point((0, 4))
    report = run_measured_walk(bypass, source, 10, 200_000, rng, AbsorbMode.KILL)
    assert midline_cosine(bypass, report.flux, 10, source) > 0.9


@pytest.mark.slow
def test_homogeneous_8x8_walk_tracks_kernel_for_ten_steps():
    geometry = homogeneous(3, 3)
    source = SourceSpec.point((3, 3))
    n_shots = 100_000
    report = run_measured_walk(geometry, source, 10, n_shots, np.random.default_rng(55))
    start = source.distribution(geometry)
    for t, histogram in enumerate(report.step_histograms, start=1):
        expected = iterate_distribution(geometry, start, t)
        tv = 0.5 * np.abs(histogram / n_shots - expected).sum()
        assert tv < 0.02, t
