"""Tests for amplitude amplification and swap-test scoring."""

import numpy as np
import pytest

from src.errors import AmplificationError, CircuitError
from src.geometry import DetectorRegion, SourceSpec
from src.quantum.statevector import StateVector, circuit_unitary, probability_of
from src.solvers.amplified_walk import (
    AmplifiedWalkSolver,
    WalkAmplifier,
    amplified_probability,
    optimal_iterations,
    run_amplified_walk,
)
from src.solvers.rng import RngStream
from src.solvers.swap_test import (
    SwapScoreSolver,
    build_swap_test,
    region_state,
    swap_test_score,
)
from tests.conftest import homogeneous

# Two steps from the corner of a homogeneous 4x4 arm grid reach (1, 1) with
# probability 2 * 0.45**2 = 0.405; each coin succeeds with probability 1 / 1.8.
BASELINE = 0.405 / 1.8**2


@pytest.fixture(scope="module")
def amplifier():
    geometry = homogeneous(2, 2)
    return WalkAmplifier(geometry, SourceSpec.point((0, 0)), DetectorRegion.of([(1, 1)]), 2)


def test_analytic_helpers():
    assert amplified_probability(0.25, 1) == pytest.approx(1.0)
    assert amplified_probability(0.3, 0) == pytest.approx(0.3)
    assert optimal_iterations(0.125) == 2
    with pytest.raises(AmplificationError):
        optimal_iterations(0.0)


def test_large_baseline_forces_zero_iterations(caplog):
    assert optimal_iterations(0.6) == 0
    assert "exceeds 0.5" in caplog.text


def test_baseline_probability(amplifier):
    assert amplifier.good_probability(amplifier.prepare()) == pytest.approx(BASELINE, abs=1e-10)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_amplification_follows_analytic_curve(amplifier, k):
    result = amplifier.run(k)
    assert result.k == k
    assert result.baseline_probability == pytest.approx(BASELINE, abs=1e-10)
    assert result.amplified_probability == pytest.approx(result.analytic_probability, abs=1e-8)


def test_auto_uses_optimal_iterations(amplifier):
    result = amplifier.run("auto")
    assert result.k == optimal_iterations(BASELINE)
    assert result.amplified_probability > 0.9


def test_operator_is_unitary(amplifier):
    assert amplifier.operator.is_unitary
    assert len(amplifier.inverse_operator) == len(amplifier.operator)


def test_unreachable_detector():
    geometry = homogeneous(2, 2)
    with pytest.raises(AmplificationError, match="unreachable"):
        run_amplified_walk(geometry, SourceSpec.point((0, 0)), 2, DetectorRegion.of([(3, 3)]))


def test_negative_iterations_rejected(amplifier):
    with pytest.raises(AmplificationError):
        amplifier.run(-1)


def test_amplified_solver_summary():
    geometry = homogeneous(2, 2)
    solver = AmplifiedWalkSolver(
        geometry, SourceSpec.point((0, 0)), DetectorRegion.of([(1, 1)]), 2, 1
    )
    result = solver.solve()
    assert result.flux is None
    assert result.summary["k"] == 1
    assert result.summary["amplified_probability"] == pytest.approx(
        amplified_probability(BASELINE, 1), abs=1e-8
    )


def test_region_state_is_uniform(small_bypass):
    phi = region_state(small_bypass, DetectorRegion.of([(0, 0), (3, 1)]))
    assert np.linalg.norm(phi) == pytest.approx(1.0)
    assert abs(phi[small_bypass.position_index((3, 1))]) ** 2 == pytest.approx(0.5)


def test_swap_test_circuit():
    circuit = build_swap_test(4, 2)
    assert circuit.n_qubits == 7
    assert set(circuit.register_map) == {"position", "score", "swap-ancilla"}
    u = circuit_unitary(circuit)
    assert np.allclose(u.conj().T @ u, np.eye(128), atol=1e-12)


def _position_state(geometry, cell):
    return StateVector.basis(geometry.n_x + geometry.n_y, geometry.position_index(cell))


def test_swap_test_identical_states(small_bypass, rng):
    state = _position_state(small_bypass, (2, 1))
    result = swap_test_score(state, DetectorRegion.of([(2, 1)]), 500, rng, small_bypass)
    assert result.exact_overlap == pytest.approx(1.0)
    assert result.estimate == pytest.approx(1.0)
    assert result.stderr == 0.0


def test_swap_test_orthogonal_states(small_bypass, rng):
    state = _position_state(small_bypass, (2, 1))
    result = swap_test_score(state, DetectorRegion.of([(0, 0)]), 500, rng, small_bypass)
    assert result.exact_overlap == pytest.approx(0.0, abs=1e-12)


def test_swap_test_partial_overlap(small_bypass, rng):
    state = _position_state(small_bypass, (2, 1))
    region = DetectorRegion.of([(2, 1), (0, 3)])
    result = swap_test_score(state, region, 20_000, rng, small_bypass)
    assert result.exact_overlap == pytest.approx(0.5)
    low, high = result.confidence_interval(z=4.0)
    assert low < 0.5 < high


def test_swap_test_on_entangled_position(rng):
    geometry = homogeneous(1, 1)
    amplitudes = np.zeros(8)
    amplitudes[0b000] = 1.0
    amplitudes[0b111] = 1.0
    state = StateVector(3, amplitudes)
    result = swap_test_score(state, DetectorRegion.of([(0, 0)]), 100, rng, geometry)
    assert result.exact_overlap == pytest.approx(0.5)


def test_swap_test_scores_walk_state(amplifier, rng):
    state = amplifier.postselected_state()
    geometry = amplifier.geometry
    index = geometry.position_index((1, 1))
    conditional = probability_of(state, amplifier.registers[0].position, index)
    assert conditional == pytest.approx(0.405, abs=1e-10)
    result = swap_test_score(state, DetectorRegion.of([(1, 1)]), 20_000, rng, geometry)
    assert result.exact_overlap == pytest.approx(conditional, abs=1e-10)
    assert abs(result.estimate - conditional) < 0.04


def test_swap_test_input_checks(small_bypass, rng):
    state = _position_state(small_bypass, (0, 0))
    with pytest.raises(ValueError):
        swap_test_score(state, DetectorRegion.of([(0, 0)]), 0, rng, small_bypass)
    with pytest.raises(CircuitError):
        swap_test_score(StateVector(2), DetectorRegion.of([(0, 0)]), 10, rng, small_bypass)


def test_swap_score_solver():
    geometry = homogeneous(2, 2)
    solver = SwapScoreSolver(
        geometry, SourceSpec.point((0, 0)), DetectorRegion.of([(1, 1)]), 2, 4000
    )
    result = solver.solve(RngStream(9).for_solver("swap-score"))
    assert result.summary["exact_overlap"] == pytest.approx(0.405, abs=1e-10)
    low, high = result.summary["interval"]
    assert low <= result.summary["overlap_estimate"] <= high


def test_swap_test_tracks_random_state_pairs(small_bypass):
    rng = np.random.default_rng(2024)
    n_shots = 100_000
    misses = 0
    for _ in range(20):
        amplitudes = rng.normal(size=16) + 1j * rng.normal(size=16)
        state = StateVector(4, amplitudes)
        size = int(rng.integers(1, 9))
        cells = [small_bypass.cell_of(int(i)) for i in rng.choice(16, size, replace=False)]
        result = swap_test_score(state, DetectorRegion.of(cells), n_shots, rng, small_bypass)
        p0 = result.p0
        sigma = 2.0 * np.sqrt(p0 * (1.0 - p0) / n_shots)
        if abs(result.estimate - result.exact_overlap) > 3.0 * sigma:
            misses += 1
    # Twenty draws at 3 sigma: a single excursion is within chance.
    assert misses <= 1


def test_swap_test_edge_cases_within_band(small_bypass, rng):
    n_shots = 100_000
    state = _position_state(small_bypass, (1, 2))
    same = swap_test_score(state, DetectorRegion.of([(1, 2)]), n_shots, rng, small_bypass)
    other = swap_test_score(state, DetectorRegion.of([(3, 0)]), n_shots, rng, small_bypass)
    assert same.estimate == pytest.approx(1.0)
    assert abs(other.estimate) < 3.0 / np.sqrt(n_shots)
