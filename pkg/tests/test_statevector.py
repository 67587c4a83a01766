"""Tests for the dense statevector engine."""

import numpy as np
import pytest
from scipy import stats

from src.errors import CircuitError, MissingRngError, PostselectionError, SimulationBudgetError
from src.quantum.circuit import (
    Circuit,
    Control,
    h,
    mc_ry,
    measure,
    reset,
    ry,
    x,
)
from src.quantum.statevector import (
    StateVector,
    apply_circuit,
    apply_uniformly_controlled_ry,
    circuit_unitary,
    marginal_probabilities,
    probability_of,
    sample_positions,
)


def test_x_sets_the_matching_index_bit():
    state = StateVector(3)
    apply_circuit(state, Circuit(3, [x(0), x(2)]))
    assert abs(state.amplitudes[0b101]) == pytest.approx(1.0)


def test_hadamard_twice_is_identity():
    state = StateVector(2)
    apply_circuit(state, Circuit(2, [h(1), h(1)]))
    assert np.allclose(state.amplitudes, [1, 0, 0, 0])


def test_zero_valued_control_fires_on_zero():
    state = StateVector(2)
    apply_circuit(state, Circuit(2, [mc_ry(np.pi, [Control(0, 0)], 1)]))
    assert abs(state.amplitudes[0b10]) == pytest.approx(1.0)

    state = StateVector.basis(2, 0b01)
    apply_circuit(state, Circuit(2, [mc_ry(np.pi, [Control(0, 0)], 1)]))
    assert abs(state.amplitudes[0b01]) == pytest.approx(1.0)


def test_reset_without_rng_fails():
    with pytest.raises(MissingRngError):
        apply_circuit(StateVector(1), Circuit(1, [reset(0)]))


def test_measure_collapses_and_records(rng):
    state = StateVector(2)
    apply_circuit(state, Circuit(2, [h(0), measure(0)]), rng)
    (qubit, outcome), = state.measurements
    assert qubit == 0
    assert probability_of(state, [0], outcome) == pytest.approx(1.0)


def test_reset_returns_qubit_to_zero(rng):
    state = StateVector(1)
    apply_circuit(state, Circuit(1, [h(0), reset(0)]), rng)
    assert probability_of(state, [0], 0) == pytest.approx(1.0)
    assert state.norm2 == pytest.approx(1.0)


def test_postselect_keeps_unnormalized_branch():
    state = StateVector(2)
    apply_circuit(state, Circuit(2, [ry(2 * np.arccos(np.sqrt(0.3)), 1), h(0)]))
    kept = state.postselect([1], 0)
    assert kept == pytest.approx(0.3)
    assert state.norm2 == pytest.approx(0.3)
    assert state.probabilities().sum() == pytest.approx(1.0)


def test_postselect_on_empty_branch_fails():
    with pytest.raises(PostselectionError):
        StateVector(1).postselect([0], 1)


def test_qubit_budget():
    with pytest.raises(SimulationBudgetError):
        StateVector(25)


def test_amplitude_length_checked():
    with pytest.raises(CircuitError):
        StateVector(2, np.ones(3))


def test_marginal_orders_register_bits_lsb_first():
    state = StateVector.basis(3, 0b101)
    marginal = marginal_probabilities(state, [2, 0])
    # qubits[0] = 2 is the least significant bit of the register value.
    assert marginal[0b11] == pytest.approx(1.0)
    assert probability_of(state, [0, 1], 0b01) == pytest.approx(1.0)


def test_sample_positions_counts_all_shots(rng):
    state = StateVector(2)
    apply_circuit(state, Circuit(2, [h(0), h(1)]))
    counts = sample_positions(state, [0, 1], 4000, rng)
    assert sum(counts.values()) == 4000
    assert set(counts) == {0, 1, 2, 3}


def test_uniformly_controlled_ry_matches_gate_sequence():
    cosines = np.array([1.0, 0.2, 0.7, 0.0])
    prep = [h(0), h(1), ry(0.4, 2)]
    gates = Circuit(3, list(prep))
    for value, c in enumerate(cosines):
        controls = [Control(0, value & 1), Control(1, value >> 1)]
        gates.append(mc_ry(2 * np.arccos(c), controls, 2))
    expected = apply_circuit(StateVector(3), gates)

    state = apply_circuit(StateVector(3), Circuit(3, prep))
    apply_uniformly_controlled_ry(state, [0, 1], 2, cosines)
    assert np.allclose(state.amplitudes, expected.amplitudes, atol=1e-12)


def test_extend_places_new_qubits_on_top():
    state = StateVector.basis(1, 1)
    extended = state.extend(1, np.array([0.0, 1.0]))
    assert extended.n_qubits == 2
    assert abs(extended.amplitudes[0b11]) == pytest.approx(1.0)


def test_circuit_unitary_is_unitary():
    circuit = Circuit(3, [h(0), ry(0.3, 1), mc_ry(1.1, [Control(0, 1)], 2), x(2)])
    u = circuit_unitary(circuit)
    assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-12)


def test_sampled_frequencies_pass_chi_square(rng):
    amplitudes = rng.uniform(0.5, 1.5, 32) * np.exp(2j * np.pi * rng.random(32))
    state = StateVector(5, amplitudes)
    register = [1, 2, 3, 4]
    n_shots = 100_000
    counts = sample_positions(state, register, n_shots, rng)
    observed = np.array([counts.get(value, 0) for value in range(16)])
    expected = n_shots * np.array([probability_of(state, register, v) for v in range(16)])
    assert stats.chisquare(observed, expected).pvalue > 0.001
