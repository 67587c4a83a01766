"""Dense statevector engine.

Amplitudes live in a flat complex128 array whose index bit ``q`` is the value
of qubit ``q``. Gates are applied in place on a ``(2,) * n`` tensor view: the
qubit ``q`` maps to axis ``n - 1 - q``, controls are fixed by integer indexing
and targets are addressed as the two slices 0/1 of their axis. Multi-controlled
gates therefore cost one pass over the controlled subspace, never a
decomposition.

Post-selection does not renormalize: ``norm2`` keeps the squared norm of the
surviving branch so success probabilities can be read back afterwards.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import CircuitError, MissingRngError, PostselectionError, SimulationBudgetError
from src.quantum.circuit import Circuit, Control, GateKind, GateOp
from src.tolerances import MAX_QUBITS

logger = logging.getLogger(__name__)

_SQRT1_2 = 1.0 / np.sqrt(2.0)
_H = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=np.complex128)


class StateVector:
    """Complex amplitude array over ``n_qubits`` qubits with tracked squared norm."""

    def __init__(self, n_qubits: int, amplitudes: Optional[np.ndarray] = None):
        """Create a state.

        Args:
            n_qubits: Number of qubits
            amplitudes: Optional amplitude vector of length ``2**n_qubits``; it is
                normalized to unit norm. Defaults to ``|0...0>``.
        """
        if n_qubits < 1:
            raise CircuitError("a state needs at least one qubit")
        if n_qubits > MAX_QUBITS:
            raise SimulationBudgetError(
                f"{n_qubits} qubits exceed the dense simulator budget of {MAX_QUBITS}"
            )
        self.n_qubits = n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
            amplitudes[0] = 1.0
        amplitudes = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.size != 1 << n_qubits:
            raise CircuitError(
                f"expected {1 << n_qubits} amplitudes for {n_qubits} qubits, got {amplitudes.size}"
            )
        norm = np.linalg.norm(amplitudes)
        if norm == 0.0:
            raise PostselectionError("cannot build a state from a zero vector")
        self.amplitudes = np.ascontiguousarray(amplitudes / norm)
        self.norm2 = 1.0
        # (qubit, outcome) pairs recorded by MEASURE and RESET, in order.
        self.measurements: List[Tuple[int, int]] = []

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        if not 0 <= index < 1 << n_qubits:
            raise CircuitError(f"basis index {index} out of range for {n_qubits} qubits")
        amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
        amplitudes[index] = 1.0
        return cls(n_qubits, amplitudes)

    def copy(self) -> "StateVector":
        other = StateVector.__new__(StateVector)
        other.n_qubits = self.n_qubits
        other.amplitudes = self.amplitudes.copy()
        other.norm2 = self.norm2
        other.measurements = list(self.measurements)
        return other

    def tensor(self) -> np.ndarray:
        """Writable ``(2,) * n`` view of the amplitudes."""
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def probabilities(self) -> np.ndarray:
        """Born probabilities of every basis state (renormalized by ``norm2``)."""
        return np.abs(self.amplitudes) ** 2 / self.norm2

    def recompute_norm(self) -> float:
        self.norm2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        return self.norm2

    def postselect(self, qubits: Sequence[int], value: int) -> float:
        """Project onto ``qubits == value`` without renormalizing.

        Returns:
            Probability of the kept branch relative to the state before projection
        """
        _check_qubits(self.n_qubits, qubits)
        before = self.norm2
        flat, shape, axes = _gather(self.tensor(), self.n_qubits, qubits)
        keep = flat[value].copy()
        flat[...] = 0.0
        flat[value] = keep
        _scatter(self.tensor(), flat, shape, axes)
        after = self.recompute_norm()
        if after <= 0.0:
            raise PostselectionError(
                f"post-selecting qubits {list(qubits)} on {value} leaves no probability mass"
            )
        return after / before

    def extend(self, n_new: int, high_amplitudes: np.ndarray) -> "StateVector":
        """Return ``|high> (x) |self>``, appending ``n_new`` more significant qubits."""
        high = np.asarray(high_amplitudes, dtype=np.complex128).reshape(-1)
        if high.size != 1 << n_new:
            raise CircuitError(f"expected {1 << n_new} amplitudes for the new qubits")
        high = high / np.linalg.norm(high)
        other = StateVector(self.n_qubits + n_new, np.kron(high, self.amplitudes))
        other.amplitudes *= np.sqrt(self.norm2)
        other.norm2 = self.norm2
        return other

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits}, norm2={self.norm2:.6g})"


def _check_qubits(n_qubits: int, qubits: Sequence[int]) -> None:
    if len(qubits) == 0:
        raise CircuitError("empty qubit range")
    if len(set(qubits)) != len(qubits):
        raise CircuitError(f"repeated qubit in {list(qubits)}")
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise CircuitError(f"qubit {q} out of range [0, {n_qubits})")


def _gather(psi: np.ndarray, n_qubits: int, qubits: Sequence[int]):
    """Reshape a ``(2,) * n + batch`` tensor to ``(2**len(qubits), rest)``.

    Row index is the register value of ``qubits`` with ``qubits[0]`` least
    significant. Returns the matrix plus what ``_scatter`` needs to write back.
    """
    axes = [n_qubits - 1 - q for q in reversed(qubits)]
    moved = np.moveaxis(psi, axes, list(range(len(axes))))
    shape = moved.shape
    return moved.reshape(1 << len(qubits), -1), shape, axes


def _scatter(psi: np.ndarray, flat: np.ndarray, shape, axes) -> None:
    psi[...] = np.moveaxis(flat.reshape(shape), list(range(len(axes))), axes)


def _branch_index(n_qubits: int, controls: Sequence[Control], target: int, value: int):
    idx: List[object] = [slice(None)] * n_qubits
    for c in controls:
        idx[n_qubits - 1 - c.qubit] = c.value
    idx[n_qubits - 1 - target] = value
    return tuple(idx)


def _apply_matrix(psi, n_qubits, target, controls, m) -> None:
    i0 = _branch_index(n_qubits, controls, target, 0)
    i1 = _branch_index(n_qubits, controls, target, 1)
    a0 = psi[i0].copy()
    a1 = psi[i1].copy()
    psi[i0] = m[0, 0] * a0 + m[0, 1] * a1
    psi[i1] = m[1, 0] * a0 + m[1, 1] * a1


def _apply_flip(psi, n_qubits, target, controls) -> None:
    i0 = _branch_index(n_qubits, controls, target, 0)
    i1 = _branch_index(n_qubits, controls, target, 1)
    a0 = psi[i0].copy()
    psi[i0] = psi[i1]
    psi[i1] = a0


def _apply_phase(psi, n_qubits, target, controls, theta) -> None:
    psi[_branch_index(n_qubits, controls, target, 1)] *= np.exp(1j * theta)


def _apply_swap(psi, n_qubits, a, b, controls) -> None:
    idx: List[object] = [slice(None)] * n_qubits
    for c in controls:
        idx[n_qubits - 1 - c.qubit] = c.value
    i01 = list(idx)
    i10 = list(idx)
    i01[n_qubits - 1 - a], i01[n_qubits - 1 - b] = 0, 1
    i10[n_qubits - 1 - a], i10[n_qubits - 1 - b] = 1, 0
    i01, i10 = tuple(i01), tuple(i10)
    tmp = psi[i01].copy()
    psi[i01] = psi[i10]
    psi[i10] = tmp


def _apply_qft(psi, n_qubits, qubits, inverse) -> None:
    flat, shape, axes = _gather(psi, n_qubits, qubits)
    # QFT|x> = sum_k exp(+2 pi i x k / N)|k> / sqrt(N), i.e. numpy's orthonormal ifft.
    if inverse:
        flat = np.fft.fft(flat, axis=0, norm="ortho")
    else:
        flat = np.fft.ifft(flat, axis=0, norm="ortho")
    _scatter(psi, flat, shape, axes)


def _ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _apply_unitary_op(psi: np.ndarray, n_qubits: int, op: GateOp) -> None:
    kind = op.kind
    t = op.targets[0]
    if kind in (GateKind.X, GateKind.CNOT, GateKind.MCX):
        _apply_flip(psi, n_qubits, t, op.controls)
    elif kind is GateKind.H:
        _apply_matrix(psi, n_qubits, t, (), _H)
    elif kind in (GateKind.RY, GateKind.MC_RY):
        _apply_matrix(psi, n_qubits, t, op.controls, _ry_matrix(op.params[0]))
    elif kind is GateKind.RZ:
        _apply_matrix(psi, n_qubits, t, (), _rz_matrix(op.params[0]))
    elif kind in (GateKind.PHASE, GateKind.MC_PHASE):
        _apply_phase(psi, n_qubits, t, op.controls, op.params[0])
    elif kind is GateKind.SWAP:
        _apply_swap(psi, n_qubits, op.targets[0], op.targets[1], op.controls)
    elif kind in (GateKind.QFT, GateKind.INV_QFT):
        _apply_qft(psi, n_qubits, op.targets, kind is GateKind.INV_QFT)
    else:
        raise CircuitError(f"{kind.value} is not a unitary operation")


def _measure(state: StateVector, q: int, rng: np.random.Generator, reset: bool) -> int:
    psi = state.tensor()
    n = state.n_qubits
    i0 = _branch_index(n, (), q, 0)
    i1 = _branch_index(n, (), q, 1)
    mass0 = float(np.sum(np.abs(psi[i0]) ** 2))
    mass1 = float(np.sum(np.abs(psi[i1]) ** 2))
    outcome = 1 if rng.random() < mass1 / (mass0 + mass1) else 0
    kept = mass1 if outcome else mass0
    # Collapse, keeping norm2 so post-selection bookkeeping survives measurement.
    factor = np.sqrt(state.norm2 / kept)
    if outcome:
        psi[i0] = 0.0
        psi[i1] *= factor
        if reset:
            psi[i0] = psi[i1]
            psi[i1] = 0.0
    else:
        psi[i1] = 0.0
        psi[i0] *= factor
    state.measurements.append((q, outcome))
    return outcome


def apply_circuit(
    state: StateVector,
    circuit: Circuit,
    rng: Optional[np.random.Generator] = None,
) -> StateVector:
    """Apply ``circuit`` to ``state`` in place.

    Args:
        state: State to evolve
        circuit: Circuit on the same number of qubits
        rng: Random stream, required when the circuit measures or resets

    Returns:
        The evolved state (same object)
    """
    if state.n_qubits != circuit.n_qubits:
        raise CircuitError(
            f"state has {state.n_qubits} qubits but circuit acts on {circuit.n_qubits}"
        )
    if rng is None and not circuit.is_unitary:
        raise MissingRngError("circuit contains RESET/MEASURE but no random stream was given")
    psi = state.tensor()
    for op in circuit.ops:
        if op.kind is GateKind.MEASURE:
            _measure(state, op.targets[0], rng, reset=False)
        elif op.kind is GateKind.RESET:
            _measure(state, op.targets[0], rng, reset=True)
        else:
            _apply_unitary_op(psi, state.n_qubits, op)
    return state


def apply_circuit_batch(columns: np.ndarray, circuit: Circuit) -> np.ndarray:
    """Apply a unitary circuit to every column of a ``(2**n, B)`` matrix."""
    if not circuit.is_unitary:
        raise CircuitError("batched application only supports unitary circuits")
    n = circuit.n_qubits
    out = np.array(columns, dtype=np.complex128, order="C")
    batch = out.shape[1]
    psi = out.reshape((2,) * n + (batch,))
    for op in circuit.ops:
        _apply_unitary_op(psi, n, op)
    return out


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Matrix of a unitary circuit; column ``j`` is the image of basis state ``j``."""
    if circuit.n_qubits > 12:
        raise SimulationBudgetError("unitary reconstruction is limited to 12 qubits")
    dim = 1 << circuit.n_qubits
    return apply_circuit_batch(np.eye(dim, dtype=np.complex128), circuit)


def marginal_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Distribution of the register value of ``qubits``, renormalized by ``norm2``."""
    _check_qubits(state.n_qubits, qubits)
    if state.norm2 <= 0.0:
        raise PostselectionError("zero-norm state")
    probs = (np.abs(state.amplitudes) ** 2).reshape((2,) * state.n_qubits)
    flat, _, _ = _gather(probs, state.n_qubits, qubits)
    marginal = flat.sum(axis=1)
    return marginal / marginal.sum()


def sample_positions(
    state: StateVector,
    qubits: Sequence[int],
    n_shots: int,
    rng: np.random.Generator,
) -> Dict[int, int]:
    """Draw ``n_shots`` i.i.d. outcomes of the register ``qubits``.

    Returns:
        Histogram mapping register value to count (zero counts omitted)
    """
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    marginal = marginal_probabilities(state, qubits)
    counts = rng.multinomial(n_shots, marginal)
    return {int(i): int(c) for i, c in enumerate(counts) if c > 0}


def probability_of(state: StateVector, qubits: Sequence[int], value: int) -> float:
    """Probability that the register ``qubits`` holds ``value`` (``qubits[0]`` is the LSB)."""
    _check_qubits(state.n_qubits, qubits)
    if not 0 <= value < 1 << len(qubits):
        raise CircuitError(f"value {value} does not fit in {len(qubits)} qubits")
    probs = (np.abs(state.amplitudes) ** 2).reshape((2,) * state.n_qubits)
    flat, _, _ = _gather(probs, state.n_qubits, qubits)
    return float(flat[value].sum() / state.norm2)


def apply_uniformly_controlled_ry(
    state: StateVector,
    controls: Sequence[int],
    target: int,
    cosines: np.ndarray,
) -> StateVector:
    """Rotate ``target`` by ``RY(2 arccos cosines[v])`` where ``v`` is the value of ``controls``.

    Equivalent to one multi-controlled RY per control value, applied in a
    single pass over the amplitudes.
    """
    _check_qubits(state.n_qubits, list(controls) + [target])
    c = np.asarray(cosines, dtype=np.float64).reshape(-1)
    if c.size != 1 << len(controls):
        raise CircuitError(f"expected {1 << len(controls)} cosines, got {c.size}")
    if np.any(np.abs(c) > 1.0):
        raise CircuitError("rotation cosines must lie in [-1, 1]")
    flat, shape, axes = _gather(state.tensor(), state.n_qubits, list(controls) + [target])
    half = c.size
    c = c[:, None]
    s = np.sqrt(1.0 - c**2)
    a0 = flat[:half].copy()
    a1 = flat[half:].copy()
    flat[:half] = c * a0 - s * a1
    flat[half:] = s * a0 + c * a1
    _scatter(state.tensor(), flat, shape, axes)
    return state
