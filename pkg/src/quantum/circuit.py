"""Gate list IR shared by the circuit builders, the simulator and the QASM exporter."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple

from src.errors import CircuitError


class GateKind(Enum):
    """Supported operations. RESET and MEASURE are the only non-unitary kinds."""

    X = "x"
    H = "h"
    RY = "ry"
    RZ = "rz"
    PHASE = "phase"
    CNOT = "cnot"
    SWAP = "swap"
    MCX = "mcx"
    MC_RY = "mc-ry"
    MC_PHASE = "mc-phase"
    QFT = "qft"
    INV_QFT = "inv-qft"
    RESET = "reset"
    MEASURE = "measure"

    @property
    def is_unitary(self) -> bool:
        return self not in (GateKind.RESET, GateKind.MEASURE)


# Kinds acting on exactly one target qubit.
_SINGLE_TARGET = {
    GateKind.X,
    GateKind.H,
    GateKind.RY,
    GateKind.RZ,
    GateKind.PHASE,
    GateKind.CNOT,
    GateKind.MCX,
    GateKind.MC_RY,
    GateKind.MC_PHASE,
    GateKind.RESET,
    GateKind.MEASURE,
}
_PARAMETRIC = {GateKind.RY, GateKind.RZ, GateKind.PHASE, GateKind.MC_RY, GateKind.MC_PHASE}
_CONTROLLABLE = {GateKind.CNOT, GateKind.SWAP, GateKind.MCX, GateKind.MC_RY, GateKind.MC_PHASE}


class Control(NamedTuple):
    """Control qubit together with the basis value it fires on."""

    qubit: int
    value: int = 1


@dataclass(frozen=True)
class GateOp:
    """A single operation of a circuit."""

    kind: GateKind
    targets: Tuple[int, ...]
    controls: Tuple[Control, ...] = ()
    params: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.targets:
            raise CircuitError(f"{self.kind.value}: no target qubit")
        if self.kind in _SINGLE_TARGET and len(self.targets) != 1:
            raise CircuitError(f"{self.kind.value}: expects exactly one target")
        if self.kind is GateKind.SWAP and len(self.targets) != 2:
            raise CircuitError("swap: expects exactly two targets")
        if self.kind is GateKind.CNOT and len(self.controls) != 1:
            raise CircuitError("cnot: expects exactly one control")
        if self.controls and self.kind not in _CONTROLLABLE:
            raise CircuitError(f"{self.kind.value}: does not take controls")
        if (self.kind in _PARAMETRIC) != bool(self.params):
            raise CircuitError(f"{self.kind.value}: wrong number of parameters")
        control_qubits = [c.qubit for c in self.controls]
        qubits = list(self.targets) + control_qubits
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"{self.kind.value}: targets and controls overlap: {qubits}")
        if any(c.value not in (0, 1) for c in self.controls):
            raise CircuitError(f"{self.kind.value}: control values must be 0 or 1")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.targets + tuple(c.qubit for c in self.controls)

    def inverse(self) -> "GateOp":
        """Adjoint of this operation."""
        if not self.kind.is_unitary:
            raise CircuitError(f"{self.kind.value} has no inverse")
        if self.kind is GateKind.QFT:
            return GateOp(GateKind.INV_QFT, self.targets)
        if self.kind is GateKind.INV_QFT:
            return GateOp(GateKind.QFT, self.targets)
        if self.kind in _PARAMETRIC:
            return GateOp(self.kind, self.targets, self.controls, (-self.params[0],))
        return self


@dataclass(frozen=True)
class Register:
    """Contiguous named range of qubits, index 0 least significant."""

    start: int
    size: int

    @property
    def qubits(self) -> List[int]:
        return list(range(self.start, self.start + self.size))

    def __getitem__(self, i: int) -> int:
        return self.qubits[i]

    def __len__(self) -> int:
        return self.size


@dataclass
class Circuit:
    """Ordered list of gate operations on ``n_qubits`` qubits."""

    n_qubits: int
    ops: List[GateOp] = field(default_factory=list)
    register_map: Dict[str, Register] = field(default_factory=dict)

    def __post_init__(self):
        for op in self.ops:
            self._check(op)
        self._check_registers(self.register_map)

    def _check(self, op: GateOp) -> None:
        for q in op.qubits:
            if not 0 <= q < self.n_qubits:
                raise CircuitError(
                    f"{op.kind.value}: qubit {q} out of range [0, {self.n_qubits})"
                )

    def _check_registers(self, registers: Dict[str, Register]) -> None:
        seen: Dict[int, str] = {}
        for name, reg in registers.items():
            for q in reg.qubits:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(f"register {name!r} exceeds {self.n_qubits} qubits")
                if q in seen and seen[q] != name:
                    raise CircuitError(f"registers {seen[q]!r} and {name!r} share qubit {q}")
                seen[q] = name

    def append(self, op: GateOp) -> "Circuit":
        self._check(op)
        self.ops.append(op)
        return self

    def extend(self, ops: Iterable[GateOp]) -> "Circuit":
        for op in ops:
            self.append(op)
        return self

    def compose(self, other: "Circuit") -> "Circuit":
        """Return a new circuit running ``self`` then ``other``."""
        if other.n_qubits != self.n_qubits:
            raise CircuitError(
                f"cannot compose circuits on {self.n_qubits} and {other.n_qubits} qubits"
            )
        registers = dict(self.register_map)
        registers.update(other.register_map)
        return Circuit(self.n_qubits, list(self.ops) + list(other.ops), registers)

    def inverse(self) -> "Circuit":
        """Adjoint circuit; fails on RESET/MEASURE."""
        return Circuit(
            self.n_qubits, [op.inverse() for op in reversed(self.ops)], dict(self.register_map)
        )

    @property
    def is_unitary(self) -> bool:
        return all(op.kind.is_unitary for op in self.ops)

    def count_ops(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for op in self.ops:
            counts[op.kind.value] = counts.get(op.kind.value, 0) + 1
        return counts

    def __len__(self) -> int:
        return len(self.ops)


def controls_for_value(qubits: Sequence[int], value: int) -> Tuple[Control, ...]:
    """Controls that fire when the register ``qubits`` holds ``value``."""
    return tuple(Control(q, (value >> i) & 1) for i, q in enumerate(qubits))


# Shorthand constructors.


def x(q: int) -> GateOp:
    return GateOp(GateKind.X, (q,))


def h(q: int) -> GateOp:
    return GateOp(GateKind.H, (q,))


def ry(theta: float, q: int) -> GateOp:
    return GateOp(GateKind.RY, (q,), params=(float(theta),))


def rz(theta: float, q: int) -> GateOp:
    return GateOp(GateKind.RZ, (q,), params=(float(theta),))


def phase(theta: float, q: int) -> GateOp:
    return GateOp(GateKind.PHASE, (q,), params=(float(theta),))


def cnot(control: int, target: int) -> GateOp:
    return GateOp(GateKind.CNOT, (target,), (Control(control, 1),))


def swap(a: int, b: int, controls: Sequence[Control] = ()) -> GateOp:
    return GateOp(GateKind.SWAP, (a, b), tuple(controls))


def mcx(controls: Sequence[Control], target: int) -> GateOp:
    return GateOp(GateKind.MCX, (target,), tuple(controls))


def mc_ry(theta: float, controls: Sequence[Control], target: int) -> GateOp:
    return GateOp(GateKind.MC_RY, (target,), tuple(controls), (float(theta),))


def mc_phase(theta: float, controls: Sequence[Control], target: int) -> GateOp:
    return GateOp(GateKind.MC_PHASE, (target,), tuple(controls), (float(theta),))


def qft_block(qubits: Sequence[int], inverse: bool = False) -> GateOp:
    return GateOp(GateKind.INV_QFT if inverse else GateKind.QFT, tuple(qubits))


def reset(q: int) -> GateOp:
    return GateOp(GateKind.RESET, (q,))


def measure(q: int) -> GateOp:
    return GateOp(GateKind.MEASURE, (q,))
