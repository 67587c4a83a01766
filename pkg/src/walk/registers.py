"""Qubit layout of the walk circuits."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from src.errors import SimulationBudgetError
from src.quantum.circuit import Register
from src.tolerances import MAX_QUBITS

COIN_SIZE = 3


@dataclass(frozen=True)
class WalkRegisters:
    """Registers used by one walk step.

    Position x occupies the lowest qubits, then y, the 3-qubit coin
    ``(c0, c1, c2)``, the boundary ancilla and the coin ancilla. Score and
    swap-ancilla registers are appended on request.
    """

    n_qubits: int
    x: Register
    y: Register
    coin: Register
    boundary: Register
    coin_ancilla: Register
    score: Optional[Register] = None
    swap_ancilla: Optional[Register] = None
    suffix: str = ""

    @property
    def position(self) -> List[int]:
        """Position qubits, x bits first (so the register value is ``x + y * 2**n_x``)."""
        return self.x.qubits + self.y.qubits

    @property
    def n_x(self) -> int:
        return self.x.size

    @property
    def n_y(self) -> int:
        return self.y.size

    def register_map(self) -> Dict[str, Register]:
        registers = {
            "position-x": self.x,
            "position-y": self.y,
            f"coin{self.suffix}": self.coin,
            f"boundary-ancilla{self.suffix}": self.boundary,
            f"coin-ancilla{self.suffix}": self.coin_ancilla,
        }
        if self.score is not None:
            registers["score"] = self.score
        if self.swap_ancilla is not None:
            registers["swap-ancilla"] = self.swap_ancilla
        return registers


def _check_budget(n_qubits: int) -> None:
    if n_qubits > MAX_QUBITS:
        raise SimulationBudgetError(
            f"layout needs {n_qubits} qubits, the dense simulator allows {MAX_QUBITS}"
        )


def allocate_registers(n_x: int, n_y: int, with_score: bool = False) -> WalkRegisters:
    """Single-step layout, optionally with score and swap-ancilla registers."""
    x = Register(0, n_x)
    y = Register(n_x, n_y)
    base = n_x + n_y
    coin = Register(base, COIN_SIZE)
    boundary = Register(base + 3, 1)
    coin_ancilla = Register(base + 4, 1)
    n_qubits = base + 5
    score = swap_ancilla = None
    if with_score:
        score = Register(n_qubits, base)
        swap_ancilla = Register(n_qubits + base, 1)
        n_qubits += base + 1
    _check_budget(n_qubits)
    return WalkRegisters(n_qubits, x, y, coin, boundary, coin_ancilla, score, swap_ancilla)


def allocate_unrolled_registers(n_x: int, n_y: int, n_steps: int) -> Tuple[WalkRegisters, ...]:
    """Layout with a fresh coin register and fresh ancillas for every step.

    All steps share the position registers. Step ``i`` (1-based) names its
    registers ``coin@i``, ``boundary-ancilla@i`` and ``coin-ancilla@i``.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    base = n_x + n_y
    n_qubits = base + 5 * n_steps
    _check_budget(n_qubits)
    x = Register(0, n_x)
    y = Register(n_x, n_y)
    steps = []
    for i in range(n_steps):
        start = base + 5 * i
        steps.append(
            WalkRegisters(
                n_qubits,
                x,
                y,
                Register(start, COIN_SIZE),
                Register(start + 3, 1),
                Register(start + 4, 1),
                suffix=f"@{i + 1}",
            )
        )
    return tuple(steps)
