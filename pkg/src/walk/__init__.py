"""Circuit builders for the walk: source, coin, boundaries, shift, step."""

from src.walk.boundary import build_boundary_conditions
from src.walk.coin import COIN_CODES, CoinMode, CoinOperator, CoinSpec, build_position_coin
from src.walk.registers import WalkRegisters, allocate_registers, allocate_unrolled_registers
from src.walk.shift import build_shift
from src.walk.source import build_source_prep
from src.walk.step import WalkStepCircuit, build_walk_step

__all__ = [
    "COIN_CODES",
    "CoinMode",
    "CoinOperator",
    "CoinSpec",
    "WalkRegisters",
    "WalkStepCircuit",
    "allocate_registers",
    "allocate_unrolled_registers",
    "build_boundary_conditions",
    "build_position_coin",
    "build_shift",
    "build_source_prep",
    "build_walk_step",
]
