"""OpenQASM 2.0 export.

Only gates from the original ``qelib1.inc`` (``x h ry rz u1 cx cu1 ccx``) are
used directly. Multi-controlled gates are emitted as recursive ``gate``
definitions (``mcphase_k``, ``mcx_k``, ``mcry_k``) built from the
square-root-of-U construction, so the text stays linear in circuit size.
"""

from typing import Iterable, List, Optional, Sequence

from src.quantum.circuit import Circuit, GateKind, GateOp
from src.quantum.qft import qft_ops


def _fmt(theta: float) -> str:
    return f"{theta:.17g}"


def _args(names: Sequence[str]) -> str:
    return ",".join(names)


def _mcx_call(controls: Sequence[str], target: str) -> str:
    k = len(controls)
    if k == 0:
        return f"x {target};"
    if k == 1:
        return f"cx {controls[0]},{target};"
    if k == 2:
        return f"ccx {_args(controls)},{target};"
    return f"mcx_{k} {_args(controls)},{target};"


def _mcphase_call(theta: str, controls: Sequence[str], target: str) -> str:
    k = len(controls)
    if k == 0:
        return f"u1({theta}) {target};"
    if k == 1:
        return f"cu1({theta}) {controls[0]},{target};"
    return f"mcphase_{k}({theta}) {_args(controls)},{target};"


def _mcry_call(theta: str, controls: Sequence[str], target: str) -> str:
    if not controls:
        return f"ry({theta}) {target};"
    return f"mcry_{len(controls)}({theta}) {_args(controls)},{target};"


def _gate_definitions(max_phase: int, max_ry: int) -> List[str]:
    """Definitions for mcphase_2..max_phase, mcx_3..max_phase and mcry_1..max_ry."""
    lines: List[str] = []

    def ladder(name: str, v_call, k: int) -> None:
        cs = [f"c{i}" for i in range(k)]
        body = [
            v_call("theta/2", [cs[-1]], "t"),
            _mcx_call(cs[:-1], cs[-1]),
            v_call("-theta/2", [cs[-1]], "t"),
            _mcx_call(cs[:-1], cs[-1]),
            v_call("theta/2", cs[:-1], "t"),
        ]
        lines.append(f"gate {name}_{k}(theta) {_args(cs)},t {{ {' '.join(body)} }}")

    for k in range(2, max_phase + 1):
        ladder("mcphase", _mcphase_call, k)
        if k >= 3:
            cs = [f"c{i}" for i in range(k)]
            lines.append(
                f"gate mcx_{k} {_args(cs)},t {{ h t; {_mcphase_call('pi', cs, 't')} h t; }}"
            )
    if max_ry >= 1:
        lines.append(
            "gate mcry_1(theta) c0,t { ry(theta/2) t; cx c0,t; ry(-theta/2) t; cx c0,t; }"
        )
    for k in range(2, max_ry + 1):
        ladder("mcry", _mcry_call, k)
    return lines


def _lower(op: GateOp) -> List[GateOp]:
    """Replace QFT blocks by their gate sequence."""
    if op.kind in (GateKind.QFT, GateKind.INV_QFT):
        return qft_ops(op.targets, inverse=op.kind is GateKind.INV_QFT)
    return [op]


def _arities(ops: Iterable[GateOp]):
    max_phase, max_ry = 0, 0
    for op in ops:
        k = len(op.controls)
        if op.kind in (GateKind.MCX, GateKind.CNOT):
            max_phase = max(max_phase, k)
        elif op.kind is GateKind.MC_PHASE:
            max_phase = max(max_phase, k)
        elif op.kind is GateKind.MC_RY:
            max_ry = max(max_ry, k)
            max_phase = max(max_phase, k - 1)
        elif op.kind is GateKind.SWAP and op.controls:
            max_phase = max(max_phase, k + 1)
    return max_phase, max_ry


def _emit(op: GateOp) -> List[str]:
    def q(i: int) -> str:
        return f"q[{i}]"

    flips = [f"x {q(c.qubit)};" for c in op.controls if c.value == 0]
    cs = [q(c.qubit) for c in op.controls]
    t = q(op.targets[0])
    kind = op.kind
    if kind is GateKind.H:
        body = [f"h {t};"]
    elif kind is GateKind.RZ:
        body = [f"rz({_fmt(op.params[0])}) {t};"]
    elif kind in (GateKind.X, GateKind.CNOT, GateKind.MCX):
        body = [_mcx_call(cs, t)]
    elif kind in (GateKind.RY, GateKind.MC_RY):
        body = [_mcry_call(_fmt(op.params[0]), cs, t)]
    elif kind in (GateKind.PHASE, GateKind.MC_PHASE):
        body = [_mcphase_call(_fmt(op.params[0]), cs, t)]
    elif kind is GateKind.SWAP:
        a, b = t, q(op.targets[1])
        body = [f"cx {b},{a};", _mcx_call(cs + [a], b), f"cx {b},{a};"]
    elif kind is GateKind.RESET:
        body = [f"reset {t};"]
    elif kind is GateKind.MEASURE:
        body = [f"measure {t} -> c[{op.targets[0]}];"]
    else:
        raise ValueError(f"cannot export {kind.value}")
    return flips + body + flips


def to_qasm(circuit: Circuit, comments: Optional[Sequence[str]] = None) -> str:
    """Serialize a circuit to OpenQASM 2.0 text.

    Args:
        circuit: Circuit to export
        comments: Optional lines emitted as ``//`` comments after the header

    Returns:
        QASM program text
    """
    ops = [low for op in circuit.ops for low in _lower(op)]
    max_phase, max_ry = _arities(ops)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    for name, reg in circuit.register_map.items():
        lines.append(f"// register {name}: q[{reg.start}..{reg.start + reg.size - 1}]")
    for comment in comments or []:
        lines.append(f"// {comment}")
    lines.extend(_gate_definitions(max_phase, max_ry))
    lines.append(f"qreg q[{circuit.n_qubits}];")
    if any(op.kind is GateKind.MEASURE for op in ops):
        lines.append(f"creg c[{circuit.n_qubits}];")
    for op in ops:
        lines.extend(_emit(op))
    return "\n".join(lines) + "\n"

