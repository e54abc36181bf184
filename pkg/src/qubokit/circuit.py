"""Gate-level circuits: QAOA ansatz construction, decomposition, depth, QASM.

Circuits are immutable values over the gate kinds H, X, RX, RZ, RZZ, CX.
Depth assumes all-to-all logical connectivity (no routing), counted by
greedy as-soon-as-possible layering.  OpenQASM 2.0 export decomposes RZZ on
the way out, and the bundled parser round-trips our own dialect.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import statevec
from .pbool import IsingModel
from .qaoa import QaoaParams

ONE_QUBIT_KINDS = ("h", "x", "rx", "rz")
TWO_QUBIT_KINDS = ("cx", "rzz")
ROTATION_KINDS = ("rx", "rz", "rzz")


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in ONE_QUBIT_KINDS + TWO_QUBIT_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        expected = 1 if self.kind in ONE_QUBIT_KINDS else 2
        if len(self.qubits) != expected:
            raise ValueError(f"{self.kind} acts on {expected} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("gate qubits must be distinct")
        if self.kind in ROTATION_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} requires a finite angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[GateOp, ...] = ()
    measure_all: bool = False

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n:
                raise ValueError(f"gate {g} out of range for n={self.n}")


def build_qaoa_circuit(m: IsingModel, params: QaoaParams) -> Circuit:
    """Explicit gate list for the ansatz.

    H on every qubit, then per layer: RZ(2*gamma*h_i) for each nonzero
    field (ascending qubit), RZZ(2*gamma*r_ik) per coupling (ascending
    (i, k)), RX(2*beta) on every qubit.  Cost-layer gates commute, so the
    fixed ordering is purely for reproducible output.
    """
    gates: list[GateOp] = [GateOp("h", (q,)) for q in range(m.n)]
    couplings = sorted(m.r.items())
    for j in range(params.p):
        gamma = params.gamma[j]
        beta = params.beta[j]
        for i in range(m.n):
            if m.h[i] != 0.0:
                gates.append(GateOp("rz", (i,), 2.0 * gamma * m.h[i]))
        for (i, k), r in couplings:
            gates.append(GateOp("rzz", (i, k), 2.0 * gamma * r))
        for q in range(m.n):
            gates.append(GateOp("rx", (q,), 2.0 * beta))
    return Circuit(n=m.n, gates=tuple(gates))


def simulate(c: Circuit, initial: statevec.StateVector | None = None) -> statevec.StateVector:
    """Run the gate list on a statevector (|0...0> by default)."""
    s = initial if initial is not None else statevec.init_zero(c.n)
    if s.n != c.n:
        raise ValueError("initial state size does not match circuit")
    for g in c.gates:
        if g.kind == "h":
            s = statevec.apply_h(s, g.qubits[0])
        elif g.kind == "x":
            s = statevec.apply_x(s, g.qubits[0])
        elif g.kind == "rx":
            s = statevec.apply_rx(s, g.qubits[0], g.angle)
        elif g.kind == "rz":
            s = statevec.apply_rz(s, g.qubits[0], g.angle)
        elif g.kind == "cx":
            s = statevec.apply_cx(s, g.qubits[0], g.qubits[1])
        elif g.kind == "rzz":
            s = statevec.apply_rzz(s, g.qubits[0], g.qubits[1], g.angle)
        else:  # pragma: no cover - GateOp validation forbids this
            raise ValueError(f"unknown gate kind {g.kind!r}")
    return s


def unitary(c: Circuit) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the circuit (small n only)."""
    if c.n > 10:
        raise ValueError("dense unitary extraction is limited to n <= 10")
    dim = 1 << c.n
    cols = []
    for b in range(dim):
        amps = np.zeros(dim, dtype=complex)
        amps[b] = 1.0
        cols.append(simulate(c, statevec.StateVector(c.n, amps)).amps)
    return np.column_stack(cols)


def _decompose_gate(g: GateOp) -> list[GateOp]:
    if g.kind == "rzz":
        # RZZ(t) = CX (I (x) RZ(t)) CX
        a, b = g.qubits
        return [GateOp("cx", (a, b)), GateOp("rz", (b,), g.angle), GateOp("cx", (a, b))]
    if g.kind == "rx":
        # RX(t) = H RZ(t) H
        (q,) = g.qubits
        return [GateOp("h", (q,)), GateOp("rz", (q,), g.angle), GateOp("h", (q,))]
    if g.kind == "x":
        # X = H RZ(pi) H up to a global phase
        (q,) = g.qubits
        return [GateOp("h", (q,)), GateOp("rz", (q,), math.pi), GateOp("h", (q,))]
    return [g]


def decompose(c: Circuit, target_set: tuple[str, ...] = ("h", "rz", "cx")) -> Circuit:
    """Rewrite onto the restricted gate set, equal up to global phase."""
    allowed = set(target_set)
    out: list[GateOp] = []
    for g in c.gates:
        if g.kind in allowed:
            out.append(g)
            continue
        replacement = _decompose_gate(g)
        if any(r.kind not in allowed for r in replacement):
            raise ValueError(f"no decomposition of {g.kind} into {target_set}")
        out.extend(replacement)
    return Circuit(n=c.n, gates=tuple(out), measure_all=c.measure_all)


def depth(c: Circuit) -> int:
    """Greedy ASAP layering; gates sharing a qubit cannot share a layer."""
    level = [0] * c.n
    total = 0
    for g in c.gates:
        layer = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = layer
        total = max(total, layer)
    return total


def two_qubit_count(c: Circuit) -> int:
    return sum(1 for g in c.gates if len(g.qubits) == 2)


def gate_census(c: Circuit) -> dict[str, int]:
    census: dict[str, int] = {}
    for g in c.gates:
        census[g.kind] = census.get(g.kind, 0) + 1
    return census


def export_qasm(c: Circuit) -> str:
    """OpenQASM 2.0 text; RZZ gates are decomposed on the way out."""
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{c.n}];",
        f"creg c[{c.n}];",
    ]
    for g in c.gates:
        for out in _decompose_gate(g) if g.kind == "rzz" else [g]:
            if out.kind in ROTATION_KINDS:
                lines.append(f"{out.kind}({out.angle:.17g}) q[{out.qubits[0]}];")
            elif out.kind == "cx":
                lines.append(f"cx q[{out.qubits[0]}],q[{out.qubits[1]}];")
            else:
                lines.append(f"{out.kind} q[{out.qubits[0]}];")
    if c.measure_all:
        lines.append("measure q -> c;")
    return "\n".join(lines) + "\n"


_QASM_GATE = re.compile(
    r"^(?P<kind>h|x|rx|rz|cx)(?:\((?P<angle>[^)]+)\))?\s+"
    r"q\[(?P<q0>\d+)\](?:,q\[(?P<q1>\d+)\])?;$"
)


def parse_qasm(text: str) -> Circuit:
    """Parse our own OpenQASM 2.0 dialect back into a circuit."""
    n = None
    gates: list[GateOp] = []
    measure = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("OPENQASM") or line.startswith("include"):
            continue
        if line.startswith("qreg"):
            n = int(re.search(r"\[(\d+)\]", line).group(1))
            continue
        if line.startswith("creg"):
            continue
        if line.startswith("measure"):
            measure = True
            continue
        match = _QASM_GATE.match(line)
        if not match:
            raise ValueError(f"unparseable QASM line: {line!r}")
        kind = match.group("kind")
        angle = float(match.group("angle")) if match.group("angle") else None
        qubits = (int(match.group("q0")),)
        if match.group("q1") is not None:
            qubits = qubits + (int(match.group("q1")),)
        gates.append(GateOp(kind, qubits, angle))
    if n is None:
        raise ValueError("QASM text lacks a qreg declaration")
    return Circuit(n=n, gates=tuple(gates), measure_all=measure)
