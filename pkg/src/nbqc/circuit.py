"""Circuit frontend: QASM subset parser, lowering, and the ideal (ASAP) schedule.

The ideal schedule assumes every resource (Bell pairs, magic states, paths)
is instantly available; it fixes the per-instruction start times and the
communication-event lists that size every circuit-specific network.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field

from .errors import ParseError, UnsupportedGate


class GateKind(enum.Enum):
    INIT_X = "init_x"
    INIT_Z = "init_z"
    MEAS_X = "meas_x"
    MEAS_Z = "meas_z"
    H = "h"
    S = "s"
    SDG = "sdg"
    CNOT = "cnot"
    LS_ZZ = "ls_zz"          # two-qubit ZZ Pauli-product measurement
    LS_XX = "ls_xx"          # two-qubit XX Pauli-product measurement
    T_VIA_MAGIC = "t_magic"  # gate teleportation consuming one magic state
    TELEPORT = "teleport"    # ring-step plumbing, inserted by the simulator only


TWO_QUBIT_KINDS = frozenset({GateKind.CNOT, GateKind.LS_ZZ, GateKind.LS_XX})


@dataclass(frozen=True)
class LatencyTable:
    """Logical-operation latencies in abstract time units.

    One time unit is one code-distance round of syndrome measurement.
    ``t_local`` is the cost of consuming one Bell pair (teleport or
    entanglement-swap step); ``t_bell`` is the regeneration period of a
    logical Bell pair on a channel.
    """

    init: int = 0
    measure: int = 0
    h: int = 3
    s: int = 2
    lattice_surgery: int = 1
    cnot: int = 2
    t_magic: int = 2
    p_magic: float = 0.01
    t_bell: int = 1000
    t_local: int = 1

    def __post_init__(self):
        for name in ("init", "measure", "h", "s", "lattice_surgery", "cnot", "t_magic"):
            if getattr(self, name) < 0:
                raise ValueError(f"latency '{name}' must be >= 0")
        if not (0 < self.p_magic <= 1):
            raise ValueError("p_magic must be in (0, 1]")
        if self.t_bell <= self.t_local:
            raise ValueError("t_bell must exceed the teleport latency")

    def latency_of(self, kind: GateKind) -> int:
        return _LATENCY_FIELD[kind](self)


_LATENCY_FIELD = {
    GateKind.INIT_X: lambda t: t.init,
    GateKind.INIT_Z: lambda t: t.init,
    GateKind.MEAS_X: lambda t: t.measure,
    GateKind.MEAS_Z: lambda t: t.measure,
    GateKind.H: lambda t: t.h,
    GateKind.S: lambda t: t.s,
    GateKind.SDG: lambda t: t.s,
    GateKind.CNOT: lambda t: t.cnot,
    GateKind.LS_ZZ: lambda t: t.lattice_surgery,
    GateKind.LS_XX: lambda t: t.lattice_surgery,
    GateKind.T_VIA_MAGIC: lambda t: t.lattice_surgery,
    GateKind.TELEPORT: lambda t: t.t_local,
}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind in TWO_QUBIT_KINDS and self.qubits[0] == self.qubits[1]:
            raise ValueError("two-qubit gate needs distinct operands")


@dataclass
class LogicalCircuit:
    """An ordered Clifford+T gate list over ``n_alg`` algorithmic qubits."""

    n_alg: int
    gates: list[Gate] = field(default_factory=list)
    lowered: bool = False

    def __post_init__(self):
        for g in self.gates:
            for q in g.qubits:
                if not (0 <= q < self.n_alg):
                    raise ValueError(f"operand {q} outside [0, {self.n_alg})")

    @property
    def t_count(self) -> int:
        return sum(1 for g in self.gates if g.kind is GateKind.T_VIA_MAGIC)

    def remote_qubits(self) -> set[int]:
        """Qubits touched by at least one remote (QQ or QF) operation."""
        out: set[int] = set()
        for g in self.gates:
            if g.kind in TWO_QUBIT_KINDS or g.kind is GateKind.T_VIA_MAGIC:
                out.update(g.qubits)
        return out


# Gates of the accepted OpenQASM 2.0 subset.  x/z are Pauli-frame updates:
# they cost zero time and impose no dependency, so they are dropped from the
# instruction stream (their count is reported by the parser).
_QASM_GATES = {
    "h": GateKind.H,
    "s": GateKind.S,
    "sdg": GateKind.SDG,
    "t": GateKind.T_VIA_MAGIC,
    "tdg": GateKind.T_VIA_MAGIC,
    "cx": GateKind.CNOT,
    "reset": GateKind.INIT_Z,
}
_FRAME_GATES = {"x", "z"}

_IDENT = r"[a-zA-Z_][a-zA-Z0-9_]*"
_REG_REF = re.compile(rf"^({_IDENT})(?:\[(\d+)\])?$")


def parse_qasm(text: str) -> LogicalCircuit:
    """Parse an OpenQASM-2.0-style source restricted to the Clifford+T subset.

    Accepted gates: h, s, sdg, t, tdg, cx, x, z, measure, reset.  Rotation
    gates and classical control are rejected (synthesis is out of scope).
    ``barrier`` is accepted as a no-op so stock benchmark files parse.
    """
    qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
    cregs: set[str] = set()
    n_alg = 0
    gates: list[Gate] = []

    for line_no, stmt in _statements(text):
        head = stmt.split(None, 1)[0]
        rest = stmt[len(head):].strip()

        if head == "OPENQASM":
            continue
        if head == "include":
            continue
        if head == "barrier":
            continue
        if head in ("qreg", "creg"):
            m = re.match(rf"^({_IDENT})\[(\d+)\]$", rest)
            if not m:
                raise ParseError(line_no, f"malformed {head} declaration '{rest}'")
            name, size = m.group(1), int(m.group(2))
            if head == "qreg":
                if name in qregs:
                    raise ParseError(line_no, f"duplicate qreg '{name}'")
                qregs[name] = (n_alg, size)
                n_alg += size
            else:
                cregs.add(name)
            continue
        if head == "if" or stmt.startswith("if("):
            raise ParseError(line_no, "conditional gates are not supported")
        if head == "gate" or head == "opaque":
            raise ParseError(line_no, "gate definitions are not supported")

        if head == "measure":
            m = re.match(r"^(.+?)->(.+)$", rest)
            if not m:
                raise ParseError(line_no, f"malformed measure '{rest}'")
            for q in _expand_operand(m.group(1).strip(), qregs, line_no):
                gates.append(Gate(GateKind.MEAS_Z, (q,)))
            continue

        name = head
        has_params = "(" in name or rest.startswith("(")
        if "(" in name:
            name = name.split("(", 1)[0]
        if name in _FRAME_GATES and not has_params:
            # Pauli-frame update: zero latency, no timing effect.
            _expand_operands(rest, qregs, line_no)
            continue
        if name not in _QASM_GATES or has_params:
            raise UnsupportedGate(name, line_no)
        kind = _QASM_GATES[name]

        operand_lists = _expand_operands(rest, qregs, line_no)
        if kind in TWO_QUBIT_KINDS:
            if len(operand_lists) != 2:
                raise ParseError(line_no, f"'{name}' expects 2 operands")
            ctrl, tgt = operand_lists
            if len(ctrl) != len(tgt):
                raise ParseError(line_no, "register broadcast size mismatch")
            for c, t in zip(ctrl, tgt):
                if c == t:
                    raise ParseError(line_no, "two-qubit gate with identical operands")
                gates.append(Gate(kind, (c, t)))
        else:
            if len(operand_lists) != 1:
                raise ParseError(line_no, f"'{name}' expects 1 operand")
            for q in operand_lists[0]:
                gates.append(Gate(kind, (q,)))

    if n_alg == 0 and gates:
        raise ParseError(0, "no qreg declared")
    return LogicalCircuit(n_alg=n_alg, gates=gates)


def _statements(text: str):
    """Yield (line_no, statement) with comments stripped."""
    buf: list[str] = []
    start_line = 1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for ch in line:
            if ch == ";":
                stmt = "".join(buf).strip()
                buf = []
                if stmt:
                    yield start_line, stmt
                start_line = line_no
            else:
                if not buf:
                    start_line = line_no
                buf.append(ch)
    tail = "".join(buf).strip()
    if tail:
        raise ParseError(start_line, f"unterminated statement '{tail[:40]}'")


def _expand_operands(rest: str, qregs, line_no: int) -> list[list[int]]:
    if not rest:
        raise ParseError(line_no, "missing operands")
    parts = [p.strip() for p in rest.split(",")]
    return [_expand_operand(p, qregs, line_no) for p in parts]


def _expand_operand(ref: str, qregs, line_no: int) -> list[int]:
    m = _REG_REF.match(ref)
    if not m:
        raise ParseError(line_no, f"malformed operand '{ref}'")
    name, idx = m.group(1), m.group(2)
    if name not in qregs:
        raise ParseError(line_no, f"unknown register '{name}'")
    offset, size = qregs[name]
    if idx is None:
        return [offset + k for k in range(size)]
    k = int(idx)
    if k >= size:
        raise ParseError(line_no, f"index {k} out of range for '{name}[{size}]'")
    return [offset + k]


_SERIALIZE_NAME = {
    GateKind.H: "h",
    GateKind.S: "s",
    GateKind.SDG: "sdg",
    GateKind.T_VIA_MAGIC: "t",
    GateKind.CNOT: "cx",
    GateKind.INIT_Z: "reset",
}


def serialize_qasm(circuit: LogicalCircuit) -> str:
    """Emit canonical QASM for the supported subset (parse -> serialize -> parse
    is idempotent on the parsed form)."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.n_alg}];",
             f"creg c[{circuit.n_alg}];"]
    for g in circuit.gates:
        if g.kind is GateKind.MEAS_Z:
            lines.append(f"measure q[{g.qubits[0]}] -> c[{g.qubits[0]}];")
        elif g.kind in _SERIALIZE_NAME:
            ops = ",".join(f"q[{q}]" for q in g.qubits)
            lines.append(f"{_SERIALIZE_NAME[g.kind]} {ops};")
        else:
            raise ValueError(f"gate kind {g.kind} has no QASM spelling")
    return "\n".join(lines) + "\n"


def lower(circuit: LogicalCircuit, lat: LatencyTable) -> LogicalCircuit:
    """Lower a parsed circuit to the executable instruction stream.

    T gates are already mapped to magic-state teleportation at parse time;
    lowering fixes their accounting (one lattice-surgery consumption per
    magic state, feedforward Cliffords skipped) and marks the circuit as
    schedulable.  All other gates pass through unchanged.
    """
    return LogicalCircuit(n_alg=circuit.n_alg, gates=list(circuit.gates), lowered=True)


@dataclass(frozen=True)
class Instruction:
    """One scheduled instruction of the ideal timeline."""

    index: int
    kind: GateKind
    qubits: tuple[int, ...]
    start: int
    finish: int
    event_class: str  # 'qq', 'qf', or 'local'


@dataclass
class IdealTimeline:
    """Bottleneck-free start times plus per-link communication event lists."""

    n_alg: int
    instructions: list[Instruction]
    qq_events: dict[tuple[int, int], list[int]]
    qf_events: dict[int, list[int]]
    depth: int

    def remote_count(self) -> int:
        return sum(len(v) for v in self.qq_events.values()) + \
            sum(len(v) for v in self.qf_events.values())

    def to_json(self) -> str:
        doc = {
            "n_alg": self.n_alg,
            "depth": self.depth,
            "instructions": [
                {"index": i.index, "kind": i.kind.value, "qubits": list(i.qubits),
                 "start": i.start, "finish": i.finish, "event_class": i.event_class}
                for i in self.instructions
            ],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def asap_schedule(circuit: LogicalCircuit, lat: LatencyTable) -> IdealTimeline:
    """As-soon-as-possible schedule over per-qubit dependency chains.

    Each instruction starts at the max finish time of its operands'
    predecessors; two-qubit gates synchronize both operands.  Magic-state
    availability is assumed unconstrained.  Communication events are
    recorded at instruction start.
    """
    if not circuit.lowered:
        raise ValueError("schedule requires a lowered circuit")
    qubit_time = [0] * circuit.n_alg
    instructions: list[Instruction] = []
    qq_events: dict[tuple[int, int], list[int]] = {}
    qf_events: dict[int, list[int]] = {}

    for idx, g in enumerate(circuit.gates):
        start = max(qubit_time[q] for q in g.qubits)
        finish = start + lat.latency_of(g.kind)
        for q in g.qubits:
            qubit_time[q] = finish
        if g.kind in TWO_QUBIT_KINDS:
            a, b = sorted(g.qubits)
            qq_events.setdefault((a, b), []).append(start)
            cls = "qq"
        elif g.kind is GateKind.T_VIA_MAGIC:
            qf_events.setdefault(g.qubits[0], []).append(start)
            cls = "qf"
        else:
            cls = "local"
        instructions.append(Instruction(idx, g.kind, g.qubits, start, finish, cls))

    depth = max((i.finish for i in instructions), default=0)
    return IdealTimeline(circuit.n_alg, instructions, qq_events, qf_events, depth)
