"""Benchmark circuit generators (QASM text, exercising the parser)."""

import random

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

# The 5-qubit all-pairs pattern: ten CNOTs covering every qubit pair once.
UNIFORM_PAIRS = [(0, 1), (2, 4), (1, 2), (3, 0), (2, 3),
                 (4, 1), (0, 2), (3, 4), (4, 0), (1, 3)]


def uniform_qasm(reps: int) -> str:
    lines = [HEADER, "qreg q[5];"]
    for _ in range(reps):
        lines += [f"cx q[{a}],q[{b}];" for a, b in UNIFORM_PAIRS]
    return "\n".join(lines)


def biased_qasm(n: int, reps: int, burst: int = 3, spacers: int = 2) -> str:
    """All two-qubit gates touch qubit 0: bursts of CNOTs, paced by S gates."""
    lines = [HEADER, f"qreg q[{n}];"]
    k = 0
    for _ in range(reps):
        for _ in range(burst):
            lines.append(f"cx q[0],q[{1 + k % (n - 1)}];")
            k += 1
        lines += ["s q[0];"] * spacers
    return "\n".join(lines)


def ghz_qasm(n: int, reps: int = 1) -> str:
    lines = [HEADER, f"qreg q[{n}];", f"creg c[{n}];"]
    for _ in range(reps):
        lines.append("h q[0];")
        for i in range(n - 1):
            lines.append(f"cx q[{i}],q[{i + 1}];")
    lines.append("measure q -> c;")
    return "\n".join(lines)


def qft_like_qasm(n: int) -> str:
    """QFT-shaped ladder with controlled-S expanded into {T, Tdg, CX}."""
    lines = [HEADER, f"qreg q[{n}];"]
    for i in range(n):
        lines.append(f"h q[{i}];")
        for j in range(i + 1, n):
            lines += [f"t q[{j}];", f"t q[{i}];", f"cx q[{j}],q[{i}];",
                      f"tdg q[{i}];", f"cx q[{j}],q[{i}];"]
    return "\n".join(lines)


def random_qasm(n: int, count: int, seed: int, p_cx: float = 0.5,
                p_t: float = 0.2) -> str:
    rng = random.Random(seed)
    lines = [HEADER, f"qreg q[{n}];"]
    for _ in range(count):
        r = rng.random()
        if r < p_cx:
            a, b = rng.sample(range(n), 2)
            lines.append(f"cx q[{a}],q[{b}];")
        elif r < p_cx + p_t:
            lines.append(f"t q[{rng.randrange(n)}];")
        elif r < p_cx + p_t + 0.15:
            lines.append(f"h q[{rng.randrange(n)}];")
        else:
            lines.append(f"s q[{rng.randrange(n)}];")
    return "\n".join(lines)


def _ccx(a: str, b: str, c: str) -> list[str]:
    """Toffoli in {H, T, Tdg, CX} (seven-T decomposition)."""
    return [f"h {c};", f"cx {b},{c};", f"tdg {c};", f"cx {a},{c};",
            f"t {c};", f"cx {b},{c};", f"tdg {c};", f"cx {a},{c};",
            f"t {b};", f"t {c};", f"h {c};", f"cx {a},{b};",
            f"t {a};", f"tdg {b};", f"cx {a},{b};"]


def adder_qasm(bits: int) -> str:
    """Ripple-carry adder on 3*bits+1 qubits (VBE layout: a, b, carry chain)."""
    lines = [HEADER, f"qreg a[{bits}];", f"qreg b[{bits}];",
             f"qreg c[{bits + 1}];", f"creg out[{bits}];"]

    def carry(i: int) -> list[str]:
        return (_ccx(f"a[{i}]", f"b[{i}]", f"c[{i + 1}]")
                + [f"cx a[{i}],b[{i}];"]
                + _ccx(f"c[{i}]", f"b[{i}]", f"c[{i + 1}]"))

    def uncarry(i: int) -> list[str]:
        return (_ccx(f"c[{i}]", f"b[{i}]", f"c[{i + 1}]")
                + [f"cx a[{i}],b[{i}];"]
                + _ccx(f"a[{i}]", f"b[{i}]", f"c[{i + 1}]"))

    def total(i: int) -> list[str]:
        return [f"cx a[{i}],b[{i}];", f"cx c[{i}],b[{i}];"]

    for i in range(bits):
        lines += carry(i)
    lines.append(f"cx a[{bits - 1}],b[{bits - 1}];")
    lines += total(bits - 1)
    for i in range(bits - 2, -1, -1):
        lines += uncarry(i)
        lines += total(i)
    for i in range(bits):
        lines.append(f"measure b[{i}] -> out[{i}];")
    return "\n".join(lines)
