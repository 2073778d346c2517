"""Order-of-magnitude cost models for the two reference paradigms.

Circuit-based execution pays one Bell generation per remote layer on the
critical path; measurement-based execution pays node count for a cluster
large enough to hide Bell latency.  Constants are set to 1 and magic-state
cost is ignored, so comparisons against simulated networks are ordinal.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import GateKind, LatencyTable, LogicalCircuit, TWO_QUBIT_KINDS, \
    asap_schedule
from .topology import tree_node_count


@dataclass(frozen=True)
class BaselineEstimate:
    scheme: str
    time: int
    nodes: int
    note: str = "order estimate, magic ignored"


def remote_depth(circuit: LogicalCircuit) -> int:
    """Longest chain of remote operations in the dependency DAG."""
    level = [0] * circuit.n_alg
    best = 0
    for g in circuit.gates:
        remote = g.kind in TWO_QUBIT_KINDS or g.kind is GateKind.T_VIA_MAGIC
        lvl = max(level[q] for q in g.qubits) + (1 if remote else 0)
        for q in g.qubits:
            level[q] = lvl
        best = max(best, lvl)
    return best


def cb_dftqc(circuit: LogicalCircuit, lat: LatencyTable
             ) -> tuple[int, int, int]:
    """(time, optimistic nodes, pessimistic nodes) for circuit-based DFTQC.

    Optimistic assumes d = n_alg all-to-all channels; pessimistic assumes
    d = 3 with a per-qubit tree to every other qubit.
    """
    time = remote_depth(circuit) * lat.t_bell
    n = circuit.n_alg
    optimistic = n
    pessimistic = n * tree_node_count(n - 1, 3) if n >= 2 else n
    return time, optimistic, pessimistic


def mb_dftqc(kind: str, ring: bool, circuit: LogicalCircuit,
             lat: LatencyTable) -> BaselineEstimate:
    """Measurement-based DFTQC estimate for brickwork or clique cluster states."""
    if kind not in ("brickwork", "clique"):
        raise ValueError(f"unknown cluster kind '{kind}'")
    depth = asap_schedule(LogicalCircuit(circuit.n_alg, list(circuit.gates),
                                         lowered=True), lat).depth
    n = circuit.n_alg
    ring_len = lat.t_bell // lat.t_local
    if kind == "brickwork":
        time = lat.t_bell + n * depth * lat.t_local
        nodes = n * ring_len if ring else n * depth
    else:
        time = lat.t_bell + depth * lat.t_local
        nodes = n * n * ring_len if ring else n * n * depth
    tag = f"MB-DFTQC ({kind}{', ring' if ring else ''})"
    return BaselineEstimate(tag, time, max(nodes, 1))
