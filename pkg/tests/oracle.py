"""Independent verification helpers: max-flow, path checking, brute force."""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from nbqc.circuit import LatencyTable, LogicalCircuit
from nbqc.graph import NodeGraph


def max_flow_value(g: NodeGraph, sources: list[int], sinks: list[int]) -> int:
    """Max flow from a super-source over ``sources`` to a super-sink over
    ``sinks``; every channel has unit capacity in either direction."""
    n = g.node_count
    s, t = n, n + 1
    cap: dict[tuple[int, int], int] = {}
    for (u, _, v, _) in g.edges:
        cap[(u, v)] = cap.get((u, v), 0) + 1
        cap[(v, u)] = cap.get((v, u), 0) + 1
    for src in sources:
        cap[(s, src)] = cap.get((s, src), 0) + 1
    for snk in sinks:
        cap[(snk, t)] = cap.get((snk, t), 0) + 1
    rows = [k[0] for k in cap]
    cols = [k[1] for k in cap]
    vals = [cap[k] for k in cap]
    mat = csr_matrix((vals, (rows, cols)), shape=(n + 2, n + 2), dtype=np.int32)
    return int(maximum_flow(mat, s, t).flow_value)


def verify_disjoint_paths(g: NodeGraph, pairs: list[tuple[int, int]],
                          paths: list[list[int]]) -> bool:
    """Check each edge set forms a simple path joining its endpoint pair and
    no edge appears twice across the whole set (edge order irrelevant)."""
    seen: set[int] = set()
    for (a, b), path in zip(pairs, paths):
        if not path:
            if a != b:
                return False
            continue
        deg: dict[int, int] = {}
        adj: dict[int, list[int]] = {}
        for e in path:
            if e in seen:
                return False
            seen.add(e)
            u, _, v, _ = g.edges[e]
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        odd = sorted(n for n, k in deg.items() if k == 1)
        if odd != sorted((a, b)) or any(k > 2 for k in deg.values()):
            return False
        # connectivity of the path's edge set
        stack, reached = [a], {a}
        while stack:
            u = stack.pop()
            for v in adj.get(u, []):
                if v not in reached:
                    reached.add(v)
                    stack.append(v)
        if len(reached) != len(deg):
            return False
    return True


def bias_bruteforce(events: list[int], t_bell: int) -> int:
    """O(K^2) direct evaluation of the peak-events-per-window definition."""
    if not events:
        return 0
    a = np.asarray(sorted(events), dtype=np.int64)
    k = len(a)
    diff = a[None, :] - a[:, None]
    span = np.arange(k)[None, :] - np.arange(k)[:, None] + 1
    ok = (span >= 1) & (diff < t_bell)
    return int(span[ok].max())


def longest_path_starts(circuit: LogicalCircuit, lat: LatencyTable) -> list[int]:
    """Start times by explicit longest-path over the dependency DAG."""
    preds: list[list[int]] = []
    last: dict[int, int] = {}
    for idx, gate in enumerate(circuit.gates):
        preds.append([last[q] for q in gate.qubits if q in last])
        for q in gate.qubits:
            last[q] = idx
    memo: dict[int, int] = {}

    def start(k: int) -> int:
        if k in memo:
            return memo[k]
        best = 0
        for p in preds[k]:
            v = start(p) + lat.latency_of(circuit.gates[p].kind)
            if v > best:
                best = v
        memo[k] = best
        return best

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, len(circuit.gates) * 2 + 100))
    try:
        return [start(k) for k in range(len(circuit.gates))]
    finally:
        sys.setrecursionlimit(old)
