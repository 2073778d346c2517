"""Degree-bounded node graph with explicit channel ports.

Every node models a small fault-tolerant module exposing at most ``d``
quantum channels; every edge is one channel pair holding (at runtime) a
single distilled Bell pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidDegree


@dataclass
class NodeGraph:
    d: int
    roles: list[str] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)      # component tag per node
    ports_used: list[int] = field(default_factory=list)
    edges: list[tuple[int, int, int, int]] = field(default_factory=list)  # u, pu, v, pv
    edge_class: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.d < 3:
            raise InvalidDegree(f"need d >= 3 channels per node, got {self.d}")

    @property
    def node_count(self) -> int:
        return len(self.roles)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def add_node(self, role: str, label: str = "") -> int:
        self.roles.append(role)
        self.labels.append(label)
        self.ports_used.append(0)
        return len(self.roles) - 1

    def add_edge(self, u: int, v: int, cls: str) -> int:
        if u == v:
            raise ValueError("self-loop channel")
        pu, pv = self.ports_used[u], self.ports_used[v]
        if pu >= self.d or pv >= self.d:
            raise InvalidDegree(
                f"node {u if pu >= self.d else v} exceeds {self.d} channels")
        self.ports_used[u] = pu + 1
        self.ports_used[v] = pv + 1
        self.edges.append((u, pu, v, pv))
        self.edge_class.append(cls)
        return len(self.edges) - 1

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per-node list of (neighbor, edge_id)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.node_count)]
        for eid, (u, _, v, _) in enumerate(self.edges):
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        return adj

    def check_degrees(self) -> None:
        """Assert no node uses more than d ports (builder postcondition)."""
        for n, used in enumerate(self.ports_used):
            if used > self.d:
                raise InvalidDegree(f"node {n} uses {used} > {self.d} ports")

    def connected_within(self, nodes: list[int]) -> bool:
        """True if the induced subgraph on ``nodes`` is connected."""
        if not nodes:
            return True
        member = set(nodes)
        adj = self.adjacency()
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if v in member and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(member)


_DOT_SHAPE = {
    "ring": "circle",
    "switch": "box",
    "tree": "triangle",
    "generator": "diamond",
    "buffer": "hexagon",
}


def to_dot(g: NodeGraph, name: str = "nbqc") -> str:
    """Graphviz export; component labels become clusters, roles become shapes."""
    by_label: dict[str, list[int]] = {}
    for n in range(g.node_count):
        by_label.setdefault(g.labels[n], []).append(n)
    out = [f"graph {name} {{", "  node [width=0.3, fixedsize=true];"]
    for label in sorted(by_label):
        nodes = by_label[label]
        indent = "  "
        if label:
            out.append(f'  subgraph "cluster_{label}" {{')
            out.append(f'    label="{label}";')
            indent = "    "
        for n in nodes:
            shape = _DOT_SHAPE.get(g.roles[n], "circle")
            out.append(f'{indent}n{n} [shape={shape}];')
        if label:
            out.append("  }")
    for eid, (u, _, v, _) in enumerate(g.edges):
        out.append(f'  n{u} -- n{v} [class="{g.edge_class[eid]}"];')
    out.append("}")
    return "\n".join(out) + "\n"
