"""Topology synthesis: switching networks, rings, factories, whole networks.

Switching networks come in three flavors.  Tree fans support fixed
internal-to-external wiring (used by the circuit-agnostic design).
Perfect bipartite and Clos networks are strict-sense non-blocking routers
between a component's ring-facing (internal) ports and its link-facing
(external) ports.  Builders keep the stage structure alongside the flat
node graph so the simulator can search ready entanglement-swapping paths
without rediscovering the hierarchy.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .circuit import LatencyTable
from .errors import InvalidDegree, NonBlockingViolation
from .graph import NodeGraph

INF = float("inf")


# ---------------------------------------------------------------------------
# node-count formulas


def tree_node_count(n: int, d: int) -> int:
    """Nodes for a tree with one root port and n leaf ports."""
    if d < 3:
        raise InvalidDegree(f"tree needs d >= 3, got {d}")
    if n < 1:
        raise ValueError("tree needs at least one leaf port")
    if n < d:
        return 1
    return math.ceil((n - 1) / (d - 2))


def bipartite_node_count(n_int: int, n_ext: int, d: int) -> int:
    """Nodes for a perfect bipartite network between n_int and n_ext ports."""
    if d < 3:
        raise InvalidDegree(f"bipartite needs d >= 3, got {d}")
    if n_int < 1 or n_ext < 1:
        raise ValueError("bipartite needs ports on both sides")
    if n_int + n_ext <= d:
        return 1
    return n_ext * tree_node_count(n_int, d) + n_int * tree_node_count(n_ext, d)


_clos_count_cache: dict[tuple[int, int, int, int, int], int] = {}


def clos_node_count(n_int: int, n_ext: int, d: int, s: int, t: int,
                    enforce_nonblocking: bool = True) -> int:
    """Nodes for a three-stage Clos network, counted by the recursive build.

    Middle switches recurse into smaller Clos networks until their port
    pair fits a base bipartite network.
    """
    if s < 2:
        raise ValueError("Clos needs s >= 2")
    if enforce_nonblocking and t < 2 * s - 1:
        raise NonBlockingViolation(f"t={t} < 2s-1={2 * s - 1}")
    if max(n_int, n_ext) <= s or n_int + n_ext <= d:
        # base case: a single switch covers all ports
        return bipartite_node_count(n_int, n_ext, d)
    key = (n_int, n_ext, d, s, t)
    hit = _clos_count_cache.get(key)
    if hit is not None:
        return hit
    n_left = math.ceil(n_int / s)
    n_right = math.ceil(n_ext / s)
    switch = bipartite_node_count(s, t, d)
    middle = clos_node_count(n_left, n_right, d, s, t, enforce_nonblocking)
    total = (n_left + n_right) * switch + t * middle
    _clos_count_cache[key] = total
    return total


def clos_closed_form(k: int, d: int, s: int, t: int) -> int:
    """Closed-form node count for a Clos network on s^k x s^k ports."""
    if k == 1:
        return bipartite_node_count(s, s, d)
    return (2 * s * (t ** (k - 1) - s ** (k - 1)) // (t - s)
            * bipartite_node_count(s, t, d)
            + t ** (k - 1) * bipartite_node_count(s, s, d))


def best_clos_parameters(n_int: int, n_ext: int, d: int,
                         s_max: int = 6) -> tuple[int, int, int]:
    """Sweep s (with t = 2s-1) and return (count, s, t) minimizing nodes."""
    best = None
    for s in range(2, s_max + 1):
        t = 2 * s - 1
        c = clos_node_count(n_int, n_ext, d, s, t)
        if best is None or c < best[0]:
            best = (c, s, t)
    return best


# ---------------------------------------------------------------------------
# switching structures


@dataclass
class TreeNet:
    """Caterpillar tree: node 0 carries the root port, leaves hang off the chain."""

    root_node: int
    nodes: list[int]
    leaf_hosts: list[int]
    leaf_paths: list[list[int]]  # chain edges from root to each leaf's host


def build_tree(g: NodeGraph, n: int, d: int, role: str = "tree",
               label: str = "", edge_cls: str = "switch") -> TreeNet:
    if d < 3:
        raise InvalidDegree(f"tree needs d >= 3, got {d}")
    if n < 1:
        raise ValueError("tree needs at least one leaf port")
    m = tree_node_count(n, d)
    nodes = [g.add_node(role, label) for _ in range(m)]
    chain: list[int] = []
    for k in range(m - 1):
        chain.append(g.add_edge(nodes[k], nodes[k + 1], edge_cls))
    # Leaf slots: every chain node keeps d-2 ports for leaves except the last,
    # which has no forward chain edge and offers d-1.
    hosts: list[int] = []
    paths: list[list[int]] = []
    if m == 1:
        hosts = [nodes[0]] * n
        paths = [[] for _ in range(n)]
    else:
        k = 0
        for idx in range(m):
            cap = (d - 2) if idx < m - 1 else (d - 1)
            for _ in range(cap):
                if k == n:
                    break
                hosts.append(nodes[idx])
                paths.append(chain[:idx])
                k += 1
        assert k == n, "tree capacity shortfall"
    return TreeNet(nodes[0], nodes, hosts, paths)


@dataclass
class SingleNodeSwitch:
    kind = "single"
    node: int

    def port_node(self, side: int, idx: int) -> int:
        return self.node

    def path(self, a: int, b: int) -> list[int]:
        return []


@dataclass
class BipartiteNet:
    """Perfect bipartite network; every (internal, external) path is unique."""

    kind = "bipartite"
    n_int: int
    n_ext: int
    int_trees: list[TreeNet]
    ext_trees: list[TreeNet]
    contact: list[list[int]]  # contact[i][e] = edge id

    def port_node(self, side: int, idx: int) -> int:
        tree = self.int_trees[idx] if side == 0 else self.ext_trees[idx]
        return tree.root_node

    def path(self, a: int, b: int) -> list[int]:
        return (self.int_trees[a].leaf_paths[b] + [self.contact[a][b]]
                + self.ext_trees[b].leaf_paths[a])


def build_bipartite(g: NodeGraph, n_int: int, n_ext: int, d: int,
                    label: str = "") -> SingleNodeSwitch | BipartiteNet:
    if d < 3:
        raise InvalidDegree(f"bipartite needs d >= 3, got {d}")
    if n_int < 1 or n_ext < 1:
        raise ValueError("bipartite needs ports on both sides")
    if n_int + n_ext <= d:
        return SingleNodeSwitch(g.add_node("switch", label))
    int_trees = [build_tree(g, n_ext, d, "switch", label) for _ in range(n_int)]
    ext_trees = [build_tree(g, n_int, d, "switch", label) for _ in range(n_ext)]
    contact = [[g.add_edge(int_trees[i].leaf_hosts[e], ext_trees[e].leaf_hosts[i],
                           "switch")
                for e in range(n_ext)] for i in range(n_int)]
    return BipartiteNet(n_int, n_ext, int_trees, ext_trees, contact)


@dataclass
class ReductionPlan:
    """Middle-switch budget per Clos level, produced by the coloring pass."""

    middles: int
    children: dict[int, "ReductionPlan"] = field(default_factory=dict)

    def to_doc(self):
        return {"middles": self.middles,
                "children": {str(k): v.to_doc() for k, v in sorted(self.children.items())}}

    @staticmethod
    def from_doc(doc) -> "ReductionPlan":
        return ReductionPlan(doc["middles"],
                             {int(k): ReductionPlan.from_doc(v)
                              for k, v in doc.get("children", {}).items()})


@dataclass
class ClosNet:
    """Three-stage Clos network with cyclic port wiring.

    Internal port p lands on left switch p mod L (slot p // L); external
    port q on right switch q mod R (slot q // R).  Middle switches may be
    single nodes, bipartite networks, or recursively smaller Clos networks.
    ``m_count`` middles are built (t unless a reduction plan trimmed them).
    """

    kind = "clos"
    s: int
    t: int
    m_count: int
    n_int: int
    n_ext: int
    left: list
    right: list
    middles: list
    chan_lm: list[list[int]]  # [left a][middle m] edge id
    chan_mr: list[list[int]]  # [middle m][right c] edge id
    last_used: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.last_used:
            self.last_used = [-1] * self.m_count

    @property
    def n_left(self) -> int:
        return len(self.left)

    @property
    def n_right(self) -> int:
        return len(self.right)

    def port_node(self, side: int, idx: int) -> int:
        if side == 0:
            return self.left[idx % self.n_left].port_node(0, idx // self.n_left)
        return self.right[idx % self.n_right].port_node(1, idx // self.n_right)

    def path(self, p: int, q: int) -> list[int]:
        """Some valid path, ignoring readiness (connectivity witness)."""
        ok, _, edges, _ = self.find_ready(p, q, INF, None, None)
        assert ok
        return edges

    def find_ready(self, p: int, q: int, now, ready_at, forced,
                   ) -> tuple[bool, float, list[int], tuple[int, ...]]:
        """Search a fully-ready path from internal port p to external port q.

        Middles are tried least-recently-consumed first (or only the forced
        assignment when the optimizer pinned one).  Returns
        ``(ok, ready_time, edges, middle_choice)``; when no candidate is
        ready at ``now``, ready_time is the earliest time one becomes ready.
        """
        a, ai = p % self.n_left, p // self.n_left
        c, ci = q % self.n_right, q // self.n_right
        if forced and forced[0] < self.m_count:
            order = [forced[0]]
        else:
            forced = None
            order = sorted(range(self.m_count), key=lambda m: (self.last_used[m], m))
        best: tuple[float, list[int], tuple[int, ...]] | None = None
        for m in order:
            edges = (self.left[a].path(ai, m) + [self.chan_lm[a][m]]
                     + [self.chan_mr[m][c]] + self.right[c].path(m, ci))
            mid = self.middles[m]
            inner_choice: tuple[int, ...] = ()
            if isinstance(mid, ClosNet):
                sub_forced = forced[1:] if forced is not None else None
                ok, t_in, in_edges, inner_choice = mid.find_ready(
                    a, c, now, ready_at, sub_forced)
                edges += in_edges
                ready = t_in
            else:
                edges += mid.path(a, c)
                ready = -1
            if ready_at is not None:
                for e in edges:
                    r = ready_at[e]
                    if r > ready:
                        ready = r
            else:
                ready = -1
            choice = (m,) + inner_choice
            if ready <= now:
                return True, ready, edges, choice
            if best is None or ready < best[0]:
                best = (ready, edges, choice)
        assert best is not None
        return False, best[0], best[1], best[2]

    def notify(self, choice: tuple[int, ...], time: int) -> None:
        m = choice[0]
        self.last_used[m] = time
        mid = self.middles[m]
        if isinstance(mid, ClosNet) and len(choice) > 1:
            mid.notify(choice[1:], time)


def _realize_switch(g: NodeGraph, a_ports: int, b_ports: int, d: int, label: str):
    if a_ports + b_ports <= d:
        return SingleNodeSwitch(g.add_node("switch", label))
    return build_bipartite(g, a_ports, b_ports, d, label)


def build_clos(g: NodeGraph, n_int: int, n_ext: int, d: int, s: int, t: int,
               label: str = "", plan: ReductionPlan | None = None,
               enforce_nonblocking: bool = True) -> ClosNet:
    """Build a Clos network; ``plan`` trims middle switches per level.

    ``enforce_nonblocking=False`` permits t < 2s-1 (for negative-control
    experiments on the online path assigner).
    """
    if s < 2:
        raise ValueError("Clos needs s >= 2")
    if enforce_nonblocking and t < 2 * s - 1:
        raise NonBlockingViolation(f"t={t} < 2s-1={2 * s - 1}")
    if max(n_int, n_ext) <= s or n_int + n_ext <= d:
        return build_bipartite(g, n_int, n_ext, d, label)
    m_count = t if plan is None else plan.middles
    if not (1 <= m_count <= t):
        raise ValueError(f"middle count {m_count} outside [1, {t}]")
    n_left = math.ceil(n_int / s)
    n_right = math.ceil(n_ext / s)
    left = [_realize_switch(g, s, m_count, d, label) for _ in range(n_left)]
    right = [_realize_switch(g, m_count, s, d, label) for _ in range(n_right)]
    middles = []
    for m in range(m_count):
        child = plan.children.get(m) if plan is not None else None
        mid = build_clos(g, n_left, n_right, d, s, t, label, plan=child,
                         enforce_nonblocking=enforce_nonblocking)
        if child is not None and not isinstance(mid, ClosNet):
            raise ValueError("reduction plan targets a non-Clos middle")
        middles.append(mid)
    chan_lm = [[g.add_edge(left[a].port_node(1, m), middles[m].port_node(0, a),
                           "switch")
                for m in range(m_count)] for a in range(n_left)]
    chan_mr = [[g.add_edge(middles[m].port_node(1, c), right[c].port_node(0, m),
                           "switch")
                for c in range(n_right)] for m in range(m_count)]
    return ClosNet(s, t, m_count, n_int, n_ext, left, right, middles,
                   chan_lm, chan_mr)


@dataclass
class TreeFanout:
    """Per-internal-port trees fanning out to one external port per target.

    The circuit-agnostic switching network: internal port k reaches external
    port (j, k) through its private tree, no non-blocking property needed
    because ring positions are synchronized.
    """

    kind = "fanout"
    n_int: int
    n_targets: int
    trees: list[TreeNet]

    @property
    def n_ext(self) -> int:
        return self.n_int * self.n_targets

    def port_node(self, side: int, idx: int) -> int:
        if side == 0:
            return self.trees[idx].root_node
        j, k = divmod(idx, self.n_int)
        return self.ext_node(j, k)

    def ext_node(self, target: int, k: int) -> int:
        return self.trees[k].leaf_hosts[target]

    def path(self, k: int, target: int) -> list[int]:
        return self.trees[k].leaf_paths[target]


# ---------------------------------------------------------------------------
# components and whole networks


@dataclass(frozen=True)
class NetworkParams:
    """Build-time parameters; latencies ride along for sizing formulas."""

    d: int = 3
    s: int = 2
    t: int = 3
    n_int_eq_n_ext: bool = True
    lat: LatencyTable = field(default_factory=LatencyTable)

    def __post_init__(self):
        if self.d < 3:
            raise InvalidDegree(f"need d >= 3 channels per node, got {self.d}")

    def to_doc(self):
        return {"d": self.d, "s": self.s, "t": self.t,
                "n_int_eq_n_ext": self.n_int_eq_n_ext,
                "t_bell": self.lat.t_bell, "t_local": self.lat.t_local,
                "t_magic": self.lat.t_magic, "p_magic": self.lat.p_magic}


def magic_leaf_count(lat: LatencyTable) -> int:
    """ceil(T_magic / (T_Bell * p_magic)): generators per factory port."""
    return max(1, math.ceil(Fraction(lat.t_magic)
                            / (Fraction(lat.t_bell) * Fraction(str(lat.p_magic)))))


def magic_refill_period(lat: LatencyTable) -> int:
    """ceil(T_magic / p_magic): deterministic-rate period of one generator."""
    return math.ceil(Fraction(lat.t_magic) / Fraction(str(lat.p_magic)))


@dataclass
class LinkConfig:
    """Number of QQ links per component pair and QF links per component."""

    n_alg: int
    m_qq: list[list[int]]
    m_qf: list[int]

    @staticmethod
    def zeros(n_alg: int) -> "LinkConfig":
        return LinkConfig(n_alg, [[0] * n_alg for _ in range(n_alg)], [0] * n_alg)

    def validate(self) -> None:
        for i in range(self.n_alg):
            if self.m_qq[i][i] != 0:
                raise ValueError("m_qq diagonal must be zero")
            if self.m_qf[i] < 0:
                raise ValueError("m_qf must be non-negative")
            for j in range(self.n_alg):
                if self.m_qq[i][j] < 0:
                    raise ValueError("m_qq must be non-negative")
                if self.m_qq[i][j] != self.m_qq[j][i]:
                    raise ValueError("m_qq must be symmetric")

    def n_ext(self, i: int) -> int:
        return self.m_qf[i] + sum(self.m_qq[i][j] for j in range(self.n_alg) if j != i)

    def copy(self) -> "LinkConfig":
        return LinkConfig(self.n_alg, [row[:] for row in self.m_qq], self.m_qf[:])

    def bump_qq(self, i: int, j: int) -> "LinkConfig":
        out = self.copy()
        out.m_qq[i][j] += 1
        out.m_qq[j][i] += 1
        return out

    def bump_qf(self, i: int) -> "LinkConfig":
        out = self.copy()
        out.m_qf[i] += 1
        return out

    def to_json(self) -> str:
        return json.dumps({"n_alg": self.n_alg, "m_qq": self.m_qq,
                           "m_qf": self.m_qf}, sort_keys=True,
                          separators=(",", ":"))

    @staticmethod
    def from_json(text: str) -> "LinkConfig":
        doc = json.loads(text)
        cfg = LinkConfig(doc["n_alg"], doc["m_qq"], doc["m_qf"])
        cfg.validate()
        return cfg

    def digest(self) -> str:
        return hashlib.sha1(self.to_json().encode()).hexdigest()[:12]


@dataclass
class QubitComponent:
    index: int
    n_ring: int
    n_int: int
    n_ext: int
    ring_nodes: list[int]
    ring_edges: list[int]          # teleport r -> (r+1) mod n_ring consumes edge r
    port_edges: list[int]          # internal port p -> ring<->switching edge id
    port_host: list[int]           # internal port p -> ring position
    consume_seq: list[int]         # port indices in rotation (consumption) order
    switching: object | None
    ext_targets: list[tuple]       # ('qq', j, m) | ('qf', m), index = ext port
    ext_index: dict[tuple, int]

    def ports_at(self, r: int) -> int:
        """Internal ports hosted by ring position r."""
        return sum(1 for h in self.port_host if h == r)


@dataclass
class FactoryPort:
    root_node: int
    gen_nodes: list[int]
    gen_paths: list[list[int]]  # edges root -> generator (inclusive)


@dataclass
class FactoryComponent:
    index: int
    n_leaf: int
    supply_period: float  # max(T_magic/(n_leaf p_magic), T_Bell), metadata
    ports: list[FactoryPort]


@dataclass
class NbqcNetwork:
    graph: NodeGraph
    params: NetworkParams
    mode: str                      # 'specific' | 'agnostic'
    links: LinkConfig
    components: list[QubitComponent]
    factories: list[FactoryComponent | None]
    qq_links: dict[tuple[int, int], list[int]]       # (i, j) i<j -> edge ids
    qq_link_ports: dict[tuple[int, int], list[tuple[int, int]]]
    qf_links: dict[int, list[int]]                   # i -> edge ids
    reductions: dict[int, ReductionPlan] = field(default_factory=dict)

    @property
    def n_alg(self) -> int:
        return len(self.components)

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    def component_nodes(self) -> dict[str, int]:
        tally: dict[str, int] = {}
        for lbl in self.graph.labels:
            tally[lbl] = tally.get(lbl, 0) + 1
        return dict(sorted(tally.items()))

    def to_manifest(self) -> dict:
        comps = []
        for c in self.components:
            sw = c.switching.kind if c.switching is not None else "none"
            comps.append({"index": c.index, "n_ring": c.n_ring, "n_int": c.n_int,
                          "n_ext": c.n_ext, "switching": sw})
        return {
            "mode": self.mode,
            "params": self.params.to_doc(),
            "links": {"n_alg": self.links.n_alg, "m_qq": self.links.m_qq,
                      "m_qf": self.links.m_qf},
            "components": comps,
            "factories": [
                None if f is None else {"index": f.index, "n_leaf": f.n_leaf,
                                        "ports": len(f.ports),
                                        "supply_period": f.supply_period}
                for f in self.factories],
            "reductions": {str(i): p.to_doc() for i, p in sorted(self.reductions.items())},
            "node_count": self.node_count,
            "nodes_by_component": self.component_nodes(),
        }


def build_ring(g: NodeGraph, n_ring: int, d: int, label: str = ""
               ) -> tuple[list[int], list[int]]:
    """Ring of n_ring nodes; returns (nodes, cycle edges in teleport order)."""
    if d < 3:
        raise InvalidDegree(f"ring needs d >= 3, got {d}")
    if n_ring < 1:
        raise ValueError("ring needs at least one node")
    nodes = [g.add_node("ring", label) for _ in range(n_ring)]
    edges: list[int] = []
    if n_ring >= 2:
        for r in range(n_ring):
            edges.append(g.add_edge(nodes[r], nodes[(r + 1) % n_ring], "ring"))
    return nodes, edges


def build_factory(g: NodeGraph, index: int, n_ext_ports: int, n_leaf: int,
                  d: int, lat: LatencyTable) -> FactoryComponent | None:
    """Factory component: one generator tree per external port."""
    if n_ext_ports == 0:
        return None
    label = f"F{index}"
    period = max(lat.t_magic / (n_leaf * lat.p_magic), float(lat.t_bell))
    ports: list[FactoryPort] = []
    for _ in range(n_ext_ports):
        if n_leaf == 1:
            gen = g.add_node("generator", label)
            ports.append(FactoryPort(gen, [gen], [[]]))
        elif n_leaf <= d - 1:
            root = g.add_node("tree", label)
            gens, paths = [], []
            for _ in range(n_leaf):
                gen = g.add_node("generator", label)
                e = g.add_edge(root, gen, "factory")
                gens.append(gen)
                paths.append([e])
            ports.append(FactoryPort(root, gens, paths))
        else:
            tree = build_tree(g, n_leaf, d, "tree", label, edge_cls="factory")
            gens, paths = [], []
            for leaf in range(n_leaf):
                gen = g.add_node("generator", label)
                e = g.add_edge(tree.leaf_hosts[leaf], gen, "factory")
                gens.append(gen)
                paths.append(tree.leaf_paths[leaf] + [e])
            ports.append(FactoryPort(tree.root_node, gens, paths))
    return FactoryComponent(index, n_leaf, period, ports)


def _ring_plan(n_int: int, d: int) -> tuple[int, list[int], list[int]]:
    """(n_ring, port hosts, consumption order) for n_int internal ports.

    Ports are dealt round-robin from ring position 0; the qubit consumes
    node by node as it travels the ring.
    """
    n_ring = max(1, math.ceil(n_int / (d - 2)))
    hosts = [p % n_ring for p in range(n_int)]
    order: list[int] = []
    for r in range(n_ring):
        order.extend(p for p in range(n_int) if hosts[p] == r)
    return n_ring, hosts, order


def _build_qubit_component(g: NodeGraph, i: int, n_int: int, n_ext: int,
                           params: NetworkParams, ext_targets: list[tuple],
                           plan: ReductionPlan | None) -> QubitComponent:
    label = f"Q{i}"
    d = params.d
    if n_ext == 0:
        nodes, edges = build_ring(g, 1, d, label)
        return QubitComponent(i, 1, 0, 0, nodes, edges, [], [], [], None, [], {})
    n_ring, hosts, order = _ring_plan(n_int, d)
    ring_nodes, ring_edges = build_ring(g, n_ring, d, label)

    bip_cost = bipartite_node_count(n_int, n_ext, d)
    clos_cost, s_best, t_best = best_clos_parameters(n_int, n_ext, d)
    if bip_cost <= clos_cost:
        switching = build_bipartite(g, n_int, n_ext, d, label)
    else:
        switching = build_clos(g, n_int, n_ext, d, s_best, t_best, label,
                               plan=plan)

    port_edges = [g.add_edge(ring_nodes[hosts[p]], switching.port_node(0, p), "port")
                  for p in range(n_int)]
    ext_index = {t: q for q, t in enumerate(ext_targets)}
    return QubitComponent(i, n_ring, n_int, n_ext, ring_nodes, ring_edges,
                          port_edges, hosts, order, switching, ext_targets,
                          ext_index)


def _ext_node(comp: QubitComponent, q: int) -> int:
    return comp.switching.port_node(1, q)


def build_circuit_specific(links: LinkConfig, params: NetworkParams,
                           reductions: dict[int, ReductionPlan] | None = None,
                           ) -> NbqcNetwork:
    """Construct a circuit-specific network from per-link budgets.

    Per component: n_ext from the link counts, n_int = n_ext (or capped at
    T_Bell/T_local when the evaluation simplification is off), ring length
    ceil(n_int/(d-2)), and the node-cheaper of bipartite vs Clos switching.
    """
    links.validate()
    reductions = reductions or {}
    lat = params.lat
    g = NodeGraph(params.d)
    n_alg = links.n_alg
    cap = lat.t_bell // lat.t_local

    components: list[QubitComponent] = []
    for i in range(n_alg):
        n_ext = links.n_ext(i)
        n_int = n_ext if params.n_int_eq_n_ext else min(n_ext, cap)
        targets = [("qq", j, m)
                   for j in range(n_alg) if j != i and links.m_qq[i][j] > 0
                   for m in range(links.m_qq[i][j])]
        targets += [("qf", m) for m in range(links.m_qf[i])]
        components.append(_build_qubit_component(
            g, i, n_int, n_ext, params, targets, reductions.get(i)))

    n_leaf = magic_leaf_count(lat)
    factories = [build_factory(g, i, links.m_qf[i], n_leaf, params.d, lat)
                 for i in range(n_alg)]

    qq_links: dict[tuple[int, int], list[int]] = {}
    qq_ports: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i in range(n_alg):
        for j in range(i + 1, n_alg):
            m_ij = links.m_qq[i][j]
            if m_ij == 0:
                continue
            edges, ports = [], []
            for m in range(m_ij):
                qi = components[i].ext_index[("qq", j, m)]
                qj = components[j].ext_index[("qq", i, m)]
                edges.append(g.add_edge(_ext_node(components[i], qi),
                                        _ext_node(components[j], qj), "link_qq"))
                ports.append((qi, qj))
            qq_links[(i, j)] = edges
            qq_ports[(i, j)] = ports

    qf_links: dict[int, list[int]] = {}
    for i in range(n_alg):
        if links.m_qf[i] == 0:
            continue
        edges = []
        for m in range(links.m_qf[i]):
            qi = components[i].ext_index[("qf", m)]
            edges.append(g.add_edge(_ext_node(components[i], qi),
                                    factories[i].ports[m].root_node, "link_qf"))
        qf_links[i] = edges

    g.check_degrees()
    return NbqcNetwork(g, params, "specific", links, components, factories,
                       qq_links, qq_ports, qf_links, dict(reductions))


def build_circuit_agnostic(n_alg: int, params: NetworkParams) -> NbqcNetwork:
    """Construct the circuit-agnostic network.

    Every component shares the ring length ceil(T_Bell/((d-1) T_local));
    each internal port fans out through a private tree to one external port
    per target component (the position-i slot goes to the factory).
    """
    lat = params.lat
    d = params.d
    g = NodeGraph(d)
    n_ring = math.ceil(lat.t_bell / ((d - 1) * lat.t_local))
    n_int = n_ring * (d - 2)

    m_qq = [[0 if i == j else n_int for j in range(n_alg)] for i in range(n_alg)]
    links = LinkConfig(n_alg, m_qq, [n_int] * n_alg)

    components: list[QubitComponent] = []
    for i in range(n_alg):
        label = f"Q{i}"
        ring_nodes, ring_edges = build_ring(g, n_ring, d, label)
        trees = [build_tree(g, n_alg, d, "switch", label) for _ in range(n_int)]
        fan = TreeFanout(n_int, n_alg, trees)
        hosts = [p % n_ring for p in range(n_int)]
        order: list[int] = []
        for r in range(n_ring):
            order.extend(p for p in range(n_int) if hosts[p] == r)
        port_edges = [g.add_edge(ring_nodes[hosts[p]], trees[p].root_node, "port")
                      for p in range(n_int)]
        targets = [("qq", j, m) if j != i else ("qf", m)
                   for j in range(n_alg) for m in range(n_int)]
        ext_index = {t: q for q, t in enumerate(targets)}
        components.append(QubitComponent(i, n_ring, n_int, n_int * n_alg,
                                         ring_nodes, ring_edges, port_edges,
                                         hosts, order, fan, targets, ext_index))

    n_leaf = magic_leaf_count(lat)
    factories = [build_factory(g, i, n_int, n_leaf, d, lat) for i in range(n_alg)]

    qq_links: dict[tuple[int, int], list[int]] = {}
    qq_ports: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i in range(n_alg):
        for j in range(i + 1, n_alg):
            edges, ports = [], []
            for k in range(n_int):
                ni = components[i].switching.ext_node(j, k)
                nj = components[j].switching.ext_node(i, k)
                edges.append(g.add_edge(ni, nj, "link_qq"))
                ports.append((components[i].ext_index[("qq", j, k)],
                              components[j].ext_index[("qq", i, k)]))
            qq_links[(i, j)] = edges
            qq_ports[(i, j)] = ports

    qf_links: dict[int, list[int]] = {}
    for i in range(n_alg):
        edges = []
        for k in range(n_int):
            ni = components[i].switching.ext_node(i, k)
            edges.append(g.add_edge(ni, factories[i].ports[k].root_node, "link_qf"))
        qf_links[i] = edges

    g.check_degrees()
    return NbqcNetwork(g, params, "agnostic", links, components, factories,
                       qq_links, qq_ports, qf_links)


# ---------------------------------------------------------------------------
# pure node-count estimates (no graph construction), used by the optimizer


def factory_port_node_count(n_leaf: int, d: int) -> int:
    if n_leaf == 1:
        return 1
    if n_leaf <= d - 1:
        return 1 + n_leaf
    return tree_node_count(n_leaf, d) + n_leaf


def component_node_count(n_ext: int, params: NetworkParams) -> int:
    """Unreduced node count of one qubit component with n_ext external ports."""
    if n_ext == 0:
        return 1
    lat = params.lat
    n_int = n_ext if params.n_int_eq_n_ext else min(n_ext, lat.t_bell // lat.t_local)
    n_ring = max(1, math.ceil(n_int / (params.d - 2)))
    switching = min(bipartite_node_count(n_int, n_ext, params.d),
                    best_clos_parameters(n_int, n_ext, params.d)[0])
    return n_ring + switching


def network_node_count(links: LinkConfig, params: NetworkParams) -> int:
    """Unreduced node count of the whole circuit-specific network."""
    n_leaf = magic_leaf_count(params.lat)
    total = 0
    for i in range(links.n_alg):
        total += component_node_count(links.n_ext(i), params)
        total += links.m_qf[i] * factory_port_node_count(n_leaf, params.d)
    return total
