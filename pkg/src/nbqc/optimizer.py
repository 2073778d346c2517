"""Network optimization: Clos middle-switch reduction and link-budget search.

The loop starts from the minimal one-link-per-used-pair configuration and
greedily buys the link increment with the best wait-reduction per extra
node, recording a (node count, execution time) point per iteration.
Middle-switch reduction converts path assignment into vertex coloring of a
conflict graph over remote operations; a reduction is applied only when a
verification simulation shows the execution time is unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .circuit import IdealTimeline, LogicalCircuit, GateKind, TWO_QUBIT_KINDS
from .errors import BudgetTooSmall
from .simulator import SimConfig, SimReport, simulate
from .topology import (ClosNet, LinkConfig, NbqcNetwork, NetworkParams,
                       ReductionPlan, build_circuit_specific,
                       network_node_count)


def init_links(circuit: LogicalCircuit) -> LinkConfig:
    """One QQ link per gate-connected pair, one QF link per magic consumer."""
    cfg = LinkConfig.zeros(circuit.n_alg)
    for g in circuit.gates:
        if g.kind in TWO_QUBIT_KINDS:
            a, b = g.qubits
            cfg.m_qq[a][b] = 1
            cfg.m_qq[b][a] = 1
        elif g.kind is GateKind.T_VIA_MAGIC:
            cfg.m_qf[g.qubits[0]] = 1
    return cfg


def cyclic_port_map(n_int: int, n_ext: int, s: int) -> tuple[list[int], list[int]]:
    """Cyclic wiring of ports to outer-stage switches.

    Internal port p sits on left switch p mod ceil(n_int/s); external port q
    on right switch q mod ceil(n_ext/s).
    """
    n_left = math.ceil(n_int / s)
    n_right = math.ceil(n_ext / s)
    return ([p % n_left for p in range(n_int)],
            [q % n_right for q in range(n_ext)])


def component_request_schedule(timeline: IdealTimeline, net: NbqcNetwork,
                               i: int) -> list[tuple[int, int, int, int]]:
    """Per remote op on component i: (op index, ideal start, port p, ext port q).

    Replays the deterministic rotation and round-robin link assignment the
    simulator uses, so the derived switch usage matches execution exactly in
    the bottleneck-free regime.
    """
    comp = net.components[i]
    links = net.links
    k_port = 0
    pair_cnt: dict[int, int] = {}
    qf_cnt = 0
    out: list[tuple[int, int, int, int]] = []
    for ins in timeline.instructions:
        if ins.event_class == "qq" and i in ins.qubits:
            j = ins.qubits[0] if ins.qubits[1] == i else ins.qubits[1]
            m = pair_cnt.get(j, 0)
            pair_cnt[j] = m + 1
            q = comp.ext_index[("qq", j, m % links.m_qq[i][j])]
        elif ins.event_class == "qf" and ins.qubits[0] == i:
            q = comp.ext_index[("qf", qf_cnt % links.m_qf[i])]
            qf_cnt += 1
        else:
            continue
        p = comp.consume_seq[k_port % comp.n_int]
        k_port += 1
        out.append((ins.index, ins.start, p, q))
    return out


@dataclass
class ConflictGraph:
    """Remote ops on one component; edges join pairs that would contend for
    a middle switch if assigned the same one."""

    n: int
    adj: list[list[int]]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)


def build_conflict_graph(times: list[int], a_idx: list[int], c_idx: list[int],
                         t_bell: int) -> ConflictGraph:
    """Edge between ops k, l iff |t_l - t_k| < T_Bell and they share a left
    or right switch."""
    n = len(times)
    adj: list[list[int]] = [[] for _ in range(n)]
    lo = 0
    for l in range(n):
        while times[l] - times[lo] >= t_bell:
            lo += 1
        for k in range(lo, l):
            if a_idx[k] == a_idx[l] or c_idx[k] == c_idx[l]:
                adj[k].append(l)
                adj[l].append(k)
    return ConflictGraph(n, adj)


def color_welsh_powell(graph: ConflictGraph) -> list[int]:
    """Greedy coloring, highest degree first; uses at most max_degree+1 colors."""
    order = sorted(range(graph.n), key=lambda v: (-len(graph.adj[v]), v))
    colors = [-1] * graph.n
    for v in order:
        used = {colors[u] for u in graph.adj[v] if colors[u] >= 0}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    return colors


def _plan_for_clos(clos: ClosNet, reqs: list[tuple[int, int, int]], t_bell: int,
                   ) -> tuple[ReductionPlan | None, list[tuple[int, ...]] | None]:
    """Reduction plan and per-op middle assignment for one Clos level.

    ``reqs`` holds (ideal time, entry port, exit port) at this level's port
    granularity.  Returns (None, None) when coloring cannot beat the current
    middle count.
    """
    n = len(reqs)
    if n == 0:
        return ReductionPlan(1, {}), []
    a = [p % clos.n_left for (_, p, _) in reqs]
    c = [q % clos.n_right for (_, _, q) in reqs]
    graph = build_conflict_graph([t for (t, _, _) in reqs], a, c, t_bell)
    colors = color_welsh_powell(graph)
    r = max(colors) + 1
    if r >= clos.m_count:
        return None, None
    assign: list[tuple[int, ...]] = [(colors[k],) for k in range(n)]
    children: dict[int, ReductionPlan] = {}
    for m in range(r):
        mid = clos.middles[m]
        if not isinstance(mid, ClosNet):
            continue
        sub = [k for k in range(n) if colors[k] == m]
        child, sub_assign = _plan_for_clos(
            mid, [(reqs[k][0], a[k], c[k]) for k in sub], t_bell)
        if child is not None:
            children[m] = child
            for k, tail in zip(sub, sub_assign):
                assign[k] = (colors[k],) + tail
    return ReductionPlan(r, children), assign


def clos_optimize(net: NbqcNetwork, circuit: LogicalCircuit,
                  timeline: IdealTimeline, cfg: SimConfig,
                  ) -> tuple[NbqcNetwork, SimConfig, SimReport, SimReport]:
    """Trim Clos middle stages without changing the simulated total time.

    Reassigns each remote op a middle switch by conflict-graph coloring,
    rebuilds the network with the surviving middles, and keeps the
    reduction only if a verification run reproduces the unreduced total
    time exactly (falling back component by component otherwise).

    Returns (network, sim config, its report, unreduced baseline report).
    """
    base_cfg = replace(cfg, path_policy="lru", middle_assignment=None)
    base_report = simulate(net, circuit, base_cfg)
    t_bell = net.params.lat.t_bell

    plans: dict[int, ReductionPlan] = {}
    assigns: dict[int, list[tuple[int, ...]]] = {}
    for comp in net.components:
        if not isinstance(comp.switching, ClosNet):
            continue
        sched = component_request_schedule(timeline, net, comp.index)
        reqs = [(t, p, q) for (_, t, p, q) in sched]
        plan, assign = _plan_for_clos(comp.switching, reqs, t_bell)
        if plan is not None:
            plans[comp.index] = plan
            assigns[comp.index] = assign
    if not plans:
        return net, base_cfg, base_report, base_report

    def attempt(selected: dict[int, ReductionPlan]):
        red = build_circuit_specific(net.links, net.params, selected)
        sim_cfg = replace(cfg, path_policy="colored",
                          middle_assignment={i: assigns[i] for i in selected})
        return red, sim_cfg, simulate(red, circuit, sim_cfg)

    red, sim_cfg, rep = attempt(plans)
    if rep.total_time == base_report.total_time:
        return red, sim_cfg, rep, base_report

    kept: dict[int, ReductionPlan] = {}
    for i in sorted(plans):
        trial = dict(kept)
        trial[i] = plans[i]
        _, _, rep_t = attempt(trial)
        if rep_t.total_time == base_report.total_time:
            kept = trial
    if not kept:
        return net, base_cfg, base_report, base_report
    red, sim_cfg, rep = attempt(kept)
    return red, sim_cfg, rep, base_report


@dataclass
class WaitLedger:
    qq: dict[tuple[int, int], list[tuple[int, int]]] = field(default_factory=dict)
    qf: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return (sum(w for lst in self.qq.values() for _, w in lst)
                + sum(w for lst in self.qf.values() for _, w in lst))


def identify_bottlenecks(report: SimReport) -> WaitLedger:
    """Aggregate the simulator's per-event waits into per-link ledgers."""
    ledger = WaitLedger()
    for key, lst in report.qq_waits.items():
        pos = [(k, w) for (k, w) in lst if w > 0]
        if pos:
            ledger.qq[key] = pos
    for i, lst in report.qf_waits.items():
        pos = [(k, w) for (k, w) in lst if w > 0]
        if pos:
            ledger.qf[i] = pos
    return ledger


def update_config(links: LinkConfig, ledger: WaitLedger,
                  params: NetworkParams) -> LinkConfig | None:
    """Greedy link increment maximizing wait improvement per extra node.

    Per candidate, each event's improvement is capped by the effective Bell
    latency gain T_Bell (1/M - 1/(M+1)); the extra node count is measured by
    reconstructing (counting) the network with the increment.  Returns None
    when no increment can improve anything.
    """
    t_bell = params.lat.t_bell
    base_nodes = network_node_count(links, params)
    cands: list[tuple[Fraction, int, int, int, int, LinkConfig]] = []
    for (i, j) in sorted(ledger.qq):
        m = links.m_qq[i][j]
        cap = Fraction(t_bell, m) - Fraction(t_bell, m + 1)
        gain = sum(min(Fraction(w), cap) for _, w in ledger.qq[(i, j)])
        if gain <= 0:
            continue
        bumped = links.bump_qq(i, j)
        dn = max(1, network_node_count(bumped, params) - base_nodes)
        cands.append((gain / dn, dn, 0, i, j, bumped))
    for i in sorted(ledger.qf):
        m = links.m_qf[i]
        cap = Fraction(t_bell, m) - Fraction(t_bell, m + 1)
        gain = sum(min(Fraction(w), cap) for _, w in ledger.qf[i])
        if gain <= 0:
            continue
        bumped = links.bump_qf(i)
        dn = max(1, network_node_count(bumped, params) - base_nodes)
        cands.append((gain / dn, dn, 1, i, -1, bumped))
    if not cands:
        return None
    cands.sort(key=lambda c: (-c[0], c[1], c[2], c[3], c[4]))
    return cands[0][5]


@dataclass
class ParetoPoint:
    links: LinkConfig
    nodes: int
    time: int
    iteration: int


def frontier_csv(points: list[ParetoPoint]) -> str:
    lines = ["nodes,time_units,iteration,config_hash"]
    lines += [f"{p.nodes},{p.time},{p.iteration},{p.links.digest()}"
              for p in points]
    return "\n".join(lines) + "\n"


def frontier_json(points: list[ParetoPoint]) -> str:
    doc = [{"nodes": p.nodes, "time_units": p.time, "iteration": p.iteration,
            "config_hash": p.links.digest(),
            "links": {"n_alg": p.links.n_alg, "m_qq": p.links.m_qq,
                      "m_qf": p.links.m_qf}}
           for p in points]
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def pareto_filter(points: list[ParetoPoint]) -> list[ParetoPoint]:
    """Non-dominated subset, sorted by node count (time strictly decreasing)."""
    out: list[ParetoPoint] = []
    for p in sorted(points, key=lambda q: (q.nodes, q.time, q.iteration)):
        if not out or p.time < out[-1].time:
            out.append(p)
    return out


def optimize_loop(circuit: LogicalCircuit, timeline: IdealTimeline,
                  params: NetworkParams, node_budget: int | None = None,
                  cfg: SimConfig | None = None, max_iter: int = 500,
                  clos_opt: bool = True) -> list[ParetoPoint]:
    """Build -> reduce -> simulate -> identify -> update until no bottleneck
    remains, the next design would blow the node budget, or the iteration
    cap is reached.  Returns the non-dominated frontier."""
    cfg = cfg or SimConfig()
    links = init_links(circuit)
    points: list[ParetoPoint] = []
    for it in range(max_iter):
        net = build_circuit_specific(links, params)
        if clos_opt:
            net, _, report, _ = clos_optimize(net, circuit, timeline, cfg)
        else:
            report = simulate(net, circuit,
                              replace(cfg, path_policy="lru",
                                      middle_assignment=None))
        if node_budget is not None and net.node_count > node_budget:
            if not points:
                raise BudgetTooSmall(
                    f"minimal network needs {net.node_count} > {node_budget} nodes")
            break
        points.append(ParetoPoint(links.copy(), net.node_count,
                                  report.total_time, it))
        ledger = identify_bottlenecks(report)
        nxt = update_config(links, ledger, params)
        if nxt is None:
            break
        links = nxt
    return pareto_filter(points)
