"""Timing-level discrete-event simulation of a circuit on an NBQC network.

Per remote operation the engine charges one entanglement-swap step
(T_local, consuming every Bell pair along the chosen path) followed by the
operation's own latency.  Ring teleports move the qubit after its node's
switching-facing pairs are exhausted; they occupy the qubit for T_local but
overlap with the repeater-local swap phase of subsequent operations.
Everything is integer arithmetic and deterministic given the seed.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .circuit import (GateKind, IdealTimeline, LogicalCircuit, TWO_QUBIT_KINDS)
from .errors import Unroutable
from .graph import NodeGraph
from .topology import ClosNet, NbqcNetwork, magic_refill_period

INF = float("inf")

# Wait-cause labels, mirroring the four execution-time overhead classes:
# ring starvation, switching contention, factory supply, link regeneration.
CAUSE_RING = "ring"
CAUSE_SWITCH = "switching"
CAUSE_FACTORY = "factory"
CAUSE_LINK = "link"

_EDGE_CAUSE = {
    "port": CAUSE_RING,
    "ring": CAUSE_RING,
    "switch": CAUSE_SWITCH,
    "factory": CAUSE_FACTORY,
    "link_qq": CAUSE_LINK,
    "link_qf": CAUSE_LINK,
}
_CAUSE_PRIORITY = {CAUSE_LINK: 0, CAUSE_SWITCH: 1, CAUSE_RING: 2, CAUSE_FACTORY: 3}


@dataclass
class SimConfig:
    seed: int = 0
    magic_mode: str = "deterministic"   # 'deterministic' | 'stochastic'
    path_policy: str = "lru"            # 'lru' | 'colored'
    middle_assignment: dict[int, list[tuple[int, ...] | None]] | None = None
    trace: bool = False


@dataclass
class SimReport:
    total_time: int
    qq_waits: dict[tuple[int, int], list[tuple[int, int]]]
    qf_waits: dict[int, list[tuple[int, int]]]
    wait_causes: dict[str, int]
    edge_consumptions: dict[str, int]          # per edge class
    edge_utilization: dict[int, int]           # per edge id, nonzero only
    teleports: list[int]
    ring_stall: int
    trace: list[str] | None = None

    @property
    def total_wait(self) -> int:
        return (sum(w for lst in self.qq_waits.values() for _, w in lst)
                + sum(w for lst in self.qf_waits.values() for _, w in lst))

    @property
    def zero_wait(self) -> bool:
        return self.total_wait == 0

    def to_json(self) -> str:
        doc = {
            "total_time": self.total_time,
            "total_wait": self.total_wait,
            "qq_waits": {f"{i},{j}": lst for (i, j), lst in sorted(self.qq_waits.items())},
            "qf_waits": {str(i): lst for i, lst in sorted(self.qf_waits.items())},
            "wait_causes": dict(sorted(self.wait_causes.items())),
            "edge_consumptions": dict(sorted(self.edge_consumptions.items())),
            "edge_utilization": {str(k): v
                                 for k, v in sorted(self.edge_utilization.items())},
            "teleports": self.teleports,
            "ring_stall": self.ring_stall,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def estimate_ideal_floor(timeline: IdealTimeline, lat) -> int:
    """T_Bell + D: startup plus algorithmic execution time."""
    return lat.t_bell + timeline.depth


class _MagicPool:
    """Per-generator magic-state availability.

    Deterministic-rate mode staggers the first success of the n_leaf
    generators across one aggregate period and refills each generator
    ceil(T_magic/p_magic) after consumption, realizing the average supply
    rate exactly.  Stochastic mode samples geometric attempt counts.
    """

    def __init__(self, net: NbqcNetwork, cfg: SimConfig):
        lat = net.params.lat
        self.t_magic = lat.t_magic
        self.period = magic_refill_period(lat)
        self.stochastic = cfg.magic_mode == "stochastic"
        if cfg.magic_mode not in ("deterministic", "stochastic"):
            raise ValueError(f"unknown magic mode '{cfg.magic_mode}'")
        self.ready: dict[tuple[int, int], list[int]] = {}
        self.rngs: dict[tuple[int, int, int], random.Random] = {}
        for fac in net.factories:
            if fac is None:
                continue
            for m, port in enumerate(fac.ports):
                n_leaf = len(port.gen_nodes)
                times = []
                for g in range(n_leaf):
                    if self.stochastic:
                        rng = random.Random(
                            (cfg.seed << 24) ^ (fac.index * 2654435761
                                                + m * 40503 + g * 2246822519) & 0xFFFFFFFF)
                        self.rngs[(fac.index, m, g)] = rng
                        times.append(self.draw_attempts(rng, lat.p_magic)
                                     * self.t_magic)
                    else:
                        times.append(-(-(g + 1) * self.period // n_leaf))
                self.ready[(fac.index, m)] = times

    def draw_attempts(self, rng: random.Random, p_magic: float) -> int:
        u = rng.random()
        if u >= 1.0:
            u = 0.999999999
        return int(math.floor(math.log(1.0 - u) / math.log(1.0 - p_magic))) + 1

    def consume(self, fac_idx: int, m: int, g: int, time: int, p_magic: float) -> None:
        if self.stochastic:
            rng = self.rngs[(fac_idx, m, g)]
            self.ready[(fac_idx, m)][g] = time + self.draw_attempts(rng, p_magic) * self.t_magic
        else:
            self.ready[(fac_idx, m)][g] = time + self.period


def _reset_routing_state(net: NbqcNetwork) -> None:
    for comp in net.components:
        sw = comp.switching
        if isinstance(sw, ClosNet):
            _reset_clos(sw)


def _reset_clos(clos: ClosNet) -> None:
    clos.last_used = [-1] * clos.m_count
    for mid in clos.middles:
        if isinstance(mid, ClosNet):
            _reset_clos(mid)


def _switch_ready(sw, p: int, q: int, now, ready_at, forced):
    """(ok, ready_time, edges, middle_choice) for a switching traversal."""
    if isinstance(sw, ClosNet):
        return sw.find_ready(p, q, now, ready_at, forced)
    edges = sw.path(p, q) if sw is not None else []
    t = -1
    for e in edges:
        r = ready_at[e]
        if r > t:
            t = r
    return t <= now, t, edges, ()


class _Engine:
    def __init__(self, net: NbqcNetwork, circuit: LogicalCircuit, cfg: SimConfig):
        if not circuit.lowered:
            raise ValueError("simulate requires a lowered circuit")
        if circuit.n_alg > net.n_alg:
            raise ValueError(
                f"network has {net.n_alg} components, circuit needs {circuit.n_alg}")
        self.net = net
        self.circuit = circuit
        self.cfg = cfg
        self.lat = net.params.lat
        self.g: NodeGraph = net.graph
        n_edges = self.g.edge_count
        self.ready = [self.lat.t_bell] * n_edges
        self.last_used = [-1] * n_edges
        self.consumed = [0] * n_edges
        self.avail = [0] * net.n_alg          # logical availability per qubit
        self.tp_done = [0] * net.n_alg        # teleport completion per qubit
        self.k_port = [0] * net.n_alg         # rotation counter per component
        self.teleports = [0] * net.n_alg
        self.pair_count: dict[tuple[int, int], int] = {}
        self.qf_count: dict[int, int] = {}
        self.comp_ops: list[int] = [0] * net.n_alg
        self.magic = _MagicPool(net, cfg)
        self.qq_waits: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self.qf_waits: dict[int, list[tuple[int, int]]] = {}
        self.causes: dict[str, int] = {}
        self.ring_stall = 0
        self.trace: list[str] | None = [] if cfg.trace else None
        self.t_end = 0
        _reset_routing_state(net)

    # -- helpers ----------------------------------------------------------

    def _consume(self, eid: int, time: int) -> None:
        self.ready[eid] = time + self.lat.t_bell
        self.last_used[eid] = time
        self.consumed[eid] += 1

    def _forced_middles(self, comp_idx: int):
        if self.cfg.path_policy != "colored" or self.cfg.middle_assignment is None:
            return None
        lst = self.cfg.middle_assignment.get(comp_idx)
        if lst is None:
            return None
        k = self.comp_ops[comp_idx]
        if k >= len(lst):
            return None
        return lst[k]

    def _port_of(self, comp_idx: int):
        comp = self.net.components[comp_idx]
        if comp.n_int == 0:
            raise Unroutable(-1, f"component {comp_idx} has no internal ports")
        return comp.consume_seq[self.k_port[comp_idx] % comp.n_int]

    def _advance_rotation(self, comp_idx: int, op_end: int) -> None:
        """Count the port consumption; teleport when the node is exhausted."""
        comp = self.net.components[comp_idx]
        k = self.k_port[comp_idx]
        sp = comp.consume_seq[k % comp.n_int]
        self.k_port[comp_idx] = k + 1
        if comp.n_ring < 2:
            return
        np_ = comp.consume_seq[(k + 1) % comp.n_int]
        if comp.port_host[np_] == comp.port_host[sp]:
            return
        ring_edge = comp.ring_edges[comp.port_host[sp]]
        begin = op_end
        r = self.ready[ring_edge]
        if r > begin:
            self.ring_stall += r - begin
            begin = r
        self._consume(ring_edge, begin)
        self.tp_done[comp_idx] = begin + self.lat.t_local
        self.teleports[comp_idx] += 1
        if self.trace is not None:
            self.trace.append(f"t={begin} teleport comp={comp_idx} "
                              f"from={comp.port_host[sp]}")

    def _ledger(self, op_idx: int, key, wait: int, cause_edges, qq: bool) -> None:
        if qq:
            self.qq_waits.setdefault(key, []).append((op_idx, wait))
        else:
            self.qf_waits.setdefault(key, []).append((op_idx, wait))
        if wait > 0 and cause_edges:
            cause = min((c for c in cause_edges), key=lambda c: _CAUSE_PRIORITY[c])
            self.causes[cause] = self.causes.get(cause, 0) + wait

    def _binding_causes(self, edges: list[int], threshold: int,
                        extra: list[tuple[int, str]] = ()) -> list[str]:
        """Cause labels of path pieces that were not ready at the request."""
        out = []
        for e in edges:
            if self.ready[e] > threshold:
                out.append(_EDGE_CAUSE[self.g.edge_class[e]])
        for t, label in extra:
            if t > threshold:
                out.append(label)
        return out

    # -- dispatch ---------------------------------------------------------

    def run(self) -> SimReport:
        for idx, gate in enumerate(self.circuit.gates):
            kind = gate.kind
            if kind in TWO_QUBIT_KINDS:
                if self.net.mode == "agnostic":
                    self._remote_qq_agnostic(idx, gate)
                else:
                    self._remote_qq(idx, gate)
            elif kind is GateKind.T_VIA_MAGIC:
                if self.net.mode == "agnostic":
                    self._remote_qf_agnostic(idx, gate)
                else:
                    self._remote_qf(idx, gate)
            else:
                self._local(idx, gate)
        return SimReport(
            total_time=self.t_end,
            qq_waits=self.qq_waits,
            qf_waits=self.qf_waits,
            wait_causes=self.causes,
            edge_consumptions=self._consumption_by_class(),
            edge_utilization={e: n for e, n in enumerate(self.consumed) if n},
            teleports=self.teleports,
            ring_stall=self.ring_stall,
            trace=self.trace,
        )

    def _consumption_by_class(self) -> dict[str, int]:
        tally: dict[str, int] = {}
        for eid, n in enumerate(self.consumed):
            if n:
                cls = self.g.edge_class[eid]
                tally[cls] = tally.get(cls, 0) + n
        return tally

    def _local(self, idx: int, gate) -> None:
        q = gate.qubits[0]
        start = max(self.avail[q], self.tp_done[q])
        end = start + self.lat.latency_of(gate.kind)
        self.avail[q] = end
        self.t_end = max(self.t_end, end)

    # -- circuit-specific routing -----------------------------------------

    def _remote_qq(self, idx: int, gate) -> None:
        qa, qb = gate.qubits
        i, j = min(qa, qb), max(qa, qb)
        key = (i, j)
        link_edges = self.net.qq_links.get(key)
        if not link_edges:
            raise Unroutable(idx, f"no QQ link between components {i} and {j}")
        link_ports = self.net.qq_link_ports[key]
        comp_i = self.net.components[i]
        comp_j = self.net.components[j]
        # The first Bell stock lands at t_bell on every channel; waiting for
        # it is startup, not a bottleneck any link increment could remove.
        request = max(self.avail[qa], self.avail[qb], self.lat.t_bell)
        p_i = self._port_of(i)
        p_j = self._port_of(j)
        pe_i = comp_i.port_edges[p_i]
        pe_j = comp_j.port_edges[p_j]
        forced_i = self._forced_middles(i)
        forced_j = self._forced_middles(j)

        cnt = self.pair_count.get(key, 0)
        if self.cfg.path_policy == "colored":
            order = [cnt % len(link_edges)]
        else:
            order = sorted(range(len(link_edges)),
                           key=lambda m: (self.last_used[link_edges[m]], m))

        best = None
        for m in order:
            le = link_edges[m]
            q_i, q_j = link_ports[m]
            ok_i, t_i, edges_i, ch_i = _switch_ready(
                comp_i.switching, p_i, q_i, request, self.ready, forced_i)
            ok_j, t_j, edges_j, ch_j = _switch_ready(
                comp_j.switching, p_j, q_j, request, self.ready, forced_j)
            t_fixed = max(self.ready[pe_i], self.ready[pe_j], self.ready[le])
            t_all = max(t_fixed, t_i, t_j)
            cand = (t_all, m, le, edges_i, edges_j, ch_i, ch_j)
            if t_all <= request:
                best = cand
                break
            if best is None or t_all < best[0]:
                best = cand
        t_all, m, le, edges_i, edges_j, ch_i, ch_j = best
        swap = max(request, t_all)
        wait = swap - request
        path = [pe_i, pe_j, le] + edges_i + edges_j
        causes = self._binding_causes(path, request) if wait > 0 else []
        for e in path:
            self._consume(e, swap)
        if isinstance(comp_i.switching, ClosNet) and ch_i:
            comp_i.switching.notify(ch_i, swap)
        if isinstance(comp_j.switching, ClosNet) and ch_j:
            comp_j.switching.notify(ch_j, swap)
        op_begin = max(swap + self.lat.t_local, self.tp_done[qa], self.tp_done[qb])
        end = op_begin + self.lat.latency_of(gate.kind)
        self.avail[qa] = end
        self.avail[qb] = end
        self.t_end = max(self.t_end, end)
        self.pair_count[key] = cnt + 1
        self._ledger(idx, key, wait, causes, qq=True)
        self._advance_rotation(i, end)
        self._advance_rotation(j, end)
        self.comp_ops[i] += 1
        self.comp_ops[j] += 1
        if self.trace is not None:
            self.trace.append(
                f"t={swap} qq op={idx} pair={i},{j} link={m} wait={wait}")

    def _remote_qf(self, idx: int, gate) -> None:
        q = gate.qubits[0]
        i = q
        qf_edges = self.net.qf_links.get(i)
        if not qf_edges:
            raise Unroutable(idx, f"no QF link on component {i}")
        comp = self.net.components[i]
        fac = self.net.factories[i]
        request = max(self.avail[q], self.lat.t_bell)
        p_i = self._port_of(i)
        pe_i = comp.port_edges[p_i]
        forced_i = self._forced_middles(i)

        cnt = self.qf_count.get(i, 0)
        if self.cfg.path_policy == "colored":
            order = [cnt % len(qf_edges)]
        else:
            order = sorted(range(len(qf_edges)),
                           key=lambda m: (self.last_used[qf_edges[m]], m))

        best = None
        p_magic = self.lat.p_magic
        for m in order:
            le = qf_edges[m]
            q_i = comp.ext_index[("qf", m)]
            ok_i, t_i, edges_i, ch_i = _switch_ready(
                comp.switching, p_i, q_i, request, self.ready, forced_i)
            port = fac.ports[m]
            mg = self.magic.ready[(i, m)]
            gens = sorted(range(len(port.gen_nodes)), key=lambda g: (mg[g], g))
            for g in gens:
                t_tree = max((self.ready[e] for e in port.gen_paths[g]), default=-1)
                t_all = max(self.ready[pe_i], self.ready[le], t_i, t_tree, mg[g])
                cand = (t_all, m, g, le, edges_i, ch_i, mg[g])
                if t_all <= request:
                    best = cand
                    break
                if best is None or t_all < best[0]:
                    best = cand
            if best is not None and best[0] <= request:
                break
        t_all, m, g_pick, le, edges_i, ch_i, t_magic_ready = best
        swap = max(request, t_all)
        wait = swap - request
        port = self.net.factories[i].ports[m]
        path = [pe_i, le] + edges_i + port.gen_paths[g_pick]
        causes = (self._binding_causes(path, request,
                                       extra=[(t_magic_ready, CAUSE_FACTORY)])
                  if wait > 0 else [])
        for e in path:
            self._consume(e, swap)
        if isinstance(comp.switching, ClosNet) and ch_i:
            comp.switching.notify(ch_i, swap)
        self.magic.consume(i, m, g_pick, swap, p_magic)
        op_begin = max(swap + self.lat.t_local, self.tp_done[q])
        end = op_begin + self.lat.latency_of(gate.kind)
        self.avail[q] = end
        self.t_end = max(self.t_end, end)
        self.qf_count[i] = cnt + 1
        self._ledger(idx, i, wait, causes, qq=False)
        self._advance_rotation(i, end)
        self.comp_ops[i] += 1
        if self.trace is not None:
            self.trace.append(
                f"t={swap} qf op={idx} comp={i} port={m} gen={g_pick} wait={wait}")

    # -- circuit-agnostic routing (synchronous, clock-driven rotation) -----

    def _slot_align(self, comp, time: int) -> tuple[int, int]:
        """First (port, time') at or after ``time`` in an operation slot.

        Position advances every (d-1) T_local: d-2 port slots then one
        teleport slot.  All components share the clock.
        """
        d = self.net.params.d
        period = (d - 1) * self.lat.t_local
        t = time
        for _ in range(period + 1):
            slot = (t % period) // self.lat.t_local
            if slot < d - 2:
                pos = (t // period) % comp.n_ring
                port = pos + slot * comp.n_ring
                return port, t
            t += self.lat.t_local
        raise AssertionError("slot alignment failed")

    def _remote_qq_agnostic(self, idx: int, gate) -> None:
        qa, qb = gate.qubits
        i, j = min(qa, qb), max(qa, qb)
        comp_i = self.net.components[i]
        comp_j = self.net.components[j]
        link_edges = self.net.qq_links[(i, j)]
        request = max(self.avail[qa], self.avail[qb], self.lat.t_bell)

        def path_for(port: int) -> list[int]:
            return ([comp_i.port_edges[port], comp_j.port_edges[port],
                     link_edges[port]]
                    + comp_i.switching.path(port, j)
                    + comp_j.switching.path(port, i))

        port, swap, edges = self._route_slots(comp_i, request, path_for,
                                              lambda p: -1)
        _, first_valid = self._slot_align(comp_i, request)
        wait = swap - first_valid
        causes = self._binding_causes(edges, first_valid) if wait > 0 else []
        for e in edges:
            self._consume(e, swap)
        end = swap + self.lat.t_local + self.lat.latency_of(gate.kind)
        self.avail[qa] = end
        self.avail[qb] = end
        self.t_end = max(self.t_end, end)
        self._ledger(idx, (i, j), wait, causes, qq=True)
        if self.trace is not None:
            self.trace.append(f"t={swap} qq op={idx} pair={i},{j} port={port} "
                              f"wait={wait}")

    def _remote_qf_agnostic(self, idx: int, gate) -> None:
        q = gate.qubits[0]
        comp = self.net.components[q]
        fac = self.net.factories[q]
        qf_edges = self.net.qf_links[q]
        request = max(self.avail[q], self.lat.t_bell)
        mg_all = self.magic.ready
        pick: dict[int, int] = {}

        def extra(port: int) -> int:
            mg = mg_all[(q, port)]
            g = min(range(len(mg)), key=lambda k: (mg[k], k))
            pick[port] = g
            return mg[g]

        def path_for(port: int) -> list[int]:
            g = pick.get(port)
            if g is None:
                extra(port)
                g = pick[port]
            return ([comp.port_edges[port], qf_edges[port]]
                    + comp.switching.path(port, q)
                    + fac.ports[port].gen_paths[g])

        def extra_ready(port: int) -> int:
            return extra(port)

        port, swap, edges = self._route_slots(comp, request, path_for, extra_ready)
        _, first_valid = self._slot_align(comp, request)
        wait = swap - first_valid
        g_pick = pick[port]
        causes = (self._binding_causes(edges, first_valid,
                                       extra=[(mg_all[(q, port)][g_pick],
                                               CAUSE_FACTORY)])
                  if wait > 0 else [])
        for e in edges:
            self._consume(e, swap)
        self.magic.consume(q, port, g_pick, swap, self.lat.p_magic)
        end = swap + self.lat.t_local + self.lat.latency_of(gate.kind)
        self.avail[q] = end
        self.t_end = max(self.t_end, end)
        self._ledger(idx, q, wait, causes, qq=False)
        if self.trace is not None:
            self.trace.append(f"t={swap} qf op={idx} comp={q} port={port} "
                              f"wait={wait}")

    def _route_slots(self, comp, request, path_for, extra_ready):
        t = request
        for _ in range(10000):
            port, t_aligned = self._slot_align(comp, t)
            edges = path_for(port)
            t_ready = max((self.ready[e] for e in edges), default=0)
            t_ready = max(t_ready, extra_ready(port))
            if t_ready <= t_aligned:
                return port, t_aligned, edges
            t = t_ready
        raise AssertionError("agnostic routing did not converge")


def simulate(net: NbqcNetwork, circuit: LogicalCircuit,
             cfg: SimConfig | None = None) -> SimReport:
    """Run the circuit on the network; deterministic given the seed."""
    return _Engine(net, circuit, cfg or SimConfig()).run()


def replay_trace(net: NbqcNetwork, circuit: LogicalCircuit, cfg: SimConfig,
                 expected: list[str]) -> bool:
    """Re-run and compare against a recorded event trace (regression check).

    Trace line format, one event per line:
        t=<time> qq op=<idx> pair=<i>,<j> link=<m> wait=<w>
        t=<time> qf op=<idx> comp=<i> port=<m> gen=<g> wait=<w>
        t=<time> teleport comp=<i> from=<ring position>
    """
    cfg = SimConfig(seed=cfg.seed, magic_mode=cfg.magic_mode,
                    path_policy=cfg.path_policy,
                    middle_assignment=cfg.middle_assignment, trace=True)
    return simulate(net, circuit, cfg).trace == expected
