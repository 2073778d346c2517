"""Network-based quantum computing: resource compiler, simulator, optimizer."""

__version__ = "0.1.0"

from .circuit import (GateKind, Gate, LatencyTable, LogicalCircuit,
                      IdealTimeline, parse_qasm, serialize_qasm, lower,
                      asap_schedule)
from .errors import (NbqcError, ParseError, UnsupportedGate, InvalidDegree,
                     NonBlockingViolation, Unroutable, BudgetTooSmall)
from .profiler import AccessProfile, ProfileStats, compute_bias, bias_summary
from .topology import (LinkConfig, NetworkParams, NbqcNetwork, ReductionPlan,
                       tree_node_count, bipartite_node_count, clos_node_count,
                       clos_closed_form, build_tree, build_bipartite,
                       build_clos, build_ring, build_factory,
                       build_circuit_specific, build_circuit_agnostic,
                       network_node_count)
from .simulator import SimConfig, SimReport, simulate, estimate_ideal_floor
from .optimizer import (ConflictGraph, WaitLedger, ParetoPoint, init_links,
                        cyclic_port_map, build_conflict_graph,
                        color_welsh_powell, clos_optimize,
                        identify_bottlenecks, update_config, optimize_loop)
from .baselines import BaselineEstimate, cb_dftqc, mb_dftqc

__all__ = [name for name in dir() if not name.startswith("_")]
