"""Batch command-line surface: profile, build, simulate, tradeoff, channels.

Every command is deterministic given identical inputs and seed; outputs
embed the full parameter set and tool version.  Exit codes: 0 success,
1 domain error, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .baselines import cb_dftqc, mb_dftqc
from .circuit import LatencyTable, asap_schedule, lower, parse_qasm
from .errors import BudgetTooSmall, NbqcError, ParseError
from .graph import to_dot
from .optimizer import clos_optimize, frontier_json, optimize_loop
from .profiler import AccessProfile, compute_bias
from .simulator import SimConfig, simulate
from .svgplot import LogLogPlot
from .topology import (LinkConfig, NetworkParams, ReductionPlan,
                       build_circuit_agnostic, build_circuit_specific)

CONFIG_DEFAULTS = {
    "d": 3, "t_bell": 1000, "t_local": 1, "t_magic": 2, "p_magic": 0.01,
    "s": 2, "t": 3, "n_int_eq_n_ext": True,
    "magic_mode": "deterministic", "seed": 0,
}


def load_config(path: str | None) -> dict:
    cfg = dict(CONFIG_DEFAULTS)
    if path:
        with open(path) as f:
            user = json.load(f)
        unknown = set(user) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(user)
    return cfg


def make_params(cfg: dict) -> NetworkParams:
    lat = LatencyTable(t_bell=cfg["t_bell"], t_local=cfg["t_local"],
                       t_magic=cfg["t_magic"], p_magic=cfg["p_magic"])
    return NetworkParams(d=cfg["d"], s=cfg["s"], t=cfg["t"],
                         n_int_eq_n_ext=cfg["n_int_eq_n_ext"], lat=lat)


def make_sim_config(cfg: dict) -> SimConfig:
    return SimConfig(seed=cfg["seed"], magic_mode=cfg["magic_mode"])


def _header(cfg: dict) -> dict:
    return {"tool": "nbqc", "version": __version__,
            "params": dict(sorted(cfg.items()))}


def _load_circuit(path: str, lat: LatencyTable):
    with open(path) as f:
        text = f.read()
    return lower(parse_qasm(text), lat)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("NBQC_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    """Deterministic map, fanned out over NBQC_THREADS workers."""
    n = _workers()
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands


def cmd_profile(args) -> int:
    cfg = load_config(args.config)
    params = make_params(cfg)
    circuit = _load_circuit(args.qasm, params.lat)
    timeline = asap_schedule(circuit, params.lat)
    profile = compute_bias(timeline, params.lat.t_bell)
    doc = json.loads(profile.to_json())
    doc["header"] = _header(cfg)
    doc["depth"] = timeline.depth
    _write(args.output, json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
    if args.timeline:
        _write(args.timeline, timeline.to_json() + "\n")
    return 0


def _links_from_args(args, params) -> LinkConfig:
    if args.links:
        with open(args.links) as f:
            return LinkConfig.from_json(f.read())
    if not args.profile:
        raise ValueError("build needs --profile or --links")
    with open(args.profile) as f:
        return AccessProfile.from_json(f.read()).to_link_config()


def cmd_build(args) -> int:
    cfg = load_config(args.config)
    params = make_params(cfg)
    if args.mode == "agnostic":
        if args.n_alg is None:
            if not (args.profile or args.links):
                raise ValueError("agnostic build needs --n-alg or a profile")
            args.n_alg = _links_from_args(args, params).n_alg
        net = build_circuit_agnostic(args.n_alg, params)
    else:
        links = _links_from_args(args, params)
        reductions = None
        if args.reductions:
            with open(args.reductions) as f:
                reductions = {int(k): ReductionPlan.from_doc(v)
                              for k, v in json.load(f).items()}
        net = build_circuit_specific(links, params, reductions)
    manifest = net.to_manifest()
    manifest["header"] = _header(cfg)
    _write(args.output, json.dumps(manifest, sort_keys=True,
                                   separators=(",", ":")) + "\n")
    if args.dot:
        _write(args.dot, to_dot(net.graph))
    breakdown = net.component_nodes()
    print(f"total nodes: {net.node_count}", file=sys.stderr)
    for label, n in breakdown.items():
        print(f"  {label}: {n}", file=sys.stderr)
    return 0


def rebuild_from_manifest(manifest: dict) -> tuple:
    p = manifest["params"]
    lat = LatencyTable(t_bell=p["t_bell"], t_local=p["t_local"],
                       t_magic=p["t_magic"], p_magic=p["p_magic"])
    params = NetworkParams(d=p["d"], s=p["s"], t=p["t"],
                           n_int_eq_n_ext=p["n_int_eq_n_ext"], lat=lat)
    links = LinkConfig(manifest["links"]["n_alg"], manifest["links"]["m_qq"],
                       manifest["links"]["m_qf"])
    if manifest["mode"] == "agnostic":
        net = build_circuit_agnostic(links.n_alg, params)
    else:
        reductions = {int(k): ReductionPlan.from_doc(v)
                      for k, v in manifest.get("reductions", {}).items()}
        net = build_circuit_specific(links, params, reductions)
    if net.node_count != manifest["node_count"]:
        raise ValueError(
            f"manifest node count {manifest['node_count']} != rebuilt "
            f"{net.node_count}")
    return net, params


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    with open(args.manifest) as f:
        manifest = json.load(f)
    net, params = rebuild_from_manifest(manifest)
    circuit = _load_circuit(args.qasm, params.lat)
    sim_cfg = make_sim_config(cfg)
    if args.trace:
        sim_cfg.trace = True
    report = simulate(net, circuit, sim_cfg)
    doc = json.loads(report.to_json())
    doc["header"] = _header(cfg)
    _write(args.output, json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
    if args.trace:
        _write(args.trace, "\n".join(report.trace) + "\n")
    return 0


CSV_COLUMNS = ["scheme", "nodes", "time_units", "d", "budget", "clos_opt",
               "config_hash"]


def _csv_text(cfg: dict, rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(_header(cfg), sort_keys=True,
                                separators=(",", ":")) + "\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _baseline_rows(circuit, lat, d) -> list[dict]:
    rows = []
    cb_time, cb_opt, cb_pess = cb_dftqc(circuit, lat)
    rows.append({"scheme": "CB-DFTQC (optimistic)", "nodes": cb_opt,
                 "time_units": cb_time, "d": circuit.n_alg, "budget": "",
                 "clos_opt": "", "config_hash": ""})
    rows.append({"scheme": "CB-DFTQC (pessimistic)", "nodes": cb_pess,
                 "time_units": cb_time, "d": 3, "budget": "",
                 "clos_opt": "", "config_hash": ""})
    for kind in ("brickwork", "clique"):
        for ring in (False, True):
            est = mb_dftqc(kind, ring, circuit, lat)
            rows.append({"scheme": est.scheme, "nodes": est.nodes,
                         "time_units": est.time, "d": d, "budget": "",
                         "clos_opt": "", "config_hash": ""})
    return rows


def cmd_tradeoff(args) -> int:
    cfg = load_config(args.config)
    params = make_params(cfg)
    circuit = _load_circuit(args.qasm, params.lat)
    timeline = asap_schedule(circuit, params.lat)
    sim_cfg = make_sim_config(cfg)
    budgets = [int(b) for b in args.budgets.split(",")] if args.budgets else [None]

    def run(budget):
        try:
            pts = optimize_loop(circuit, timeline, params, budget, sim_cfg,
                                clos_opt=not args.no_clos_opt)
            return budget, pts, None
        except BudgetTooSmall as e:
            return budget, [], e

    results = _pmap(run, budgets)
    rows: list[dict] = []
    failures = 0
    frontier_pts = []
    all_points = []
    for budget, pts, err in results:
        if err is not None:
            failures += 1
            print(f"budget {budget}: {err}", file=sys.stderr)
            continue
        all_points.extend(pts)
        for p in pts:
            rows.append({"scheme": "NBQC", "nodes": p.nodes,
                         "time_units": p.time, "d": params.d,
                         "budget": budget if budget is not None else "",
                         "clos_opt": not args.no_clos_opt,
                         "config_hash": p.links.digest()})
            frontier_pts.append((p.nodes, p.time))
    if args.points_json and all_points:
        _write(args.points_json, frontier_json(all_points) + "\n")

    agnostic = None
    if not args.skip_agnostic:
        agnostic = build_circuit_agnostic(circuit.n_alg, params)
        rep = simulate(agnostic, circuit, sim_cfg)
        rows.append({"scheme": "NBQC (circuit-agnostic)",
                     "nodes": agnostic.node_count, "time_units": rep.total_time,
                     "d": params.d, "budget": "", "clos_opt": "",
                     "config_hash": net_hash(agnostic)})
    base_rows = _baseline_rows(circuit, params.lat, params.d)
    rows.extend(base_rows)
    _write(args.output, _csv_text(cfg, rows))

    if args.svg:
        plot = LogLogPlot("nodes", "time units", "node count vs execution time")
        plot.add("NBQC frontier", frontier_pts, "#1f77b4")
        if agnostic is not None:
            pt = [(r["nodes"], r["time_units"]) for r in rows
                  if r["scheme"] == "NBQC (circuit-agnostic)"]
            plot.add("NBQC agnostic", pt, "#17becf", line=False)
        plot.add("CB-DFTQC", [(r["nodes"], r["time_units"]) for r in base_rows
                              if r["scheme"].startswith("CB")], "#ff7f0e",
                 line=False)
        plot.add("MB-DFTQC", [(r["nodes"], r["time_units"]) for r in base_rows
                              if r["scheme"].startswith("MB")], "#2ca02c",
                 line=False)
        _write(args.svg, plot.render())
    if failures == len(budgets):
        raise BudgetTooSmall("every budget was below the minimal network")
    return 0


def net_hash(net) -> str:
    return net.links.digest()


def cmd_channels(args) -> int:
    cfg = load_config(args.config)
    degrees = [int(x) for x in args.degrees.split(",")]
    rows: list[dict] = []

    def run(d):
        cfg_d = dict(cfg)
        cfg_d["d"] = d
        params = make_params(cfg_d)
        circuit = _load_circuit(args.qasm, params.lat)
        timeline = asap_schedule(circuit, params.lat)
        links = compute_bias(timeline, params.lat.t_bell).to_link_config()
        net = build_circuit_specific(links, params)
        sim_cfg = make_sim_config(cfg_d)
        report = simulate(net, circuit, sim_cfg)
        out = [{"scheme": "NBQC (bottleneck-free)", "nodes": net.node_count,
                "time_units": report.total_time, "d": d, "budget": "",
                "clos_opt": False, "config_hash": links.digest()}]
        red, _, red_rep, _ = clos_optimize(net, circuit, timeline, sim_cfg)
        out.append({"scheme": "NBQC (bottleneck-free)", "nodes": red.node_count,
                    "time_units": red_rep.total_time, "d": d, "budget": "",
                    "clos_opt": True, "config_hash": links.digest()})
        return out

    for chunk in _pmap(run, degrees):
        rows.extend(chunk)
    _write(args.output, _csv_text(cfg, rows))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nbqc",
        description="Compile, size, simulate, and optimize NBQC networks.")
    ap.add_argument("--version", action="version", version=f"nbqc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="access-frequency profile of a circuit")
    p.add_argument("qasm")
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.add_argument("--timeline", help="also write the ideal timeline JSON")
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("build", help="construct a network and emit its manifest")
    p.add_argument("--profile", help="profile JSON from 'profile'")
    p.add_argument("--links", help="explicit link-config JSON")
    p.add_argument("--mode", choices=["specific", "agnostic"], default="specific")
    p.add_argument("--n-alg", type=int, help="qubit count for --mode agnostic")
    p.add_argument("--reductions", help="reduction-plan JSON")
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.add_argument("--dot", help="write Graphviz DOT of the node graph")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("simulate", help="run a circuit on a built network")
    p.add_argument("--manifest", required=True)
    p.add_argument("qasm")
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.add_argument("--trace", help="write the event trace to this file")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("tradeoff", help="node-count/time frontier sweep")
    p.add_argument("qasm")
    p.add_argument("--budgets", help="comma-separated node budgets")
    p.add_argument("--config")
    p.add_argument("--no-clos-opt", action="store_true")
    p.add_argument("--skip-agnostic", action="store_true",
                   help="skip the (large) circuit-agnostic reference build")
    p.add_argument("-o", "--output")
    p.add_argument("--svg")
    p.add_argument("--points-json",
                   help="full link config per frontier point, as JSON")
    p.set_defaults(fn=cmd_tradeoff)

    p = sub.add_parser("channels", help="sweep channels-per-node d")
    p.add_argument("qasm")
    p.add_argument("--degrees", default="3,4,5,6")
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_channels)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, FileNotFoundError, json.JSONDecodeError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except NbqcError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
