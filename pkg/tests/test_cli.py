import json
import os
import subprocess
import sys

import pytest

from nbqc.cli import main

from circuits import ghz_qasm, uniform_qasm


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "toy.qasm").write_text(
        'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[3];\ncreg c[3];\n'
        "h q[0];\ncx q[0],q[1];\ncx q[1],q[2];\nt q[2];\nmeasure q -> c;\n")
    (tmp_path / "cfg.json").write_text('{"t_bell": 50, "seed": 3}')
    return tmp_path


def run(args):
    return main([str(a) for a in args])


def test_profile_build_simulate_chain(workdir):
    cfg = workdir / "cfg.json"
    prof = workdir / "prof.json"
    net = workdir / "net.json"
    rep = workdir / "rep.json"
    assert run(["profile", workdir / "toy.qasm", "--config", cfg,
                "-o", prof]) == 0
    doc = json.loads(prof.read_text())
    assert doc["n_alg"] == 3
    assert doc["header"]["params"]["t_bell"] == 50

    assert run(["build", "--profile", prof, "--config", cfg, "-o", net,
                "--dot", workdir / "net.dot"]) == 0
    manifest = json.loads(net.read_text())
    assert manifest["mode"] == "specific"
    assert manifest["node_count"] > 0
    assert (workdir / "net.dot").read_text().startswith("graph")

    assert run(["simulate", "--manifest", net, workdir / "toy.qasm",
                "--config", cfg, "-o", rep,
                "--trace", workdir / "trace.txt"]) == 0
    report = json.loads(rep.read_text())
    assert report["total_wait"] == 0
    assert (workdir / "trace.txt").read_text().count("\n") >= 3


def test_build_agnostic(workdir):
    cfg = workdir / "cfg.json"
    net = workdir / "net.json"
    assert run(["build", "--mode", "agnostic", "--n-alg", "2",
                "--config", cfg, "-o", net]) == 0
    manifest = json.loads(net.read_text())
    assert manifest["mode"] == "agnostic"
    assert manifest["links"]["m_qf"] == [25, 25]  # n_int = ceil(50/2)


def test_exit_code_2_on_bad_input(workdir, capsys):
    bad = workdir / "bad.qasm"
    bad.write_text("qreg q[1]; rz(0.5) q[0];")
    assert run(["profile", bad]) == 2
    assert run(["profile", workdir / "missing.qasm"]) == 2


def test_exit_code_1_on_domain_error(workdir):
    (workdir / "d2.json").write_text('{"d": 2}')
    assert run(["profile", workdir / "toy.qasm", "--config",
                workdir / "d2.json", "-o", workdir / "p.json"]) == 1


def test_channels_rejects_d2(workdir):
    assert run(["channels", workdir / "toy.qasm", "--degrees", "2",
                "--config", workdir / "cfg.json",
                "-o", workdir / "chan.csv"]) == 1


def test_tradeoff_csv_and_svg(workdir):
    cfg = workdir / "cfg.json"
    (workdir / "u.qasm").write_text(uniform_qasm(4))
    csv_path = workdir / "trade.csv"
    svg_path = workdir / "trade.svg"
    assert run(["tradeoff", workdir / "u.qasm", "--config", cfg,
                "--budgets", "10,400", "-o", csv_path,
                "--svg", svg_path]) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == "scheme,nodes,time_units,d,budget,clos_opt,config_hash"
    assert any(line.startswith("NBQC,") for line in lines)
    assert any("CB-DFTQC" in line for line in lines)
    assert svg_path.read_text().startswith("<svg")


def test_tradeoff_all_budgets_too_small(workdir):
    (workdir / "u.qasm").write_text(uniform_qasm(4))
    assert run(["tradeoff", workdir / "u.qasm", "--config",
                workdir / "cfg.json", "--budgets", "3",
                "-o", workdir / "t.csv"]) == 1


def test_idempotent_outputs(workdir):
    cfg = workdir / "cfg.json"
    (workdir / "g.qasm").write_text(ghz_qasm(4, 3))
    out1, out2 = workdir / "a.csv", workdir / "b.csv"
    for out in (out1, out2):
        assert run(["tradeoff", workdir / "g.qasm", "--config", cfg,
                    "--budgets", "500", "-o", out]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_thread_fanout_matches_sequential(workdir):
    cfg = workdir / "cfg.json"
    (workdir / "u.qasm").write_text(uniform_qasm(3))
    env = dict(os.environ)
    outs = []
    for threads in ("1", "4"):
        env["NBQC_THREADS"] = threads
        out = workdir / f"chan{threads}.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "nbqc.cli", "channels",
             str(workdir / "u.qasm"), "--degrees", "3,4,5",
             "--config", str(cfg), "-o", str(out)],
            env=env, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nbqc.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "nbqc" in proc.stdout


def test_profile_timeline_export(workdir):
    tl = workdir / "timeline.json"
    assert run(["profile", workdir / "toy.qasm", "--config",
                workdir / "cfg.json", "-o", workdir / "p.json",
                "--timeline", tl]) == 0
    doc = json.loads(tl.read_text())
    assert doc["depth"] > 0
    assert {i["event_class"] for i in doc["instructions"]} >= {"qq", "local"}


def test_tradeoff_points_json(workdir):
    (workdir / "u.qasm").write_text(uniform_qasm(4))
    pts = workdir / "points.json"
    assert run(["tradeoff", workdir / "u.qasm", "--config",
                workdir / "cfg.json", "--budgets", "600",
                "-o", workdir / "t.csv", "--points-json", pts]) == 0
    doc = json.loads(pts.read_text())
    assert doc and all("links" in p for p in doc)
