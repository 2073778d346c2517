from nbqc.baselines import cb_dftqc, mb_dftqc, remote_depth
from nbqc.circuit import LatencyTable, LogicalCircuit, lower, parse_qasm

LAT = LatencyTable()


def test_cb_nodes_pessimistic_28():
    c = lower(LogicalCircuit(28, []), LAT)
    _, opt, pess = cb_dftqc(c, LAT)
    assert opt == 28
    assert pess == 28 * 26


def test_cb_time_counts_remote_layers_only():
    c = lower(parse_qasm("qreg q[2]; h q[0]; h q[1]; s q[0];"), LAT)
    t, _, _ = cb_dftqc(c, LAT)
    assert t == 0
    chain = lower(parse_qasm(
        "qreg q[2];" + "cx q[0],q[1];" * 5), LAT)
    t5, _, _ = cb_dftqc(chain, LAT)
    assert t5 == 5 * LAT.t_bell
    assert remote_depth(chain) == 5


def test_mb_clique_ring_node_count():
    c = lower(LogicalCircuit(10, []), LAT)
    est = mb_dftqc("clique", True, c, LAT)
    assert est.nodes == 10 * 10 * 1000
    assert est.time == LAT.t_bell  # D = 0


def test_mb_brickwork_vs_clique_time_ratio():
    src = "qreg q[10];" + "cx q[0],q[1];" * 50
    c = lower(parse_qasm(src), LAT)
    bw = mb_dftqc("brickwork", True, c, LAT)
    cl = mb_dftqc("clique", True, c, LAT)
    # time ratio approaches n_alg for deep circuits
    ratio = (bw.time - LAT.t_bell) / (cl.time - LAT.t_bell)
    assert ratio == c.n_alg
    assert "magic ignored" in bw.note
