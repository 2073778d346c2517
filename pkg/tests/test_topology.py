import pytest

from nbqc.circuit import LatencyTable
from nbqc.errors import InvalidDegree, NonBlockingViolation
from nbqc.graph import NodeGraph, to_dot
from nbqc.topology import (LinkConfig, NetworkParams, bipartite_node_count,
                           build_bipartite, build_circuit_agnostic,
                           build_circuit_specific, build_clos, build_factory,
                           build_ring, build_tree, clos_closed_form,
                           clos_node_count, magic_leaf_count,
                           network_node_count, tree_node_count)


def test_tree_count_values():
    assert tree_node_count(2, 3) == 1
    assert tree_node_count(5, 3) == 4
    assert tree_node_count(9, 4) == 4
    with pytest.raises(InvalidDegree):
        tree_node_count(5, 2)


def test_tree_build_matches_count_and_structure():
    for n in range(1, 40):
        for d in (3, 4, 5, 6):
            g = NodeGraph(d)
            tree = build_tree(g, n, d)
            assert g.node_count == tree_node_count(n, d)
            assert len(tree.leaf_hosts) == n
            g.check_degrees()
            assert g.connected_within(tree.nodes)
            # root must keep a free port, every leaf host a free slot
            assert g.ports_used[tree.root_node] < d


def test_bipartite_count_reference_values():
    assert bipartite_node_count(2, 3, 3) == 7
    assert bipartite_node_count(2, 3, 4) == 5
    assert bipartite_node_count(2, 3, 5) == 1
    assert bipartite_node_count(2, 3, 6) == 1


def test_bipartite_build_matches_count():
    for n_int in (1, 2, 3, 5, 8):
        for n_ext in (1, 2, 4, 9):
            for d in (3, 4, 5, 6):
                g = NodeGraph(d)
                build_bipartite(g, n_int, n_ext, d)
                assert g.node_count == bipartite_node_count(n_int, n_ext, d)
                g.check_degrees()


def test_bipartite_paths_unique_and_disjoint_by_pair():
    g = NodeGraph(3)
    net = build_bipartite(g, 4, 4, 3)
    used = set()
    for i in range(4):
        path = net.path(i, (i + 1) % 4)
        assert not used & set(path)
        used |= set(path)


def test_clos_count_examples():
    # (s, s) inputs degenerate to the bipartite base case
    assert clos_node_count(2, 2, 6, 2, 3) == bipartite_node_count(2, 2, 6) == 1
    assert clos_node_count(4, 4, 6, 2, 3) == 7
    with pytest.raises(NonBlockingViolation):
        clos_node_count(8, 8, 3, 2, 2)


def test_clos_closed_form_matches_recursion():
    for s in (2, 3):
        t = 2 * s - 1
        for k in range(1, 6):
            n = s ** k
            for d in (3, 4, 5, 6):
                assert clos_node_count(n, n, d, s, t) == clos_closed_form(k, d, s, t)


def test_clos_build_matches_count():
    for n in (2, 3, 4, 6, 8, 16, 27):
        for d in (3, 5):
            for s in (2, 3):
                t = 2 * s - 1
                g = NodeGraph(d)
                build_clos(g, n, n, d, s, t)
                assert g.node_count == clos_node_count(n, n, d, s, t)
                g.check_degrees()


def test_clos_nonblocking_guard_and_override():
    g = NodeGraph(3)
    with pytest.raises(NonBlockingViolation):
        build_clos(g, 4, 4, 3, 2, 2)
    build_clos(g, 4, 4, 3, 2, 2, enforce_nonblocking=False)
    g.check_degrees()


def test_ring_shapes():
    g = NodeGraph(3)
    nodes, edges = build_ring(g, 1, 3)
    assert len(nodes) == 1 and edges == []
    g2 = NodeGraph(4)
    nodes2, edges2 = build_ring(g2, 4, 4)
    assert len(nodes2) == 4 and len(edges2) == 4
    assert all(u == 2 for u in g2.ports_used)  # d-2 = 2 ports free per node


def test_ring_length_from_bell_period():
    # ceil(T_Bell / ((d-1) T_local)) with the standard constants
    import math
    assert math.ceil(1000 / ((3 - 1) * 1)) == 500


def test_factory_shapes():
    lat = LatencyTable()
    assert magic_leaf_count(lat) == 1  # ceil(2 / (1000*0.01)) = 1
    lat_small = LatencyTable(t_bell=50)
    assert magic_leaf_count(lat_small) == 4  # ceil(2 / (50*0.01)) = 4
    g = NodeGraph(3)
    fac = build_factory(g, 0, 2, 1, 3, lat)
    assert len(fac.ports) == 2
    # n_leaf = 1: generator doubles as the root
    assert all(p.root_node == p.gen_nodes[0] for p in fac.ports)
    g2 = NodeGraph(3)
    fac2 = build_factory(g2, 0, 1, 4, 3, lat_small)
    assert len(fac2.ports[0].gen_nodes) == 4
    g2.check_degrees()
    assert build_factory(NodeGraph(3), 0, 0, 1, 3, lat) is None


def test_circuit_agnostic_toy_example():
    # T_Bell/T_local = 4, d = 3: n_ring = 2, n_int = 2, n_ext = 4 per component
    lat = LatencyTable(t_bell=4)
    net = build_circuit_agnostic(2, NetworkParams(lat=lat))
    for comp in net.components:
        assert comp.n_ring == 2
        assert comp.n_int == 2
        assert comp.n_ext == 4
    assert net.links.m_qq[0][1] == 2
    assert net.links.m_qf == [2, 2]
    assert len(net.qq_links[(0, 1)]) == 2
    assert len(net.qf_links[0]) == 2
    net.graph.check_degrees()


def test_circuit_agnostic_single_qubit():
    lat = LatencyTable(t_bell=4)
    net = build_circuit_agnostic(1, NetworkParams(lat=lat))
    assert net.qq_links == {}
    assert len(net.qf_links[0]) == net.components[0].n_int


def test_agnostic_switching_scales_quadratically():
    lat = LatencyTable(t_bell=20)
    params = NetworkParams(lat=lat)

    def switch_nodes(n_alg: int) -> int:
        g = build_circuit_agnostic(n_alg, params).graph
        return sum(1 for r in g.roles if r == "switch")

    n4, n8, n16 = switch_nodes(4), switch_nodes(8), switch_nodes(16)
    assert 2.5 < n8 / n4 < 6.0
    assert 2.5 < n16 / n8 < 6.0


def test_circuit_specific_all_zero_is_empty():
    params = NetworkParams()
    net = build_circuit_specific(LinkConfig.zeros(3), params)
    # bare storage node per qubit, no switching, no links
    assert net.node_count == 3
    assert net.qq_links == {} and net.qf_links == {}


def test_circuit_specific_counts_match_estimate():
    params = NetworkParams()
    links = LinkConfig(4, [[0, 3, 1, 0], [3, 0, 2, 0], [1, 2, 0, 0],
                           [0, 0, 0, 0]], [1, 0, 2, 0])
    net = build_circuit_specific(links, params)
    assert net.node_count == network_node_count(links, params)
    net.graph.check_degrees()
    for comp in net.components:
        assert comp.n_ext == links.n_ext(comp.index)


def test_circuit_specific_ring_sizing():
    params = NetworkParams(d=4)
    links = LinkConfig(2, [[0, 5], [5, 0]], [0, 0])
    net = build_circuit_specific(links, params)
    for comp in net.components:
        assert comp.n_int == 5
        assert comp.n_ring == 3  # ceil(5 / (4-2))
        assert max(comp.port_host) <= comp.n_ring - 1


def test_n_int_cap_when_simplification_off():
    lat = LatencyTable(t_bell=4)
    params = NetworkParams(n_int_eq_n_ext=False, lat=lat)
    links = LinkConfig(2, [[0, 9], [9, 0]], [0, 0])
    net = build_circuit_specific(links, params)
    assert net.components[0].n_ext == 9
    assert net.components[0].n_int == 4  # capped at T_Bell/T_local


def test_link_config_validation():
    with pytest.raises(ValueError):
        LinkConfig(2, [[1, 0], [0, 0]], [0, 0]).validate()
    with pytest.raises(ValueError):
        LinkConfig(2, [[0, 1], [2, 0]], [0, 0]).validate()
    cfg = LinkConfig(2, [[0, 1], [1, 0]], [2, 0])
    cfg.validate()
    assert cfg.n_ext(0) == 3
    assert LinkConfig.from_json(cfg.to_json()).m_qf == [2, 0]


def test_components_internally_connected():
    params = NetworkParams()
    links = LinkConfig(3, [[0, 2, 1], [2, 0, 0], [1, 0, 0]], [2, 0, 0])
    net = build_circuit_specific(links, params)
    by_label: dict[str, list[int]] = {}
    for n in range(net.graph.node_count):
        by_label.setdefault(net.graph.labels[n], []).append(n)
    for comp in net.components:
        assert net.graph.connected_within(by_label[f"Q{comp.index}"])
    # a factory is one tree per external port; each tree is connected
    for fac in net.factories:
        if fac is None:
            continue
        for port in fac.ports:
            nodes = sorted({fac_node for path in port.gen_paths
                            for e in path
                            for fac_node in net.graph.edges[e][::2]}
                           | {port.root_node} | set(port.gen_nodes))
            assert net.graph.connected_within(nodes)


def test_dot_export_mentions_clusters():
    params = NetworkParams()
    links = LinkConfig(2, [[0, 1], [1, 0]], [1, 0])
    net = build_circuit_specific(links, params)
    dot = to_dot(net.graph)
    assert "cluster_Q0" in dot and "cluster_F0" in dot
    assert dot.count("--") == net.graph.edge_count
