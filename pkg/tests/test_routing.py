import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from onsim.routing import (NoRoute, ProactiveRouter, Protocol, ReactiveRouter, RoutingTimers,
                           build_graph, next_hop_table, parse_protocol, shortest_path)


def _random_graph(rng, n, p):
    nodes = [f"n{i:02d}" for i in range(n)]
    edges = {(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1:] if rng.random() < p}
    g = build_graph(nodes, lambda a, b: (a, b) in edges or (b, a) in edges)
    ref = nx.Graph()
    ref.add_nodes_from(nodes)
    ref.add_edges_from(edges)
    return g, ref


def test_chain_route_and_discovery_latency():
    g = build_graph("ABC", lambda a, b: {a, b} in ({"A", "B"}, {"B", "C"}))
    r = ReactiveRouter(RoutingTimers())
    route, lat = r.discover_route(g, "A", "C", 1.0)
    assert route.nodes == ("A", "B", "C") and route.hops == 2
    assert lat == pytest.approx(2 * 0.030)
    route, lat = r.discover_route(g, "A", "B", 1.0)
    assert lat == pytest.approx(0.030)


def test_partition_raises_no_route():
    g = build_graph("ABCD", lambda a, b: {a, b} in ({"A", "B"}, {"C", "D"}))
    with pytest.raises(NoRoute):
        ReactiveRouter(RoutingTimers()).discover_route(g, "A", "D", 0.0)
    p = ProactiveRouter(RoutingTimers())
    p.proactive_tick(g, 0.0)
    assert "D" not in p.tables["A"]
    with pytest.raises(NoRoute):
        p.route("A", "D", 0.0)


def test_single_node_table_is_empty():
    p = ProactiveRouter(RoutingTimers())
    p.proactive_tick(build_graph(["x"], lambda a, b: True), 0.0)
    assert p.tables == {"x": {}}


def test_ties_break_on_smallest_node_sequence():
    # a square: A-B-D and A-C-D both 2 hops
    g = build_graph("ABCD", lambda a, b: {a, b} in ({"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}))
    assert shortest_path(g, "A", "D") == ("A", "B", "D")
    assert shortest_path(g, "D", "A") == ("D", "B", "A")


def test_cache_and_invalidation():
    g = build_graph("ABC", lambda a, b: True)
    r = ReactiveRouter(RoutingTimers())
    route, lat = r.discover_route(g, "A", "C", 0.0)
    r.install(route, lat)
    assert r.cached("A", "C")[0] is route
    r.invalidate(node="B")
    assert r.cached("A", "C") is not None  # direct route does not use B
    r.invalidate(src="A")
    assert r.cached("A", "C") is None


def test_protocol_aliases():
    assert parse_protocol("AODV") is Protocol.REACTIVE
    assert parse_protocol("olsr") is Protocol.PROACTIVE
    with pytest.raises(ValueError):
        parse_protocol("dsdv")


def test_timers_must_be_positive():
    with pytest.raises(ValueError):
        RoutingTimers(break_detect_s=0)


def test_both_protocols_match_bfs_oracle_on_random_graphs():
    rng = random.Random(2024)
    checked = 0
    for _ in range(150):
        n = rng.randint(1, 12)
        g, ref = _random_graph(rng, n, rng.uniform(0.1, 0.6))
        reactive, proactive = ReactiveRouter(RoutingTimers()), ProactiveRouter(RoutingTimers())
        proactive.proactive_tick(g, 0.0)
        for a in g:
            for b in g:
                if a == b:
                    continue
                if nx.has_path(ref, a, b):
                    want = nx.shortest_path_length(ref, a, b)
                    ra, _ = reactive.discover_route(g, a, b, 0.0)
                    rp = proactive.route(a, b, 0.0)
                    assert ra.hops == rp.hops == want
                    checked += 1
                else:
                    with pytest.raises(NoRoute):
                        reactive.discover_route(g, a, b, 0.0)
                    assert b not in proactive.tables[a]
    assert checked > 1000


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 12), st.floats(0.05, 0.9))
def test_routes_are_simple_paths_over_existing_links(seed, n, p):
    g, _ = _random_graph(random.Random(seed), n, p)
    for a in g:
        table = next_hop_table(g, a)
        for dst, hop in table.items():
            path = shortest_path(g, a, dst)
            assert path[1] == hop
            assert len(set(path)) == len(path)
            assert all(v in g[u] for u, v in zip(path, path[1:]))
