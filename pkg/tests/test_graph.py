import math
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netgame.errors import InvalidGraphError, InvalidParameterError, ResourceLimitError
from netgame.graph import (
    Graph,
    case4_link_count,
    case4_witness,
    cheapest_divisible_graph,
    cheapest_resilient_graph,
    complete,
    components,
    contract,
    cut_profile,
    edge_connectivity,
    edge_connectivity_known,
    empty,
    from_edge_list,
    harary,
    has_cut,
    heal_edges,
    is_connected,
    min_cut_edges,
    min_degree,
    min_removals_for_components,
    num_components,
    resilience_lower_bound,
    ring,
    to_dot,
    to_edge_list,
    tree,
)
from strategies import graphs


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def survives(g: Graph, removals: int) -> bool:
    return all(is_connected(g.without_edges(cut)) for cut in combinations(g.edges, removals))


# --- basic queries -----------------------------------------------------------


def test_connectivity_examples():
    assert is_connected(tree(5))
    assert not is_connected(empty(2))
    cut = ring(6).without_edges([(0, 1), (1, 2)])
    assert not is_connected(cut)
    assert num_components(cut) == 2
    assert num_components(empty(4)) == 4
    assert num_components(ring(5)) == 1


def test_min_degree_examples():
    assert min_degree(ring(5)) == 2
    assert min_degree(tree(4)) == 1
    assert min_degree(harary(5, 4)) == 4


def test_graph_validation():
    with pytest.raises(InvalidGraphError):
        Graph(0)
    with pytest.raises(InvalidGraphError):
        Graph(3, ((0, 3),))
    with pytest.raises(ValueError):
        Graph(3, ((1, 1),))


def test_edges_are_normalized_and_sorted():
    g = Graph(4, ((3, 1), (1, 0), (0, 1)))
    assert g.edges == ((0, 1), (1, 3))
    assert (3, 1) in g


# --- constructions -----------------------------------------------------------


def test_tree_and_ring_examples():
    assert tree(2).edges == ((0, 1),)
    assert tree(5).m == 4 and nx.is_tree(to_nx(tree(5)))
    assert tree(10).m == 9
    assert ring(3).m == 3
    assert ring(5).m == 5
    assert ring(10).m == 10
    with pytest.raises(InvalidParameterError):
        ring(2)


def test_harary_examples():
    assert harary(5, 4).m == 10
    assert harary(5, 4) == complete(5)
    assert harary(5, 2) == ring(5)
    assert harary(7, 3).m == 11 and survives(harary(7, 3), 2)
    assert harary(6, 1) == tree(6)
    with pytest.raises(InvalidParameterError):
        harary(5, 5)


@given(st.integers(3, 11), st.data())
def test_harary_is_optimal_against_networkx(n, data):
    d = data.draw(st.integers(2, n - 1))
    g = harary(n, d)
    assert g.m == math.ceil(d * n / 2)
    assert nx.edge_connectivity(to_nx(g)) == d
    assert min_degree(g) == d


def test_case4_witness_examples():
    g = case4_witness(6, 2)
    assert set(ring(6).edges) <= g.edge_set
    assert {(2, 4), (0, 4)} <= g.edge_set
    assert min_removals_for_components(g, 4) > 3
    # the closed-form count is larger than the construction
    assert (g.m, case4_link_count(6, 2)) == (9, 11)
    g = case4_witness(5, 1)
    assert set(ring(5).edges) <= g.edge_set and (0, 2) in g


# --- cuts --------------------------------------------------------------------


def test_min_removals_examples():
    assert min_removals_for_components(ring(5), 2) == 2
    assert min_removals_for_components(tree(5), 2) == 1
    assert min_removals_for_components(harary(5, 4), 2) == 4


def test_min_removals_refuses_large_graphs():
    with pytest.raises(ResourceLimitError):
        min_removals_for_components(complete(8), 2)
    with pytest.raises(ResourceLimitError):
        cut_profile(tree(11))


@given(graphs(max_n=6))
def test_cut_profile_matches_subset_search(g):
    profile = cut_profile(g)
    assert profile[0] == 0
    for c in range(2, g.n + 1):
        assert profile[c - 1] == min_removals_for_components(g, c)


@given(graphs(max_n=8))
def test_edge_connectivity_matches_networkx(g):
    h = to_nx(g)
    expected = nx.edge_connectivity(h) if nx.is_connected(h) else 0
    assert edge_connectivity(g) == expected


@given(graphs(min_n=3, max_n=7))
def test_min_cut_edges_disconnects(g):
    if not is_connected(g):
        return
    cut = min_cut_edges(g)
    assert len(cut) == edge_connectivity(g)
    assert not is_connected(g.without_edges(cut))


@given(graphs(max_n=6), st.data())
def test_has_cut_agrees_with_profile(g, data):
    parts = data.draw(st.integers(2, g.n))
    budget = data.draw(st.integers(0, g.m))
    assert has_cut(g, budget, parts) == (min_removals_for_components(g, parts) <= budget)


def test_edge_connectivity_known():
    assert edge_connectivity_known(tree(6)) == 1
    assert edge_connectivity_known(harary(7, 3)) == 3
    assert edge_connectivity_known(case4_witness(6, 2)) is None


# --- healing and contraction -------------------------------------------------


def test_heal_edges_examples():
    assert heal_edges(tree(4)) == frozenset()
    assert heal_edges(empty(4)) == {(0, 1), (0, 2), (0, 3)}
    assert heal_edges(ring(6).without_edges([(0, 1), (1, 2)])) == {(0, 1)}


@given(graphs(max_n=7))
def test_heal_edges_reconnects_with_fewest_links(g):
    healed = heal_edges(g)
    assert len(healed) == num_components(g) - 1
    assert not healed & g.edge_set
    assert is_connected(g.with_edges(healed))


def test_contract_examples():
    g = complete(4)
    assert contract(tree(4), [])[0] == tree(4)
    assert contract(g, tree(4).edges)[0] == Graph(1)
    secure = [(0, 1), (0, 2)]
    quotient, mapping = contract(g, secure)
    assert quotient.n == 2 and mapping == [0, 0, 0, 1]
    # three links to the supernode resist two removals: five links in total
    network = Graph(4, tuple(secure) + ((0, 3), (1, 3), (2, 3)))
    attackable = [e for e in network.edges if e not in secure]
    assert all(is_connected(network.without_edges(cut)) for cut in combinations(attackable, 2))
    with pytest.raises(InvalidParameterError):
        contract(ring(4), [(0, 2)])


# --- resilient designs -------------------------------------------------------


def _true_min_resilient(n, connectivity, parts, parts_cut):
    """Fewest edges over all graphs on ``n`` nodes, by direct subset search."""
    universe = list(combinations(range(n), 2))
    for m in range(len(universe) + 1):
        for chosen in combinations(universe, m):
            g = Graph(n, chosen)
            if not is_connected(g):
                continue
            if min_removals_for_components(g, 2) < connectivity:
                continue
            if min_removals_for_components(g, parts) < parts_cut:
                continue
            return m
    return None


@pytest.mark.parametrize("n", [4, 5])
def test_cheapest_resilient_graph_is_minimal(n):
    for connectivity in range(1, n):
        for parts in range(2, n + 1):
            for parts_cut in range(parts - 1, n * (n - 1) // 2 + 1):
                g, exact = cheapest_resilient_graph(n, connectivity, parts, parts_cut)
                expected = _true_min_resilient(n, connectivity, parts, parts_cut)
                if expected is None:
                    assert g is None
                    break
                assert exact and g.m == expected
                assert g.m >= resilience_lower_bound(n, connectivity, parts, parts_cut)


def test_cheapest_resilient_graph_large_n_uses_constructions():
    g, exact = cheapest_resilient_graph(10, 3, 2, 3)
    assert g == harary(10, 3) and exact
    g, exact = cheapest_resilient_graph(10, 1, 2, 1)
    assert g == tree(10) and exact


def test_cheapest_divisible_graph_examples():
    assert cheapest_divisible_graph(5, 3, 1, 2) == (tree(5), True)
    assert cheapest_divisible_graph(5, 3, 1, 0) == (None, True)
    g, exact = cheapest_divisible_graph(5, 4, 3, 2)
    assert exact
    profile = cut_profile(g)
    assert profile[1] <= 2 and profile[3] >= profile[1] + 3


# --- serialization -----------------------------------------------------------


@given(graphs(max_n=7))
def test_edge_list_round_trip(g):
    assert from_edge_list(to_edge_list(g)) == g


def test_dot_lists_every_edge():
    text = to_dot(harary(5, 4), "H")
    assert text.startswith("graph H {")
    assert text.count("--") == 10


def test_components_are_sorted_lists():
    g = Graph(5, ((3, 4), (0, 2)))
    assert components(g) == [[0, 2], [1], [3, 4]]
