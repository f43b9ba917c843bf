from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from npcchain.link_analysis import (LinkEdge, LinkGraph, build_link, check_npc, from_dot, girth,
                                    hop_distance, link_distance_matrix, shortest_injective_cycle, to_dot)
from npcchain.templates import build_gamma_diagonal, build_gamma_square, n_id


def _nx_graph(link):
    G = nx.Graph()
    G.add_nodes_from(link.nodes)
    for e in link.edges:
        G.add_edge(e.u, e.w, weight=e.weight)
    return G


@pytest.mark.parametrize("k", [1, 2, 3])
def test_template_link_shape(templates, k):
    link = build_link(templates[k], "v")
    assert len(link.nodes) == 16 * k + 16
    assert len(link.edges) == 48 * k
    assert link.bipartition() is not None
    assert girth(link) == 4
    G = _nx_graph(link)
    assert G.number_of_edges() == len(link.edges)  # no parallel edges, so no 2-cycles
    assert nx.is_bipartite(G)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_n_pair_distance(templates, k):
    link = build_link(templates[k], "v")
    G = _nx_graph(link)
    for j in range(1, k + 1):
        a, b = (n_id(1, j), 1), (n_id(1, j), -1)
        d = hop_distance(link, a, b)
        assert d == nx.shortest_path_length(G, a, b) == 6


def test_template_is_not_npc(templates):
    cert = check_npc(templates[1])
    assert not cert.passed
    assert cert.witness["length"] == "4/3"


def test_square_and_diagonal_gamma_are_npc():
    for G in (build_gamma_square(2), build_gamma_diagonal(2)):
        cert = check_npc(G)
        assert cert.passed and not cert.strict


@st.composite
def weighted_graphs(draw):
    n = draw(st.integers(3, 8))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=2, max_size=len(pairs), unique=True))
    weights = draw(st.lists(st.fractions(Fraction(1, 6), Fraction(3), max_denominator=12),
                            min_size=len(chosen), max_size=len(chosen)))
    nodes = tuple((f"e{i}", 1) for i in range(n))
    edges = tuple(LinkEdge(f"f{k}", 0, nodes[i], nodes[j], w) for k, ((i, j), w) in enumerate(zip(chosen, weights)))
    return LinkGraph("v", nodes, edges)


@settings(max_examples=150, deadline=None)
@given(weighted_graphs())
def test_shortest_cycle_matches_brute_force(link):
    G = _nx_graph(link)
    weights = [sum(G[c[i]][c[(i + 1) % len(c)]]["weight"] for i in range(len(c))) for c in nx.simple_cycles(G)]
    res = shortest_injective_cycle(link)
    if not weights:
        assert res is None
        return
    length, cyc = res
    assert length == min(weights)
    assert cyc.weight(link) == length
    assert len(set(cyc.nodes)) == len(cyc.nodes)


@settings(max_examples=50, deadline=None)
@given(weighted_graphs())
def test_dot_round_trip(link):
    back = from_dot(to_dot(link))
    assert back.nodes == link.nodes and back.edges == link.edges


def test_distance_matrix_is_symmetric(templates):
    link = build_link(templates[1], "v")
    pts = list(link.nodes[:6])
    mat = link_distance_matrix(link, pts)
    assert all(mat[i][j] == mat[j][i] for i in range(6) for j in range(6))
    assert all(mat[i][i] == 0 for i in range(6))
