import networkx as nx
import pytest

from npcchain.covering import middle_cycles
from npcchain.link_analysis import build_link
from npcchain.spine_homology import (build_spine, cycle_class, enumerate_short_cycles, hnt_check, link_to_spine,
                                     spine_components, spine_to_dot)


@pytest.fixture(scope="module")
def data(templates):
    out = {}
    for k, X in templates.items():
        link = build_link(X, "v")
        spine = build_spine(X)
        out[k] = (X, link, spine, link_to_spine(link, spine, X))
    return out


@pytest.mark.parametrize("k", [1, 2, 3])
def test_spine_rank(data, k):
    _, _, spine, mor = data[k]
    assert spine.rank == 24 * k - 7
    assert spine_components(spine) == 1
    assert mor.immersion


@pytest.mark.parametrize("k", [1, 2])
def test_short_cycle_enumeration_matches_networkx(data, k):
    _, link, _, _ = data[k]
    G = nx.Graph()
    G.add_edges_from((e.u, e.w) for e in link.edges)
    ours = {frozenset(link.nodes[i] for i in c.nodes) for c in enumerate_short_cycles(link, 6)}
    theirs = {frozenset(c) for c in nx.simple_cycles(G, length_bound=6)}
    assert len(ours) == len(enumerate_short_cycles(link, 6))
    assert ours == theirs


@pytest.mark.parametrize("k", [1, 2])
def test_short_cycles_are_homologically_nontrivial(data, k):
    _, link, _, mor = data[k]
    cycles = enumerate_short_cycles(link, 6)
    assert {len(c) for c in cycles} == {4, 6}
    assert all(cycle_class(mor, c).any() for c in cycles)


@pytest.mark.parametrize("k", [1, 2])
def test_middle_cycles(data, k):
    X, link, _, mor = data[k]
    mids = middle_cycles(link, X, k)
    assert len(mids) == 2 * k
    assert all(len(c) == 8 and hnt_check(c, mor) for c in mids)


def test_spine_dot_mentions_every_leg(data):
    _, _, spine, _ = data[1]
    text = spine_to_dot(spine)
    assert text.startswith("graph") and text.count("--") == len(spine.legs)
