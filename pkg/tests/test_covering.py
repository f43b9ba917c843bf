import pytest

from npcchain.covering import (base_of, build_branched_cover, check_deck_invariance, check_projection, choose_N,
                               choose_lambda, collect_C, compute_M, edge_voltages, is_prime, make_cocycle, select_rose,
                               sheet_id, CoverError)
from npcchain.link_analysis import build_link, girth
from npcchain.spine_homology import build_spine, link_to_spine

# frozen from the k = 1 run of the construction (cross-checked against the
# independent cycle enumeration in the networkx oracle tests)
LAMBDA_1 = (0, 0, 0, 0, 1, -1, 1, 1, 0, 1, 0, 1, -1, -1, 2, 2, -1)


@pytest.fixture(scope="module")
def k1(templates):
    X = templates[1]
    link = build_link(X, "v")
    spine = build_spine(X)
    mor = link_to_spine(link, spine, X)
    C = collect_C(link, mor, X, 1)
    lam = choose_lambda(spine.rank, C)
    cocycle = make_cocycle(spine, lam)
    M = compute_M(link, edge_voltages(link, X, cocycle))
    return X, link, spine, C, lam, cocycle, M


def test_functional_avoids_every_short_class(k1):
    _, _, spine, C, lam, _, _ = k1
    assert len(C) == 38
    assert lam == LAMBDA_1
    assert all(sum(a * b for a, b in zip(lam, c)) != 0 for c in C)
    assert len(lam) == spine.rank


def test_M_and_N(k1):
    *_, M = k1
    assert M == 6
    assert choose_N(M, 1, [1, 2, 3]) == 11
    assert choose_N(1, 1, [20]) == 23
    assert all(is_prime(p) for p in (2, 3, 11, 37)) and not any(is_prime(n) for n in (0, 1, 9, 35))


def test_sheet_ids_round_trip():
    assert base_of(sheet_id("n_{1,1}", 7)) == ("n_{1,1}", 7)


def test_cover_structure(k1):
    X, _, _, _, _, cocycle, M = k1
    cov = build_branched_cover(X, cocycle, 11)
    assert cov.complex.counts() == (1, 176, 176)
    assert check_deck_invariance(cov) and check_projection(cov)
    assert girth(build_link(cov.complex, cov.vertex)) >= 8
    rose = select_rose(cov, M, 1)
    assert rose.edges == (sheet_id("n_{1,1}", 7),)


def test_small_N_is_rejected(k1):
    X, _, _, _, _, cocycle, M = k1
    cov = build_branched_cover(X, cocycle, 5)
    with pytest.raises(CoverError):
        select_rose(cov, M, 1)
