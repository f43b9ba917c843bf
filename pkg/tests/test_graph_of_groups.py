import pytest
from hypothesis import given, settings, strategies as st

from npcchain.cli import assemble_from_args, transvection_block
from npcchain.graph_of_groups import (Block, Presentation, RankError, amalgam, assemble_chain, direct_product,
                                      dump_presentations, example1_terminal, example2_terminal, example3_terminal,
                                      free_presentation, parse_presentations, parse_rel, format_rel, rel_reduce)

names = st.text("abcxyz", min_size=1, max_size=3)


@st.composite
def presentations(draw):
    gens = tuple(draw(st.lists(names, min_size=1, max_size=5, unique=True)))
    letter = st.tuples(st.sampled_from(gens), st.sampled_from([1, -1]))
    rels = tuple(tuple(r) for r in draw(st.lists(st.lists(letter, min_size=1, max_size=6), max_size=4)))
    return Presentation(draw(names), gens, rels)


@settings(max_examples=100, deadline=None)
@given(st.lists(presentations(), min_size=1, max_size=4))
def test_text_round_trip(ps):
    assert parse_presentations(dump_presentations(ps)) == ps


def test_rel_helpers():
    w = parse_rel("a b^-1 b a^-1 c")
    assert rel_reduce(w) == (("c", 1),)
    assert format_rel(()) == "1" and parse_rel("1") == ()


def test_presentation_validation():
    with pytest.raises(ValueError):
        Presentation("P", ("a", "a"))
    with pytest.raises(ValueError):
        Presentation("P", ("a",), ((("b", 1),),))


def test_products_and_amalgams():
    F = free_presentation("F", ["a", "b"])
    Z = free_presentation("Z", ["z"])
    P = direct_product("FxZ", F, Z)
    assert P.counts() == {"gens": 3, "rels": 2}
    D = amalgam("D", P, P.renamed("'"), [((("a", 1),), (("a'", 1),))])
    assert D.counts() == {"gens": 6, "rels": 5}
    with pytest.raises(ValueError):
        direct_product("bad", F, F)


def test_example1_terminal():
    term = example1_terminal(2)
    assert term.S.gens == ("x_1", "x_2", "t")
    assert [format_rel(r) for r in term.S.rels] == ["t x_1 t^-1 x_1^-1", "t x_2 t^-1 x_2^-1 x_1^-1"]
    assert term.A0 == ("x_1", "x_2")


def test_example3_is_a_stub():
    term = example3_terminal("3/2")
    assert term.distortion == "x^3/2" and term.assumptions


def test_example2_needs_cyclic_base():
    with pytest.raises(RankError):
        example2_terminal(transvection_block(2).action)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_segments(n):
    ch = assemble_from_args(n, "example1:2")
    for seg in (ch.top, ch.bottom):
        assert len(seg.vertices) == 2 * n + 2
        assert len(seg.edges) == 2 * n + 1
        assert seg.check() == []
        assert seg.scales == seg.scales[::-1]
    assert ch.bookkeeping["consistent"]
    assert set(ch.groups) >= {f"H_{n}", f"L_{n}", f"C_{n}", f"D_{n}"}


def test_scale_tags():
    ch = assemble_from_args(2, "example1:2")
    assert ch.top.scales == ["2", "sqrt(2)", "1", "1", "sqrt(2)", "2"]


def test_rank_mismatch():
    with pytest.raises(RankError):
        assemble_chain(1, [transvection_block(3)], example1_terminal(2))


def test_non_free_theta():
    blk = transvection_block(2)
    with pytest.raises(RankError):
        assemble_chain(1, [Block(blk.action, ((1,), (1, 1)))], example1_terminal(2))


def test_y1_block_on_example1(y1_action):
    ch = assemble_chain(1, [Block(y1_action, ((1,),))], example1_terminal(1))
    assert ch.bookkeeping["consistent"]
    assert ch.groups["H_1"].counts()["gens"] == 87 + 1 + 2
