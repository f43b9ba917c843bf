from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from npcchain import complex_core as cc
from npcchain.complex_core import Edge, Face, Length, PE2Complex
from npcchain.templates import build_gamma_diagonal, build_gamma_square, build_xk

R = Fraction(1, 2)


def square_torus():
    edges = (Edge("x", "v", "v"), Edge("y", "v", "v"))
    face = Face("sq", (("x", 1), ("y", 1), ("x", -1), ("y", -1)), (R, R, R, R), cc.UNIT_SQUARE)
    return PE2Complex(("v",), edges, (face,))


def test_length_normalises_square_factors():
    assert Length(Fraction(1), 8) == Length(Fraction(2), 2)
    assert str(Length(Fraction(3), 2)) == "3*sqrt(2)"
    assert Length.parse("3*sqrt(2)") == Length(Fraction(3), 2)
    assert cc.SQRT2 * cc.SQRT2 == Length(Fraction(2))
    with pytest.raises(cc.ComplexError):
        Length(Fraction(-1))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_xk_counts_and_validity(k):
    X = build_xk(k)
    assert X.counts() == (1, 8 * k + 8, 16 * k)
    assert cc.validate(X).ok
    assert cc.euler_characteristic(X) == 1 - (8 * k + 8) + 16 * k


def test_torus_validates():
    T = square_torus()
    assert cc.validate(T).ok
    assert cc.euler_characteristic(T) == 0


def test_validate_flags_bad_angles():
    T = square_torus()
    bad = Face("sq", T.faces[0].boundary, (R, R, R, Fraction(1, 3)), cc.UNIT_SQUARE)
    rep = cc.validate(PE2Complex(T.vertices, T.edges, (bad,)))
    assert not rep.ok


def test_validate_flags_open_boundary():
    # e runs v -> w, so e followed by e does not close up
    edges = (Edge("e", "v", "w"), Edge("f", "w", "v"))
    third = Fraction(1, 3)
    broken = Face("t", (("e", 1), ("e", 1), ("f", 1)), (third,) * 3, cc.EQUILATERAL)
    assert not cc.validate(PE2Complex(("v", "w"), edges, (broken,))).ok


@pytest.mark.parametrize("k", [1, 2])
def test_gamma_models(k):
    for G in (build_gamma_square(k), build_gamma_diagonal(k)):
        assert cc.validate(G).ok
        assert cc.euler_characteristic(G) == 0


def test_delete_open_cells_drops_incident_faces():
    X = build_xk(1)
    used = len(X.faces_using("a_1"))
    Y = cc.delete_open_cells(X, "a_1")
    assert Y.counts() == (1, len(X.edges) - 1, len(X.faces) - used)


def test_amalgamate_identifies_cells():
    T = square_torus()
    glued = cc.amalgamate(T, T, {"v": "v", "x": "x"}, tag="b:")
    assert glued.counts() == (1, 3, 2)
    assert cc.validate(glued).ok
    with pytest.raises(cc.ComplexError):
        cc.amalgamate(T, T, {"v": "v", "x": "nope"})


def test_rescale_scales_every_edge():
    T = cc.rescale(square_torus(), cc.SQRT2)
    assert {str(e.length) for e in T.edges} == {"1*sqrt(2)"}
    assert cc.validate(T).ok


@settings(max_examples=20, deadline=None)
@given(k=st.integers(1, 3), c=st.integers(1, 5), r=st.sampled_from([1, 2, 3, 5]))
def test_text_round_trip(k, c, r):
    X = cc.rescale(build_xk(k), Length(Fraction(c), r))
    text = cc.dumps(X)
    back = cc.loads(text)
    assert back == X
    assert cc.dumps(back) == text


def test_loads_rejects_garbage():
    with pytest.raises(cc.ComplexError):
        cc.loads("not a complex\n")
