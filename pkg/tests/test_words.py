import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from npcchain.distortion_lab import example1_automorphism
from npcchain.words import (FreeAutomorphism, TruncationError, dump_monodromy, format_word, identity, inverse,
                            load_monodromy, multiply, parse_word, power, reduce, reduce_array)

RANK = 3
letters = st.sampled_from([x for i in range(1, RANK + 1) for x in (i, -i)])
words = st.lists(letters, max_size=40).map(tuple)

# Sanov: a -> [[1,2],[0,1]], b -> [[1,0],[2,1]] is faithful on F(a, b); x_i -> a^i b a^-i embeds F_RANK.
_A = np.array([[1, 2], [0, 1]], dtype=object)
_B = np.array([[1, 0], [2, 1]], dtype=object)
_Ai = np.array([[1, -2], [0, 1]], dtype=object)
_Bi = np.array([[1, 0], [-2, 1]], dtype=object)


def _gen(i, sign):
    a, ai = (_A, _Ai)
    m = np.identity(2, dtype=object)
    for _ in range(i):
        m = m.dot(a)
    m = m.dot(_B if sign > 0 else _Bi)
    for _ in range(i):
        m = m.dot(ai)
    return m


def sanov(word):
    m = np.identity(2, dtype=object)
    for x in word:
        m = m.dot(_gen(abs(x), 1 if x > 0 else -1))
    return tuple(m.flatten())


ID = sanov(())


@settings(max_examples=200, deadline=None)
@given(words)
def test_reduce_agrees_with_matrix_oracle(w):
    r = reduce(w)
    assert sanov(r) == sanov(w)
    assert (r == ()) == (sanov(w) == ID)
    assert all(r[i] != -r[i + 1] for i in range(len(r) - 1))
    assert reduce(r) == r


@settings(max_examples=200, deadline=None)
@given(words, words)
def test_multiply_is_reduced_concatenation(u, v):
    assert multiply(u, v) == reduce(u + v)
    assert multiply(u, inverse(u)) == ()
    assert reduce_array(np.array(u + v, dtype=np.int32)).tolist() == list(reduce(u + v))


def test_power():
    assert power((1, 2), 3) == (1, 2, 1, 2, 1, 2)
    assert power((1, 2), -1) == (-2, -1)
    assert power((1, 2, -1), 4) == (1, 2, 2, 2, 2, -1)


@settings(max_examples=100, deadline=None)
@given(words, words)
def test_automorphism_is_homomorphism_and_invertible(u, v):
    phi = example1_automorphism(RANK)
    assert phi.apply(u + v) == multiply(phi.apply(u), phi.apply(v))
    assert phi.inverse().apply(phi.apply(u)) == reduce(u)
    arr = phi.apply_array(np.array(u, dtype=np.int32))
    assert arr.tolist() == list(phi.apply(u))


def test_example1_automorphism_shape():
    phi = example1_automorphism(3)
    assert phi.images == ((1,), (1, 2), (1, 2, 3))
    assert phi.verify_inverse()
    assert phi.compose(phi.inverse()).images == identity(3).images


def test_truncation():
    phi = example1_automorphism(3)
    w = np.array([3] * 10, dtype=np.int32)
    with pytest.raises(TruncationError):
        phi.apply_array(w, cap=20)
    assert phi.apply_array(w, cap=30).size == 30


def test_non_inverse_is_detected():
    bad = FreeAutomorphism(((1, 2), (2,)), ((1,), (2,)))
    assert not bad.verify_inverse()


@settings(max_examples=50, deadline=None)
@given(words)
def test_format_parse_round_trip(w):
    names = ["p", "q", "r"]
    assert parse_word(format_word(reduce(w), names), names) == reduce(w)


def test_monodromy_text_round_trip(y1):
    text = y1.monodromy_text()
    autos, names = load_monodromy(text)
    assert names == list(y1.monodromy.basis)
    assert tuple(autos.values()) == y1.monodromy.action.autos
    assert dump_monodromy(autos, names) == text
