"""BS(1,2) through its faithful dyadic-affine model, and the double over <a>.

BS(1,2) = <a, t | t a t^-1 = a^2> acts on Z[1/2] by a: x -> x + 1 and
t: x -> 2x.  Elements are pairs (k, b) meaning x -> 2^k x + b.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class DyadicAffine:
    k: int
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "b", Fraction(self.b))
        den = self.b.denominator
        if den & (den - 1):
            raise ValueError(f"translation {self.b} is not dyadic")

    def __matmul__(self, other: "DyadicAffine") -> "DyadicAffine":
        """self after other."""
        return DyadicAffine(self.k + other.k, _pow2(self.k) * other.b + self.b)

    def inverse(self) -> "DyadicAffine":
        return DyadicAffine(-self.k, -self.b * _pow2(-self.k))

    def __call__(self, x) -> Fraction:
        return _pow2(self.k) * Fraction(x) + self.b

    def is_identity(self) -> bool:
        return self.k == 0 and self.b == 0

    def in_cyclic_a(self) -> bool:
        """Membership in <a>: an integer translation."""
        return self.k == 0 and self.b.denominator == 1


def _pow2(k: int) -> Fraction:
    return Fraction(2) ** k


IDENTITY = DyadicAffine(0)
GEN = {"a": DyadicAffine(0, 1), "t": DyadicAffine(1, 0)}


def evaluate(word: Sequence[tuple[str, int]]) -> DyadicAffine:
    """Image of a word in a, t (left to right = composition order of the group product)."""
    g = IDENTITY
    for x, e in word:
        h = GEN[x] if e > 0 else GEN[x].inverse()
        g = g @ h
    return g


def parse(text: str) -> list[tuple[str, int]]:
    """'t a T' style words: lower case letters, upper case for inverses."""
    return [(c.lower(), 1 if c.islower() else -1) for c in text if not c.isspace()]


def commutator_word(x, y):
    inv = lambda w: [(g, -e) for g, e in reversed(w)]
    return list(x) + list(y) + inv(x) + inv(y)


# -- the double of BS(1,2) x Z over BS(1,2) x 1 ------------------------------------

def central_rewrite(word: Sequence[tuple[str, int]]):
    """Split a word in a, t, u, v into its BS(1,2) part and its <u, v> part.

    u and v commute with a and t, so the group is BS(1,2) x F(u, v) and a
    word is trivial iff both parts are.
    """
    bs = [(x, e) for x, e in word if x in "at"]
    free: list[tuple[str, int]] = []
    for x, e in word:
        if x in "uv":
            if free and free[-1] == (x, -e):
                free.pop()
            else:
                free.append((x, e))
    return evaluate(bs), free


# -- the double BS(1,2) *_<a> BS(1,2) = <a, s1, s2 | s_i a s_i^-1 = a^2> ----------

def amalgam_reduce(word: Sequence[tuple[str, int]]) -> list[tuple[int, DyadicAffine]]:
    """Reduced syllable sequence; factor 0 marks an element of <a> alone.

    Each factor <a, s_i> is evaluated in its own dyadic-affine model with
    s_i -> t.  A syllable that lands in <a> is absorbed into its neighbour,
    so the output alternates between factors with no syllable in <a>,
    except possibly a single leading <a> element when nothing else is left.
    """
    stack: list[list] = []
    for x, e in word:
        if x == "a":
            f, g = 0, GEN["a"] if e > 0 else GEN["a"].inverse()
        elif x in ("s1", "s2"):
            f, g = int(x[1]), GEN["t"] if e > 0 else GEN["t"].inverse()
        else:
            raise ValueError(f"unknown letter {x!r}")
        if stack and (stack[-1][0] == f or f == 0 or stack[-1][0] == 0):
            top = stack[-1]
            top[1] = top[1] @ g
            if top[0] == 0:
                top[0] = f
        else:
            stack.append([f, g])
        # absorb syllables that fell into <a>
        while stack and stack[-1][0] != 0 and stack[-1][1].in_cyclic_a():
            f0, g0 = stack.pop()
            if stack:
                stack[-1][1] = stack[-1][1] @ g0
            elif not g0.is_identity():
                stack.append([0, g0])
    return [(f, g) for f, g in stack]


def amalgam_is_trivial(word) -> bool:
    red = amalgam_reduce(word)
    return not red or (len(red) == 1 and red[0][1].is_identity())


def bs_demo() -> dict:
    a = [("a", 1)]
    tv_tu = [("t", 1), ("v", 1), ("u", -1), ("t", -1)]
    bs, free = central_rewrite(tv_tu)
    c1 = commutator_word(tv_tu, a)
    bs_c, free_c = central_rewrite(c1)
    first = bs_c.is_identity() and not free_c

    c2 = commutator_word([("s1", 1), ("s2", -1)], a)
    red = amalgam_reduce(c2)
    second = not amalgam_is_trivial(c2)
    return {
        "rewrite (tv)(tu)^-1": {"bs_part_identity": bs.is_identity(),
                                "free_part": " ".join(x + ("" if e > 0 else "^-1") for x, e in free)},
        "[(tv)(tu)^-1, a]": {"trivial": first},
        "[s1 s2^-1, a]": {"trivial": not second, "reduced_length": len(red),
                          "syllables": [[f, g.k, str(g.b)] for f, g in red]},
        "passed": first and second,
    }


def random_normal_form(rng: random.Random, max_exp: int = 12) -> list[tuple[str, int]]:
    """A nonempty Britton-reduced word t^-p a^m t^q (m odd when p, q > 0)."""
    while True:
        p, q = rng.randint(0, max_exp), rng.randint(0, max_exp)
        m = rng.randint(-max_exp, max_exp)
        if p and q and m % 2 == 0:
            continue
        if p or q or m:
            return [("t", -1)] * p + [("a", 1 if m > 0 else -1)] * abs(m) + [("t", 1)] * q
