"""Generators for the concrete complexes: the template X_k and the
presentation complexes of the free-by-cyclic groups Gamma_k.
"""
from __future__ import annotations

from fractions import Fraction

from .complex_core import CONVEX, EQUILATERAL, ONE, SQRT2, UNIT_SQUARE, Edge, Face, PE2Complex

THIRD = Fraction(1, 3)
HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def bigon_ends(i: int) -> tuple[int, int]:
    """(tail n-index, head p-index) of the i-th bigon edge of the octagon graph.

    Odd edges alpha_{2m-1} run n_m -> p_m, even edges alpha_{2m} run
    n_{m+1} -> p_m (indices mod 4).
    """
    m = (i + 1) // 2
    if i % 2:
        return m, m
    return m % 4 + 1, m


def a_id(i: int) -> str:
    return f"a_{i}"


def n_id(i: int, j: int) -> str:
    return f"n_{{{i},{j}}}"


def p_id(i: int, j: int) -> str:
    return f"p_{{{i},{j}}}"


def alpha_id(i: int, j: int) -> str:
    return f"α_{{{i},{j}}}"


def beta_id(i: int, j: int) -> str:
    return f"β_{{{i},{j}}}"


def build_xk(k: int) -> PE2Complex:
    """The one-vertex complex X_k: 8k+8 unit edges and 16k equilateral triangles."""
    if k < 1:
        raise ValueError("k must be at least 1")
    v = "v"
    edges = [Edge(a_id(i), v, v, ONE, a_id(i)) for i in range(1, 9)]
    for j in range(1, k + 1):
        for i in range(1, 5):
            edges.append(Edge(n_id(i, j), v, v, ONE, n_id(i, j)))
        for i in range(1, 5):
            edges.append(Edge(p_id(i, j), v, v, ONE, p_id(i, j)))
    angles = (THIRD, THIRD, THIRD)
    faces = []
    for j in range(1, k + 1):
        for i in range(1, 9):
            t, h = bigon_ends(i)
            faces.append(Face(alpha_id(i, j), ((n_id(t, j), 1), (a_id(i), 1), (p_id(h, j), -1)), angles, EQUILATERAL))
        for i in range(1, 9):
            t, h = bigon_ends(i)
            opp = (i + 3) % 8 + 1
            faces.append(Face(beta_id(i, j), ((a_id(opp), 1), (p_id(h, j), 1), (n_id(t, j), -1)), angles, EQUILATERAL))
    return PE2Complex(("v",), tuple(edges), tuple(faces), (("kind", "X_k"), ("k", str(k))))


def gamma_relators(k: int) -> list[tuple[tuple[str, int], ...]]:
    """Square relators of Gamma_k = <a_1..a_k, t | a_1 t a_1^-1 = t, a_i a_{i-1} a_i^-1 = t>."""
    rels = [(("a_1", 1), ("t", 1), ("a_1", -1), ("t", -1))]
    for i in range(2, k + 1):
        rels.append(((f"a_{i}", 1), (f"a_{i-1}", 1), (f"a_{i}", -1), ("t", -1)))
    return rels


def build_gamma_square(k: int) -> PE2Complex:
    """Unit-square presentation complex of Gamma_k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    edges = [Edge(f"a_{i}", "v", "v", ONE, f"a_{i}") for i in range(1, k + 1)]
    edges.append(Edge("t", "v", "v", ONE, "t"))
    faces = [Face(f"r_{i}", rel, (HALF,) * 4, UNIT_SQUARE) for i, rel in enumerate(gamma_relators(k), 1)]
    return PE2Complex(("v",), tuple(edges), tuple(faces), (("kind", "Gamma_k"), ("k", str(k))))


def build_gamma_diagonal(k: int) -> PE2Complex:
    """Presentation complex of Gamma_k with every square cut along a diagonal x_i.

    x_1 = t a_1^-1 and x_i = a_{i-1} a_i^-1 have length sqrt(2); the loops x_i
    form the rose carrying the fibre F_k = <x_1..x_k>.
    """
    sq = build_gamma_square(k)
    edges = list(sq.edges) + [Edge(f"x_{i}", "v", "v", SQRT2, f"x_{i}") for i in range(1, k + 1)]
    faces = []
    for i, rel in enumerate(gamma_relators(k), 1):
        (e0, s0), (e1, s1), (e2, s2), (e3, s3) = rel
        x = f"x_{i}"
        # rel = s0 (s1 s2) s3 with x = s1 s2
        faces.append(Face(f"r_{i}'", ((e0, s0), (x, 1), (e3, s3)), (HALF, QUARTER, QUARTER), CONVEX))
        faces.append(Face(f"r_{i}''", ((e1, s1), (e2, s2), (x, -1)), (QUARTER, HALF, QUARTER), CONVEX))
    return PE2Complex(("v",), tuple(edges), tuple(faces), (("kind", "Gamma_k diagonal"), ("k", str(k))))


def gamma_rose(k: int) -> tuple[str, ...]:
    return tuple(f"x_{i}" for i in range(1, k + 1))
