"""Cyclic branched covers of the template complex.

A functional ``l`` on H1 of the spine is chosen so that it is nonzero on
every short link cycle class.  Its cocycle (zero on tree legs, ``lambda_i``
on the ``i``-th non-tree leg) tells each lifted face which sheet of each
boundary edge it attaches to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .complex_core import Edge, Face, PE2Complex, Subcomplex1
from .link_analysis import LinkGraph, Node, build_link, link_distance_matrix
from .spine_homology import (GraphMorphism, SpineGraph, cycle_class, cycles_through, enumerate_short_cycles)


class CoverError(RuntimeError):
    pass


def sheet_id(cell: str, p: int) -> str:
    return f"{cell}^({p})"


def base_of(cell: str) -> tuple[str, int]:
    base, _, sheet = cell.rpartition("^(")
    return base, int(sheet[:-1])


@dataclass
class CocycleSpec:
    lam: tuple[int, ...]
    cocycle: dict[tuple[str, int], int]  # (face, step) -> value on that leg
    ell_values: list[int]
    M: int = 0
    N: int = 0

    def to_json(self) -> dict:
        return {"lambda": list(self.lam), "ell_values": self.ell_values, "M": self.M, "N": self.N}


def middle_cycles(link: LinkGraph, cx: PE2Complex, k: int):
    """The 2k directional 8-cycles: the x_j link (tail ends) and x-bar_j link (head ends)."""
    from .morse import directional_link_edges, labeling_from_names

    lab = labeling_from_names(cx)
    out = []
    for j in range(1, k + 1):
        for sign in (-1, 1):
            out.extend(cycles_through(link, directional_link_edges(link, lab, j, sign)))
    return out


def collect_C(link: LinkGraph, mor: GraphMorphism, cx: PE2Complex, k: int) -> list[tuple[int, ...]]:
    """Distinct H1 classes of all <=6-cycles and the middle 8-cycles."""
    cycles = enumerate_short_cycles(link, 6) + middle_cycles(link, cx, k)
    classes = {}
    for c in cycles:
        vec = cycle_class(mor, c)
        if not vec.any():
            raise CoverError(f"null-homologous short cycle {c.named(link)}")
        key = tuple(int(x) for x in vec)
        neg = tuple(-x for x in key)
        if neg not in classes:
            classes.setdefault(key, None)
    return list(classes)


def _candidates():
    yield 0
    n = 1
    while True:
        yield n
        yield -n
        n += 1


def choose_lambda(rank: int, C: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Greedy integer vector pairing nonzero with every class in C.

    Coordinates are fixed in order.  The classes whose last nonzero
    coordinate is d are all determined once coordinate d is set, so for each
    d take the first value among 0, 1, -1, 2, -2, ... avoiding a zero pairing
    with those classes.  Finitely many values are excluded at each step.
    """
    C = [tuple(c) for c in C]
    for c in C:
        if not any(c):
            raise CoverError("zero class cannot be separated")
    by_last: dict[int, list[tuple[int, ...]]] = {}
    for c in C:
        d = max(i for i, x in enumerate(c) if x)
        by_last.setdefault(d, []).append(c)
    lam = [0] * rank
    for d in range(rank):
        group = by_last.get(d, [])
        for cand in _candidates():
            lam[d] = cand
            if all(sum(a * b for a, b in zip(lam[: d + 1], c[: d + 1])) != 0 for c in group):
                break
    return tuple(lam)


def make_cocycle(spine: SpineGraph, lam: Sequence[int]) -> dict[tuple[str, int], int]:
    out = {}
    for k, leg in enumerate(spine.legs):
        pos = spine.leg_class(k)
        out[(leg.face, leg.step)] = 0 if pos is None else int(lam[pos])
    return out


def edge_voltages(link: LinkGraph, cx: PE2Complex, cocycle) -> list[int]:
    """Sheet shift along each link edge traversed from u to w."""
    volts = []
    for e in link.edges:
        m = len(cx.face(e.face).boundary)
        volts.append(cocycle[(e.face, e.corner)] - cocycle[(e.face, (e.corner - 1) % m)])
    return volts


def compute_M(link: LinkGraph, volts: Sequence[int], max_len: int = 6) -> int:
    """max |l| over closures of immersed link paths with at most max_len edges.

    The closing tree path carries no cocycle, so the value of a path is the
    sum of its edge voltages.  States are (current node, last edge).
    """
    best = 0
    # state -> set of reachable sums
    frontier: dict[tuple[int, int], set[int]] = {}
    for k in range(len(link.edges)):
        a, b = link.endpoints(k)
        frontier.setdefault((b, k), set()).add(volts[k])
        frontier.setdefault((a, k), set()).add(-volts[k])
    for step in range(1, max_len + 1):
        for sums in frontier.values():
            best = max(best, max(abs(s) for s in sums))
        if step == max_len:
            break
        nxt: dict[tuple[int, int], set[int]] = {}
        for (u, last), sums in frontier.items():
            for k, w in link.adjacency[u]:
                if k == last:
                    continue
                a, _ = link.endpoints(k)
                dv = volts[k] if a == u else -volts[k]
                nxt.setdefault((w, k), set()).update(s + dv for s in sums)
        frontier = nxt
    return best


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def choose_N(M: int, k: int, ell_values: Sequence[int]) -> int:
    bound = max([(M + 1) * k] + [abs(x) for x in ell_values])
    n = bound + 1
    while not is_prime(n):
        n += 1
    return n


@dataclass
class CoverComplex:
    base: PE2Complex
    N: int
    complex: PE2Complex
    vertex: str = "v̂"

    def deck_shift(self, cell: str, s: int = 1) -> str:
        b, p = base_of(cell)
        return sheet_id(b, (p + s) % self.N)


def build_branched_cover(cx: PE2Complex, cocycle: dict[tuple[str, int], int], N: int,
                         vertex: str = "v̂") -> CoverComplex:
    if len(cx.vertices) != 1:
        raise CoverError("branched covers are built over one-vertex complexes only")
    edges = [Edge(sheet_id(e.id, p), vertex, vertex, e.length, e.id) for e in cx.edges for p in range(N)]
    faces = []
    for f in cx.faces:
        for p in range(N):
            bnd = tuple((sheet_id(eid, (p + cocycle[(f.id, i)]) % N), s) for i, (eid, s) in enumerate(f.boundary))
            faces.append(Face(sheet_id(f.id, p), bnd, f.angles, f.shape))
    meta = dict(cx.meta)
    meta.update({"kind": "cover of " + meta.get("kind", "complex"), "N": str(N)})
    cover = PE2Complex((vertex,), tuple(edges), tuple(faces), tuple(sorted(meta.items())))
    out = CoverComplex(cx, N, cover, vertex)
    link = build_link(cover, vertex)
    if not link.is_connected():
        raise CoverError("lifted link is disconnected; the functional does not generate Z_N")
    return out


def check_deck_invariance(cov: CoverComplex) -> bool:
    cx = cov.complex
    for f in cx.faces:
        g = cx.face_map.get(cov.deck_shift(f.id))
        if g is None:
            return False
        if tuple((cov.deck_shift(e), s) for e, s in f.boundary) != g.boundary:
            return False
    return all(cov.deck_shift(e.id) in cx.edge_map for e in cx.edges)


def check_projection(cov: CoverComplex) -> bool:
    """Forgetting sheets recovers every base face boundary exactly."""
    for f in cov.complex.faces:
        b, _ = base_of(f.id)
        if tuple((base_of(e)[0], s) for e, s in f.boundary) != cov.base.face(b).boundary:
            return False
    return True


def select_rose(cov: CoverComplex, M: int, k: int) -> Subcomplex1:
    """The k loops n_{1,j}^((M+1)j), checked to have link points >= 2 pi apart."""
    from .templates import n_id

    N = cov.N
    if N <= (M + 1) * k:
        raise CoverError("N must exceed (M+1)k")
    edges = [sheet_id(n_id(1, j), ((M + 1) * j) % N) for j in range(1, k + 1)]
    rose = Subcomplex1.of(cov.complex, edges)
    pts = [(e, s) for e in edges for s in (1, -1)]
    mat = link_distance_matrix(build_link(cov.complex, cov.vertex), pts)
    worst = min(mat[a][b] for a in range(len(pts)) for b in range(len(pts)) if a != b)
    if worst < 2:
        raise CoverError(f"rose points only {worst} pi apart")
    return rose


def rose_distance_report(cx: PE2Complex, rose: Subcomplex1, vertex: str) -> list[list[str]]:
    pts: list[Node] = [(e, s) for e in rose.edges for s in (1, -1)]
    mat = link_distance_matrix(build_link(cx, vertex), pts)
    return [[str(x) for x in row] for row in mat]
