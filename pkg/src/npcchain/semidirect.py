"""Semidirect products F_A x| F_B, the diagonal embedding and the
computable Bass-condition tests.

An element is a pair ``(a, b)`` of reduced words read as the product ``a b``.
Multiplication is ``(a1, b1)(a2, b2) = (a1 . Phi_{b1}(a2), b1 b2)`` where
``Phi_b`` applies the letters of ``b`` right to left.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .words import (FreeAutomorphism, Word, inverse, multiply, random_word, reduce)


@dataclass(frozen=True)
class MonodromyAction:
    """Action of F_B (rank = len(autos)) on F_A by verified automorphisms."""

    autos: tuple[FreeAutomorphism, ...]
    kernel_names: tuple[str, ...] = ()
    base_names: tuple[str, ...] = ()

    @property
    def kernel_rank(self) -> int:
        return self.autos[0].rank if self.autos else len(self.kernel_names)

    @property
    def base_rank(self) -> int:
        return len(self.autos)

    def act(self, b: Sequence[int], a: Sequence[int]) -> Word:
        for y in reversed(b):
            aut = self.autos[abs(y) - 1]
            a = aut.apply(a) if y > 0 else aut.inverse().apply(a)
        return tuple(a)

    def verify(self) -> bool:
        return all(a.verify_inverse() for a in self.autos)


@dataclass(frozen=True)
class SemidirectElement:
    kernel: Word
    base: Word

    def is_identity(self) -> bool:
        return not self.kernel and not self.base

    def length(self) -> int:
        return len(self.kernel) + len(self.base)


ONE = SemidirectElement((), ())


def sd_multiply(action: MonodromyAction, g: SemidirectElement, h: SemidirectElement) -> SemidirectElement:
    return SemidirectElement(multiply(g.kernel, action.act(g.base, h.kernel)), multiply(g.base, h.base))


def sd_inverse(action: MonodromyAction, g: SemidirectElement) -> SemidirectElement:
    binv = inverse(g.base)
    return SemidirectElement(action.act(binv, inverse(g.kernel)), binv)


def semidirect_normal_form(word: Sequence[tuple[str, int]], action: MonodromyAction) -> SemidirectElement:
    """Normal form of a word in kernel letters ("A", x) and base letters ("B", y)."""
    g = ONE
    for kind, x in word:
        if kind == "A":
            h = SemidirectElement((x,), ())
        elif kind == "B":
            h = SemidirectElement((), (x,))
        else:
            raise ValueError(f"unknown letter kind {kind!r}")
        g = sd_multiply(action, g, h)
    return g


def as_mixed_word(g: SemidirectElement) -> list[tuple[str, int]]:
    return [("A", x) for x in g.kernel] + [("B", y) for y in g.base]


# -- Stallings folding ---------------------------------------------------------

def fold(words: Sequence[Sequence[int]]):
    """Folded core graph of the subgroup generated by ``words``.

    Returns (vertex count, edge set) where edges are (u, letter>0, v).
    """
    parent: list[int] = [0]

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for w in words:
        w = reduce(w)
        if not w:
            continue
        cur = 0
        for i, x in enumerate(w):
            if i == len(w) - 1:
                nxt = 0
            else:
                parent.append(len(parent))
                nxt = len(parent) - 1
            edges.append((cur, x, nxt) if x > 0 else (nxt, -x, cur))
            cur = nxt
    changed = True
    while changed:
        changed = False
        out: dict[tuple[int, int], int] = {}
        inn: dict[tuple[int, int], int] = {}
        for u, x, v in edges:
            u, v = find(u), find(v)
            for table, key, other in ((out, (u, x), v), (inn, (v, x), u)):
                if key in table and find(table[key]) != find(other):
                    a, b = find(table[key]), find(other)
                    parent[max(a, b)] = min(a, b)
                    changed = True
                else:
                    table[key] = other
        edges = list({(find(u), x, find(v)) for u, x, v in edges})
    verts = {find(0)} | {find(u) for u, _, _ in edges} | {find(v) for _, _, v in edges}
    return len(verts), sorted(edges)


def is_free_basis(words: Sequence[Sequence[int]]) -> bool:
    """True iff the words freely generate a free group of rank len(words)."""
    if any(not reduce(w) for w in words):
        return False
    nv, edges = fold(words)
    return len(edges) - nv + 1 == len(words)


def embed_phi(g: SemidirectElement, theta: Sequence[Word]) -> tuple[SemidirectElement, Word]:
    """ab -> (ab, theta(b))."""
    return g, theta_image(theta, g.base)


def theta_image(theta: Sequence[Word], b: Sequence[int]) -> Word:
    return multiply(*(theta[y - 1] if y > 0 else inverse(theta[-y - 1]) for y in b))


def check_theta(theta: Sequence[Word]) -> None:
    if not is_free_basis(theta):
        raise ValueError("theta images do not form a free basis of their span")


def is_nielsen_reduced(words: Sequence[Word]) -> bool:
    S = [tuple(w) for w in words] + [inverse(w) for w in words]
    if any(not w for w in S):
        return False
    for u in S:
        for v in S:
            if v == inverse(u):
                continue
            uv = multiply(u, v)
            if len(uv) < max(len(u), len(v)):
                return False
            for w in S:
                if w == inverse(v):
                    continue
                if len(multiply(uv, w)) <= len(u) - len(v) + len(w):
                    return False
    return True


def theta_preimage(theta: Sequence[Word], c: Sequence[int]) -> Word | None:
    """Decode c = theta(b) for a Nielsen-reduced theta with odd-length images.

    The left half plus middle letter of each factor survives in the product,
    so the next factor is the unique image whose left half matches.
    """
    S = []
    for i, w in enumerate(theta, 1):
        S.append((i, tuple(w)))
        S.append((-i, inverse(w)))
    r = tuple(c)
    out = []
    while r:
        hits = [(y, u) for y, u in S if r[: (len(u) + 1) // 2] == u[: (len(u) + 1) // 2]]
        if len(hits) != 1:
            return None
        y, u = hits[0]
        out.append(y)
        r = multiply(inverse(u), r)
    b = reduce(out)
    return b if theta_image(theta, b) == tuple(c) else None


@dataclass
class BassReport:
    name: str
    samples: int
    seed: int
    violations: int = 0
    examples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"test": self.name, "samples": self.samples, "seed": self.seed,
                "violations": self.violations, "examples": self.examples[:5]}


def _sample_element(rng: random.Random, action: MonodromyAction, max_len: int,
                    base_len: int | None = None) -> SemidirectElement:
    # base words are kept short: a hyperbolic action blows kernel words up exponentially in |b|
    a = random_word(rng, action.kernel_rank, rng.randint(0, max_len))
    # a third of the samples sit in the kernel
    b = () if rng.random() < 1 / 3 else random_word(rng, action.base_rank, rng.randint(1, base_len or max_len))
    return SemidirectElement(a, b)


def bass_factor_test(action: MonodromyAction, theta: Sequence[Word], samples: int = 1000, seed: int = 0,
                     max_len: int = 32, base_len: int | None = None) -> BassReport:
    """phi(ab) has trivial second coordinate exactly when b = 1."""
    check_theta(theta)
    rng = random.Random(seed)
    rep = BassReport("factor", samples, seed)
    for _ in range(samples):
        g = _sample_element(rng, action, max_len, base_len)
        first, second = embed_phi(g, theta)
        if (not second) != (not g.base) or first != g:
            rep.violations += 1
            rep.examples.append([list(g.kernel), list(g.base)])
    return rep


def bass_diagonal_test(action: MonodromyAction, theta: Sequence[Word], samples: int = 1000, seed: int = 0,
                       max_len: int = 32, base_len: int | None = None) -> BassReport:
    """Diagonal condition at coordinate level.

    For c = theta(b): decoding c independently gives beta(c) = b and
    phi(beta(c)) = (beta(c), c).  For ab with a != 1 the normal form of the
    mixed word a.b keeps a nontrivial kernel part.
    """
    check_theta(theta)
    rng = random.Random(seed)
    rep = BassReport("diagonal", samples, seed)
    for _ in range(samples):
        b = random_word(rng, action.base_rank, rng.randint(0, base_len or max_len))
        c = theta_image(theta, b)
        beta = theta_preimage(theta, c)
        ok = beta == b
        if ok:
            first, second = embed_phi(SemidirectElement((), beta), theta)
            ok = second == c and first == SemidirectElement((), b)
        a = random_word(rng, action.kernel_rank, rng.randint(1, max_len))
        nf = semidirect_normal_form([("A", x) for x in a] + [("B", y) for y in b], action)
        if not nf.kernel:
            ok = False
        if not ok:
            rep.violations += 1
            rep.examples.append([list(a), list(b)])
    return rep


def embed_homomorphism_test(action: MonodromyAction, theta: Sequence[Word], samples: int = 1000, seed: int = 0,
                            max_len: int = 32, base_len: int | None = None) -> BassReport:
    """phi(g1) phi(g2) == phi(g1 g2), the product g1 g2 formed from the
    concatenated mixed words and normalised from scratch."""
    check_theta(theta)
    rng = random.Random(seed)
    rep = BassReport("embed_phi homomorphism", samples, seed)
    for _ in range(samples):
        g1 = _sample_element(rng, action, max_len, base_len)
        g2 = _sample_element(rng, action, max_len, base_len)
        p1, q1 = embed_phi(g1, theta)
        p2, q2 = embed_phi(g2, theta)
        lhs = (sd_multiply(action, p1, p2), multiply(q1, q2))
        prod = semidirect_normal_form(as_mixed_word(g1) + as_mixed_word(g2), action)
        rhs = embed_phi(prod, theta)
        if lhs != rhs:
            rep.violations += 1
            rep.examples.append([list(g1.kernel), list(g1.base), list(g2.kernel), list(g2.base)])
    return rep
