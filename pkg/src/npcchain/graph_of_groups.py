"""Finite presentations and the two segment graphs of groups of the chain.

Groups are carried symbolically: a presentation is a list of generator names
and relator words over them (tuples of ``(name, +-1)``).  Nothing here solves
word problems in the amalgams; the runtime checks stay at the level of
generator bookkeeping, free-basis checks of the gluing maps, and relator
transport along the inclusions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .semidirect import MonodromyAction, is_free_basis
from .words import Word, inverse

Letter = tuple[str, int]
RelWord = tuple[Letter, ...]


class RankError(ValueError):
    pass


# -- presentations ---------------------------------------------------------------

def rel_reduce(word) -> RelWord:
    out: list[Letter] = []
    for g, e in word:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def rel_inverse(word) -> RelWord:
    return tuple((g, -e) for g, e in reversed(word))


def commutator(x: str, y: str) -> RelWord:
    return ((x, 1), (y, 1), (x, -1), (y, -1))


def format_rel(word: RelWord) -> str:
    if not word:
        return "1"
    return " ".join(g if e > 0 else g + "^-1" for g, e in word)


def parse_rel(text: str) -> RelWord:
    text = text.strip()
    if text in ("", "1"):
        return ()
    return tuple((tok[:-3], -1) if tok.endswith("^-1") else (tok, 1) for tok in text.split())


@dataclass(frozen=True)
class Presentation:
    name: str
    gens: tuple[str, ...]
    rels: tuple[RelWord, ...] = ()

    def __post_init__(self):
        if len(set(self.gens)) != len(self.gens):
            raise ValueError(f"{self.name}: repeated generator names")
        known = set(self.gens)
        for r in self.rels:
            for g, _ in r:
                if g not in known:
                    raise ValueError(f"{self.name}: relator uses unknown generator {g!r}")

    def renamed(self, suffix: str, name: str | None = None) -> "Presentation":
        ren = {g: g + suffix for g in self.gens}
        return Presentation(name or self.name + suffix, tuple(ren[g] for g in self.gens),
                            tuple(tuple((ren[g], e) for g, e in r) for r in self.rels))

    def to_text(self) -> str:
        return f"[{self.name}]\ngens: {', '.join(self.gens)}; rels: {', '.join(format_rel(r) for r in self.rels)}"

    def counts(self) -> dict:
        return {"gens": len(self.gens), "rels": len(self.rels)}


def parse_presentations(text: str) -> list[Presentation]:
    out = []
    name = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            continue
        if not line.startswith("gens:") or name is None:
            raise ValueError(f"bad presentation line {line!r}")
        gpart, _, rpart = line[len("gens:"):].partition("; rels:")
        gens = tuple(g.strip() for g in gpart.split(",") if g.strip())
        rels = tuple(parse_rel(r) for r in rpart.split(",") if r.strip())
        out.append(Presentation(name, gens, rels))
        name = None
    return out


def dump_presentations(groups: Sequence[Presentation]) -> str:
    return "\n".join(p.to_text() for p in groups) + "\n"


def free_presentation(name: str, gens: Sequence[str]) -> Presentation:
    return Presentation(name, tuple(gens))


def semidirect_presentation(name: str, action: MonodromyAction, a_names: Sequence[str],
                            b_names: Sequence[str]) -> Presentation:
    """<A, B | t a t^-1 = Phi_t(a)>."""
    if len(a_names) != action.kernel_rank or len(b_names) != action.base_rank:
        raise RankError(f"{name}: names do not match the action ranks")
    rels = []
    for t, aut in zip(b_names, action.autos):
        for a, img in zip(a_names, aut.images):
            w = [(t, 1), (a, 1), (t, -1)] + [(a_names[abs(x) - 1], 1 if x > 0 else -1) for x in inverse(img)]
            rels.append(tuple(w))
    return Presentation(name, tuple(a_names) + tuple(b_names), tuple(rels))


def direct_product(name: str, P: Presentation, Q: Presentation) -> Presentation:
    if set(P.gens) & set(Q.gens):
        raise ValueError("direct product factors must use disjoint generator names")
    rels = P.rels + Q.rels + tuple(commutator(x, y) for x in P.gens for y in Q.gens)
    return Presentation(name, P.gens + Q.gens, rels)


def amalgam(name: str, P: Presentation, Q: Presentation, pairs: Sequence[tuple[RelWord, RelWord]]) -> Presentation:
    """P *_C Q, with C generated by words u_i in P identified with v_i in Q."""
    if set(P.gens) & set(Q.gens):
        raise ValueError("amalgam factors must use disjoint generator names")
    glue = tuple(rel_reduce(tuple(u) + rel_inverse(v)) for u, v in pairs)
    return Presentation(name, P.gens + Q.gens, P.rels + Q.rels + glue)


# -- chain data ------------------------------------------------------------------

@dataclass
class Block:
    """One free-by-free block A_i x| B_i with the gluing map theta_i: B_i -> A_{i-1}."""

    action: MonodromyAction
    theta: tuple[Word, ...]


@dataclass
class TerminalSpec:
    """The bottom of the chain: S, T, H_0 and the free group A_0 <= H_0 <= S."""

    name: str
    S: Presentation
    T: Presentation
    H0: Presentation
    A0: tuple[str, ...]          # generators of A_0 as generators of S and of H_0
    distortion: str
    assumptions: list[str] = field(default_factory=list)


def example1_terminal(k: int) -> TerminalSpec:
    """Gamma_k = <x_1..x_k, t | t x_i t^-1 = x_1 ... x_i>; S = H_0 = Gamma_k, T = H_0 x Z."""
    from .distortion_lab import example1_automorphism

    xs = [f"x_{i}" for i in range(1, k + 1)]
    act = MonodromyAction((example1_automorphism(k),), tuple(xs), ("t",))
    H0 = semidirect_presentation(f"Gamma_{k}", act, xs, ["t"])
    T = direct_product(f"Gamma_{k} x Z", H0, free_presentation("Z", ["z"]))
    return TerminalSpec("example1", H0, T, H0, tuple(xs), f"x^{k}")


def example2_terminal(action: MonodromyAction, name: str = "Y_1") -> TerminalSpec:
    """A free-by-cyclic group from the k=1 pipeline; A_0 is its kernel."""
    if action.base_rank != 1:
        raise RankError("the free-by-cyclic terminal needs a free-by-cyclic group")
    xs = [f"y_{i}" for i in range(1, action.kernel_rank + 1)]
    H0 = semidirect_presentation(f"pi1({name})", action, xs, ["s"])
    T = direct_product(f"pi1({name}) x Z", H0, free_presentation("Z", ["z"]))
    return TerminalSpec("example2", H0, T, H0, tuple(xs), "exp(x)")


def example3_terminal(alpha: str = "alpha") -> TerminalSpec:
    """Snowflake terminal, presentation stub only.

    H_0 = F_2 x Z; S and T are the snowflake group and its ambient group,
    which are not encoded.  The distortion exponent is carried as data and
    the Bass square for (A_0, S, H_0, T) is an unverified assumption.
    """
    F2 = free_presentation("F_2", ["x_1", "x_2"])
    H0 = direct_product("F_2 x Z", F2, free_presentation("Z", ["w"]))
    S = Presentation("snowflake (stub)", ("x_1", "x_2", "w"), H0.rels)
    T = direct_product("ambient (stub)", H0, free_presentation("Z", ["z"]))
    return TerminalSpec("example3", S, T, H0, ("x_1", "x_2"), f"x^{alpha}",
                        ["Bass square for (A_0, S, H_0, T) taken from the snowflake construction, not verified",
                         "S and T are stubs; only H_0 and A_0 are encoded"])


TERMINALS = ("example1", "example2", "example3")


# -- graphs of groups ------------------------------------------------------------

@dataclass
class EdgeGroup:
    name: str
    group: Presentation
    left: dict          # generator -> RelWord in the left vertex group
    right: dict


@dataclass
class GraphOfGroups:
    """A segment v_0 - e_0 - v_1 - ... - v_{2n+1}."""

    label: str
    vertices: list[Presentation]
    edges: list[EdgeGroup]
    scales: list[str] = field(default_factory=list)

    def check(self) -> list[str]:
        """Structural problems: edge images outside the endpoint groups, asymmetry."""
        errs = []
        if len(self.edges) != len(self.vertices) - 1:
            errs.append("segment must have one edge fewer than vertices")
        for i, e in enumerate(self.edges):
            for side, vx in (("left", self.vertices[i]), ("right", self.vertices[i + 1])):
                imgs = getattr(e, side)
                if set(imgs) != set(e.group.gens):
                    errs.append(f"{e.name}: {side} map does not cover the edge generators")
                known = set(vx.gens)
                for g, w in imgs.items():
                    if any(x not in known for x, _ in w):
                        errs.append(f"{e.name}: {side} image of {g} leaves {vx.name}")
        n = len(self.vertices)
        for i in range(n // 2):
            if self.vertices[i].counts() != self.vertices[n - 1 - i].counts():
                errs.append(f"vertex {i} and its mirror differ")
        m = len(self.edges)
        for i in range(m // 2):
            if self.edges[i].group.counts() != self.edges[m - 1 - i].group.counts():
                errs.append(f"edge {i} and its mirror differ")
        return errs

    def summary(self) -> dict:
        return {"label": self.label,
                "vertices": [v.name for v in self.vertices],
                "edges": [e.name for e in self.edges],
                "scales": self.scales}


def _word(names: Sequence[str], w: Word) -> RelWord:
    return tuple((names[abs(x) - 1], 1 if x > 0 else -1) for x in w)


def _ident(gens: Sequence[str], suffix: str = "") -> dict:
    return {g: ((g + suffix, 1),) for g in gens}


def _scale_tag(p: int) -> str:
    if p == 0:
        return "1"
    if p % 2 == 0:
        return str(2 ** (p // 2))
    return ("" if p == 1 else f"{2 ** (p // 2)}*") + "sqrt(2)"


@dataclass
class ChainAssembly:
    n: int
    top: GraphOfGroups
    bottom: GraphOfGroups
    groups: dict            # name -> Presentation for H_i, L_i, G_i, C_n, D_n
    bookkeeping: dict
    assumptions: list

    def presentations(self) -> list[Presentation]:
        return list(self.groups.values())


def _block_names(i: int, act: MonodromyAction):
    return ([f"a{i}_{j}" for j in range(1, act.kernel_rank + 1)],
            [f"b{i}_{j}" for j in range(1, act.base_rank + 1)])


def assemble_chain(n: int, blocks: Sequence[Block], terminal: TerminalSpec) -> ChainAssembly:
    if len(blocks) != n:
        raise RankError(f"need {n} blocks, got {len(blocks)}")
    a_prev = list(terminal.A0)
    A = [free_presentation("A_0", a_prev)]
    semis = []
    for i, blk in enumerate(blocks, 1):
        act = blk.action
        if act.base_rank != len(a_prev):
            raise RankError(f"block {i}: rank B_{i} = {act.base_rank} but rank A_{i - 1} = {len(a_prev)}")
        if len(blk.theta) != act.base_rank or not is_free_basis(blk.theta):
            raise RankError(f"block {i}: theta images are not a free basis")
        if any(abs(x) > len(a_prev) for w in blk.theta for x in w):
            raise RankError(f"block {i}: theta image outside A_{i - 1}")
        an, bn = _block_names(i, act)
        semis.append(semidirect_presentation(f"A_{i} x| B_{i}", act, an, bn))
        A.append(free_presentation(f"A_{i}", an))
        a_prev = an

    # H_i = (A_i x| B_i) *_{B_i = theta A_{i-1}} H_{i-1};  L_i likewise over S
    def tower(base: Presentation, label: str) -> list[Presentation]:
        out = [base]
        for i, blk in enumerate(blocks, 1):
            an_prev = A[i - 1].gens
            _, bn = _block_names(i, blk.action)
            pairs = [(((b, 1),), _word(an_prev, th)) for b, th in zip(bn, blk.theta)]
            out.append(amalgam(f"{label}_{i}", semis[i - 1], out[-1], pairs))
        return out

    H = tower(terminal.H0, "H")
    L = tower(terminal.S, "L")

    # G_1 = (H_1 x H_0') *_{diag H_0 = H_0 x 1} T,  G_i = (H_i x H_{i-1}') *_{diag = H_{i-1} x 1} G_{i-1}
    G = [terminal.T]
    prods = []
    for i in range(1, n + 1):
        P = direct_product(f"H_{i} x H_{i - 1}", H[i], H[i - 1].renamed("'"))
        prods.append(P)
        # renaming the previous group with "~" keeps every name distinct; its
        # H_{i-1} x 1 (for i = 1, the H_0 factor of T) is then g~ for g in H_{i-1}
        pairs = [(((g, 1), (g + "'", 1)), ((g + "~", 1),)) for g in H[i - 1].gens]
        G.append(amalgam(f"G_{i}", P, G[-1].renamed("~", G[-1].name), pairs))

    groups = {}
    for i in range(n + 1):
        groups[f"H_{i}"] = H[i] if i else Presentation("H_0", H[0].gens, H[0].rels)
    for i in range(n + 1):
        groups[f"L_{i}"] = L[i] if i else Presentation("L_0", L[0].gens, L[0].rels)
    for i in range(1, n + 1):
        groups[f"G_{i}"] = G[i]
    Gn = G[n]
    Ln = L[n]
    Hn_gens = H[n].gens
    groups[f"C_{n}"] = amalgam(f"C_{n}", Gn, Gn.renamed("*"), [(((g, 1),), ((g + "*", 1),)) for g in Hn_gens])
    groups[f"D_{n}"] = amalgam(f"D_{n}", Ln, Ln.renamed("*"),
                               [(((g, 1),), ((g + "*", 1),)) for g in A[n].gens])

    top = _top_segment(n, terminal, semis, A, blocks)
    bottom = _bottom_segment(n, terminal, H, prods, blocks)
    return ChainAssembly(n, top, bottom, groups, _bookkeeping(n, terminal, blocks, groups),
                         list(terminal.assumptions))


def _top_segment(n, terminal, semis, A, blocks) -> GraphOfGroups:
    S = terminal.S
    verts = [S] + semis + semis[::-1] + [S]
    edges = []
    # left half: A_{i-1} joins vertex i-1 to vertex i, included by theta_i into B_i
    for i in range(1, n + 1):
        an_prev = A[i - 1].gens
        _, bn = _block_names(i, blocks[i - 1].action)
        # theta_i: B_i -> A_{i-1} is an isomorphism onto its image; the edge group
        # is B_i, read in A_{i-1} via theta on the left and as itself on the right
        edge = Presentation(f"A_{i - 1}", tuple(bn))
        left = {b: _word(an_prev, th) for b, th in zip(bn, blocks[i - 1].theta)}
        right = _ident(bn)
        edges.append(EdgeGroup(f"A_{i - 1}", edge, left, right))
    middle = EdgeGroup(f"A_{n}", A[n], _ident(A[n].gens), _ident(A[n].gens))
    edges = edges + [middle] + [EdgeGroup(e.name, e.group, e.right, e.left) for e in reversed(edges)]
    scales = [_scale_tag(abs(n - i)) for i in range(n + 1)]
    return GraphOfGroups(f"top segment of D_{n} = L_{n} *_(A_{n}) L_{n}", verts, edges,
                         scales + scales[::-1])


def _bottom_segment(n, terminal, H, prods, blocks) -> GraphOfGroups:
    verts = [terminal.T] + prods + prods[::-1] + [terminal.T]
    edges = []
    for i in range(n):
        grp = H[i]
        # H_i sits in H_i x H_{i-1} as H_i x 1 (or in T as H_0 x 1) and diagonally in H_{i+1} x H_i
        left = _ident(grp.gens)
        right = {g: ((g, 1), (g + "'", 1)) for g in grp.gens}
        edges.append(EdgeGroup(f"H_{i}", grp, left, right))
    if n == 0:
        mid = EdgeGroup("H_0", H[0], _ident(H[0].gens), _ident(H[0].gens))
    else:
        mid = EdgeGroup(f"H_{n}", H[n], _ident(H[n].gens), _ident(H[n].gens))
    edges = edges + [mid] + [EdgeGroup(e.name, e.group, e.right, e.left) for e in reversed(edges)]
    scales = [_scale_tag(abs(n - i)) for i in range(n + 1)]
    return GraphOfGroups(f"bottom segment of C_{n} = G_{n} *_(H_{n}) G_{n}", verts, edges,
                         scales + scales[::-1])


def _bookkeeping(n, terminal, blocks, groups) -> dict:
    """Generator and relator counts, recomputed from the ranks alone."""
    ra = [len(terminal.A0)] + [b.action.kernel_rank for b in blocks]
    rb = [0] + [b.action.base_rank for b in blocks]
    semi_gens = sum(ra[i] + rb[i] for i in range(1, n + 1))
    semi_rels = sum(ra[i] * rb[i] for i in range(1, n + 1))
    theta = sum(rb[1:])
    L_gens = len(terminal.S.gens) + semi_gens
    L_rels = len(terminal.S.rels) + semi_rels + theta
    expect_D = {"gens": 2 * L_gens, "rels": 2 * L_rels + ra[n]}
    got_D = groups[f"D_{n}"].counts()
    return {"ranks_A": ra, "ranks_B": rb[1:], "expected_D": expect_D, "emitted_D": got_D,
            "consistent": expect_D == got_D}
