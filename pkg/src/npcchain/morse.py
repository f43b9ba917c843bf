"""Rose-valued Morse data on the covers of X_k and the free-by-free monodromy.

Horizontal edges (base name ``a_i``) map to the vertex of the rose, and the
vertical edges ``n_{i,j}``, ``p_{i,j}`` map onto the petal ``x_j``
preserving orientation.  The x_j directional link consists of the tail ends
of the letter-j edges, the x-bar_j link of their head ends.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass

from .complex_core import PE2Complex, Subcomplex1, euler_characteristic
from .link_analysis import LinkGraph, build_link
from .semidirect import MonodromyAction, SemidirectElement, semidirect_normal_form
from .words import FreeAutomorphism, Word, inverse, multiply

_VERT = re.compile(r"^[np]_\{\d+,(\d+)\}$")


class MorseError(RuntimeError):
    pass


@dataclass(frozen=True)
class MorseLabeling:
    """edge id -> 0 for horizontal edges, j for edges over the petal x_j."""

    letter: dict
    k: int

    def horizontal(self) -> list[str]:
        return [e for e, j in self.letter.items() if j == 0]

    def vertical(self, j: int) -> list[str]:
        return [e for e, x in self.letter.items() if x == j]


def labeling_from_names(cx: PE2Complex) -> MorseLabeling:
    letter = {}
    for e in cx.edges:
        base = e.label or e.id
        if base.startswith("a_"):
            letter[e.id] = 0
        elif m := _VERT.match(base):
            letter[e.id] = int(m.group(1))
        else:
            raise MorseError(f"edge {e.id!r} has no Morse label")
    k = max(letter.values(), default=0)
    for f in cx.faces:
        kinds = [letter[eid] for eid, _ in f.boundary]
        verts = [x for x in kinds if x]
        if kinds.count(0) != 1 or len(verts) != 2 or verts[0] != verts[1]:
            raise MorseError(f"face {f.id!r} is not one horizontal plus two like vertical sides")
    return MorseLabeling(letter, k)


def parse_letter(letter: str) -> tuple[int, int]:
    """'x_j' -> (j, -1) and 'xbar_j' or 'x̄_j' -> (j, +1)."""
    m = re.fullmatch(r"(x|xbar|x̄)_(\d+)", letter)
    if not m:
        raise MorseError(f"unknown letter {letter!r}")
    return int(m.group(2)), (-1 if m.group(1) == "x" else 1)


def directional_link_edges(link: LinkGraph, lab: MorseLabeling, j: int, sign: int) -> list[int]:
    keep = {n for n in link.nodes if lab.letter.get(n[0]) == j and n[1] == sign}
    return [k for k, e in enumerate(link.edges) if e.u in keep and e.w in keep]


def directional_links(cx: PE2Complex, lab: MorseLabeling, letter: str, link: LinkGraph | None = None) -> LinkGraph:
    j, sign = parse_letter(letter)
    if not 1 <= j <= lab.k:
        raise MorseError(f"unknown letter {letter!r}")
    link = link or build_link(cx, cx.vertices[0])
    keep = [n for n in link.nodes if lab.letter.get(n[0]) == j and n[1] == sign]
    return link.subgraph(keep)


def _is_tree(g: LinkGraph) -> bool:
    return bool(g.nodes) and g.is_connected() and len(g.edges) == len(g.nodes) - 1


def check_morse_conditions(cx: PE2Complex, lab: MorseLabeling) -> dict:
    link = build_link(cx, cx.vertices[0])
    c0, c1 = True, True
    shapes = {}
    for j in range(1, lab.k + 1):
        for name in (f"x_{j}", f"xbar_{j}"):
            g = directional_links(cx, lab, name, link)
            ok0 = bool(g.nodes) and g.is_connected()
            c0 &= ok0
            c1 &= _is_tree(g)
            shapes[name] = {"nodes": len(g.nodes), "edges": len(g.edges), "connected": ok0}
    return {"C0": c0, "C1": c1, "links": shapes}


def kernel_rank(cx: PE2Complex, lab: MorseLabeling) -> int:
    if not check_morse_conditions(cx, lab)["C1"]:
        raise MorseError("directional links are not all trees; kernel need not be free")
    rank = len(lab.horizontal())
    if euler_characteristic(cx) != (1 - rank) * (1 - lab.k):
        raise MorseError(f"Euler characteristic {euler_characteristic(cx)} disagrees with rank {rank}")
    return rank


@dataclass
class FaceShape:
    """A face read as u^+ . h^eps . w^- (type 'A') or u^+ . w^- . h^eps (type 'B')."""

    face: str
    kind: str
    u: str
    w: str
    h: str
    eps: int
    letter: int


def face_shape(cx: PE2Complex, lab: MorseLabeling, fid: str) -> FaceShape:
    f = cx.face(fid)
    bnd = f.boundary
    m = len(bnd)
    hi = next(i for i, (e, _) in enumerate(bnd) if lab.letter[e] == 0)
    after, before = bnd[(hi + 1) % m], bnd[(hi - 1) % m]
    h, eps = bnd[hi]
    if before[1] > 0 and after[1] < 0:
        return FaceShape(fid, "A", before[0], after[0], h, eps, lab.letter[before[0]])
    if before[1] < 0 and after[1] > 0:
        return FaceShape(fid, "B", after[0], before[0], h, eps, lab.letter[after[0]])
    raise MorseError(f"face {fid!r}: vertical sides have equal orientation")


@dataclass
class Monodromy:
    action: MonodromyAction
    basis: tuple[str, ...]
    W: dict  # vertical edge -> kernel word with psi(e) = W_e t_j
    rose: tuple[str, ...]
    deleted: str = ""

    def psi(self, eid: str, lab: MorseLabeling) -> SemidirectElement:
        j = lab.letter[eid]
        if j == 0:
            return SemidirectElement((self.basis.index(eid) + 1,), ())
        return SemidirectElement(self.W[eid], (j,))


def _propagate(seed: str, links: dict, combine) -> dict:
    """Breadth-first assignment along relation edges; checks consistency on revisits."""
    val = {seed: ()}
    queue = deque([seed])
    while queue:
        x = queue.popleft()
        for y, data in links.get(x, ()):
            new = combine(x, y, val[x], data)
            if y in val:
                if val[y] != new:
                    raise MorseError(f"inconsistent propagation at {y!r} via {data[0]!r}")
            else:
                val[y] = new
                queue.append(y)
    return val


def extract_monodromy(cx: PE2Complex, lab: MorseLabeling, rose: Subcomplex1) -> Monodromy:
    """Solve for psi on vertical edges and read off the automorphisms Phi_j.

    With psi(e) = W_e t_j, a type-B face u^+ w^- h^eps forces W_u = h^-eps W_w
    and a type-A face u^+ h^eps w^- forces Phi_j(h)^eps = W_u^-1 W_w.  Writing
    psi(e) = t_j U_e instead, type-A faces give U_w = U_u h^eps and type-B
    faces Phi_j^-1(h^-eps) = U_u U_w^-1.
    """
    basis = tuple(lab.horizontal())
    idx = {e: i + 1 for i, e in enumerate(basis)}
    shapes = [face_shape(cx, lab, f.id) for f in cx.faces]
    rose_of = {}
    for e in rose.edges:
        j = lab.letter[e]
        if j == 0 or j in rose_of:
            raise MorseError("rose must contain exactly one vertical edge per letter")
        rose_of[j] = e
    autos = []
    W_all = {}
    for j in range(1, lab.k + 1):
        if j not in rose_of:
            raise MorseError(f"no rose edge for letter x_{j}")
        fs = [s for s in shapes if s.letter == j]
        verticals = set(lab.vertical(j))
        blinks, alinks = {}, {}
        for s in fs:
            hw = (idx[s.h] * s.eps,)
            table = blinks if s.kind == "B" else alinks
            table.setdefault(s.u, []).append((s.w, (s.face, hw, +1)))
            table.setdefault(s.w, []).append((s.u, (s.face, hw, -1)))

        def comb_w(x, y, wx, data):
            # B face: W_u = h^-eps W_w
            _, hw, d = data
            return multiply(hw, wx) if d > 0 else multiply(inverse(hw), wx)

        def comb_u(x, y, ux, data):
            # A face: U_w = U_u h^eps
            _, hw, d = data
            return multiply(ux, hw) if d > 0 else multiply(ux, inverse(hw))

        W = _propagate(rose_of[j], blinks, comb_w)
        U = _propagate(rose_of[j], alinks, comb_u)
        for name, got in (("type-B", W), ("type-A", U)):
            missing = verticals - set(got)
            if missing:
                raise MorseError(f"{name} propagation for x_{j} leaves {sorted(missing)[:3]} unreached")
        images: list[Word | None] = [None] * len(basis)
        inv_images: list[Word | None] = [None] * len(basis)

        def assign(table, h, eps, word, face):
            i = idx[h] - 1
            word = word if eps > 0 else inverse(word)
            if table[i] is not None and table[i] != word:
                raise MorseError(f"face {face!r} gives a second, different image of {h!r}")
            table[i] = word

        for s in fs:
            if s.kind == "A":
                assign(images, s.h, s.eps, multiply(inverse(W[s.u]), W[s.w]), s.face)
            else:
                # Phi^-1(h^-eps) = U_u U_w^-1
                assign(inv_images, s.h, -s.eps, multiply(U[s.u], inverse(U[s.w])), s.face)
        for table, name in ((images, "image"), (inv_images, "inverse image")):
            if any(x is None for x in table):
                missing = [basis[i] for i, x in enumerate(table) if x is None]
                raise MorseError(f"no {name} for {missing[:3]} under t_{j}")
        aut = FreeAutomorphism(tuple(images), tuple(inv_images))
        if not aut.verify_inverse():
            raise MorseError(f"extracted inverse for t_{j} does not compose to the identity")
        autos.append(aut)
        W_all.update(W)
    action = MonodromyAction(tuple(autos), basis, tuple(f"t_{j}" for j in range(1, lab.k + 1)))
    return Monodromy(action, basis, W_all, tuple(rose_of[j] for j in sorted(rose_of)))


def relator_check(cx: PE2Complex, lab: MorseLabeling, mono: Monodromy) -> list[str]:
    """Faces whose boundary does not evaluate to the identity under psi."""
    bad = []
    for f in cx.faces:
        word = []
        for eid, s in f.boundary:
            g = mono.psi(eid, lab)
            letters = [("A", x) for x in g.kernel] + [("B", y) for y in g.base]
            if s < 0:
                letters = [(kind, -x) for kind, x in reversed(letters)]
            word.extend(letters)
        if not semidirect_normal_form(word, mono.action).is_identity():
            bad.append(f.id)
    return bad


def surjectivity_witnesses(lab: MorseLabeling, mono: Monodromy) -> dict[str, str]:
    """Preimages of every kernel basis element and every base letter."""
    out = {f"a:{b}": b for b in mono.basis}
    for j, e in enumerate(mono.rose, 1):
        if mono.W[e] != ():
            raise MorseError("rose edge does not map to a bare base letter")
        out[f"t_{j}"] = e
    return out
