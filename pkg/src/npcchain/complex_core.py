"""Combinatorial piecewise-euclidean 2-complexes.

A complex is a finite list of vertices, oriented edges and polygonal faces.
Faces carry their boundary as a cyclic sequence of signed edge references and
one corner angle per boundary step, measured in units of pi.  Corner ``i`` of
a face sits at the start vertex of boundary step ``i``.

Everything here is exact: angles are :class:`fractions.Fraction` multiples of
pi and edge lengths are :class:`Length` values of the form ``q * sqrt(r)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

EQUILATERAL = "equilateral-triangle"
UNIT_SQUARE = "unit-square"
CONVEX = "general-convex-polygon"
SHAPES = (EQUILATERAL, UNIT_SQUARE, CONVEX)


class ComplexError(ValueError):
    pass


class GlueError(ComplexError):
    pass


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (outside, inside) with n == outside**2 * inside, inside squarefree."""
    outside, inside = 1, 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
            outside *= d
        if n % d == 0:
            n //= d
            inside *= d
        d += 1
    return outside, inside * n


@dataclass(frozen=True, order=True)
class Length:
    """An exact positive length ``coeff * sqrt(radicand)``."""

    coeff: Fraction
    radicand: int = 1

    def __post_init__(self):
        if self.coeff <= 0 or self.radicand < 1:
            raise ComplexError(f"lengths must be positive, got {self.coeff}*sqrt({self.radicand})")
        out, inside = _squarefree_split(self.radicand)
        if out != 1:
            object.__setattr__(self, "coeff", Fraction(self.coeff) * out)
            object.__setattr__(self, "radicand", inside)
        else:
            object.__setattr__(self, "coeff", Fraction(self.coeff))

    @classmethod
    def parse(cls, text: str) -> "Length":
        text = text.strip()
        if "*sqrt(" in text:
            coeff, rest = text.split("*sqrt(")
            return cls(Fraction(coeff), int(rest.rstrip(")")))
        return cls(Fraction(text))

    def __mul__(self, other: "Length") -> "Length":
        return Length(self.coeff * other.coeff, self.radicand * other.radicand)

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(self.radicand)

    def __str__(self) -> str:
        if self.radicand == 1:
            return str(self.coeff)
        return f"{self.coeff}*sqrt({self.radicand})"


ONE = Length(Fraction(1))
SQRT2 = Length(Fraction(1), 2)


def format_angle(a: Fraction) -> str:
    return f"{a} pi"


def parse_angle(text: str) -> Fraction:
    text = text.strip()
    if not text.endswith("pi"):
        raise ComplexError(f"angle {text!r} is not of the form 'p/q pi'")
    return Fraction(text[:-2].strip())


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: Length = ONE
    label: str = ""


@dataclass(frozen=True)
class Face:
    id: str
    boundary: tuple[tuple[str, int], ...]
    angles: tuple[Fraction, ...]
    shape: str = CONVEX

    def __len__(self):
        return len(self.boundary)


@dataclass(frozen=True)
class PE2Complex:
    vertices: tuple[str, ...] = ()
    edges: tuple[Edge, ...] = ()
    faces: tuple[Face, ...] = ()
    meta: tuple[tuple[str, str], ...] = ()

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def face_map(self) -> dict[str, Face]:
        return {f.id: f for f in self.faces}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    def edge(self, eid: str) -> Edge:
        try:
            return self.edge_map[eid]
        except KeyError:
            raise ComplexError(f"unknown edge {eid!r}") from None

    def face(self, fid: str) -> Face:
        return self.face_map[fid]

    def step_start(self, step: tuple[str, int]) -> str:
        e = self.edge(step[0])
        return e.tail if step[1] > 0 else e.head

    def step_end(self, step: tuple[str, int]) -> str:
        e = self.edge(step[0])
        return e.head if step[1] > 0 else e.tail

    def counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), len(self.faces)

    def faces_using(self, eid: str) -> list[Face]:
        return [f for f in self.faces if any(s[0] == eid for s in f.boundary)]

    def with_meta(self, **items: str) -> "PE2Complex":
        meta = dict(self.meta)
        meta.update({k: str(v) for k, v in items.items()})
        return PE2Complex(self.vertices, self.edges, self.faces, tuple(sorted(meta.items())))


@dataclass(frozen=True)
class Subcomplex1:
    """A 1-dimensional subcomplex: a set of edges closed under endpoints."""

    owner: PE2Complex
    edges: tuple[str, ...]
    vertices: tuple[str, ...]

    @classmethod
    def of(cls, owner: PE2Complex, edges: Iterable[str] = (), vertices: Iterable[str] = ()):
        edges = tuple(dict.fromkeys(edges))
        verts = dict.fromkeys(vertices)
        for eid in edges:
            e = owner.edge(eid)
            verts[e.tail] = None
            verts[e.head] = None
        for v in verts:
            if v not in set(owner.vertices):
                raise ComplexError(f"unknown vertex {v!r}")
        return cls(owner, edges, tuple(verts))

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges)


@dataclass
class ValidationReport:
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, invariant: str, cell: str):
        self.violations.append((invariant, cell))

    def __bool__(self):
        return self.ok


def _polygon_closes(lengths: list[float], angles: list[Fraction]) -> bool:
    # walk the sides turning by the exterior angle at each corner
    z, heading = 0j, 0.0
    m = len(lengths)
    for i in range(m):
        z += lengths[i] * cmath.exp(1j * heading)
        heading += math.pi * (1 - float(angles[(i + 1) % m]))
    return abs(z) < 1e-9 * max(1.0, sum(lengths))


def validate(cx: PE2Complex) -> ValidationReport:
    rep = ValidationReport()
    vset = set()
    for v in cx.vertices:
        if v in vset:
            rep.add("duplicate vertex id", v)
        vset.add(v)
    eset = set()
    for e in cx.edges:
        if e.id in eset:
            rep.add("duplicate edge id", e.id)
        eset.add(e.id)
        for end in (e.tail, e.head):
            if end not in vset:
                rep.add("edge endpoint is not a vertex", e.id)
    fset = set()
    for f in cx.faces:
        if f.id in fset:
            rep.add("duplicate face id", f.id)
        fset.add(f.id)
        m = len(f.boundary)
        if m == 0:
            rep.add("empty face boundary", f.id)
            continue
        if any(eid not in eset or sign not in (1, -1) for eid, sign in f.boundary):
            rep.add("face references an unknown edge", f.id)
            continue
        for i in range(m):
            if cx.step_end(f.boundary[i]) != cx.step_start(f.boundary[(i + 1) % m]):
                rep.add("boundary not closed", f.id)
                break
        if len(f.angles) != m:
            rep.add("corner count differs from boundary length", f.id)
            continue
        if any(not (0 < a < 1) for a in f.angles):
            rep.add("corner angle outside (0, pi)", f.id)
        if sum(f.angles) != m - 2:
            rep.add("angle sum differs from (m-2)pi", f.id)
            continue
        lengths = [cx.edge(eid).length for eid, _ in f.boundary]
        if f.shape == EQUILATERAL:
            if m != 3 or any(a != Fraction(1, 3) for a in f.angles) or any(L != ONE for L in lengths):
                rep.add("equilateral triangle with wrong sides or angles", f.id)
        elif f.shape == UNIT_SQUARE:
            if m != 4 or any(a != Fraction(1, 2) for a in f.angles) or any(L != ONE for L in lengths):
                rep.add("unit square with wrong sides or angles", f.id)
        elif f.shape == CONVEX:
            if not _polygon_closes([float(L) for L in lengths], list(f.angles)):
                rep.add("side lengths incompatible with corner angles", f.id)
        else:
            rep.add("unknown shape tag", f.id)
    return rep


def euler_characteristic(cx: PE2Complex) -> int:
    v, e, f = cx.counts()
    return v - e + f


def amalgamate(a: PE2Complex, b: PE2Complex, iso: Mapping[str, str], tag: str = "b:") -> PE2Complex:
    """Glue ``b`` to ``a`` along a 1-subcomplex.

    ``iso`` maps vertex and edge ids of a 1-subcomplex of ``a`` to ids of
    ``b``.  It must be an orientation-, incidence- and length-preserving
    bijection onto a 1-subcomplex of ``b``.  Cells of ``b`` outside the locus
    whose ids collide with ids of ``a`` are renamed with the prefix ``tag``.
    """
    a_vertices, b_vertices = set(a.vertices), set(b.vertices)
    vmap, emap = {}, {}
    for x, y in iso.items():
        if x in a_vertices:
            if y not in b_vertices:
                raise GlueError(f"{x!r} is a vertex but {y!r} is not")
            vmap[x] = y
        elif x in a.edge_map:
            if y not in b.edge_map:
                raise GlueError(f"{x!r} is an edge but {y!r} is not")
            emap[x] = y
        else:
            raise GlueError(f"unknown cell {x!r} in the first complex")
    if len(set(vmap.values())) != len(vmap) or len(set(emap.values())) != len(emap):
        raise GlueError("gluing map is not injective")
    for x, y in emap.items():
        ea, eb = a.edge(x), b.edge(y)
        for end_a, end_b in ((ea.tail, eb.tail), (ea.head, eb.head)):
            if vmap.get(end_a) != end_b:
                raise GlueError(f"edge {x!r} -> {y!r} does not respect endpoints")
        if ea.length != eb.length:
            raise GlueError(f"length mismatch gluing {x!r} ({ea.length}) to {y!r} ({eb.length})")

    inv_v = {y: x for x, y in vmap.items()}
    inv_e = {y: x for x, y in emap.items()}
    taken = set(a.vertices) | set(a.edge_map) | set(a.face_map)

    def rename(cid: str) -> str:
        return tag + cid if cid in taken else cid

    vname = {v: inv_v.get(v) or rename(v) for v in b.vertices}
    ename = {e.id: inv_e.get(e.id) or rename(e.id) for e in b.edges}
    vertices = list(a.vertices) + [vname[v] for v in b.vertices if v not in inv_v]
    edges = list(a.edges) + [
        Edge(ename[e.id], vname[e.tail], vname[e.head], e.length, e.label) for e in b.edges if e.id not in inv_e
    ]
    faces = list(a.faces) + [
        Face(rename(f.id), tuple((ename[eid], s) for eid, s in f.boundary), f.angles, f.shape) for f in b.faces
    ]
    out = PE2Complex(tuple(vertices), tuple(edges), tuple(faces), a.meta)
    ids = list(out.vertices) + list(out.edge_map) + [f.id for f in out.faces]
    if len(set(out.vertices)) != len(out.vertices) or len(out.edge_map) != len(out.edges) or len(out.face_map) != len(out.faces):
        raise GlueError(f"renaming with tag {tag!r} still collides; pick another tag")
    del ids
    return out


def delete_open_cells(cx: PE2Complex, eid: str) -> PE2Complex:
    """Remove an open edge together with the open faces whose boundary uses it."""
    cx.edge(eid)
    faces = tuple(f for f in cx.faces if all(s[0] != eid for s in f.boundary))
    edges = tuple(e for e in cx.edges if e.id != eid)
    return PE2Complex(cx.vertices, edges, faces, cx.meta)


def rescale(cx: PE2Complex, factor: Length) -> PE2Complex:
    edges = tuple(Edge(e.id, e.tail, e.head, e.length * factor, e.label) for e in cx.edges)
    faces = tuple(
        Face(f.id, f.boundary, f.angles, CONVEX if f.shape != CONVEX and factor != ONE else f.shape) for f in cx.faces
    )
    return PE2Complex(cx.vertices, edges, faces, cx.meta)


# -- structured text format ---------------------------------------------------

HEADER = "# pe2complex v1"


def _fmt_step(step: tuple[str, int]) -> str:
    return f"{step[0]}{'+' if step[1] > 0 else '-'}"


def _parse_step(tok: str) -> tuple[str, int]:
    if tok[-1] not in "+-":
        raise ComplexError(f"bad boundary step {tok!r}")
    return tok[:-1], 1 if tok[-1] == "+" else -1


def dumps(cx: PE2Complex) -> str:
    lines = [HEADER]
    for k, v in cx.meta:
        lines.append(f"meta\t{k}\t{v}")
    for v in cx.vertices:
        lines.append(f"vertex\t{v}")
    for e in cx.edges:
        lines.append(f"edge\t{e.id}\t{e.tail} {e.head}\t{e.length}\t{e.label}")
    for f in cx.faces:
        bnd = " ".join(_fmt_step(s) for s in f.boundary)
        ang = "; ".join(format_angle(a) for a in f.angles)
        lines.append(f"face\t{f.id}\t{bnd}\t{ang}\t{f.shape}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> PE2Complex:
    vertices, edges, faces, meta = [], [], [], []
    for n, line in enumerate(text.splitlines(), 1):
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        kind = parts[0]
        try:
            if kind == "meta":
                meta.append((parts[1], parts[2]))
            elif kind == "vertex":
                vertices.append(parts[1])
            elif kind == "edge":
                tail, head = parts[2].split(" ")
                edges.append(Edge(parts[1], tail, head, Length.parse(parts[3]), parts[4]))
            elif kind == "face":
                bnd = tuple(_parse_step(t) for t in parts[2].split(" "))
                ang = tuple(parse_angle(t) for t in parts[3].split(";"))
                faces.append(Face(parts[1], bnd, ang, parts[4]))
            else:
                raise ComplexError(f"unknown record kind {kind!r}")
        except (IndexError, ValueError) as exc:
            raise ComplexError(f"line {n}: {exc}") from exc
    return PE2Complex(tuple(vertices), tuple(edges), tuple(faces), tuple(meta))


def load(path) -> PE2Complex:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(cx: PE2Complex, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(cx))
