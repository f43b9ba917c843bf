"""Vertex links of PE 2-complexes and the exact link condition.

A link node is an edge end ``(edge id, sign)``: sign ``+1`` is the head end
and ``-1`` the tail end.  Each face corner at the vertex contributes one link
edge whose length is the corner angle.  All weights are rational multiples of
pi and every comparison below is done on integers after scaling by a common
denominator.
"""
from __future__ import annotations

import heapq
import math
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .complex_core import ComplexError, PE2Complex, Subcomplex1

Node = tuple[str, int]
TWO_PI = Fraction(2)


def node_name(node: Node) -> str:
    return f"{node[0]}{'+' if node[1] > 0 else '-'}"


def parse_node(name: str) -> Node:
    return name[:-1], 1 if name[-1] == "+" else -1


@dataclass(frozen=True)
class LinkEdge:
    face: str
    corner: int
    u: Node
    w: Node
    weight: Fraction


@dataclass(frozen=True)
class LinkGraph:
    vertex: str
    nodes: tuple[Node, ...]
    edges: tuple[LinkEdge, ...]

    @cached_property
    def index(self) -> dict[Node, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    @cached_property
    def scale(self) -> int:
        """Common denominator turning every weight into an integer."""
        return math.lcm(1, *(e.weight.denominator for e in self.edges))

    @cached_property
    def int_weights(self) -> list[int]:
        s = self.scale
        return [int(e.weight * s) for e in self.edges]

    @cached_property
    def adjacency(self) -> list[list[tuple[int, int]]]:
        """adjacency[u] = list of (edge index, other endpoint index)."""
        adj = [[] for _ in self.nodes]
        for k, e in enumerate(self.edges):
            a, b = self.index[e.u], self.index[e.w]
            adj[a].append((k, b))
            if a != b:
                adj[b].append((k, a))
        return adj

    def endpoints(self, k: int) -> tuple[int, int]:
        e = self.edges[k]
        return self.index[e.u], self.index[e.w]

    def subgraph(self, keep_nodes: Iterable[Node]) -> "LinkGraph":
        keep = set(keep_nodes)
        nodes = tuple(n for n in self.nodes if n in keep)
        edges = tuple(e for e in self.edges if e.u in keep and e.w in keep)
        return LinkGraph(self.vertex, nodes, edges)

    def without_edges(self, drop: Iterable[int]) -> "LinkGraph":
        drop = set(drop)
        return LinkGraph(self.vertex, self.nodes, tuple(e for k, e in enumerate(self.edges) if k not in drop))

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for _, w in self.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.nodes)

    def bipartition(self) -> tuple[set[Node], set[Node]] | None:
        """Two-colouring of the link, or None if an odd cycle exists."""
        colour: dict[int, int] = {}
        for s in range(len(self.nodes)):
            if s in colour:
                continue
            colour[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for _, w in self.adjacency[u]:
                    if w not in colour:
                        colour[w] = 1 - colour[u]
                        stack.append(w)
                    elif colour[w] == colour[u]:
                        return None
        left = {self.nodes[i] for i, c in colour.items() if c == 0}
        return left, set(self.nodes) - left


def build_link(cx: PE2Complex, v: str) -> LinkGraph:
    if v not in set(cx.vertices):
        raise ComplexError(f"unknown vertex {v!r}")
    nodes = []
    for e in cx.edges:
        if e.head == v:
            nodes.append((e.id, 1))
        if e.tail == v:
            nodes.append((e.id, -1))
    edges = []
    for f in cx.faces:
        m = len(f.boundary)
        for i in range(m):
            step = f.boundary[i]
            if cx.step_start(step) != v:
                continue
            prev = f.boundary[i - 1]
            u = (prev[0], prev[1])  # end of previous step: head end if traversed forwards
            w = (step[0], -step[1])  # start of this step
            edges.append(LinkEdge(f.id, i, u, w, f.angles[i]))
    return LinkGraph(v, tuple(nodes), tuple(edges))


def _dijkstra(link: LinkGraph, src: int, skip_edge: int = -1, cutoff: float = math.inf, target: int = -1):
    w = link.int_weights
    dist = {src: 0}
    prev: dict[int, tuple[int, int]] = {}
    heap = [(0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        if u == target:
            break
        for k, x in link.adjacency[u]:
            if k == skip_edge:
                continue
            nd = d + w[k]
            if nd >= cutoff:
                continue
            if nd < dist.get(x, math.inf):
                dist[x] = nd
                prev[x] = (u, k)
                heapq.heappush(heap, (nd, x))
    return dist, prev


@dataclass(frozen=True)
class LinkCycle:
    """A closed edge path in a link: nodes[i] --edges[i]--> nodes[i+1 mod len]."""

    nodes: tuple[int, ...]
    edges: tuple[int, ...]

    def __len__(self):
        return len(self.edges)

    def weight(self, link: LinkGraph) -> Fraction:
        return sum((link.edges[k].weight for k in self.edges), Fraction(0))

    def named(self, link: LinkGraph) -> list[str]:
        return [node_name(link.nodes[i]) for i in self.nodes]


def shortest_injective_cycle(link: LinkGraph) -> tuple[Fraction, LinkCycle] | None:
    """Minimal weight simple cycle, or None when the link is a forest.

    For each edge (u, w) the shortest u-w path avoiding that edge closes up
    to the shortest simple cycle through it; Dijkstra paths are simple so
    the witness is vertex-injective by construction.
    """
    best = math.inf
    best_cycle = None
    iw = link.int_weights
    for k in range(len(link.edges)):
        u, x = link.endpoints(k)
        if u == x:
            if iw[k] < best:
                best, best_cycle = iw[k], LinkCycle((u,), (k,))
            continue
        dist, prev = _dijkstra(link, u, skip_edge=k, cutoff=best - iw[k], target=x)
        if x in dist and dist[x] + iw[k] < best:
            best = dist[x] + iw[k]
            path_nodes, path_edges = [x], []
            while path_nodes[-1] != u:
                p, e = prev[path_nodes[-1]]
                path_edges.append(e)
                path_nodes.append(p)
            path_nodes.reverse()
            path_edges.reverse()
            # u -> ... -> x along the path, then back to u along edge k
            best_cycle = LinkCycle(tuple(path_nodes), tuple(path_edges) + (k,))
    if best_cycle is None:
        return None
    return Fraction(best, link.scale), best_cycle


def girth(link: LinkGraph) -> int | None:
    """Combinatorial girth (unit weights)."""
    unit = LinkGraph(link.vertex, link.nodes, tuple(
        LinkEdge(e.face, e.corner, e.u, e.w, Fraction(1)) for e in link.edges))
    res = shortest_injective_cycle(unit)
    return None if res is None else int(res[0])


def hop_distance(link: LinkGraph, a: Node, b: Node) -> int | None:
    """Number of edges on a shortest path from a to b (None if disconnected)."""
    src, dst = link.index[a], link.index[b]
    seen = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            return seen[u]
        for _, w in link.adjacency[u]:
            if w not in seen:
                seen[w] = seen[u] + 1
                queue.append(w)
    return None


@dataclass
class Certificate:
    passed: bool
    strict: bool = False
    details: dict = field(default_factory=dict)
    witness: object = None

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"passed": self.passed, "strict": self.strict}
        out.update(self.details)
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def check_npc(cx: PE2Complex) -> Certificate:
    """Gromov link condition: every injective link loop has length >= 2 pi."""
    passed, strict = True, True
    details = {}
    witness = None
    for v in cx.vertices:
        link = build_link(cx, v)
        res = shortest_injective_cycle(link)
        if res is None:
            details[v] = None
            continue
        length, cyc = res
        details[v] = str(length)
        if length < TWO_PI:
            if passed:
                witness = {"vertex": v, "length": str(length), "cycle": cyc.named(link)}
            passed = False
        if length <= TWO_PI:
            strict = False
    return Certificate(passed, passed and strict, {"shortest_loop_over_pi": details}, witness)


def link_distances(link: LinkGraph, src: Node) -> dict[Node, Fraction]:
    dist, _ = _dijkstra(link, link.index[src])
    return {link.nodes[i]: Fraction(d, link.scale) for i, d in dist.items()}


def link_distance_matrix(link: LinkGraph, points: Sequence[Node]) -> list[list[Fraction | float]]:
    """Pairwise distances in units of pi; math.inf for disconnected pairs."""
    for p in points:
        if p not in link.index:
            raise ComplexError(f"unknown link node {node_name(p)}")
    rows = []
    for p in points:
        d = link_distances(link, p)
        rows.append([d.get(q, math.inf) for q in points])
    return rows


def rose_link_points(rose: Subcomplex1, v: str) -> list[Node]:
    pts = []
    for eid in rose.edges:
        e = rose.owner.edge(eid)
        if e.head == v:
            pts.append((eid, 1))
        if e.tail == v:
            pts.append((eid, -1))
    return pts


def check_ultraconvex(cx: PE2Complex, rose: Subcomplex1) -> Certificate:
    passed = True
    details, witness = {}, None
    for v in rose.vertices:
        pts = rose_link_points(rose, v)
        if len(pts) < 2:
            continue
        link = build_link(cx, v)
        mat = link_distance_matrix(link, pts)
        off = min(mat[a][b] for a in range(len(pts)) for b in range(len(pts)) if a != b)
        details[v] = str(off) if off != math.inf else "inf"
        if off < TWO_PI and passed:
            passed = False
            a, b = next((a, b) for a in range(len(pts)) for b in range(len(pts)) if a != b and mat[a][b] == off)
            witness = {"vertex": v, "pair": [node_name(pts[a]), node_name(pts[b])], "distance": str(off)}
    return Certificate(passed, False, {"min_rose_distance_over_pi": details}, witness)


# -- DOT ------------------------------------------------------------------------

def to_dot(link: LinkGraph) -> str:
    lines = [f'graph "Lk({link.vertex})" {{']
    for n in link.nodes:
        lines.append(f'  "{node_name(n)}";')
    for e in link.edges:
        lines.append(f'  "{node_name(e.u)}" -- "{node_name(e.w)}" [label="{e.face}@{e.corner} ({e.weight})"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


_DOT_HEAD = re.compile(r'^graph "Lk\((.*)\)" \{$')
_DOT_NODE = re.compile(r'^\s*"([^"]+)";$')
_DOT_EDGE = re.compile(r'^\s*"([^"]+)" -- "([^"]+)" \[label="(.+)@(\d+) \(([^)]+)\)"\];$')


def from_dot(text: str) -> LinkGraph:
    vertex, nodes, edges = None, [], []
    for line in text.splitlines():
        if m := _DOT_HEAD.match(line):
            vertex = m.group(1)
        elif m := _DOT_EDGE.match(line):
            edges.append(LinkEdge(m.group(3), int(m.group(4)), parse_node(m.group(1)), parse_node(m.group(2)),
                                  Fraction(m.group(5))))
        elif m := _DOT_NODE.match(line):
            nodes.append(parse_node(m.group(1)))
    if vertex is None:
        raise ComplexError("not a link DOT file")
    return LinkGraph(vertex, tuple(nodes), tuple(edges))
