"""The spine of a punctured one-vertex complex and homology of link cycles.

The spine has a type-1 node for every edge, a type-2 node for every face and
one leg per face corner occurrence ``(face, boundary step)`` joining the
face barycentre to the barycentre of that boundary edge.  The retraction of
the punctured complex onto the spine sends the link edge at corner ``i`` of
``f`` to the two-leg path ``leg(f, i-1)^-1 . leg(f, i)``.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .complex_core import PE2Complex
from .link_analysis import LinkCycle, LinkGraph

SpineNode = tuple[str, str]  # ("e", edge id) or ("f", face id)


@dataclass(frozen=True)
class Leg:
    face: str
    step: int
    edge: str


@dataclass(frozen=True)
class SpineGraph:
    type1: tuple[str, ...]
    type2: tuple[str, ...]
    legs: tuple[Leg, ...]
    tree: frozenset  # indices of tree legs
    basis: tuple[int, ...]  # non-tree leg indices, oriented face -> edge

    @cached_property
    def leg_index(self) -> dict[tuple[str, int], int]:
        return {(l.face, l.step): i for i, l in enumerate(self.legs)}

    @cached_property
    def basis_position(self) -> dict[int, int]:
        return {leg: i for i, leg in enumerate(self.basis)}

    @property
    def rank(self) -> int:
        return len(self.basis)

    def node_count(self) -> int:
        return len(self.type1) + len(self.type2)

    def leg_class(self, leg: int) -> int | None:
        """Basis coordinate carried by a leg, or None for tree legs."""
        return self.basis_position.get(leg)

    def tree_description(self) -> list[str]:
        return [f"{self.legs[i].face}#{self.legs[i].step}" for i in sorted(self.tree)]


def build_spine(cx: PE2Complex, v: str | None = None) -> SpineGraph:
    """Spine of cx minus its vertex, with a deterministic BFS spanning tree.

    The tree is grown breadth first from the first type-1 node in declaration
    order, visiting legs in face order then boundary-step order.
    """
    type1 = tuple(e.id for e in cx.edges)
    type2 = tuple(f.id for f in cx.faces)
    legs = tuple(Leg(f.id, i, eid) for f in cx.faces for i, (eid, _) in enumerate(f.boundary))
    adj: dict[SpineNode, list[tuple[int, SpineNode]]] = {("e", e): [] for e in type1}
    adj.update({("f", f): [] for f in type2})
    for k, leg in enumerate(legs):
        adj[("f", leg.face)].append((k, ("e", leg.edge)))
        adj[("e", leg.edge)].append((k, ("f", leg.face)))
    tree = set()
    seen = set()
    for root in [("e", e) for e in type1] + [("f", f) for f in type2]:
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for k, w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    tree.add(k)
                    queue.append(w)
    basis = tuple(k for k in range(len(legs)) if k not in tree)
    return SpineGraph(type1, type2, legs, frozenset(tree), basis)


def spine_components(spine: SpineGraph) -> int:
    return spine.node_count() - len(spine.tree)


@dataclass(frozen=True)
class GraphMorphism:
    """Map from the barycentric subdivision of a link to the spine.

    Link node (e, s) goes to type-1 node e; the midpoint of link edge k goes
    to the face node.  The half-edges of link edge k map to legs:
    ``half_legs[k] = (leg at the u end, leg at the w end)``.
    """

    link: LinkGraph
    spine: SpineGraph
    node_map: tuple[str, ...]
    half_legs: tuple[tuple[int, int], ...]
    immersion: bool

    def class_of_edge(self, k: int, forward: bool = True) -> np.ndarray:
        vec = np.zeros(self.spine.rank, dtype=np.int64)
        a, b = self.half_legs[k]
        ca, cb = self.spine.leg_class(a), self.spine.leg_class(b)
        sign = 1 if forward else -1
        # u end: leg traversed edge -> face, i.e. against its orientation
        if ca is not None:
            vec[ca] -= sign
        if cb is not None:
            vec[cb] += sign
        return vec


def link_to_spine(link: LinkGraph, spine: SpineGraph, cx: PE2Complex) -> GraphMorphism:
    type1 = set(spine.type1)
    node_map = []
    for eid, _ in link.nodes:
        if eid not in type1:
            raise ValueError(f"link node on edge {eid!r} has no spine counterpart")
        node_map.append(eid)
    half = []
    for e in link.edges:
        f = cx.face(e.face)
        m = len(f.boundary)
        half.append((spine.leg_index[(e.face, (e.corner - 1) % m)], spine.leg_index[(e.face, e.corner)]))
    # local injectivity on stars
    immersion = True
    star: dict[int, list[int]] = {}
    for k, (a, b) in enumerate(half):
        if a == b:
            immersion = False
        u, w = link.endpoints(k)
        star.setdefault(u, []).append(a)
        star.setdefault(w, []).append(b)
    for legs in star.values():
        if len(set(legs)) != len(legs):
            immersion = False
    return GraphMorphism(link, spine, tuple(node_map), tuple(half), immersion)


def cycle_directions(link: LinkGraph, cyc: LinkCycle) -> list[bool]:
    """For each edge of the cycle, whether it is traversed from u to w."""
    out = []
    m = len(cyc.nodes)
    for i, k in enumerate(cyc.edges):
        a, b = link.endpoints(k)
        src, dst = cyc.nodes[i], cyc.nodes[(i + 1) % m]
        if (a, b) == (src, dst):
            out.append(True)
        elif (b, a) == (src, dst):
            out.append(False)
        else:
            raise ValueError("cycle edge does not join consecutive nodes")
    return out


def cycle_class(mor: GraphMorphism, cyc: LinkCycle) -> np.ndarray:
    """H1 class of the spine image of a link cycle."""
    vec = np.zeros(mor.spine.rank, dtype=np.int64)
    for k, fwd in zip(cyc.edges, cycle_directions(mor.link, cyc)):
        vec += mor.class_of_edge(k, fwd)
    return vec


def h1_class(spine: SpineGraph, walk: Sequence[tuple[int, int]]) -> np.ndarray:
    """Class of a closed spine walk given as (leg index, +1 face->edge | -1 edge->face)."""
    vec = np.zeros(spine.rank, dtype=np.int64)
    ends = []
    for leg, d in walk:
        L = spine.legs[leg]
        a, b = ("f", L.face), ("e", L.edge)
        ends.append((a, b) if d > 0 else (b, a))
        c = spine.leg_class(leg)
        if c is not None:
            vec[c] += d
    for i in range(len(ends)):
        if ends[i][1] != ends[(i + 1) % len(ends)][0]:
            raise ValueError("walk is not closed")
    return vec


def enumerate_short_cycles(link: LinkGraph, max_len: int) -> list[LinkCycle]:
    """All simple cycles with at most max_len edges, once per rotation/reflection.

    A cycle is reported from its smallest node, and of its two directions the
    one whose first edge index is below its last edge index is kept.
    """
    if max_len < 1:
        return []
    adj = link.adjacency
    out = []
    for s in range(len(link.nodes)):
        # loops
        for k, w in adj[s]:
            if w == s:
                out.append(LinkCycle((s,), (k,)))
        path_nodes = [s]
        path_edges: list[int] = []
        on_path = {s}

        def dfs(u):
            for k, w in adj[u]:
                if w == u:
                    continue
                if path_edges and k == path_edges[-1]:
                    continue
                if w == s:
                    if path_edges and path_edges[0] < k:
                        out.append(LinkCycle(tuple(path_nodes), tuple(path_edges) + (k,)))
                    continue
                if w < s or w in on_path or len(path_edges) + 1 >= max_len:
                    continue
                path_nodes.append(w)
                path_edges.append(k)
                on_path.add(w)
                dfs(w)
                on_path.discard(w)
                path_edges.pop()
                path_nodes.pop()

        dfs(s)
    return out


def hnt_check(cyc: LinkCycle, mor: GraphMorphism) -> bool:
    """Some type-1 image node has exactly one preimage on the cycle."""
    counts = Counter(mor.node_map[i] for i in cyc.nodes)
    return any(c == 1 for c in counts.values())


def cycle_from_nodes(link: LinkGraph, names: Sequence[int], edges: Sequence[int]) -> LinkCycle:
    return LinkCycle(tuple(names), tuple(edges))


def cycles_through(link: LinkGraph, edge_ids: Iterable[int]) -> list[LinkCycle]:
    """Decompose a 2-regular edge set into its cycles."""
    edge_ids = list(edge_ids)
    remaining = set(edge_ids)
    inc: dict[int, list[int]] = {}
    for k in edge_ids:
        a, b = link.endpoints(k)
        inc.setdefault(a, []).append(k)
        inc.setdefault(b, []).append(k)
    if any(len(v) != 2 for v in inc.values()):
        raise ValueError("edge set is not 2-regular")
    cycles = []
    while remaining:
        k0 = min(remaining)
        a, b = link.endpoints(k0)
        nodes, edges = [a], [k0]
        remaining.discard(k0)
        u, k = b, k0
        while u != a:
            nodes.append(u)
            k = next(x for x in inc[u] if x != k)
            remaining.discard(k)
            edges.append(k)
            x, y = link.endpoints(k)
            u = y if x == u else x
        cycles.append(LinkCycle(tuple(nodes), tuple(edges)))
    return cycles


def spine_to_dot(spine: SpineGraph) -> str:
    lines = ["graph spine {"]
    for e in spine.type1:
        lines.append(f'  "{e}^" [shape=circle];')
    for f in spine.type2:
        lines.append(f'  "{f}^" [shape=box];')
    for k, leg in enumerate(spine.legs):
        style = "" if k in spine.tree else " [style=dashed]"
        lines.append(f'  "{leg.face}^" -- "{leg.edge}^"{style};')
    lines.append("}")
    return "\n".join(lines) + "\n"
