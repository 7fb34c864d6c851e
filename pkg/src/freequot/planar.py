"""Planarity of finite multigraphs (balls and cores of quotient graphs).

Loops are dropped and every parallel copy of an edge beyond the first is
subdivided once; neither step changes planarity.  The simple graph is then
handed to networkx's left-right planarity test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import networkx as nx


@dataclass(frozen=True)
class FiniteMultigraph:
    n_vertices: int
    edges: tuple  # (u, v) pairs; loops and repeats allowed

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n_vertices - 1}")

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> "FiniteMultigraph":
        return cls(int(n_vertices), tuple((int(u), int(v)) for u, v in edges))

    def relabel(self, perm) -> "FiniteMultigraph":
        return FiniteMultigraph(self.n_vertices, tuple((int(perm[u]), int(perm[v])) for u, v in self.edges))


@dataclass(frozen=True)
class PlanarityVerdict:
    planar: bool
    rotation: Optional[dict] = field(default=None, compare=False)
    obstruction: Optional[str] = None
    window_radius: Optional[int] = None
    evidence_only: bool = False

    def as_dict(self) -> dict:
        d = {"planar": self.planar}
        if self.planar:
            d["note"] = "evidence, not proof" if self.evidence_only else "finite graph"
        else:
            d["obstruction"] = self.obstruction
        if self.window_radius is not None:
            d["radius"] = self.window_radius
        return d


def simplify(g: FiniteMultigraph) -> nx.Graph:
    """Simple graph with the same planarity as ``g``."""
    G = nx.Graph()
    G.add_nodes_from(range(g.n_vertices))
    extra = g.n_vertices
    for u, v in g.edges:
        if u == v:
            continue
        if G.has_edge(u, v):
            G.add_edge(u, extra)
            G.add_edge(extra, v)
            extra += 1
        else:
            G.add_edge(u, v)
    return G


def _obstruction_tag(K: nx.Graph) -> str:
    branch = [v for v in K if K.degree(v) >= 3]
    if len(branch) == 5:
        return "K5-subdivision"
    if len(branch) == 6:
        return "K3,3-subdivision"
    return "kuratowski-subgraph"


def is_planar(g: FiniteMultigraph) -> PlanarityVerdict:
    G = simplify(g)
    planar, cert = nx.check_planarity(G, counterexample=True)
    if planar:
        return PlanarityVerdict(True, rotation=cert.get_data())
    return PlanarityVerdict(False, obstruction=_obstruction_tag(cert))


def check_quotient_planarity(g, R: int) -> PlanarityVerdict:
    """Planarity of the radius-``R`` ball of a quotient graph.

    A non-planar verdict refutes planarity of the whole graph.  A planar
    verdict on an approximate window is evidence only.
    """
    g.require_radius(R)
    ball = g.ball(R)
    v = is_planar(ball.to_multigraph())
    return PlanarityVerdict(v.planar, v.rotation, v.obstruction, window_radius=R,
                            evidence_only=v.planar and not (g.exact and R >= ball.host_diameter()))


def complete_graph(m: int) -> FiniteMultigraph:
    return FiniteMultigraph.from_edges(m, [(i, j) for i in range(m) for j in range(i + 1, m)])


def complete_bipartite(a: int, b: int) -> FiniteMultigraph:
    return FiniteMultigraph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])
