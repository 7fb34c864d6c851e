"""Finite subgraphs of quotient graphs: cores, boundaries, girth and
isoperimetric bounds.

Degree convention: a loop adds 2 to the degree of its vertex, so every vertex
of a quotient graph has degree 2n, and boundaries never contain loops.
Edges of a quotient graph are the pairs ``(v, generator)``; the edge runs from
``v`` to ``table[v, 2*(generator-1)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .planar import FiniteMultigraph, PlanarityVerdict, check_quotient_planarity, is_planar
from .schreier import RadiusNotCertified, SchreierGraph


class DisconnectedInput(ValueError):
    pass


class NotPlanar(ValueError):
    pass


class Subgraph:
    """Induced subgraph of a quotient graph on a finite vertex set."""

    def __init__(self, host: SchreierGraph, vertices: Iterable[int]):
        self.host = host
        vs = np.unique(np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices,
                                  dtype=np.int64))
        if vs.size and (vs[0] < 0 or vs[-1] >= host.n_vertices):
            raise ValueError("vertex outside host graph")
        self.vertices = vs
        self._edges = None

    def __len__(self) -> int:
        return int(self.vertices.size)

    def __repr__(self) -> str:
        return f"Subgraph({len(self)} vertices, {len(self.edges())} edges)"

    def member_mask(self) -> np.ndarray:
        m = np.zeros(self.host.n_vertices, dtype=bool)
        m[self.vertices] = True
        return m

    def edges(self) -> list:
        """Induced edges as ``(u, w, generator_index)`` with both ends inside."""
        if self._edges is None:
            t = self.host.table
            inside = self.member_mask()
            out = []
            for x in range(0, t.shape[1], 2):
                w = t[self.vertices, x]
                ok = (w >= 0) & inside[np.where(w >= 0, w, 0)]
                for u, ww in zip(self.vertices[ok], w[ok]):
                    out.append((int(u), int(ww), x // 2))
            self._edges = out
        return self._edges

    def degrees(self) -> dict:
        deg = {int(v): 0 for v in self.vertices}
        for u, w, _ in self.edges():
            deg[u] += 1
            deg[w] += 1
        return deg

    @property
    def chi(self) -> int:
        return len(self) - len(self.edges())

    def is_connected(self) -> bool:
        if len(self) <= 1:
            return True
        adj = {int(v): [] for v in self.vertices}
        for u, w, _ in self.edges():
            adj[u].append(w)
            adj[w].append(u)
        start = int(self.vertices[0])
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self)

    def to_multigraph(self) -> FiniteMultigraph:
        pos = {int(v): i for i, v in enumerate(self.vertices)}
        return FiniteMultigraph.from_edges(len(self), [(pos[u], pos[w]) for u, w, _ in self.edges()])

    def host_diameter(self) -> int:
        return int(self.host.distances().max())


@dataclass(frozen=True)
class CoreGraph:
    host: SchreierGraph = field(repr=False)
    vertices: tuple
    edges: tuple
    chi: int
    boundary: int
    ell2: Optional[int]  # twice the injectivity radius; None = infinite

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def ell(self) -> Union[Fraction, float]:
        return math.inf if self.ell2 is None else Fraction(self.ell2, 2)

    def as_subgraph(self) -> Subgraph:
        return Subgraph(self.host, self.vertices)

    def to_multigraph(self) -> FiniteMultigraph:
        pos = {v: i for i, v in enumerate(self.vertices)}
        return FiniteMultigraph.from_edges(len(self.vertices), [(pos[u], pos[w]) for u, w, _ in self.edges])


class _TrivialCore:
    """Core of a tree: empty.  A value, not an error."""

    size = 0
    vertices = ()
    edges = ()

    def __repr__(self) -> str:
        return "TrivialCore"

    def __bool__(self) -> bool:
        return False


TrivialCore = _TrivialCore()


def _require_trusted(s: Subgraph) -> None:
    g = s.host
    if g.exact:
        return
    d = g.distances()[s.vertices]
    if (d < 0).any() or (d > g.certified_radius - 1).any():
        raise RadiusNotCertified(
            f"subgraph must lie within radius {g.certified_radius - 1} of the basepoint")


def boundary_count(s: Subgraph) -> int:
    """Number of host edges with exactly one endpoint in ``s``."""
    _require_trusted(s)
    deg = s.degrees()
    return sum(2 * s.host.rank - d for d in deg.values())


def core(s: Subgraph, rng=None):
    """Strip degree-1 vertices until none remain.

    Returns :data:`TrivialCore` for trees.  ``rng`` (numpy Generator) shuffles
    the stripping order; the result does not depend on it.
    """
    if len(s) == 0:
        return TrivialCore
    if not s.is_connected():
        raise DisconnectedInput("core() needs a connected subgraph")
    deg = s.degrees()
    adj = {v: [] for v in deg}
    for u, w, _ in s.edges():
        if u != w:
            adj[u].append(w)
            adj[w].append(u)
    alive = set(deg)
    queue = [v for v in deg if deg[v] == 1]
    if rng is not None:
        rng.shuffle(queue)
    while queue:
        i = int(rng.integers(len(queue))) if rng is not None else len(queue) - 1
        v = queue[i]
        queue[i] = queue[-1]
        queue.pop()
        if v not in alive or deg[v] != 1:
            continue
        alive.discard(v)
        for w in adj[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] == 1:
                    queue.append(w)
    if len(alive) <= 1 and all(deg[v] == 0 for v in alive):
        return TrivialCore
    sub = Subgraph(s.host, sorted(alive))
    return _make_core(sub)


def _make_core(sub: Subgraph) -> CoreGraph:
    edges = tuple(sub.edges())
    deg = sub.degrees()
    bnd = sum(2 * sub.host.rank - d for d in deg.values())
    return CoreGraph(sub.host, tuple(int(v) for v in sub.vertices), edges, sub.chi, bnd,
                     _girth(len(sub.vertices), [(u, w) for u, w, _ in edges], tuple(int(v) for v in sub.vertices)))


def _girth(n_vertices: int, edges, labels=None) -> Optional[int]:
    if not edges:
        return None
    pos = {v: i for i, v in enumerate(labels)} if labels is not None else None
    us = np.array([pos[u] if pos else u for u, _ in edges], dtype=np.int64)
    ws = np.array([pos[w] if pos else w for _, w in edges], dtype=np.int64)
    eid = np.arange(len(edges), dtype=np.int64)
    src = np.concatenate([us, ws])
    dst = np.concatenate([ws, us])
    ids = np.concatenate([eid, eid])
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n_vertices + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    indptr = np.cumsum(indptr)
    g = kernels.multigraph_girth(indptr, dst[order], ids[order], n_vertices)
    return None if g < 0 else int(g)


def euler_boundary_check(c: CoreGraph, n: int) -> bool:
    """|boundary| == (2n - 2)|C| + 2 chi(C), exactly."""
    return c.boundary == (2 * n - 2) * c.size + 2 * c.chi


@dataclass(frozen=True)
class InjectivityRadius:
    ell2: Optional[int]  # None = infinite (or not found, see ``determined``)
    determined: bool = True
    method: str = ""

    @property
    def value(self) -> Union[Fraction, float]:
        return math.inf if self.ell2 is None else Fraction(self.ell2, 2)

    @property
    def lower_bound(self) -> Union[Fraction, float]:
        return self.value


def injectivity_radius(g) -> InjectivityRadius:
    """Half the length of the shortest non-backtracking closed edge path.

    Finite graphs (cores, subgraphs, exact quotients) are searched at every
    vertex.  Approximate windows of normal quotients are vertex-transitive in
    truth, so the search runs at the basepoint over walks that stay inside the
    certified ball; if none is found the result is a flagged lower bound.
    """
    if isinstance(g, CoreGraph):
        return InjectivityRadius(g.ell2, True, "girth")
    if isinstance(g, Subgraph):
        return InjectivityRadius(_girth(len(g), [(u, w) for u, w, _ in g.edges()],
                                        [int(v) for v in g.vertices]), True, "girth")
    if g.exact:
        full = Subgraph(g, np.arange(g.n_vertices))
        return InjectivityRadius(_girth(g.n_vertices, [(u, w) for u, w, _ in full.edges()]), True, "girth")
    if g.is_tree_window:
        return InjectivityRadius(None, True, "free: tree")
    c = g.certified_radius
    length = int(kernels.nb_shortest_closed(g.table, 0, 2 * c + 1))
    if length < 0:
        # every closed walk is longer than 2c + 1
        return InjectivityRadius(2 * c + 2, False, "lower bound: no cycle in certified ball")
    return InjectivityRadius(length, True, "basepoint")


def planar_core_size_check(c: CoreGraph, verdict: Optional[PlanarityVerdict] = None) -> bool:
    """|C| >= (2 - chi(C)) (ell(C) - 1) for a planar core with finite ell."""
    if verdict is None:
        verdict = is_planar(c.to_multigraph())
    if not verdict.planar:
        raise NotPlanar("planar_core_size_check needs a planar core")
    if c.ell2 is None:
        raise ValueError("injectivity radius is infinite")
    return 2 * c.size >= (2 - c.chi) * (c.ell2 - 2)


# -- isoperimetric bounds -------------------------------------------------

@dataclass(frozen=True)
class IsoperimetricUpper:
    value: Fraction
    witness: str
    witness_vertices: tuple = field(repr=False, default=())


@dataclass(frozen=True)
class IsoperimetricLower:
    value: Fraction
    tag: str
    vacuous: bool = False


def ratio(s, n: int) -> Fraction:
    size = s.size if isinstance(s, CoreGraph) else len(s)
    b = s.boundary if isinstance(s, CoreGraph) else boundary_count(s)
    return Fraction(b, 2 * n * size)


def default_candidates(g: SchreierGraph, max_radius: Optional[int] = None) -> list:
    """Balls around the basepoint and their cores, named."""
    d = g.distances()
    top = int(d.max()) if g.exact else g.certified_radius - 1
    if max_radius is not None:
        top = min(top, max_radius)
    out = []
    for r in range(top + 1):
        s = Subgraph(g, np.nonzero((d >= 0) & (d <= r))[0])
        out.append((f"ball:{r}", s))
        c = core(s)
        if c:
            out.append((f"core-of-ball:{r}", c))
    return out


def isoperimetric_upper(g: SchreierGraph, candidates: Optional[Sequence] = None) -> IsoperimetricUpper:
    """min over candidate sets of |dA| / (2n |A|)."""
    if candidates is None:
        candidates = default_candidates(g)
    if not candidates:
        raise ValueError("empty candidate set")
    best = None
    for name, s in candidates:
        r = ratio(s, g.rank)
        verts = tuple(s.vertices) if isinstance(s, CoreGraph) else tuple(int(v) for v in s.vertices)
        key = (r, verts)
        if best is None or key < best[0]:
            best = (key, name)
    (val, verts), name = best
    return IsoperimetricUpper(val, name, verts)


def planar_lower_formula(n: int, ell) -> Fraction:
    """(n-1)/n - 1/(n (ell - 1)), for ell > 1 (ell may be infinite)."""
    if ell == math.inf:
        return Fraction(n - 1, n)
    ell = Fraction(ell)
    return Fraction(n - 1, n) - 1 / (n * (ell - 1))


def isoperimetric_lower_planar(g: SchreierGraph, ell, verdict: Optional[PlanarityVerdict] = None) -> IsoperimetricLower:
    """Lower bound for i(Gamma) from planarity and the injectivity radius."""
    if verdict is None:
        R = int(g.distances().max()) if g.exact else g.certified_radius
        verdict = check_quotient_planarity(g, R)
    if not verdict.planar:
        raise NotPlanar("graph has a non-planar ball")
    n = g.rank
    if ell != math.inf and Fraction(ell) <= 1:
        return IsoperimetricLower(Fraction(0), "vacuous: ell <= 1", True)
    val = planar_lower_formula(n, ell)
    if val <= 0:
        return IsoperimetricLower(Fraction(0), f"vacuous: planar+girth bound {val} <= 0", True)
    tag = "planar+injectivity-radius"
    if verdict.evidence_only:
        tag += " (planarity from window)"
    return IsoperimetricLower(val, tag)


def mohar_growth_lower(i_lower):
    """(1 + i) / (1 - i)."""
    if not 0 <= i_lower < 1:
        raise ValueError(f"need 0 <= i < 1, got {i_lower}")
    return (1 + i_lower) / (1 - i_lower)


def cheeger_lambda0_lower(i_lower) -> float:
    """1 - sqrt(1 - i^2), written to avoid cancellation for small i."""
    if not 0 <= i_lower <= 1:
        raise ValueError(f"need 0 <= i <= 1, got {i_lower}")
    i2 = float(i_lower) ** 2
    return i2 / (1 + math.sqrt(1 - i2))


def random_connected_subset(g: SchreierGraph, size: int, rng, radius: Optional[int] = None) -> Subgraph:
    """Random connected vertex set grown from a random vertex of the trusted ball."""
    d = g.distances()
    if radius is None:
        radius = int(d.max()) if g.exact else g.certified_radius - 1
    pool = np.nonzero((d >= 0) & (d <= radius))[0]
    start = int(rng.choice(pool))
    chosen = {start}
    frontier = [start]
    t = g.table
    while len(chosen) < size and frontier:
        v = frontier[int(rng.integers(len(frontier)))]
        nbrs = [int(w) for w in t[v] if w >= 0 and 0 <= d[w] <= radius and int(w) not in chosen]
        if not nbrs:
            frontier.remove(v)
            continue
        w = nbrs[int(rng.integers(len(nbrs)))]
        chosen.add(w)
        frontier.append(w)
    return Subgraph(g, sorted(chosen))
