"""Quotient graphs T_n/N of the free-group tree.

Two constructions are provided:

* :func:`todd_coxeter` enumerates cosets and returns the exact Schreier graph
  when the quotient F_n/N is finite;
* :func:`truncated_quotient` glues relator loops at every vertex near the
  basepoint, folds, and keeps the radius-R ball.  Folding only performs
  identifications that hold in F_n/N, so the window can have too many vertices
  but never too few; more gluing depth can only merge further.

Vertices of a finished graph are numbered in canonical BFS order from the
basepoint 0 (letters tried in column order ``a, A, b, B, ...``), so two
basepointed graphs are label-isomorphic iff their tables are equal.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .words import (
    InvalidInput,
    ReducedWord,
    ball_count,
    check_rank,
    format_word,
    is_cyclically_reduced,
    parse_relators,
    parse_word,
)

log = logging.getLogger(__name__)


class Overflow(RuntimeError):
    """Coset enumeration exceeded its cap; the quotient may be infinite."""


class ResourceCap(RuntimeError):
    pass


class RadiusNotCertified(ValueError):
    pass


@dataclass(frozen=True)
class BuildDiagnostics:
    closed: bool
    coset_count: int
    certified_radius: int
    deepening_level: int
    rounds: int = 0


class SchreierGraph:
    """Basepointed, letter-labelled deterministic graph on vertices ``0..V-1``.

    ``table[v, x]`` is the endpoint of the edge labelled by letter index ``x``
    at ``v`` (``-1`` if unknown).  Exact graphs are complete.  Approximate
    graphs are balls of radius ``window_radius`` whose first
    ``certified_radius`` shells are trusted.
    """

    def __init__(self, rank: int, table: np.ndarray, exact: bool,
                 certified_radius: Optional[int] = None,
                 window_radius: Optional[int] = None,
                 relators: Sequence[ReducedWord] = (),
                 diagnostics: Optional[BuildDiagnostics] = None):
        self.rank = check_rank(rank)
        table = np.ascontiguousarray(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[1] != 2 * self.rank:
            raise InvalidInput(f"table shape {table.shape} does not match rank {rank}")
        table.setflags(write=False)
        self.table = table
        self.exact = bool(exact)
        self.certified_radius = None if exact else int(certified_radius or 0)
        self.window_radius = None if exact else window_radius
        self.relators = tuple(relators)
        self.diagnostics = diagnostics
        self.basepoint = 0

    def __repr__(self) -> str:
        return (f"SchreierGraph(rank={self.rank}, vertices={self.n_vertices}, "
                f"{self.exactness})")

    @property
    def n_vertices(self) -> int:
        return self.table.shape[0]

    @property
    def degree(self) -> int:
        return 2 * self.rank

    @property
    def exactness(self) -> str:
        return "exact" if self.exact else f"approx:{self.certified_radius}"

    @property
    def is_tree_window(self) -> bool:
        return not self.exact and not self.relators

    def trusted_radius(self) -> float:
        return float("inf") if self.exact else self.certified_radius

    def require_radius(self, r: int, what: str = "radius") -> None:
        if r < 0:
            raise InvalidInput(f"{what} must be >= 0")
        if not self.exact and r > self.certified_radius:
            raise RadiusNotCertified(
                f"{what} {r} exceeds certified radius {self.certified_radius}")

    def distances(self) -> np.ndarray:
        return kernels.bfs_distances(self.table, 0)

    def complete_vertices(self) -> np.ndarray:
        return (self.table >= 0).all(axis=1)

    def check_invariants(self) -> None:
        """Full scan for determinism/involution (and completeness when exact)."""
        t = self.table
        V, k = t.shape
        if ((t < -1) | (t >= V)).any():
            raise AssertionError("transition target out of range")
        for x in range(k):
            src = np.nonzero(t[:, x] >= 0)[0]
            back = t[t[src, x], x ^ 1]
            if not np.array_equal(back, src):
                raise AssertionError(f"involution fails for letter index {x}")
        if self.exact and (t < 0).any():
            raise AssertionError("exact graph with undefined transitions")

    def canonical_table(self, radius: Optional[int] = None) -> np.ndarray:
        return canonical_ball_table(self.table, radius)

    def ball(self, r: int):
        from .geometry import Subgraph

        self.require_radius(r)
        d = self.distances()
        return Subgraph(self, np.nonzero((d >= 0) & (d <= r))[0])

    def dump(self) -> str:
        return dump_graph(self)


# -- canonical form ------------------------------------------------------

def canonical_relabel(table: np.ndarray):
    """Renumber vertices in BFS order from vertex 0; drop unreachable ones.

    Returns ``(new_table, order)`` where ``order[i]`` is the old id of new
    vertex ``i``.
    """
    order = kernels.bfs_order(table, 0)
    inv = np.full(table.shape[0] + 1, -1, dtype=np.int64)
    inv[order] = np.arange(order.shape[0])
    sub = table[order]
    new = np.where(sub >= 0, inv[sub], -1)
    return new, order


def canonical_ball_table(table: np.ndarray, radius: Optional[int] = None) -> np.ndarray:
    new, _ = canonical_relabel(table)
    if radius is None:
        return new
    d = kernels.bfs_distances(new, 0)
    m = int(np.count_nonzero((d >= 0) & (d <= radius)))
    sub = new[:m].copy()
    sub[sub >= m] = -1
    return sub


def same_graph(g: SchreierGraph, h: SchreierGraph, radius: Optional[int] = None) -> bool:
    """Basepointed label-preserving isomorphism test (on the radius ball)."""
    if g.rank != h.rank:
        return False
    return np.array_equal(g.canonical_table(radius), h.canonical_table(radius))


# -- folding -------------------------------------------------------------

@dataclass
class PreGraph:
    """Labelled graph that may be nondeterministic; vertex 0 is the basepoint.

    ``edges`` holds ``(u, x, v)`` triples meaning an edge labelled by letter
    index ``x`` from ``u`` to ``v`` (its reverse is implied).
    """

    rank: int
    n_vertices: int
    edges: list = field(default_factory=list)

    def add_path(self, start: int, word: Iterable[int], end: Optional[int] = None) -> int:
        """Add a path reading the letter indices of ``word`` from ``start``.

        The path ends at ``end`` if given (closing a loop), otherwise at a new
        vertex whose id is returned.
        """
        idx = list(word)
        cur = start
        for i, x in enumerate(idx):
            last = i == len(idx) - 1
            if last and end is not None:
                nxt = end
            else:
                nxt = self.n_vertices
                self.n_vertices += 1
            self.edges.append((cur, x, nxt))
            cur = nxt
        return cur

    def edge_arrays(self):
        if not self.edges:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z
        e = np.asarray(self.edges, dtype=np.int64)
        return e[:, 0].copy(), e[:, 1].copy(), e[:, 2].copy()


def fold(pre: PreGraph) -> SchreierGraph:
    """Stallings-fold a pre-graph into a deterministic graph.

    The result is returned in canonical form and keeps only the component of
    the basepoint.  It does not depend on the order of ``pre.edges``.
    """
    k = 2 * check_rank(pre.rank)
    V = max(pre.n_vertices, 1)
    table = np.full((V, k), -1, dtype=np.int64)
    parent = np.arange(V, dtype=np.int64)
    src, lab, dst = pre.edge_arrays()
    if src.size and (lab.min() < 0 or lab.max() >= k):
        raise InvalidInput("edge label outside rank")
    kernels.fold_insert(table, parent, src, lab, dst)
    kernels.resolve_table(table, parent)
    new, _ = canonical_relabel(table)
    complete = bool((new >= 0).all())
    return SchreierGraph(pre.rank, new, exact=complete, certified_radius=0)


def tree_ball_pregraph(n: int, radius: int) -> PreGraph:
    """The radius ball of T_n as a (deterministic) pre-graph."""
    k = 2 * n
    pre = PreGraph(n, 1)
    frontier = [(0, -1)]
    for _ in range(radius):
        nxt = []
        for v, last in frontier:
            for x in range(k):
                if last >= 0 and x == last ^ 1:
                    continue
                w = pre.add_path(v, [x])
                nxt.append((w, x))
        frontier = nxt
    return pre


def tree_ball_table(n: int, radius: int) -> np.ndarray:
    """Canonical transition table of the radius ball of T_n, built level by level."""
    k = 2 * n
    V = ball_count(n, radius)
    table = np.full((V, k), -1, dtype=np.int64)
    letters = np.arange(k, dtype=np.int64)
    parents = np.zeros(1, dtype=np.int64)
    last = np.full(1, -1, dtype=np.int64)
    nxt_id = 1
    for _ in range(radius):
        mask = letters[None, :] != np.where(last >= 0, last ^ 1, -1)[:, None]
        rows, cols = np.nonzero(mask)
        kids = np.arange(nxt_id, nxt_id + rows.size, dtype=np.int64)
        table[parents[rows], cols] = kids
        table[kids, cols ^ 1] = parents[rows]
        nxt_id += rows.size
        parents, last = kids, cols
    return table


def relator_pregraph(n: int, relators: Sequence[ReducedWord], radius: int,
                     glue_depth: int) -> PreGraph:
    """Tree ball of ``radius`` with a relator loop glued at each vertex of depth <= ``glue_depth``."""
    pre = tree_ball_pregraph(n, radius)
    depth = kernels.bfs_distances(_pregraph_table(pre), 0)
    for v in range(pre.n_vertices):
        if 0 <= depth[v] <= glue_depth:
            for r in relators:
                if len(r):
                    pre.add_path(v, r.indices(), end=v)
    return pre


def _pregraph_table(pre: PreGraph) -> np.ndarray:
    table = np.full((pre.n_vertices, 2 * pre.rank), -1, dtype=np.int64)
    for u, x, v in pre.edges:
        table[u, x] = v
        table[v, x ^ 1] = u
    return table


# -- exact enumeration ---------------------------------------------------

def _relator_arrays(relators: Sequence[ReducedWord]):
    flat: list[int] = []
    off = [0]
    for r in relators:
        flat.extend(r.indices())
        off.append(len(flat))
    return np.asarray(flat, dtype=np.int64), np.asarray(off, dtype=np.int64)


def _check_relators(n: int, relators: Sequence[ReducedWord]) -> tuple[ReducedWord, ...]:
    out = []
    for r in relators:
        if isinstance(r, str):
            r = parse_word(r, n)
        if r.rank != n:
            raise InvalidInput(f"relator {r} has rank {r.rank}, expected {n}")
        if not is_cyclically_reduced(r):
            raise InvalidInput(f"relator {r} is not cyclically reduced")
        out.append(r)
    return tuple(out)


def todd_coxeter(n: int, relators: Sequence[ReducedWord], max_cosets: int = 100_000) -> SchreierGraph:
    """Exact Cayley graph of F_n / <<relators>> by coset enumeration.

    Raises :class:`Overflow` if more than ``max_cosets`` live cosets are needed.
    """
    n = check_rank(n)
    rels = _check_relators(n, relators)
    flat, off = _relator_arrays(rels)
    table, parent, defined, status = kernels.hlt_enumerate(2 * n, flat, off, int(max_cosets))
    if status:
        raise Overflow(f"coset enumeration exceeded {max_cosets} live cosets")
    table = table[:defined].copy()
    parent = parent[:defined].copy()
    kernels.resolve_table(table, parent)
    new, _ = canonical_relabel(table)
    diag = BuildDiagnostics(closed=True, coset_count=new.shape[0],
                            certified_radius=int(kernels.bfs_distances(new, 0).max()),
                            deepening_level=0)
    g = SchreierGraph(n, new, exact=True, relators=rels, diagnostics=diag)
    return g


# -- truncated gluing ----------------------------------------------------

def _glue_window(n: int, rels: Sequence[ReducedWord], scan_radius: int,
                 max_vertices: int, max_rounds: int = 10_000):
    """Glue-and-fold until every vertex within ``scan_radius`` is complete and glued.

    Returns ``(table, glued, rounds)`` in canonical numbering.
    """
    k = 2 * n
    rel_idx = [r.indices() for r in rels if len(r)]
    table = np.full((1, k), -1, dtype=np.int64)
    glued = np.zeros(1, dtype=bool)
    for rounds in range(1, max_rounds + 1):
        dist = kernels.bfs_distances(table, 0)
        inside = (dist >= 0) & (dist <= scan_radius)
        need_glue = np.nonzero(inside & ~glued)[0]
        missing_v, missing_x = np.nonzero((table < 0) & inside[:, None])
        if need_glue.size == 0 and missing_v.size == 0:
            return table, glued, rounds
        V = table.shape[0]
        per_vertex = sum(len(w) - 1 for w in rel_idx)
        V_new = V + missing_v.size + need_glue.size * per_vertex
        if V_new > max_vertices * 4 + 1024:
            raise ResourceCap(f"window needs more than {max_vertices} vertices")
        src = np.empty(missing_v.size + need_glue.size * sum(map(len, rel_idx)), dtype=np.int64)
        lab = np.empty_like(src)
        dst = np.empty_like(src)
        # new leaves for missing transitions
        m = missing_v.size
        src[:m] = missing_v
        lab[:m] = missing_x
        dst[:m] = np.arange(V, V + m)
        pos, nxt = m, V + m
        for w in rel_idx:
            L = len(w)
            g = need_glue.size
            if g == 0:
                continue
            # loop vertices: start, nxt.., back to start
            ids = np.empty((g, L + 1), dtype=np.int64)
            ids[:, 0] = need_glue
            ids[:, L] = need_glue
            ids[:, 1:L] = (nxt + np.arange(g * (L - 1)).reshape(g, L - 1))
            nxt += g * (L - 1)
            src[pos:pos + g * L] = ids[:, :L].ravel()
            lab[pos:pos + g * L] = np.tile(np.asarray(w, dtype=np.int64), g)
            dst[pos:pos + g * L] = ids[:, 1:].ravel()
            pos += g * L
        big = np.full((nxt, k), -1, dtype=np.int64)
        big[:V] = table
        parent = np.arange(nxt, dtype=np.int64)
        g_flags = np.zeros(nxt, dtype=bool)
        g_flags[:V] = glued
        g_flags[need_glue] = True
        kernels.fold_insert(big, parent, src[:pos], lab[:pos], dst[:pos])
        kernels.resolve_table(big, parent)
        roots = kernels.all_roots(parent)
        merged = np.zeros(nxt, dtype=bool)
        np.logical_or.at(merged, roots, g_flags)
        table, order = canonical_relabel(big)
        glued = merged[order]
        if table.shape[0] > max_vertices * 4 + 1024:
            raise ResourceCap(f"window needs more than {max_vertices} vertices")
    raise ResourceCap(f"gluing did not settle within {max_rounds} rounds")


def _restrict_ball(table: np.ndarray, radius: int) -> np.ndarray:
    return canonical_ball_table(table, radius)


def truncated_quotient(n: int, relators: Sequence[ReducedWord], R: int, L: int = 2,
                       max_vertices: int = 2_000_000):
    """Radius-``R`` window of T_n / <<relators>>.

    Relator loops are glued at every vertex within distance ``R + L`` of the
    basepoint (distances in the current approximation) and the graph is
    folded, repeating until that region is complete and fully glued.  The same
    is done with ``L + 1``; the certified radius is the largest ``r <= R`` on
    which both windows agree.  If the gluing closes up into a finite complete
    graph on which every relator is glued everywhere, the result is exact.

    Returns ``(graph, diagnostics)``.
    """
    n = check_rank(n)
    if R < 1 or L < 0:
        raise InvalidInput("need R >= 1 and L >= 0")
    rels = _check_relators(n, relators)
    if all(len(r) == 0 for r in rels):
        # nothing to fold: the window is the tree ball itself
        if ball_count(n, R) > max_vertices:
            raise ResourceCap(f"tree ball of radius {R} exceeds {max_vertices} vertices")
        t = tree_ball_table(n, R)
        diag = BuildDiagnostics(False, t.shape[0], R, L, 0)
        return SchreierGraph(n, t, exact=False, certified_radius=R, window_radius=R,
                             relators=rels, diagnostics=diag), diag

    def build(level):
        table, glued, rounds = _glue_window(n, rels, R + level, max_vertices)
        closed = bool(glued.all() and (table >= 0).all())
        return table, closed, rounds

    t1, closed1, rounds = build(L)
    if closed1:
        diag = BuildDiagnostics(True, t1.shape[0], R, L, rounds)
        return SchreierGraph(n, t1, exact=True, relators=rels, diagnostics=diag), diag
    t2, closed2, _ = build(L + 1)
    if closed2:
        # the deeper build closed: it is the exact graph
        diag = BuildDiagnostics(True, t2.shape[0], R, L + 1, rounds)
        return SchreierGraph(n, t2, exact=True, relators=rels, diagnostics=diag), diag
    cert = -1
    for r in range(R + 1):
        if np.array_equal(_restrict_ball(t1, r), _restrict_ball(t2, r)):
            cert = r
        else:
            break
    cert = max(cert, 0)
    ball = _restrict_ball(t1, R)
    if ball.shape[0] > max_vertices:
        raise ResourceCap(f"radius-{R} ball has {ball.shape[0]} vertices")
    diag = BuildDiagnostics(False, ball.shape[0], cert, L, rounds)
    g = SchreierGraph(n, ball, exact=False, certified_radius=cert, window_radius=R,
                      relators=rels, diagnostics=diag)
    return g, diag


def build_graph(n: int, relators: Sequence[ReducedWord], R: int, L: int = 2,
                max_cosets: int = 10_000, max_vertices: int = 2_000_000) -> SchreierGraph:
    """Exact graph if enumeration closes within ``max_cosets``, else a window."""
    try:
        if relators:
            return todd_coxeter(n, relators, max_cosets)
    except Overflow:
        log.info("coset enumeration overflowed at %d; using a radius-%d window", max_cosets, R)
    g, _ = truncated_quotient(n, relators, R, L, max_vertices)
    return g


# -- presets -------------------------------------------------------------

def preset_relators(name: str, n: int, param: Optional[int] = None) -> list[ReducedWord]:
    """Named relator families.

    ``powers k``: every generator to the k-th power; ``commutator``: all
    commutators of generator pairs (free abelian quotient); ``surface g``:
    product of g commutators (needs rank 2g); ``mod2``: kernel of the map
    sending every generator to 1 in Z/2; ``klein``: aa, bb, abAB;
    ``free``: no relators; ``rose``: every generator.
    """
    n = check_rank(n)
    gens = range(1, n + 1)

    def w(codes):
        return ReducedWord(tuple(codes), n)

    if name == "powers":
        if param is None or param < 1:
            raise InvalidInput("preset 'powers' needs k >= 1")
        return [w([g] * param) for g in gens]
    if name == "commutator":
        return [w([i, j, -i, -j]) for i in gens for j in gens if i < j]
    if name == "surface":
        genus = param if param is not None else n // 2
        if n != 2 * genus:
            raise InvalidInput(f"surface preset of genus {genus} needs rank {2 * genus}")
        codes = []
        for i in range(genus):
            a, b = 2 * i + 1, 2 * i + 2
            codes += [a, b, -a, -b]
        return [w(codes)]
    if name == "mod2":
        return [w([g, g]) for g in gens] + [w([1, g]) for g in gens if g > 1]
    if name == "klein":
        if n != 2:
            raise InvalidInput("preset 'klein' is rank 2")
        return [w([1, 1]), w([2, 2]), w([1, 2, -1, -2])]
    if name == "free":
        return []
    if name == "rose":
        return [w([g]) for g in gens]
    raise InvalidInput(f"unknown preset {name!r}")


# -- text dump -----------------------------------------------------------

def dump_graph(g: SchreierGraph) -> str:
    out = io.StringIO()
    flag = "exact" if g.exact else f"approx:{g.certified_radius}"
    out.write(f"rank {g.rank} vertices {g.n_vertices} basepoint 0 {flag}\n")
    if g.relators:
        out.write("# relators " + " ".join(format_word(r.letters, g.rank) for r in g.relators) + "\n")
    if not g.exact and g.window_radius is not None:
        out.write(f"# window {g.window_radius}\n")
    for v in range(g.n_vertices):
        row = " ".join("-" if t < 0 else str(int(t)) for t in g.table[v])
        out.write(f"{v} {row}\n")
    return out.getvalue()


def load_graph(text: str) -> SchreierGraph:
    header = None
    relators: list[ReducedWord] = []
    window = None
    rows: dict[int, list[int]] = {}
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            parts = s[1:].split()
            if parts and parts[0] == "relators" and header:
                relators = parse_relators(" ".join(parts[1:]), header[0])
            elif parts and parts[0] == "window":
                window = int(parts[1])
            continue
        if header is None:
            t = s.split()
            if len(t) != 7 or t[0] != "rank" or t[2] != "vertices" or t[4] != "basepoint":
                raise InvalidInput(f"bad graph header: {s!r}")
            if t[5] != "0":
                raise InvalidInput("basepoint must be 0")
            header = (int(t[1]), int(t[3]), t[6])
            continue
        t = s.split()
        if len(t) != 1 + 2 * header[0]:
            raise InvalidInput(f"bad vertex line: {s!r}")
        rows[int(t[0])] = [-1 if x == "-" else int(x) for x in t[1:]]
    if header is None:
        raise InvalidInput("empty graph file")
    n, V, flag = header
    if sorted(rows) != list(range(V)):
        raise InvalidInput("vertex lines do not cover 0..V-1")
    table = np.array([rows[v] for v in range(V)], dtype=np.int64).reshape(V, 2 * n)
    if flag == "exact":
        g = SchreierGraph(n, table, exact=True, relators=relators)
    elif flag.startswith("approx:"):
        g = SchreierGraph(n, table, exact=False, certified_radius=int(flag[7:]),
                          window_radius=window, relators=relators)
    else:
        raise InvalidInput(f"bad exactness flag {flag!r}")
    g.check_invariants()
    return g
