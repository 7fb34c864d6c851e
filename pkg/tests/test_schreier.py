import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freequot.schreier import (
    Overflow,
    PreGraph,
    RadiusNotCertified,
    ResourceCap,
    build_graph,
    canonical_ball_table,
    fold,
    load_graph,
    preset_relators,
    relator_pregraph,
    same_graph,
    todd_coxeter,
    tree_ball_pregraph,
    truncated_quotient,
)
from freequot.words import InvalidInput, ball_count, parse_relators
from oracles import lattice_ball, perm_group_order, perm_word, powers_ball_counts

# (relators, permutation model of the group, expected order)
FINITE = [
    ("aa bb abAB", [(1, 0, 3, 2), (2, 3, 0, 1)], 4),
    ("aa bb ababab", [(1, 0, 2), (0, 2, 1)], 6),
    ("aa bbb ababab", [(1, 0, 3, 2), (0, 2, 3, 1)], 12),
    ("aa bb ababababab", [(0, 4, 3, 2, 1), (1, 0, 4, 3, 2)], 10),
]


@pytest.mark.parametrize("rels,perms,order", FINITE)
def test_todd_coxeter_matches_permutation_model(rels, perms, order):
    words = parse_relators(rels, 2)
    for r in words:
        assert perm_word(perms, r.letters) == tuple(range(len(perms[0])))
    assert perm_group_order(perms) == order
    g = todd_coxeter(2, words)
    assert g.exact and g.n_vertices == order
    g.check_invariants()
    assert (g.table >= 0).all()


def test_presets_close():
    assert todd_coxeter(2, preset_relators("klein", 2)).n_vertices == 4
    assert todd_coxeter(2, preset_relators("mod2", 2)).n_vertices == 2
    assert todd_coxeter(3, preset_relators("mod2", 3)).n_vertices == 2
    assert todd_coxeter(2, preset_relators("rose", 2)).n_vertices == 1


def test_overflow_on_infinite_quotient():
    with pytest.raises(Overflow):
        todd_coxeter(2, parse_relators("abAB", 2), max_cosets=500)


def test_truncation_finds_finite_quotient(klein):
    g, diag = truncated_quotient(2, preset_relators("klein", 2), 3, 1)
    assert g.exact and diag.closed
    assert same_graph(g, klein)


def test_tree_window_counts(tree5):
    d = tree5.distances()
    for r in range(6):
        assert int(np.count_nonzero(d <= r)) == ball_count(2, r)
    assert tree5.is_tree_window


def test_grid_window_is_lattice(grid):
    d = grid.distances()
    for r in range(grid.certified_radius + 1):
        assert int(np.count_nonzero((d >= 0) & (d <= r))) == lattice_ball(r)


@pytest.mark.parametrize("k", [4, 6, 8])
def test_powers_window_matches_free_product(powers, k):
    g = powers[k]
    d = g.distances()
    expect = powers_ball_counts(2, k, g.certified_radius)
    got = [int(np.count_nonzero((d >= 0) & (d <= r))) for r in range(g.certified_radius + 1)]
    assert got == expect


def test_certified_radius_is_stable():
    rels = parse_relators("abAB", 2)
    g1, _ = truncated_quotient(2, rels, 4, 2)
    g2, _ = truncated_quotient(2, rels, 7, 3)
    assert g1.certified_radius >= 3
    assert same_graph(g1, g2, radius=g1.certified_radius)


def test_require_radius(grid):
    with pytest.raises(RadiusNotCertified):
        grid.require_radius(grid.certified_radius + 1)


def test_resource_cap():
    with pytest.raises(ResourceCap):
        truncated_quotient(3, [], 6, 0, max_vertices=1000)


def test_invalid_window_arguments():
    with pytest.raises(InvalidInput):
        truncated_quotient(2, [], 0, 1)


def _shuffled(pre, rng):
    edges = list(pre.edges)
    rng.shuffle(edges)
    out = PreGraph(pre.rank, pre.n_vertices, edges)
    return out


def test_fold_confluence_200_orders():
    pre = relator_pregraph(2, parse_relators("abAB aab", 2), 3, 2)
    ref = fold(pre).table
    rng = np.random.default_rng(7)
    for _ in range(200):
        assert np.array_equal(fold(_shuffled(pre, rng)).table, ref)


@given(st.lists(st.tuples(st.integers(0, 7), st.integers(0, 3), st.integers(0, 7)), max_size=30),
       st.randoms(use_true_random=False))
def test_fold_order_independent_and_deterministic(edges, rnd):
    pre = PreGraph(2, 8, list(edges))
    g = fold(pre)
    g.check_invariants()
    shuffled = list(edges)
    rnd.shuffle(shuffled)
    assert np.array_equal(fold(PreGraph(2, 8, shuffled)).table, g.table)
    again = [(v, x, int(g.table[v, x])) for v in range(g.n_vertices) for x in range(4) if g.table[v, x] >= 0]
    assert np.array_equal(fold(PreGraph(2, g.n_vertices, again)).table, g.table)


def test_fold_of_tree_ball_is_itself():
    pre = tree_ball_pregraph(2, 3)
    g = fold(pre)
    assert g.n_vertices == ball_count(2, 3)
    assert not g.exact


def test_canonical_ball_is_relabel_invariant(grid):
    t = grid.table
    rng = np.random.default_rng(0)
    perm = np.concatenate([[0], 1 + rng.permutation(t.shape[0] - 1)])
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    moved = np.full_like(t, -1)
    moved[perm] = np.where(t >= 0, perm[np.maximum(t, 0)], -1)
    assert np.array_equal(canonical_ball_table(moved, 3), canonical_ball_table(t, 3))


@pytest.mark.parametrize("name", ["grid", "klein", "tree5"])
def test_dump_round_trip(name, request):
    g = request.getfixturevalue(name)
    h = load_graph(g.dump())
    assert np.array_equal(h.table, g.table)
    assert h.exactness == g.exactness
    assert h.certified_radius == g.certified_radius
    assert [r.letters for r in h.relators] == [r.letters for r in g.relators]


def test_build_graph_dispatch():
    assert build_graph(2, preset_relators("klein", 2), 3).exact
    g = build_graph(2, parse_relators("abAB", 2), 3, max_cosets=200)
    assert not g.exact and g.certified_radius >= 2


_RELS = ["abAB", "aaaa", "bbb", "abab", "aabb", "aBaB", "abaB"]


@given(st.lists(st.sampled_from(_RELS), min_size=1, max_size=2, unique=True))
def test_deepening_only_merges(rels):
    from freequot.counting import loop_counts

    words = parse_relators(" ".join(rels), 2)
    R = 3
    graphs = []
    for L in (0, 1, 2):
        try:
            g, _ = truncated_quotient(2, words, R, L, max_vertices=200_000)
        except ResourceCap:
            return
        graphs.append(g)
    sizes = [int(np.count_nonzero((g.distances() >= 0) & (g.distances() <= R))) for g in graphs]
    assert all(a >= b for a, b in zip(sizes, sizes[1:]))
    certs = [g.certified_radius for g in graphs if not g.exact]
    r = 2 * min(certs) if certs else 6
    loops = [loop_counts(g, r).counts for g in graphs]
    for a, b in zip(loops, loops[1:]):
        assert all(x <= y for x, y in zip(a, b))
