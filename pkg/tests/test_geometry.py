import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freequot import geometry as geo
from freequot.planar import is_planar
from freequot.schreier import RadiusNotCertified, todd_coxeter
from freequot.words import parse_relators
from oracles import simple_girth


def _random_cores(g, count, seed, max_size=60):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        s = geo.random_connected_subset(g, int(rng.integers(2, max_size)), rng)
        c = geo.core(s, rng=rng)
        if c:
            out.append((s, c))
    return out


@pytest.mark.parametrize("name", ["grid", "klein", "mod2"])
def test_euler_boundary_identity(name, request):
    g = request.getfixturevalue(name)
    for s, c in _random_cores(g, 40, 1):
        assert geo.euler_boundary_check(c, g.rank)
        assert c.chi == s.chi  # stripping leaves keeps chi
        assert c.chi <= 0


@pytest.mark.parametrize("k", [4, 6, 8])
def test_euler_identity_powers(powers, k):
    for _, c in _random_cores(powers[k], 30, k):
        assert geo.euler_boundary_check(c, 2)
        if is_planar(c.to_multigraph()).planar:
            assert geo.planar_core_size_check(c)


def test_core_independent_of_order(grid):
    rng = np.random.default_rng(5)
    s = geo.random_connected_subset(grid, 40, rng)
    ref = geo.core(s)
    for seed in range(10):
        c = geo.core(s, rng=np.random.default_rng(seed))
        assert (c.vertices if c else ()) == (ref.vertices if ref else ())


def test_tree_core_is_trivial(tree5):
    s = geo.random_connected_subset(tree5, 50, np.random.default_rng(0))
    assert geo.core(s) is geo.TrivialCore
    assert not geo.core(s)


def test_disconnected_rejected(grid):
    d = grid.distances()
    far = [int(v) for v in np.nonzero(d == 3)[0][:2]]
    with pytest.raises(geo.DisconnectedInput):
        geo.core(geo.Subgraph(grid, [0] + far))


def test_boundary_needs_trusted_radius(grid):
    d = grid.distances()
    outer = np.nonzero(d == grid.certified_radius)[0][:1]
    with pytest.raises(RadiusNotCertified):
        geo.boundary_count(geo.Subgraph(grid, outer))


def test_core_girth_matches_oracle(grid, powers):
    for g in (grid, powers[6]):
        for _, c in _random_cores(g, 15, 3):
            m = c.to_multigraph()
            assert c.ell2 == simple_girth(m.n_vertices, list(m.edges))


@pytest.mark.parametrize("k", [4, 6, 8])
def test_injectivity_radius_powers(powers, k):
    ir = geo.injectivity_radius(powers[k])
    assert ir.determined and ir.value == Fraction(k, 2)


def test_injectivity_radius_other(grid, tree5, klein):
    assert geo.injectivity_radius(grid).value == 2
    assert geo.injectivity_radius(tree5).value == math.inf
    m = klein.ball(3).to_multigraph()
    assert geo.injectivity_radius(klein).ell2 == simple_girth(m.n_vertices, list(m.edges))


def test_ball_ratio_grid(grid):
    # the radius-r diamond in Z^2 has 8r + 4 boundary edges
    d = grid.distances()
    for r in range(1, grid.certified_radius):
        s = geo.Subgraph(grid, np.nonzero((d >= 0) & (d <= r))[0])
        size = 2 * r * r + 2 * r + 1
        assert geo.ratio(s, 2) == Fraction(8 * r + 4, 4 * size)


def test_planar_lower_formula_values():
    assert [geo.planar_lower_formula(2, Fraction(k, 2)) for k in (4, 6, 8, 10)] == \
        [0, Fraction(1, 4), Fraction(1, 3), Fraction(3, 8)]
    assert geo.planar_lower_formula(3, math.inf) == Fraction(2, 3)


@pytest.mark.parametrize("k", [6, 8])
def test_iso_bracket(powers, k):
    g = powers[k]
    up = geo.isoperimetric_upper(g, geo.default_candidates(g))
    lo = geo.isoperimetric_lower_planar(g, geo.injectivity_radius(g).value)
    assert not lo.vacuous
    assert lo.value <= up.value


def test_iso_lower_vacuous(grid):
    lo = geo.isoperimetric_lower_planar(grid, geo.injectivity_radius(grid).value)
    assert lo.vacuous and lo.value == 0


def test_exact_graph_iso_upper_zero(klein):
    assert geo.isoperimetric_upper(klein).value == 0


@given(st.fractions(0, Fraction(99, 100)))
def test_chain_helpers(i):
    gl = geo.mohar_growth_lower(i)
    assert gl >= 1
    lam = geo.cheeger_lambda0_lower(i)
    assert lam == pytest.approx(1 - math.sqrt(1 - float(i) ** 2), abs=1e-12)
    assert 0 <= lam <= float(i)


def test_chain_helper_domain():
    with pytest.raises(ValueError):
        geo.mohar_growth_lower(1)
    with pytest.raises(ValueError):
        geo.cheeger_lambda0_lower(-0.1)


def test_s3_cores():
    g = todd_coxeter(2, parse_relators("aa bb ababab", 2))
    for _, c in _random_cores(g, 20, 9, max_size=6):
        assert geo.euler_boundary_check(c, 2)
