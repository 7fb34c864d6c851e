import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freequot.counting import (
    EXACT_LOOP_RADIUS,
    ball_counts,
    delta_estimate,
    growth_estimate,
    loop_counts,
    poincare_partial,
)
from freequot.schreier import RadiusNotCertified, todd_coxeter, truncated_quotient
from freequot.words import ball_count, parse_relators
from oracles import abelian_kernel_counts, lattice_ball, powers_kernel_counts


def test_grid_loops_match_brute_force(grid):
    assert list(loop_counts(grid, 8).counts) == abelian_kernel_counts(2, 8)


@pytest.mark.parametrize("k", [4, 6])
def test_powers_loops_match_brute_force(powers, k):
    assert list(loop_counts(powers[k], 8).counts) == powers_kernel_counts(2, k, 8)


def test_grid_balls(grid):
    b = ball_counts(grid, grid.certified_radius)
    assert list(b.counts) == [lattice_ball(r) for r in range(grid.certified_radius + 1)]


def test_tree_counts(tree5):
    assert list(ball_counts(tree5, 5).counts) == [ball_count(2, r) for r in range(6)]
    assert set(loop_counts(tree5, 10).counts) == {1}
    assert delta_estimate(loop_counts(tree5, 10), 2).point is None


def test_mod2_loops_are_even_words(mod2):
    # the kernel of F_2 -> Z/2 (all generators to 1) is the even-length words
    l = loop_counts(mod2, 12)
    for r in range(13):
        assert l.counts[r] == 1 + sum(4 * 3 ** (L - 1) for L in range(2, r + 1, 2))
    # (1/r) log N(r) approaches log 3 from above along even r
    est = delta_estimate(l, 2)
    assert abs(est.at(12) - math.log(3)) < abs(est.at(6) - math.log(3)) < 0.1


def test_large_radius_stays_exact(mod2):
    l = loop_counts(mod2, EXACT_LOOP_RADIUS)
    assert isinstance(l.counts[-1], int)
    assert l.counts[-1] == 1 + sum(4 * 3 ** (L - 1) for L in range(2, EXACT_LOOP_RADIUS + 1, 2))
    far = loop_counts(mod2, EXACT_LOOP_RADIUS + 4)
    assert isinstance(far.counts[-1], float)


def test_loop_radius_must_be_certified(grid):
    with pytest.raises(RadiusNotCertified):
        loop_counts(grid, 2 * grid.certified_radius + 2)


@given(st.integers(0, 10))
def test_loop_counts_monotone_and_bounded(r):
    g = todd_coxeter(2, parse_relators("aa bb ababab", 2))
    l = loop_counts(g, r)
    assert all(a <= b for a, b in zip(l.counts, l.counts[1:]))
    assert all(c <= ball_count(2, i) for i, c in enumerate(l.counts))
    # odd spheres vanish: every relator has even length
    assert all(l.sphere(i) == 0 for i in range(1, r + 1, 2))


def test_growth_and_delta_sequences(grid):
    b = ball_counts(grid, 4)
    roots = growth_estimate(b)
    assert roots.radii == (1, 2, 3, 4)
    assert roots.at(2) == pytest.approx(math.sqrt(13))
    est = delta_estimate(loop_counts(grid, 8), 2)
    assert est.radii[0] == 4
    assert est.at(6) == pytest.approx(math.log(49) / 6)
    assert 0 < est.eta < 1


def test_poincare_partial(grid):
    l = loop_counts(grid, 8)
    assert poincare_partial(l, 1.0) == pytest.approx(1 + 8 * math.exp(-4) + 40 * math.exp(-6) + 312 * math.exp(-8))
    with pytest.raises(ValueError):
        poincare_partial(l, 0)
