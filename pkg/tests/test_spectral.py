import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freequot import spectral as sp
from freequot.schreier import todd_coxeter, truncated_quotient
from freequot.words import parse_relators, reduce


@pytest.mark.parametrize("n", [2, 3, 4])
def test_round_trip_grid(n):
    lo, hi = sp.delta_range(n)
    for d in np.linspace(lo, hi, 100):
        lam = sp.lambda0_from_delta(n, d)
        assert abs(sp.delta_from_lambda0(n, lam) - d) < 1e-12
        assert abs(1 - sp.rho_from_delta(n, d) - lam) < 1e-14


@given(st.integers(2, 6), st.floats(0, 1))
def test_round_trip_property(n, t):
    lo, hi = sp.delta_range(n)
    d = lo + t * (hi - lo)
    assert sp.delta_from_lambda0(n, sp.lambda0_from_delta(n, d)) == pytest.approx(d, abs=1e-9)


@given(st.integers(2, 6), st.floats(0, 1), st.floats(0, 1))
def test_conversion_monotone(n, s, t):
    top = sp.lambda0_max(n)
    a, b = sorted((s * top, t * top))
    assert sp.delta_from_lambda0(n, a) >= sp.delta_from_lambda0(n, b) - 1e-12


def test_endpoints():
    assert sp.lambda0_from_delta(2, 0.5 * math.log(3)) == pytest.approx(1 - math.sqrt(3) / 2, abs=1e-12)
    assert sp.lambda0_from_delta(3, math.log(5)) == pytest.approx(0.0, abs=1e-15)
    assert sp.rho_from_delta(2, math.log(3)) == pytest.approx(1.0)
    assert sp.delta_from_lambda0(2, 0.0) == pytest.approx(math.log(3), abs=1e-12)


def test_range_errors():
    with pytest.raises(sp.RangeError):
        sp.lambda0_from_delta(2, 0.1)
    with pytest.raises(sp.RangeError):
        sp.delta_from_lambda0(2, 0.5)


@pytest.mark.parametrize("rels", ["aa bb abAB", "aa bb ababab"])
def test_finite_quotient_rho_one(rels):
    g = todd_coxeter(2, parse_relators(rels, 2))
    est = sp.power_iteration_rho(g)
    assert abs(est.rho_lower - 1.0) < 1e-9
    assert sp.rayleigh_quotient(g, np.ones(g.n_vertices)) == pytest.approx(0.0)
    assert np.allclose(sp.apply_laplacian(g, np.ones(g.n_vertices)), 0.0)


def test_mod2_rho(mod2):
    assert abs(sp.power_iteration_rho(mod2).rho_lower - 1.0) < 1e-9


def test_tree_dirichlet_bracket():
    prev = 0.0
    for R in range(1, 9):
        g, _ = truncated_quotient(2, [], R, 0)
        v = sp.power_iteration_rho(g).rho_lower
        assert prev - 1e-12 <= v <= math.sqrt(3) / 2 + 1e-9
        prev = v


def _free_closed_walks(length, n=2):
    letters = [1, -1, 2, -2][: 2 * n]
    return sum(1 for w in itertools.product(letters, repeat=length) if len(reduce(w, n)) == 0)


def test_return_probabilities_match_word_count(tree5):
    p = sp.return_probabilities(tree5, 8)
    for m in range(0, 9, 2):
        assert p[m] == pytest.approx(_free_closed_walks(m) / 4 ** m, abs=1e-15)
    assert p[1] == p[3] == 0
    lo = sp.return_probability_rho_lower(tree5, 4)
    assert lo == pytest.approx(max((_free_closed_walks(2 * m) / 4 ** (2 * m)) ** (1 / (2 * m)) for m in range(1, 5)))
    assert lo <= math.sqrt(3) / 2


def test_rayleigh_lower_on_tree(tree5):
    est = sp.rayleigh_rho_lower(tree5)
    assert 0 < est.rho_lower <= math.sqrt(3) / 2 + 1e-9


def test_support_violation(grid):
    f = np.zeros(grid.n_vertices)
    far = int(np.argmax(grid.distances()))
    f[far] = 1.0
    with pytest.raises(sp.SupportViolation):
        sp.apply_srw(grid, f)


def test_spectral_estimate_validation():
    with pytest.raises(ValueError):
        sp.SpectralEstimate(0.9, 0.5)
    e = sp.SpectralEstimate(0.5, 1.0)
    assert e.lambda0_upper == 0.5 and e.lambda0_lower == 0.0


def test_delta_bracket_from_rho_one(klein):
    lo, hi = sp.spectral_delta_bracket(2, sp.power_iteration_rho(klein))
    assert lo == pytest.approx(math.log(3), abs=1e-6) and hi == pytest.approx(math.log(3), abs=1e-6)
