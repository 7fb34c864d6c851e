"""Random-walk operator, spectral-radius bounds and the cogrowth conversions.

Conventions: ``P f(x) = (1/2n) * sum of f over the 2n edge endpoints at x``
(a loop contributes twice), ``lambda0 = 1 - rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .schreier import RadiusNotCertified, SchreierGraph
from .words import check_rank


class SupportViolation(ValueError):
    """A test function reaches vertices whose neighbourhood is not certified."""


class RangeError(ValueError):
    """Argument outside the range where a conversion formula is derived."""


_EPS = 1e-12


@dataclass(frozen=True)
class SpectralEstimate:
    rho_lower: float
    rho_upper: float
    method_tags: tuple = ()
    converged: bool = True
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (0.0 <= self.rho_lower <= self.rho_upper + _EPS and self.rho_upper <= 1.0 + _EPS):
            raise ValueError(f"inconsistent spectral bracket [{self.rho_lower}, {self.rho_upper}]")

    @property
    def lambda0_lower(self) -> float:
        return 1.0 - self.rho_upper

    @property
    def lambda0_upper(self) -> float:
        return 1.0 - self.rho_lower

    def as_dict(self) -> dict:
        return {
            "rho_lower": self.rho_lower,
            "rho_upper": self.rho_upper,
            "lambda0_lower": self.lambda0_lower,
            "lambda0_upper": self.lambda0_upper,
            "method_tags": list(self.method_tags),
            "converged": self.converged,
        }


def _support_radius_ok(g: SchreierGraph, f: np.ndarray) -> None:
    if g.exact:
        return
    d = g.distances()
    far = (d < 0) | (d > g.certified_radius - 1)
    if np.any(f[far] != 0):
        raise SupportViolation(
            f"function must vanish outside the radius-{g.certified_radius - 1} ball")


def _as_function(g: SchreierGraph, f) -> np.ndarray:
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (g.n_vertices,):
        raise ValueError(f"function has shape {f.shape}, expected ({g.n_vertices},)")
    return f


def apply_srw(g: SchreierGraph, f) -> np.ndarray:
    f = _as_function(g, f)
    _support_radius_ok(g, f)
    out = np.empty_like(f)
    kernels.srw_apply(g.table, f, out)
    return out


def apply_laplacian(g: SchreierGraph, f) -> np.ndarray:
    f = _as_function(g, f)
    return f - apply_srw(g, f)


def rayleigh_quotient(g: SchreierGraph, f) -> float:
    """(1/2n) sum over edges |f(x) - f(y)|^2 / sum f^2; an upper bound for lambda0."""
    f = _as_function(g, f)
    norm = float(np.dot(f, f))
    if norm == 0.0:
        raise ValueError("zero function")
    _support_radius_ok(g, f)
    t = g.table
    energy = 0.0
    for x in range(0, t.shape[1], 2):
        src = np.nonzero(t[:, x] >= 0)[0]
        diff = f[src] - f[t[src, x]]
        energy += float(np.dot(diff, diff))
    return energy / (2 * g.rank) / norm


def dirichlet_table(g: SchreierGraph, radius=None) -> np.ndarray:
    """Transition table of the ball, with edges leaving it removed."""
    if g.exact and radius is None:
        return g.table
    if radius is None:
        radius = g.certified_radius
    if not g.exact and radius > g.certified_radius:
        raise RadiusNotCertified(f"radius {radius} exceeds certified radius {g.certified_radius}")
    d = g.distances()
    keep = np.nonzero((d >= 0) & (d <= radius))[0]
    remap = np.full(g.n_vertices + 1, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    sub = g.table[keep]
    return np.where(sub >= 0, remap[sub], -1)


def power_iteration_rho(g: SchreierGraph, iters: int = 100_000, tol: float = 1e-10,
                        radius=None) -> SpectralEstimate:
    """Spectral-radius bracket from power iteration.

    Exact (finite) graphs are iterated whole.  Approximate graphs are cut to
    the certified ball (or ``radius``) with Dirichlet boundary, which gives a
    lower bound for the spectral radius of the full graph.
    """
    table = dirichlet_table(g, radius)
    est, steps, converged = kernels.dirichlet_power(table, int(iters), float(tol))
    est = min(float(est), 1.0)
    tag = "power-iteration" if (g.exact and radius is None) else "dirichlet-ball"
    return SpectralEstimate(est, 1.0, (tag,), bool(converged),
                            {"iterations": int(steps), "ball_vertices": int(table.shape[0])})


def return_probabilities(g: SchreierGraph, steps: int) -> np.ndarray:
    g.require_radius((steps + 1) // 2, "half walk length")
    table = dirichlet_table(g, None if g.exact else g.certified_radius)
    return kernels.return_probabilities(table, 0, int(steps))


def return_probability_rho_lower(g: SchreierGraph, m_max: int) -> float:
    """max over m <= m_max of p_{2m}(o, o)^(1/2m)."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    g.require_radius(m_max, "m_max")
    p = return_probabilities(g, 2 * m_max)
    best = 0.0
    for m in range(1, m_max + 1):
        if p[2 * m] > 0:
            best = max(best, float(p[2 * m]) ** (1.0 / (2 * m)))
    return min(best, 1.0)


def rayleigh_rho_lower(g: SchreierGraph, radius=None) -> SpectralEstimate:
    """rho lower bound from Rayleigh quotients of ball-supported test functions.

    Candidates: indicators of balls and the Dirichlet ground state of the
    largest admissible ball.  ``rho >= 1 - min quotient``.
    """
    r_max = (g.certified_radius - 1) if not g.exact else int(g.distances().max())
    if radius is not None:
        r_max = min(r_max, radius)
    if r_max < 0:
        raise RadiusNotCertified("no ball fits inside the certified radius")
    d = g.distances()
    best = math.inf
    for r in range(r_max + 1):
        best = min(best, rayleigh_quotient(g, (d <= r) & (d >= 0)))
    table = dirichlet_table(g, r_max) if not g.exact else g.table
    f = _ground_state(table)
    full = np.zeros(g.n_vertices)
    full[np.nonzero((d >= 0) & (d <= r_max))[0] if not g.exact else slice(None)] = f
    best = min(best, rayleigh_quotient(g, full))
    return SpectralEstimate(max(0.0, 1.0 - best), 1.0, ("rayleigh",), True)


def _ground_state(table: np.ndarray, iters: int = 5000) -> np.ndarray:
    # lazy walk keeps the iteration in the positive cone and aperiodic
    V = table.shape[0]
    f = np.ones(V) / math.sqrt(V)
    g = np.empty(V)
    for _ in range(iters):
        kernels.srw_apply(table, f, g)
        g = 0.5 * (f + g)
        g /= np.linalg.norm(g)
        if np.max(np.abs(g - f)) < 1e-12:
            return g
        f, g = g, f
    return f


# -- conversions ---------------------------------------------------------

def delta_range(n: int) -> tuple[float, float]:
    n = check_rank(n)
    top = math.log(2 * n - 1)
    return 0.5 * top, top


def _check_delta(n: int, delta: float) -> None:
    lo, hi = delta_range(n)
    if not (lo - _EPS <= delta <= hi + _EPS):
        raise RangeError(f"delta={delta} outside [{lo}, {hi}] for rank {n}")


def rho_from_delta(n: int, delta: float) -> float:
    """Spectral radius of F_n/N from the Poincare exponent of N."""
    _check_delta(n, delta)
    s = math.sqrt(2 * n - 1)
    e = math.exp(delta)
    return s / (2 * n) * (s / e + e / s)


def lambda0_from_delta(n: int, delta: float) -> float:
    _check_delta(n, delta)
    # written as a gap below the tree value so the double root at
    # e^delta = sqrt(2n-1) is hit without cancellation
    x = math.exp(delta)
    s = math.sqrt(2 * n - 1)
    return lambda0_max(n) - (x - s) ** 2 / (2 * n * x)


def lambda0_max(n: int) -> float:
    """Bottom of the spectrum of T_n: 1 - sqrt(2n-1)/n."""
    n = check_rank(n)
    return 1 - math.sqrt(2 * n - 1) / n


def delta_from_lambda0(n: int, lambda0: float) -> float:
    """Inverse of :func:`lambda0_from_delta` on the branch e^delta >= sqrt(2n-1)."""
    n = check_rank(n)
    top = lambda0_max(n)
    if not (-_EPS <= lambda0 <= top + _EPS):
        raise RangeError(f"lambda0={lambda0} outside [0, {top}] for rank {n}")
    gap = max(top - lambda0, 0.0)
    s = math.sqrt(2 * n - 1)
    # x + q/x = 2c with c = s + n*gap; c^2 - q factored to avoid cancellation
    c = s + n * gap
    disc = n * gap * (2 * s + n * gap)
    return math.log(c + math.sqrt(disc))


def spectral_delta_bracket(n: int, est: SpectralEstimate) -> tuple[float, float]:
    """delta bracket implied by a rho bracket (decreasing correspondence in lambda0)."""
    lam_lo = max(0.0, est.lambda0_lower)
    lam_hi = min(lambda0_max(n), est.lambda0_upper)
    return delta_from_lambda0(n, lam_hi), delta_from_lambda0(n, lam_lo)
