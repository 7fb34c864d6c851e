"""Experiments: measurements, the bound ledger, sweeps over the power family,
growth/cogrowth margins and report output.

Every ledger entry keeps the chain of steps that produced it.  Verdicts are
``satisfied``, ``inconclusive`` or ``skipped``; ``violated`` is only ever
produced from certified bounds on both sides, and the ledger refuses to be
built at all if some lower bound exceeds its upper bound.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import counting, geometry, planar, spectral
from .schreier import SchreierGraph, preset_relators, truncated_quotient, todd_coxeter, Overflow
from .words import format_word

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
QUANTITIES = ("delta", "rho", "lambda0", "iso", "growth")
_SLACK = 1e-12


class LedgerInconsistent(AssertionError):
    """A lower bound exceeds the matching upper bound."""


@dataclass
class Step:
    operation: str
    statement: str
    inputs: dict = field(default_factory=dict)


@dataclass
class Bound:
    lower: Optional[float] = None
    upper: Optional[float] = None
    lower_chain: list = field(default_factory=list)
    upper_chain: list = field(default_factory=list)
    lower_exact: Optional[str] = None
    upper_exact: Optional[str] = None

    def set_lower(self, value, chain):
        self.lower = float(value)
        self.lower_exact = str(value) if isinstance(value, Fraction) else None
        self.lower_chain = list(chain)

    def set_upper(self, value, chain):
        self.upper = float(value)
        self.upper_exact = str(value) if isinstance(value, Fraction) else None
        self.upper_chain = list(chain)

    def exact_lower(self):
        return Fraction(self.lower_exact) if self.lower_exact else self.lower

    def exact_upper(self):
        return Fraction(self.upper_exact) if self.upper_exact else self.upper


@dataclass
class BoundLedger:
    rank: int
    nontrivial: bool
    entries: dict = field(default_factory=lambda: {q: Bound() for q in QUANTITIES})

    def __getitem__(self, q: str) -> Bound:
        return self.entries[q]

    def check(self) -> None:
        for q, b in self.entries.items():
            if b.lower is not None and b.upper is not None and b.lower > b.upper + _SLACK:
                raise LedgerInconsistent(f"{q}: lower {b.lower} > upper {b.upper}")
        rho, lam = self.entries["rho"], self.entries["lambda0"]
        for a, b in ((rho.lower, lam.upper), (rho.upper, lam.lower)):
            if a is not None and b is not None and abs(1 - a - b) > 1e-12:
                raise LedgerInconsistent("lambda0 bounds disagree with 1 - rho bounds")

    def to_dict(self) -> dict:
        return {"rank": self.rank, "nontrivial": self.nontrivial,
                "entries": {q: _bound_dict(b) for q, b in self.entries.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundLedger":
        entries = {}
        for q, b in d["entries"].items():
            entries[q] = Bound(b["lower"], b["upper"],
                               [Step(**s) for s in b["lower_chain"]],
                               [Step(**s) for s in b["upper_chain"]],
                               b.get("lower_exact"), b.get("upper_exact"))
        return cls(d["rank"], d["nontrivial"], entries)


def _bound_dict(b: Bound) -> dict:
    return {"lower": b.lower, "upper": b.upper,
            "lower_exact": b.lower_exact, "upper_exact": b.upper_exact,
            "lower_chain": [asdict(s) for s in b.lower_chain],
            "upper_chain": [asdict(s) for s in b.upper_chain]}


# -- measurements --------------------------------------------------------

@dataclass
class Measurements:
    radius: int
    balls: counting.BallCounts
    loops: counting.LoopCounts
    ell: geometry.InjectivityRadius
    planarity: Optional[planar.PlanarityVerdict]
    spectral: Optional[spectral.SpectralEstimate]
    iso_upper: Optional[geometry.IsoperimetricUpper]


def trusted_radius(g: SchreierGraph) -> int:
    return int(g.distances().max()) if g.exact else g.certified_radius


def measure(g: SchreierGraph, radius: Optional[int] = None, loop_radius: Optional[int] = None,
            planarity_max_vertices: int = 300_000, with_spectral: bool = True,
            with_iso: bool = True) -> Measurements:
    R = trusted_radius(g) if radius is None else radius
    g.require_radius(R)
    if loop_radius is None:
        loop_radius = 2 * R if not g.exact else max(2 * R, 8)
    balls = counting.ball_counts(g, R)
    loops = counting.loop_counts(g, loop_radius)
    ell = geometry.injectivity_radius(g)
    verdict = None
    if balls.counts[-1] <= planarity_max_vertices:
        verdict = planar.check_quotient_planarity(g, R)
    est = None
    if with_spectral:
        est = spectral.power_iteration_rho(g, radius=None if g.exact else R)
        if not g.exact and R >= 1:
            rp = spectral.return_probability_rho_lower(g, R)
            if rp > est.rho_lower:
                est = spectral.SpectralEstimate(rp, 1.0, est.method_tags + ("return-probability",),
                                                est.converged, est.details)
    iso = None
    if with_iso and (g.exact or R >= 1):
        iso = geometry.isoperimetric_upper(
            g, geometry.default_candidates(g, None if g.exact else R - 1))
    return Measurements(R, balls, loops, ell, verdict, est, iso)


# -- ledger --------------------------------------------------------------

def assemble_ledger(g: SchreierGraph, m: Measurements) -> BoundLedger:
    n = g.rank
    top = math.log(2 * n - 1)
    nontrivial = bool(g.relators)
    led = BoundLedger(n, nontrivial)
    d, rho, lam, iso, gr = (led[q] for q in QUANTITIES)

    if g.exact:
        # finite quotient: constants are l2, P1 = 1, and A = V(Gamma) has no boundary
        one = [Step("finite graph", "P1 = 1 on a finite 2n-regular graph", {"vertices": g.n_vertices})]
        if m.spectral is not None:
            one.append(Step("power_iteration_rho", "spectral radius", {"rho": m.spectral.rho_lower}))
        rho.set_lower(1.0, one)
        rho.set_upper(1.0, [Step("trivial", "rho <= 1")])
        lam.set_lower(0.0, rho.upper_chain)
        lam.set_upper(0.0, one)
        eps = [Step("delta_from_lambda0", "cogrowth-spectrum relation", {"lambda0": 0.0})]
        val = spectral.delta_from_lambda0(n, 0.0)
        d.set_lower(val, one + eps)
        d.set_upper(val, eps)
        whole = [Step("boundary_count", "i(Gamma) definition", {"A": "all vertices", "boundary": 0})]
        iso.set_lower(Fraction(0), [Step("trivial", "i >= 0")])
        iso.set_upper(Fraction(0), whole)
        gr.set_lower(Fraction(1), [Step("finite graph", "growth of a finite graph is 1")])
        gr.set_upper(Fraction(1), [Step("finite graph", "ball counts bounded")])
        led.check()
        return led

    # isoperimetric constant
    i_low, i_chain = Fraction(0), [Step("trivial", "i >= 0")]
    if m.planarity is not None and m.planarity.planar and m.ell.determined:
        lb = geometry.isoperimetric_lower_planar(g, m.ell.value, m.planarity)
        i_low = lb.value
        i_chain = [Step("check_quotient_planarity", "planarity hypothesis",
                        {"radius": m.planarity.window_radius, "evidence_only": m.planarity.evidence_only}),
                   Step("injectivity_radius", "injectivity radius: half the girth", {"ell": str(m.ell.value)}),
                   Step("isoperimetric_lower_planar", "planar bound: i > (n-1)/n - 1/(n(ell-1))",
                        {"tag": lb.tag})]
    iso.set_lower(i_low, i_chain)
    cap = Fraction(n - 1, n)
    up_chain = [Step("ambient", "i(Gamma_H) <= i(T_n) = (n-1)/n")]
    i_up = cap
    if m.iso_upper is not None and m.iso_upper.value < cap:
        i_up = m.iso_upper.value
        up_chain = [Step("isoperimetric_upper", "i(Gamma) as an infimum over finite sets",
                         {"witness": m.iso_upper.witness})]
    iso.set_upper(i_up, up_chain)

    # spectrum
    lam_low = geometry.cheeger_lambda0_lower(i_low)
    cheeger = i_chain + [Step("cheeger_lambda0_lower", "Cheeger inequality: lambda0 >= 1 - sqrt(1 - i^2)",
                              {"i_lower": str(i_low)})]
    lam.set_lower(lam_low, cheeger)
    rho.set_upper(1.0 - lam_low, cheeger + [Step("1 - lambda0", "lambda0 = 1 - rho")])
    if m.spectral is not None:
        sp = [Step("+".join(m.spectral.method_tags), "rho lower bound (Dirichlet ball / return probability)",
                   {"rho_lower": m.spectral.rho_lower})]
        rho.set_lower(m.spectral.rho_lower, sp)
        lam.set_upper(1.0 - m.spectral.rho_lower, sp + [Step("1 - rho", "lambda0 = 1 - rho")])
    else:
        rho.set_lower(0.0, [Step("trivial", "rho >= 0")])
        lam.set_upper(1.0, [Step("trivial", "lambda0 <= 1")])

    # Poincare exponent of N
    if nontrivial:
        est = counting.delta_estimate(m.loops, n)
        floor = 0.5 * top
        chain = [Step("prop 1.1", "delta(N) >= delta(F_n)/2 for normal N != 1", {"floor": floor})]
        val = floor
        if est.values:
            counted = min(est.point, top)
            chain.append(Step("delta_estimate", "(1/R) log N(R), lower-bound data (limsup target)",
                              {"R": est.radii[-1], "N(R)": m.loops.counts[est.radii[-1]],
                               "value": est.point}))
            val = max(val, counted)
        d.set_lower(val, chain)
        d.set_upper(spectral.delta_from_lambda0(n, min(lam_low, spectral.lambda0_max(n))),
                    cheeger + [Step("delta_from_lambda0", "cogrowth-spectrum relation inverted, decreasing in lambda0",
                                    {"lambda0_lower": lam_low})])

    # growth
    g_low = max(Fraction(1), geometry.mohar_growth_lower(i_low)) if i_low < 1 else Fraction(2 * n - 1)
    gl_chain = i_chain + [Step("mohar_growth_lower", "Mohar bound: growth >= (1+i)/(1-i)", {"i_lower": str(i_low)})]
    gr.set_lower(g_low, gl_chain)
    roots = counting.growth_estimate(m.balls)
    g_up, gu_chain = float(2 * n - 1), [Step("tree", "growth(Gamma) <= growth(T_n) = 2n-1")]
    if roots.values and min(roots.values) < g_up:
        j = int(np.argmin(roots.values))
        g_up = roots.values[j]
        gu_chain = [Step("growth_estimate", "ball counts are submultiplicative on Cayley graphs: growth <= c_r^(1/r)",
                         {"r": roots.radii[j], "c_r": m.balls.counts[roots.radii[j]]})]
    gr.set_upper(g_up, gu_chain)
    led.check()
    return led


# -- margins and verdicts --------------------------------------------------

@dataclass
class Verdict:
    tag: str
    status: str  # satisfied | inconclusive | violated | skipped
    detail: dict = field(default_factory=dict)


def conjecture_margin(ledger: BoundLedger, n: int):
    """Return ``(margin, conjecture_status)``.

    ``margin = delta_lower + log(growth_lower)/2 + log 2 - log(2n-1)``.
    Trivial N lies outside both statements: returns ``(None, "skipped")``.
    """
    d, g = ledger["delta"], ledger["growth"]
    if not ledger.nontrivial or d.lower is None or g.lower is None:
        return None, "skipped"
    lhs = d.lower + 0.5 * math.log(g.lower)
    margin = lhs + math.log(2) - math.log(2 * n - 1)
    status = "satisfied" if lhs >= math.log(2 * n - 1) - _SLACK else "inconclusive"
    return margin, status


def verdicts(g: SchreierGraph, m: Measurements, led: BoundLedger) -> list:
    n = g.rank
    top = math.log(2 * n - 1)
    out = []
    d, gr = led["delta"], led["growth"]
    if led.nontrivial:
        est = counting.delta_estimate(m.loops, n)
        ok = g.exact or (est.values and est.point >= 0.5 * top)
        out.append(Verdict("half-exponent floor: delta(N) >= delta(F_n)/2",
                           "satisfied" if ok else "inconclusive",
                           {"counted": est.point, "floor": 0.5 * top}))
        out.append(Verdict("strict growth drop: growth(Gamma_N) < 2n-1",
                           "satisfied" if gr.upper < 2 * n - 1 else "inconclusive",
                           {"growth_upper": gr.upper}))
    else:
        out.append(Verdict("half-exponent floor: delta(N) >= delta(F_n)/2", "skipped", {"reason": "N trivial"}))
        out.append(Verdict("strict growth drop: growth(Gamma_N) < 2n-1", "skipped", {"reason": "N trivial"}))
    out.append(Verdict("Mohar vs ball counts: growth lower <= growth upper",
                       "satisfied" if gr.lower <= gr.upper + _SLACK else "violated",
                       {"lower": gr.lower, "upper": gr.upper}))
    lam = led["lambda0"]
    out.append(Verdict("Cheeger vs spectral: lambda0 lower <= lambda0 upper",
                       "satisfied" if lam.lower <= lam.upper + _SLACK else "violated",
                       {"lower": lam.lower, "upper": lam.upper}))
    if m.planarity is not None:
        out.append(Verdict("planarity: Gamma_N planar",
                           "satisfied" if m.planarity.planar and not m.planarity.evidence_only
                           else ("inconclusive" if m.planarity.planar else "violated"),
                           m.planarity.as_dict()))
    margin, status = conjecture_margin(led, n)
    if margin is None:
        out.append(Verdict("margin inequality: delta + log(growth)/2 + log 2 > delta(F_n)", "skipped"))
        out.append(Verdict("Conjecture: delta + log(growth)/2 >= delta(F_n)", "skipped"))
    else:
        out.append(Verdict("margin inequality: delta + log(growth)/2 + log 2 > delta(F_n)",
                           "satisfied" if margin > 0 else "inconclusive", {"margin": margin}))
        out.append(Verdict("Conjecture: delta + log(growth)/2 >= delta(F_n)", status,
                           {"lhs_lower": margin - math.log(2) + top, "rhs": top}))
    return out


# -- reports -------------------------------------------------------------

@dataclass
class Report:
    experiment_id: str
    rank: int
    relators: list
    exactness: str
    sequences: dict
    ledger: BoundLedger
    verdicts: list
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION,
                "experiment_id": self.experiment_id,
                "rank": self.rank,
                "relators": list(self.relators),
                "exactness": self.exactness,
                "sequences": self.sequences,
                "ledger": self.ledger.to_dict(),
                "verdicts": [asdict(v) for v in self.verdicts],
                "extras": self.extras}

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')}")
        return cls(d["experiment_id"], d["rank"], d["relators"], d["exactness"], d["sequences"],
                   BoundLedger.from_dict(d["ledger"]), [Verdict(**v) for v in d["verdicts"]],
                   d.get("extras", {}))

    def __eq__(self, other) -> bool:
        return isinstance(other, Report) and self.to_dict() == other.to_dict()


def _sequences(m: Measurements, n: int) -> dict:
    R = m.balls.radius
    roots = counting.growth_estimate(m.balls)
    est = counting.delta_estimate(m.loops, n)
    Rl = m.loops.radius
    return {
        "radius": list(range(R + 1)),
        "ball_counts": list(m.balls.counts),
        "growth_root": [None] + list(roots.values),
        "loop_radius": list(range(Rl + 1)),
        "loop_counts": [int(c) if isinstance(c, (int, np.integer)) else float(c) for c in m.loops.counts],
        "delta_hat": [est.at(r) if r in est.radii else None for r in range(Rl + 1)],
    }


def run_experiment(g: SchreierGraph, experiment_id: str = "", radius: Optional[int] = None,
                   loop_radius: Optional[int] = None, extras: Optional[dict] = None) -> Report:
    m = measure(g, radius, loop_radius)
    led = assemble_ledger(g, m)
    vs = verdicts(g, m, led)
    ex = {"ell": str(m.ell.value), "ell_determined": m.ell.determined,
          "planar": None if m.planarity is None else m.planarity.planar,
          "measured_radius": m.radius}
    ex.update(extras or {})
    return Report(experiment_id, g.rank, [format_word(r.letters, g.rank) for r in g.relators],
                  g.exactness, _sequences(m, g.rank), led, vs, ex)


def sweep_defaults(k: int) -> tuple[int, int]:
    """Window radius and deepening for power relators of exponent k."""
    return k // 2 + 1, 2


def theorem_trend_sweep(n: int, k_values: Sequence[int], R: Optional[int] = None,
                        L: Optional[int] = None, max_cosets: int = 2000) -> list:
    """One report per k for N_k = <<g_1^k, ..., g_n^k>>.  Failures are logged and skipped."""
    reports = []
    for k in k_values:
        r_k, l_k = sweep_defaults(k)
        r_k = R if R is not None else r_k
        l_k = L if L is not None else l_k
        rels = preset_relators("powers", n, k)
        try:
            try:
                g = todd_coxeter(n, rels, max_cosets)
            except Overflow:
                g, _ = truncated_quotient(n, rels, r_k, l_k)
            rep = run_experiment(g, f"powers-n{n}-k{k}", extras={"k": k, "R": r_k, "L": l_k})
        except Exception as exc:  # sweep continues past failures
            log.warning("sweep point k=%d failed: %s", k, exc)
            continue
        reports.append(rep)
    return reports


SWEEP_COLUMNS = ("k", "ell", "i_lower", "growth_lower", "delta_upper", "delta_lower")


def sweep_rows(reports: Sequence[Report]) -> list:
    rows = []
    for rep in reports:
        e = rep.ledger.entries
        rows.append({
            "k": rep.extras.get("k"),
            "ell": rep.extras.get("ell"),
            "i_lower": e["iso"].lower_exact or e["iso"].lower,
            "growth_lower": e["growth"].lower_exact or e["growth"].lower,
            "delta_upper": e["delta"].upper,
            "delta_lower": e["delta"].lower,
        })
    return rows


def emit_report(r, fmt: str = "json") -> bytes:
    """Serialize a report, or a list of reports (a sweep)."""
    sweep = isinstance(r, (list, tuple))
    if fmt == "json":
        obj = [x.to_dict() for x in r] if sweep else r.to_dict()
        return (json.dumps(obj, indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        if sweep:
            w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
            w.writeheader()
            for row in sweep_rows(r):
                w.writerow(row)
        else:
            s = r.sequences
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["r", "ball_count", "growth_root", "loop_count", "delta_hat"])
            for i in range(max(len(s["radius"]), len(s["loop_radius"]))):
                def get(key):
                    seq = s[key]
                    return "" if i >= len(seq) or seq[i] is None else seq[i]
                w.writerow([i, get("ball_counts"), get("growth_root"), get("loop_counts"), get("delta_hat")])
        return buf.getvalue().encode()
    if fmt in ("text", "text-table"):
        rows = sweep_rows(r if sweep else [r])
        head = " ".join(f"{c:>14}" for c in SWEEP_COLUMNS)
        lines = [head]
        for row in rows:
            lines.append(" ".join(f"{_fmt(row[c]):>14}" for c in SWEEP_COLUMNS))
        if not sweep:
            lines.append("")
            for v in r.verdicts:
                lines.append(f"{v.status:>13}  {v.tag}")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unsupported format {fmt!r}")


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def load_reports(data: bytes):
    obj = json.loads(data)
    if isinstance(obj, list):
        return [Report.from_dict(x) for x in obj]
    return Report.from_dict(obj)


# -- invariant suite -----------------------------------------------------

@dataclass
class Check:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)


def verify_graph(g: SchreierGraph, samples: int = 100, seed: int = 0) -> list:
    """Run the structural and inequality invariants on one graph."""
    from .schreier import PreGraph, fold, same_graph

    rng = np.random.default_rng(seed)
    checks = []

    def add(name, ok, **detail):
        checks.append(Check(name, bool(ok), detail))

    try:
        g.check_invariants()
        add("determinism and involution", True)
    except AssertionError as exc:
        add("determinism and involution", False, error=str(exc))
    if g.exact:
        add("exact graph is 2n-regular", bool((g.table >= 0).all()))
    pre = PreGraph(g.rank, g.n_vertices,
                   [(v, x, int(g.table[v, x])) for v in range(g.n_vertices)
                    for x in range(0, 2 * g.rank, 2) if g.table[v, x] >= 0])
    add("fold is idempotent on the graph", same_graph(fold(pre), g))

    R = trusted_radius(g)
    inner = R if g.exact else R - 1
    bad_euler = bad_planar = cores = 0
    if inner >= 0:
        d = g.distances()
        pool = int(np.count_nonzero((d >= 0) & (d <= inner)))
        for _ in range(samples):
            size = int(rng.integers(1, max(2, min(pool, 60)) + 1))
            s = geometry.random_connected_subset(g, size, rng, inner)
            c = geometry.core(s)
            if not c:
                continue
            cores += 1
            if c.chi != s.chi:
                bad_euler += 1
            if not geometry.euler_boundary_check(c, g.rank):
                bad_euler += 1
            if c.ell2 is not None:
                v = planar.is_planar(c.to_multigraph())
                if v.planar and not geometry.planar_core_size_check(c, v):
                    bad_planar += 1
    add("Euler-boundary identity and chi invariance on random cores", bad_euler == 0,
        cores=cores, failures=bad_euler)
    add("planar core size bound", bad_planar == 0, failures=bad_planar)

    m = measure(g)
    try:
        led = assemble_ledger(g, m)
        add("ledger lower <= upper", True)
    except LedgerInconsistent as exc:
        add("ledger lower <= upper", False, error=str(exc))
        return checks
    iso = led["iso"]
    add("isoperimetric lower <= upper", iso.exact_lower() <= iso.exact_upper())
    for v in verdicts(g, m, led):
        add(v.tag, v.status != "violated", status=v.status)
    counts = m.balls.counts
    add("ball counts below tree counts",
        all(c <= 1 + 2 * g.rank * ((2 * g.rank - 1) ** r - 1) // (2 * g.rank - 2) for r, c in enumerate(counts)))
    return checks
