"""Command-line interface: ``freequot build|count|spectral|geometry|planar|lab``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import counting, geometry, lab, planar, spectral
from .schreier import (
    Overflow,
    RadiusNotCertified,
    ResourceCap,
    build_graph,
    load_graph,
    preset_relators,
)
from .words import InvalidInput, parse_relators

log = logging.getLogger("freequot")

EXIT_OK, EXIT_VIOLATION, EXIT_CAP, EXIT_INPUT = 0, 1, 2, 3


def _jsonable(x):
    if isinstance(x, Fraction):
        return {"value": float(x), "exact": str(x)}
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, default=_jsonable))


def _read_graph(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return load_graph(text)


def _relators(args):
    if args.relators and args.preset:
        raise InvalidInput("use either --relators or --preset")
    if args.relators:
        return parse_relators(Path(args.relators).read_text(), args.rank)
    if args.preset:
        name, *rest = args.preset
        return preset_relators(name, args.rank, int(rest[0]) if rest else None)
    return []


def cmd_build(args) -> int:
    rels = _relators(args)
    g = build_graph(args.rank, rels, args.radius, args.depth, args.max_cosets, args.max_vertices)
    text = g.dump()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_count(args) -> int:
    g = _read_graph(args.input)
    rows = []
    if args.mode == "balls":
        b = counting.ball_counts(g, args.radius)
        roots = counting.growth_estimate(b)
        for r, c in enumerate(b.counts):
            rows.append({"r": r, "count": c, "root_or_rate": None if r == 0 else roots.at(r)})
    else:
        l = counting.loop_counts(g, args.radius)
        est = counting.delta_estimate(l, g.rank)
        for r, c in enumerate(l.counts):
            rows.append({"r": r, "count": c, "root_or_rate": est.at(r) if r in est.radii else None})
    if args.format == "json":
        _print_json({"mode": args.mode, "exactness": g.exactness, "rows": rows})
    else:
        print("r,count,root_or_rate")
        for row in rows:
            rate = "" if row["root_or_rate"] is None else repr(row["root_or_rate"])
            print(f"{row['r']},{row['count']},{rate}")
    return EXIT_OK


def cmd_spectral(args) -> int:
    g = _read_graph(args.input)
    if args.method == "power":
        est = spectral.power_iteration_rho(g, args.iters, args.tol)
    elif args.method == "return":
        m = args.steps if args.steps else (g.certified_radius if not g.exact else 20)
        val = spectral.return_probability_rho_lower(g, m)
        est = spectral.SpectralEstimate(val, 1.0, ("return-probability",))
    else:
        est = spectral.rayleigh_rho_lower(g)
    _print_json(est.as_dict())
    return EXIT_OK


def cmd_geometry(args) -> int:
    g = _read_graph(args.input)
    R = args.radius if args.radius is not None else lab.trusted_radius(g) - (0 if g.exact else 1)
    if args.op in ("core", "euler-check"):
        c = geometry.core(g.ball(R))
        if not c:
            out = {"core": "trivial", "radius": R}
        else:
            out = {"radius": R, "vertices": c.size, "edges": len(c.edges), "chi": c.chi,
                   "boundary": c.boundary, "ell": c.ell}
            if args.op == "euler-check":
                out["euler_boundary_check"] = geometry.euler_boundary_check(c, g.rank)
        _print_json(out)
        if args.op == "euler-check" and c and not out["euler_boundary_check"]:
            return EXIT_VIOLATION
    elif args.op == "girth":
        ir = geometry.injectivity_radius(g)
        _print_json({"ell": ir.value, "girth": ir.ell2, "determined": ir.determined, "method": ir.method})
    elif args.op == "iso-upper":
        up = geometry.isoperimetric_upper(g, geometry.default_candidates(g, R))
        _print_json({"upper": up.value, "witness": up.witness, "witness_size": len(up.witness_vertices)})
    else:
        ir = geometry.injectivity_radius(g)
        verdict = planar.check_quotient_planarity(g, lab.trusted_radius(g))
        if not verdict.planar:
            _print_json({"lower": 0, "tag": "not planar", "obstruction": verdict.obstruction})
            return EXIT_OK
        lo = geometry.isoperimetric_lower_planar(g, ir.value, verdict)
        _print_json({"lower": lo.value, "tag": lo.tag, "vacuous": lo.vacuous, "ell": ir.value})
    return EXIT_OK


def cmd_planar(args) -> int:
    g = _read_graph(args.input)
    R = args.radius if args.radius is not None else lab.trusted_radius(g)
    _print_json(planar.check_quotient_planarity(g, R).as_dict())
    return EXIT_OK


def _k_range(text: str) -> list:
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",")]


def cmd_lab_sweep(args) -> int:
    if args.preset != "powers":
        raise InvalidInput("only the 'powers' family is swept")
    reports = lab.theorem_trend_sweep(args.n, _k_range(args.k), args.radius, args.depth)
    data = lab.emit_report(reports, args.format)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        ext = {"json": "json", "csv": "csv"}.get(args.format, "txt")
        (out / f"sweep-n{args.n}.{ext}").write_bytes(data)
        for rep in reports:
            (out / f"{rep.experiment_id}.json").write_bytes(lab.emit_report(rep, "json"))
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def cmd_lab_verify(args) -> int:
    g = _read_graph(args.input)
    checks = lab.verify_graph(g, samples=args.samples, seed=args.seed)
    for c in checks:
        print(f"{'PASS' if c.ok else 'FAIL'}  {c.name}")
    return EXIT_OK if all(c.ok for c in checks) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="freequot", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a quotient graph and dump it")
    b.add_argument("--rank", type=int, required=True)
    b.add_argument("--relators", help="relator file")
    b.add_argument("--preset", nargs="+", metavar=("NAME", "PARAM"))
    b.add_argument("--radius", type=int, required=True)
    b.add_argument("--depth", type=int, default=2)
    b.add_argument("--max-cosets", type=int, default=10_000)
    b.add_argument("--max-vertices", type=int, default=2_000_000)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("count", help="ball or loop counts")
    c.add_argument("--input", required=True)
    c.add_argument("--mode", choices=("balls", "loops"), default="balls")
    c.add_argument("--radius", type=int, required=True)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.set_defaults(func=cmd_count)

    s = sub.add_parser("spectral", help="spectral radius bounds")
    s.add_argument("--input", required=True)
    s.add_argument("--method", choices=("power", "return", "rayleigh"), default="power")
    s.add_argument("--iters", type=int, default=100_000)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--steps", type=int, help="m_max for --method return")
    s.set_defaults(func=cmd_spectral)

    g = sub.add_parser("geometry", help="cores, girth, isoperimetric bounds")
    g.add_argument("--input", required=True)
    g.add_argument("--op", choices=("core", "girth", "iso-upper", "iso-lower", "euler-check"), required=True)
    g.add_argument("--radius", type=int)
    g.set_defaults(func=cmd_geometry)

    pl = sub.add_parser("planar", help="planarity of a ball")
    pl.add_argument("--input", required=True)
    pl.add_argument("--radius", type=int)
    pl.set_defaults(func=cmd_planar)

    lb = sub.add_parser("lab", help="experiments")
    lsub = lb.add_subparsers(dest="lab_command", required=True)
    sw = lsub.add_parser("sweep", help="power-relator sweep")
    sw.add_argument("--preset", default="powers")
    sw.add_argument("--n", type=int, default=2)
    sw.add_argument("--k", default="4..10", help="range a..b or comma list")
    sw.add_argument("--radius", type=int)
    sw.add_argument("--depth", type=int)
    sw.add_argument("--out")
    sw.add_argument("--format", choices=("json", "csv", "text"), default="json")
    sw.set_defaults(func=cmd_lab_sweep)
    vf = lsub.add_parser("verify", help="run the invariant suite on a graph")
    vf.add_argument("--input", required=True)
    vf.add_argument("--samples", type=int, default=100)
    vf.add_argument("--seed", type=int, default=0)
    vf.set_defaults(func=cmd_lab_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ResourceCap, Overflow) as exc:
        log.error("resource cap: %s", exc)
        return EXIT_CAP
    except AssertionError as exc:
        log.error("hard invariant violated: %s", exc)
        return EXIT_VIOLATION
    except (InvalidInput, RadiusNotCertified, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
