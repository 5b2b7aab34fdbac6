"""Command-line front end.

Exit codes: 0 converged / all checks passed, 1 error, 2 sweep cap reached,
3 check failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import netfile
from .errors import AmbiguityError, HarmonicNetError
from .graph import make_bipartite
from .net import (
    CONVERGED,
    DEFAULT_MAX_SWEEPS,
    DEFAULT_TOL,
    NetMap,
    RelaxationReport,
    energy,
    local_center,
    refine_map,
    relax,
    trace_geodesic_full,
)
from .spaces import parse_space
from .tangent import criticality_residual, variational_inequality_check

logger = logging.getLogger("harmonic_nets")

EXIT_OK, EXIT_ERROR, EXIT_CAP, EXIT_CHECK_FAILED = 0, 1, 2, 3


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _coords(text):
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonic-nets",
        description="Harmonic maps from weighted graphs into metric spaces.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                       help="harmonicity residual tolerance (default %(default)g)")
        p.add_argument("--max-sweeps", type=_positive_int, default=DEFAULT_MAX_SWEEPS,
                       help="sweep cap per relaxation stage (default %(default)d)")
        p.add_argument("--parallel", type=_positive_int, default=None, metavar="N",
                       help="update each vertex class with N threads")

    p = sub.add_parser("relax", help="relax a net specification to a harmonic map")
    p.add_argument("--input", required=True, help="net specification (JSON)")
    p.add_argument("--output", required=True, help="report file (JSON)")
    p.add_argument("--trace", help="per-sweep trace (CSV: sweep,energy,residual)")
    p.add_argument("--refinements", type=_nonneg_int, default=0,
                   help="refine-and-relax rounds after the first relaxation")
    p.add_argument("--seed", type=int, default=None, help="seed for random:<seed> init")
    solver_flags(p)

    p = sub.add_parser("geodesic", help="trace a geodesic as a string of midpoints")
    p.add_argument("--space", required=True, help="euclidean:n, sphere:n, hyperbolic:n, circle, tree:<file>")
    p.add_argument("--from", dest="start", required=True, type=_coords, help="start point coordinates")
    p.add_argument("--to", dest="end", required=True, type=_coords, help="end point coordinates")
    p.add_argument("--segments", type=_positive_int, default=8)
    p.add_argument("--refinements", type=_nonneg_int, default=0)
    p.add_argument("--output", required=True, help="polyline (CSV, one point per line)")
    p.add_argument("--report", help="report file (default: <output stem>.report.json)")
    p.add_argument("--trace", help="per-sweep trace of the last stage (CSV)")
    solver_flags(p)

    p = sub.add_parser("refine", help="refine a net: subdivide edges, insert midpoints")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="refined net specification (JSON)")
    p.add_argument("--refinements", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("check", help="per-vertex harmonicity and criticality residuals")
    p.add_argument("--input", required=True, help="net specification or report (JSON)")
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=None)
    return parser


def _merge(reports: list[RelaxationReport]) -> RelaxationReport:
    # later stages start from a refined map of equal energy; drop their initial rows
    merged = RelaxationReport(list(reports[0].energy_trace), list(reports[0].residual_trace),
                              reports[0].sweeps, reports[0].terminated, reports[0].final)
    for r in reports[1:]:
        merged.energy_trace += r.energy_trace[1:]
        merged.residual_trace += r.residual_trace[1:]
        merged.sweeps += r.sweeps
        merged.terminated = r.terminated
        merged.final = r.final
    return merged


def _exit_for(report: RelaxationReport) -> int:
    return EXIT_OK if report.terminated == CONVERGED else EXIT_CAP


def cmd_relax(args) -> int:
    f = netfile.load_net(args.input, seed=args.seed)
    graph, record = make_bipartite(f.graph)
    if record is not None:
        print(f"graph has an odd cycle; refined to {graph.n_vertices} vertices")
        f = refine_map(f, graph, record)
    else:
        f = NetMap(graph, f.space, f.image, f.pins)
    reports = [relax(f, args.tol, args.max_sweeps, args.parallel)]
    for _ in range(args.refinements):
        if reports[-1].terminated != CONVERGED:
            break
        reports.append(relax(refine_map(reports[-1].final), args.tol, args.max_sweeps, args.parallel))
    report = _merge(reports)
    netfile.write_json(args.output, netfile.report_to_json(report))
    if args.trace:
        netfile.atomic_write(args.trace, netfile.trace_csv(report))
    print(f"terminated: {report.terminated} after {report.sweeps} sweeps")
    print(f"energy: {report.energy!r}")
    print(f"residual: {report.residual!r}")
    return _exit_for(report)


def cmd_geodesic(args) -> int:
    space = parse_space(args.space)
    a = space.point(args.start, project=True)
    b = space.point(args.end, project=True)
    trace = trace_geodesic_full(space, a, b, args.segments, args.refinements,
                                args.tol, args.max_sweeps, args.parallel)
    report = _merge(trace.reports)
    netfile.atomic_write(args.output, netfile.polyline_csv(space, trace.points))
    out = Path(args.output)
    report_path = args.report or out.with_name(out.stem + ".report.json")
    netfile.write_json(report_path, netfile.report_to_json(report))
    if args.trace:
        netfile.atomic_write(args.trace, netfile.trace_csv(trace.reports[-1]))
    print(f"points: {len(trace.net)}  refinements: {trace.refinements}")
    print(f"terminated: {report.terminated}  residual: {report.residual!r}")
    print(f"length: {trace.length!r}")
    return _exit_for(report)


def cmd_refine(args) -> int:
    f = netfile.load_net(args.input, seed=args.seed)
    before = energy(f)
    for _ in range(args.refinements):
        f = refine_map(f)
    after = energy(f)
    netfile.write_json(args.output, netfile.net_to_json(f))
    print(f"vertices: {f.graph.n_vertices}  edges: {len(f.graph.edges)}")
    print(f"energy before: {before!r}")
    print(f"energy after:  {after!r}")
    return EXIT_OK


def _fmt(x):
    return "-" if x is None else f"{x:.3e}"


def cmd_check(args) -> int:
    f = netfile.load_net(args.input, seed=args.seed)
    smooth = f.space.smooth
    tol = args.tol
    failed = []
    print(f"{'vertex':>6} {'pinned':>6} {'harmonic':>10} {'critical':>10} {'variation':>10}  note")
    for i in range(f.graph.n_vertices):
        nbrs = f.graph.neighbors[i]
        pinned = i in f.pins
        harm = crit = var = None
        note = ""
        if nbrs:
            try:
                harm = f.space.distance(f.image[i], local_center(f, i))
            except AmbiguityError as exc:
                note = f"ambiguous center: {exc}"
            try:
                if smooth:
                    crit = criticality_residual(f, i)
                var = variational_inequality_check(f, i) / sum(w * w for _, w in nbrs)
            except HarmonicNetError as exc:
                note = note or f"unsupported: {exc}"
        ok = pinned or not nbrs or (
            harm is not None and harm < tol
            and (crit is None or crit < tol)
            and var is not None and var <= tol)
        if not ok:
            failed.append(i)
        print(f"{i:>6} {'yes' if pinned else 'no':>6} {_fmt(harm):>10} {_fmt(crit):>10} "
              f"{_fmt(var):>10}  {note}".rstrip())
    if failed:
        print(f"FAILED at {len(failed)} vertices: {' '.join(map(str, failed))}")
        return EXIT_CHECK_FAILED
    print(f"all unpinned vertices below tol {tol:g}")
    return EXIT_OK


COMMANDS = {"relax": cmd_relax, "geodesic": cmd_geodesic, "refine": cmd_refine, "check": cmd_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except AmbiguityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: a midpoint or center of gravity is not unique; bring points closer "
              "or refine the graph", file=sys.stderr)
        return EXIT_ERROR
    except (HarmonicNetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
