"""Command line interface.

Exit status: 0 on success, 1 on a domain error, 2 on input, parse or I/O
errors.  Reports are JSON with sorted keys, so equal inputs and seeds give
byte-identical output.
"""

import argparse
import csv
import hashlib
import io
import json
import sys
import time

from . import __version__
from .bounds import (census_lookup, cm_upper_bound, gc_interval, group_bound,
                     homology_bound, lens_bound, volume_bound)
from .census import MAX_COMPLEXITY, bound_check, enum_marked_spines
from .diagrams import (alpha_move, beta_move, cancel_cusps, eliminate_cusps,
                       parse_diagram, polarized_counts, psi_form, validate_diagram)
from .errors import ArtifactError, BadParams, InputError, ScaleExceeded
from .fixtures import FIXTURE_KINDS, make_fixture
from .mesh import format_off, load_off
from .origami import (abelian_invariants, parse_origami, presentation,
                      presentation_complexity, simplify, validate_origami)
from .spine import check_branching, resolve_T, to_dot
from .strata import stratify
from .surrogate import spine_from_geometry
from .tangle import detect_double_tangents

SCHEMA = 1


def _vector(text):
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a vector: {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma separated numbers")
    return parts


def _ints(count):
    def parse(text):
        try:
            parts = [int(x) for x in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"not integers: {text!r}") from None
        if len(parts) != count:
            raise argparse.ArgumentTypeError(f"expected {count} integers")
        return parts
    return parse


def _site(text):
    return tuple(_ints(2)(text))


def _digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _round(values):
    return [round(float(x), 12) for x in values]


def _envelope(kind, **body):
    out = {"schema": SCHEMA, "kind": kind, "tool_version": __version__}
    out.update(body)
    return out


def _strata_block(strat):
    r = strat.report
    lab = strat.labeling
    checks = dict(r.checks)
    checks["observed_difference_sign"] = r.observed_difference_sign
    return {
        "direction": {"requested": _round(lab.requested), "used": _round(lab.direction),
                      "perturbations": list(lab.perturbations)},
        "strata": {"chi_X": r.chi_X, "chi_boundary": r.chi_boundary,
                   "chi_d1p": r.chi_d1p, "chi_d1m": r.chi_d1m,
                   "chi_d2p_arcs": r.chi_d2p_arcs, "d2p_loops": r.d2p_loops,
                   "cusps": dict(r.cusps), "deg_h": r.deg_h,
                   "gauss_degree": r.gauss_degree, "refined_degree": dict(r.refined)},
        "arcs": dict(r.arcs),
        "identities": checks,
    }


def _load_strat(args):
    mesh = load_off(args.mesh)
    strat = stratify(mesh, args.dir, seed=args.seed)
    return mesh, strat


def cmd_strata(args):
    mesh, strat = _load_strat(args)
    tangle = detect_double_tangents(mesh, strat.direction, strat.folds)
    body = _strata_block(strat)
    body["tangle"] = tangle.as_dict()
    return _envelope("strata", input={"path_sha256": _digest(args.mesh)},
                     seed=args.seed, **body)


def cmd_tangle(args):
    mesh, strat = _load_strat(args)
    tangle = detect_double_tangents(mesh, strat.direction, strat.folds)
    return _envelope("tangle", input={"path_sha256": _digest(args.mesh)},
                     seed=args.seed, tangle=tangle.as_dict(),
                     direction={"used": _round(strat.direction)})


def cmd_spine(args):
    mesh, strat = _load_strat(args)
    tangle = detect_double_tangents(mesh, strat.direction, strat.folds)
    gs = spine_from_geometry(strat, tangle)
    if args.dot:
        return to_dot(gs.spine)
    res = resolve_T(gs.spine)
    return _envelope("spine", input={"path_sha256": _digest(args.mesh)}, seed=args.seed,
                     spine=gs.as_dict(), resolution=res.as_dict(),
                     branching=check_branching(gs.spine).as_dict())


def _diagram_summary(d):
    pos, neg = polarized_counts(d)
    return {"diagram": d.as_dict(), "crossings": {"plus": pos, "minus": neg},
            "cusps": d.n_cusps, "psi": psi_form(d).as_dict()}


def cmd_diagram(args):
    d = parse_diagram(_read(args.file))
    validate_diagram(d)
    log = None
    if args.move == "alpha":
        if args.site_a is None or args.site_b is None:
            raise BadParams("alpha needs --site-a and --site-b")
        d = alpha_move(d, args.site_a, args.site_b, parallel=not args.antiparallel,
                       polarity=args.polarity, a_over=not args.b_over)
    elif args.move == "beta":
        if not args.crossings or len(args.crossings) != 3:
            raise BadParams("beta needs --crossings TOP_MID,MID_BOT,TOP_BOT")
        d = beta_move(d, *args.crossings)
    elif args.move == "cancel":
        if not args.cusps or len(args.cusps) != 2:
            raise BadParams("cancel needs --cusps A,B")
        d = cancel_cusps(d, args.cusps[0], args.cusps[1], arc=args.arc)
    elif args.move == "eliminate":
        res = eliminate_cusps(d)
        d, log = res.diagram, list(res.log)
    body = _diagram_summary(d)
    if args.move:
        body["move"] = args.move
    if log is not None:
        body["log"] = log
    return _envelope("diagram", **body)


def cmd_origami(args):
    code = parse_origami(_read(args.file))
    verdict = validate_origami(code)
    body = {"verdict": verdict.as_dict()}
    if args.presentation or args.simplify:
        p = presentation(code)
        body["presentation"] = p.as_dict()
        rank, torsion = abelian_invariants(p)
        body["abelianization"] = {"rank": rank, "torsion": torsion}
        if args.simplify:
            body["simplified"] = simplify(p, substitute=args.substitute).as_dict()
        body["complexity"] = presentation_complexity(p)
    return _envelope("origami", **body)


def cmd_census(args):
    if args.max_c < 1:
        raise BadParams("--max-c must be at least 1")
    if args.max_c > MAX_COMPLEXITY:
        raise ScaleExceeded("census limited to small complexity",
                            c=args.max_c, limit=MAX_COMPLEXITY)
    rows, checks = [], []
    for c in range(1, args.max_c + 1):
        found = enum_marked_spines(c)
        checks.append(bound_check(c, found).as_dict())
        rows.extend(r.as_dict() for r in found)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["c", "graph", "patterns", "orientable", "code"])
        for r in rows:
            w.writerow([r["c"], r["graph"],
                        ";".join("".join(map(str, p)) for p in r["patterns"]),
                        int(r["orientable"]), r["code"]])
        return buf.getvalue()
    return _envelope("census", max_c=args.max_c, checks=checks,
                     rows=rows if args.rows else None)


def cmd_bounds(args):
    reports = []
    if args.c is not None:
        reports.append(gc_interval(args.c))
    if args.homology is not None:
        reports.append(homology_bound(*args.homology))
    if args.volume is not None:
        reports.append(volume_bound(args.volume))
    if args.lens is not None:
        a, b, c, d = args.lens
        reports.append(lens_bound(((a, b), (c, d))))
    if args.lookup is not None:
        reports.append(census_lookup(args.lookup))
    if args.cm is not None:
        reports.append(cm_upper_bound(args.cm))
    if args.group is not None:
        reports.append(group_bound(presentation(parse_origami(_read(args.group)))))
    if not reports:
        raise BadParams("no bound requested")
    if len(reports) == 1:
        return _envelope("bounds", **reports[0].as_dict())
    return _envelope("bounds", reports=[r.as_dict() for r in reports])


def _fixture_params(items):
    out = {}
    for item in items:
        if "=" not in item:
            raise BadParams(f"fixture parameter {item!r} is not key=value")
        k, v = item.split("=", 1)
        out[k] = v
    return out


def cmd_fixture(args):
    mesh = make_fixture(args.kind, _fixture_params(args.params))
    return format_off(mesh)


def build_parser():
    p = argparse.ArgumentParser(prog="gradspine", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--timing", action="store_true",
                   help="add wall clock time to JSON reports (breaks byte identity)")
    sub = p.add_subparsers(dest="command", required=True)

    def mesh_cmd(name, func, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("mesh")
        s.add_argument("--dir", type=_vector, required=True, metavar="X,Y,Z")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--out")
        s.set_defaults(func=func)
        return s

    mesh_cmd("strata", cmd_strata, "strata, identities and double tangents")
    mesh_cmd("tangle", cmd_tangle, "double tangent trajectories")
    s = mesh_cmd("spine", cmd_spine, "marked spine carried by the fold diagram")
    s.add_argument("--dot", action="store_true", help="emit Graphviz DOT")

    s = sub.add_parser("diagram", help="fold diagram moves")
    s.add_argument("file")
    s.add_argument("--move", choices=("alpha", "beta", "cancel", "eliminate"))
    s.add_argument("--site-a", type=_site, metavar="CURVE,SEG")
    s.add_argument("--site-b", type=_site, metavar="CURVE,SEG")
    s.add_argument("--polarity", type=int, choices=(1, -1), default=1)
    s.add_argument("--antiparallel", action="store_true")
    s.add_argument("--b-over", action="store_true")
    s.add_argument("--crossings", type=lambda t: t.split(","))
    s.add_argument("--cusps", type=lambda t: t.split(","))
    s.add_argument("--arc", choices=("+", "-"))
    s.add_argument("--out")
    s.set_defaults(func=cmd_diagram)

    s = sub.add_parser("origami", help="origami code validation and presentation")
    s.add_argument("file")
    s.add_argument("--presentation", action="store_true")
    s.add_argument("--simplify", action="store_true")
    s.add_argument("--substitute", action="store_true",
                   help="also eliminate generators by substitution")
    s.add_argument("--out")
    s.set_defaults(func=cmd_origami)

    s = sub.add_parser("census", help="marked special spine census")
    s.add_argument("--max-c", type=int, required=True)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--rows", action="store_true", help="include every row in JSON")
    s.add_argument("--out")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("bounds", help="bound calculators")
    s.add_argument("--c", type=int)
    s.add_argument("--homology", type=_ints(2), metavar="T,R")
    s.add_argument("--volume", type=float)
    s.add_argument("--lens", type=_ints(4), metavar="A,B,C,D")
    s.add_argument("--lookup")
    s.add_argument("--cm", type=int, metavar="LENGTH")
    s.add_argument("--group", metavar="ORIGAMI_JSON")
    s.add_argument("--out")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("fixture", help="write a fixture mesh as OFF")
    s.add_argument("kind", choices=FIXTURE_KINDS)
    s.add_argument("params", nargs="*", metavar="KEY=VALUE")
    s.add_argument("--out")
    s.set_defaults(func=cmd_fixture)
    return p


def _emit(result, out):
    if isinstance(result, dict):
        text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    else:
        text = result if result.endswith("\n") else result + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        result = args.func(args)
        if isinstance(result, dict) and args.timing:
            result["timing_s"] = round(time.perf_counter() - start, 3)
        _emit(result, getattr(args, "out", None))
    except InputError as exc:
        _emit(_envelope("error", error=exc.to_dict()), None)
        return 2
    except ArtifactError as exc:
        _emit(_envelope("error", error=exc.to_dict()), None)
        return 1
    except (OSError, UnicodeDecodeError) as exc:
        _emit(_envelope("error", error={"code": "io_error", "message": str(exc)}), None)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
