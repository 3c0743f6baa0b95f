"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 input parse error, 3 geometry
precondition failure, 4 curve is not an isophote.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import axis as ax
from .errors import (BadParams, ExprError, GeometryError, NotAnIsophote, SilhouetteUndefined,
                     UnknownSurface)
from .frames import arclength_resample, frenet_apparatus, read_curve_csv, write_curve_csv
from .isophote import (SPACELIKE, TIMELIKE, extract_isophotes, field_range, make_axis,
                       polylines_document, contours_svg)
from .surface import (builtin_surface, darboux_apparatus, darboux_to_rows, locate_on_surface,
                      relation_check, surface_curve, surface_from_spec, verify_spacelike)

log = logging.getLogger("lmisophote")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_GEOMETRY, EXIT_NOT_ISOPHOTE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _clean(x):
    """Recursively convert numpy values to JSON types; non-finite floats become null."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def dumps(doc) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(_clean(doc), sort_keys=True, indent=1, allow_nan=False) + "\n"


def _emit(text: str, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_vec(text: str):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise BadParams(f"cannot parse vector {text!r}; expected a,b,c") from None
    if len(vals) != 3:
        raise BadParams(f"vector {text!r} must have three components")
    return vals


def _load_surface(spec):
    if spec is None:
        raise UsageError("--surface is required")
    if spec in ("hyperboloid", "spacelike_graph", "spacelike_revolution"):
        return builtin_surface(spec)
    return surface_from_spec(spec)


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise BadParams(f"{path}: invalid JSON ({exc})") from None


# -- commands -------------------------------------------------------------------

def cmd_check_surface(args) -> int:
    S = _load_surface(args.surface)
    rep = verify_spacelike(S, args.grid_n)
    doc = {"surface": S.to_spec(), "report": rep.to_dict()}
    _emit(dumps(doc), args.output)
    if not rep.passed:
        log.error("surface is not spacelike: %s", rep.failure)
        return EXIT_GEOMETRY
    return EXIT_OK


def cmd_extract(args) -> int:
    if args.axis_kind is None or args.d is None or args.theta is None:
        raise UsageError("extract requires --axis-kind, --d and --theta")
    S = _load_surface(args.surface)
    axis = make_axis(_parse_vec(args.d), args.axis_kind, args.theta)
    polys = extract_isophotes(S, axis, grid_n=args.grid_n, refine_tol=args.refine_tol,
                              n_out=args.n_out)
    doc = polylines_document(axis, polys, S)
    if not polys:
        lo, hi = field_range(S, axis.d, args.grid_n)
        doc["field_range"] = [lo, hi]
        log.warning("level %.17g not attained; <N,d> ranges over [%.6g, %.6g]", axis.level, lo, hi)
    _emit(dumps(doc), args.output)
    if args.svg:
        Path(args.svg).write_text(contours_svg(S, polys))
    if args.csv:
        for k, p in enumerate(polys):
            write_curve_csv(p.trace, f"{args.csv}_{k}.csv")
    return EXIT_OK


def _curves_from_input(args, S):
    """Surface curves from a polyline document or a curve CSV."""
    if args.curve:
        s, pts = read_curve_csv(args.curve)
        closed = bool(args.closed)
        if closed and np.linalg.norm(pts[0] - pts[-1]) <= 1e-12 * (1 + np.abs(pts).max()):
            pts = pts[:-1]
        uv = locate_on_surface(S, pts)
        return [surface_curve(S, uv, closed=closed, n_out=args.n_out)]
    doc = _load_json(args.input)
    try:
        paths, closed = doc["paths"], doc.get("closed") or [False] * len(doc["paths"])
    except (KeyError, TypeError):
        raise BadParams("polyline document needs a 'paths' list") from None
    return [surface_curve(S, np.asarray(p, float), closed=bool(c), n_out=args.n_out)
            for p, c in zip(paths, closed)]


def _kind_from(args):
    if args.axis_kind:
        return args.axis_kind
    if args.input:
        doc = _load_json(args.input)
        kind = (doc.get("axis") or {}).get("kind")
        if kind:
            return kind
    raise UsageError("--axis-kind is required")


def _surface_for(args):
    if args.surface is None and args.input:
        doc = _load_json(args.input)
        if "surface" in doc:
            return surface_from_spec(doc["surface"])
    return _load_surface(args.surface)


def cmd_axis(args) -> int:
    if not (args.input or args.curve):
        raise UsageError("axis requires --input (polyline JSON) or --curve (CSV)")
    S = _surface_for(args)
    kind = _kind_from(args)
    cv_tol = args.cv_tol if args.cv_tol is not None else ax.default_cv_tol(S)
    results, status = [], EXIT_OK
    for curve in _curves_from_input(args, S):
        dx = darboux_apparatus(curve)
        try:
            rep = ax.reconstruct_axis(dx, kind, cv_tol=cv_tol)
        except NotAnIsophote as exc:
            results.append({"error": type(exc).__name__, "message": str(exc),
                            "constancy_cv": ax.constancy_cv(ax.psi_function(dx)[np.isfinite(ax.psi_function(dx))])})
            status = EXIT_NOT_ISOPHOTE
            continue
        out = rep.to_dict(verbose=args.verbose)
        out["verify_axis_constant"] = ax.verify_axis_constant(rep, args.tol)
        out["per_sample"] = ax.per_sample_checks(dx, rep)
        out["angle_consistency"] = {k: v for k, v in ax.angle_consistency(dx, kind, rep.theta_hat).items()
                                    if k != "theta_samples"}
        out["gauss_image"] = ax.gauss_image_check(dx, rep)
        results.append(out)
    _emit(dumps({"reports": results}), args.output)
    return status


def cmd_analyze(args) -> int:
    if not args.curve:
        raise UsageError("analyze requires --curve (CSV)")
    S = _load_surface(args.surface)
    curve = _curves_from_input(args, S)[0]
    dx = darboux_apparatus(curve)
    rows = darboux_to_rows(dx)
    if args.darboux_csv:
        cols = list(rows[0])
        lines = [",".join(cols)] + [",".join(repr(float(r[c])) for c in cols) for r in rows]
        Path(args.darboux_csv).write_text("\n".join(lines) + "\n")
    try:
        fr = frenet_apparatus(curve.trace)
        rel = relation_check(dx, fr)
    except GeometryError as exc:
        fr, rel = None, {"error": type(exc).__name__, "message": str(exc)}
    doc = {"relations": rel, "n_samples": len(dx), "length": curve.trace.length}
    kinds = [args.axis_kind] if args.axis_kind else [TIMELIKE, SPACELIKE]
    status = EXIT_OK
    doc["isophote"] = {}
    for kind in kinds:
        try:
            rep = ax.reconstruct_axis(dx, kind, cv_tol=args.cv_tol or ax.default_cv_tol(S))
        except NotAnIsophote as exc:
            doc["isophote"][kind] = {"error": type(exc).__name__, "message": str(exc)}
            if args.axis_kind:
                status = EXIT_NOT_ISOPHOTE
            continue
        cls = ax.classify(dx, fr, rep)
        doc["isophote"][kind] = {"axis": rep.to_dict(), **cls}
    _emit(dumps(doc), args.output)
    return status


def fixture_documents() -> dict:
    """Builtin hyperboloid fixtures with their closed-form expected values."""
    c1 = math.cosh(1.0)
    s1 = math.sinh(1.0)
    return {
        "hyperboloid.json": {"kind": "builtin", "name": "hyperboloid"},
        "hyperboloid_expr.json": {"kind": "expr",
                                  "components": "cosh(u), sinh(u)*cos(v), sinh(u)*sin(v)",
                                  "domain": [0.1, 2.0, -math.pi, math.pi], "periodic": [False, True]},
        "expected.json": {
            "latitude": {"axis": [1.0, 0.0, 0.0], "kind": TIMELIKE, "theta": 1.0, "u": 1.0,
                         "k_n": 1.0, "k_g": c1 / s1, "tau_g": 0.0, "kappa": 1.0 / s1,
                         "epsilon": 1, "psi": c1 / s1, "level": -c1, "length": 2 * math.pi * s1},
            "meridian": {"axis": [1.0, 0.0, 0.0], "kind": TIMELIKE, "v": 0.0,
                         "k_n": 1.0, "k_g": 0.0, "tau_g": 0.0, "expect": "NotAnIsophote"},
            "spacelike_section": {"axis": [0.0, 1.0, 0.0], "kind": SPACELIKE, "theta": 0.5,
                                  "level": math.sinh(0.5), "omega_abs": math.tanh(0.5),
                                  "k_n": 1.0, "tau_g": 0.0, "epsilon": -1},
        },
    }


def cmd_fixtures(args) -> int:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, doc in fixture_documents().items():
        (out / name).write_text(dumps(doc))
    s1 = math.sinh(1.0)
    lat = arclength_resample(
        np.stack([np.full(512, math.cosh(1.0)), s1 * np.cos(np.linspace(0, 2 * np.pi, 512, endpoint=False)),
                  s1 * np.sin(np.linspace(0, 2 * np.pi, 512, endpoint=False))], axis=1), 512, closed=True)
    write_curve_csv(lat, out / "latitude.csv")
    u = np.linspace(0.3, 1.8, 400)
    mer = arclength_resample(np.stack([np.cosh(u), np.sinh(u), 0 * u], axis=1), 400, closed=False)
    write_curve_csv(mer, out / "meridian.csv")
    return EXIT_OK


# -- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lmisophote", description="Isophote curves on spacelike surfaces in Minkowski 3-space")
    p.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, surface_required=False):
        sp.add_argument("--surface", required=surface_required,
                        help="surface spec JSON file/text or a builtin name")
        sp.add_argument("--output", "-o", help="output file (default stdout)")

    sp = sub.add_parser("check-surface", help="verify the induced metric is Riemannian")
    common(sp, True)
    sp.add_argument("--grid-n", type=int, default=64)
    sp.set_defaults(func=cmd_check_surface)

    sp = sub.add_parser("extract", help="extract isophotes as polylines")
    common(sp, True)
    sp.add_argument("--axis-kind", choices=[TIMELIKE, SPACELIKE])
    sp.add_argument("--d", help="axis vector a,b,c")
    sp.add_argument("--theta", type=float)
    sp.add_argument("--grid-n", type=int, default=256)
    sp.add_argument("--refine-tol", type=float, default=1e-8)
    sp.add_argument("--n-out", type=int, default=1024, help="trace samples per polyline")
    sp.add_argument("--svg", help="write parameter-domain contours to this SVG file")
    sp.add_argument("--csv", help="write traces to PREFIX_k.csv")
    sp.set_defaults(func=cmd_extract)

    for name, func, hlp in (("axis", cmd_axis, "reconstruct and verify the isophote axis"),
                            ("analyze", cmd_analyze, "Darboux data and classification of a curve")):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        sp.add_argument("--input", help="polyline JSON written by 'extract'")
        sp.add_argument("--curve", help="curve CSV (s,x1,x2,x3) lying on the surface")
        sp.add_argument("--closed", action="store_true", help="treat the CSV curve as closed")
        sp.add_argument("--axis-kind", choices=[TIMELIKE, SPACELIKE])
        sp.add_argument("--cv-tol", type=float, default=None)
        sp.add_argument("--n-out", type=int, default=1024)
        sp.set_defaults(func=func)
        if name == "axis":
            sp.add_argument("--tol", type=float, default=1e-3, help="verify_axis_constant tolerance")
            sp.add_argument("--verbose", action="store_true", help="include per-sample arrays")
        else:
            sp.add_argument("--darboux-csv", help="write per-sample Darboux data here")

    sp = sub.add_parser("fixtures", help="write hyperboloid fixtures and expected values")
    sp.add_argument("--output-dir", required=True)
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotAnIsophote as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NOT_ISOPHOTE
    except (SilhouetteUndefined, BadParams, UnknownSurface, ExprError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GeometryError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
