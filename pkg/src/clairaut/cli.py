"""Command-line front end.

Exit status: 0 success, 1 a check failed, 2 usage or input error. Errors go
to stderr as one JSON object per line. Files are written atomically.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from importlib import resources

import jsonschema
import numpy as np

from . import analysis, catalog, envelope, io, verify
from .errors import ClairautError, ParseError, SpecError, UnknownEntry
from .exprlang import Expr, as_expr
from .families import FunctionOfA, ImplicitRelation, InverseMap, ParametricCurve, enumerate_branches
from .numerics import DEFAULT, ToleranceConfig

OUT_DIR_ENV = "CLAIRAUT_OUT_DIR"
DEFAULT_OUT_DIR = "catalog_out"

GRAMMAR = """\
expression grammar:
  expr   := term (('+' | '-') term)*
  term   := unary (('*' | '/') unary)*
  unary  := '-' unary | power
  power  := atom ('^' unary)?          right associative, -a^2 = -(a^2)
  atom   := number | name | func '(' expr ')' | '(' expr ')'
  func   := sqrt | sin | cos | ln | exp
ranges are lo:hi:count with both endpoints included."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ helpers


def parse_range(text: str) -> list[float]:
    """``lo:hi:count`` -> count evenly spaced values, endpoints included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise SpecError(f"range {text!r} is not lo:hi:count")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise SpecError(f"range {text!r} is not lo:hi:count") from None
    return _range_values(lo, hi, n, text)


def _range_values(lo, hi, n, label):
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise SpecError(f"range {label!r} needs finite ends and count >= 1")
    if n == 1:
        if lo != hi:
            raise SpecError(f"range {label!r} with one point needs lo == hi")
        return [float(lo)]
    return [float(v) for v in np.linspace(lo, hi, n)]


def _interval(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise SpecError(f"interval {text!r} is not lo:hi")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError:
        raise SpecError(f"interval {text!r} is not lo:hi") from None


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise SpecError(f"{text!r} is not a comma separated list of numbers") from None


def _expr_in(text, allowed, what):
    e = as_expr(text)
    extra = set(e.free_vars) - set(allowed)
    if extra:
        raise SpecError(f"{what} may only use {', '.join(allowed)}; found {', '.join(sorted(extra))}")
    return Expr(e.root, tuple(allowed))


def _cfg(args) -> ToleranceConfig:
    changes = {k: getattr(args, k) for k in ("fd_step", "root_tol", "residual_tol", "quad_panels")
               if getattr(args, k, None) is not None}
    try:
        return DEFAULT.with_(**changes)
    except ValueError as exc:
        raise SpecError(str(exc)) from None


def _emit_error(kind, exc, **extra):
    rec = {"error": kind, "message": str(exc)}
    rec.update(extra)
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")


def _write_or_print(path, text):
    if path:
        io.atomic_write(path, text)
    else:
        sys.stdout.write(text)


def load_schema() -> dict:
    return json.loads(resources.files("clairaut").joinpath("schema/family_spec.json").read_text("utf-8"))


def load_spec(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON: {exc}") from None
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SpecError(f"{path}: {where}: {exc.message}") from None
    return doc


# ----------------------------------------------------------------- envelope


def _spec_from_args(args) -> dict:
    """Fold the envelope flags into the same shape as a FamilySpec document."""
    kinds = [k for k, flag in (("function", args.phi), ("implicit", args.relation),
                               ("parametric", args.param_a or args.param_b),
                               ("inverse_map", args.map_a or args.map_b)) if flag]
    if len(kinds) != 1:
        raise SpecError("give exactly one of --phi, --relation, --param-a/--param-b, --map-a/--map-b, or --spec")
    kind = kinds[0]
    con = {"kind": kind}
    if kind == "function":
        con["expr"] = args.phi
    elif kind == "implicit":
        con.update(expr=args.relation, a_domain=_interval(args.a_domain or "0:1"),
                   b_domain=_interval(args.b_domain or "0:1"),
                   a_samples=args.branch_samples, b_samples=args.b_samples)
        if not (args.a_domain and args.b_domain):
            raise SpecError("--relation needs --a-domain and --b-domain")
    elif kind == "parametric":
        if not (args.param_a and args.param_b):
            raise SpecError("--param-a and --param-b go together")
        con.update(expr=[args.param_a, args.param_b],
                   theta_domain=_interval(args.theta_domain or f"{-math.pi}:{math.pi}"),
                   excluded=_floats(args.exclude or ""), exclusion_radius=args.exclusion_radius)
        if args.period is not None:
            con["period"] = args.period
    else:
        if not (args.map_a and args.map_b):
            raise SpecError("--map-a and --map-b go together")
        con.update(expr=[args.map_a, args.map_b],
                   xy_domain=[_interval(args.x_domain or "-inf:inf"), _interval(args.y_domain or "-inf:inf")])
    grid = {}
    for key in ("a", "y", "x", "theta"):
        text = getattr(args, f"{key}_range")
        if text:
            grid[key] = text
    if args.s_grid:
        grid["s"] = _floats(args.s_grid)
    return {"constraint": con, "grid": grid, "output": {"csv": args.out, "json": args.json}}


def _grid(doc, key, required_for):
    spec = doc["grid"].get(key)
    if spec is None:
        raise SpecError(f"{required_for} needs a {key} range")
    if isinstance(spec, str):
        return parse_range(spec)
    return _range_values(spec[0], spec[1], spec[2], key)


def build_surface(doc, cfg):
    con = doc["constraint"]
    kind = con["kind"]
    if kind == "function":
        c = FunctionOfA.from_expr(_expr_in(con["expr"], ("a",), "phi"),
                                  tuple(con.get("a_domain", (-math.inf, math.inf))), cfg)
        return envelope.envelope_function_constraint(None, c, _grid(doc, "a", "phi"),
                                                     _grid(doc, "y", "phi"), cfg)
    if kind == "implicit":
        e = _expr_in(con["expr"], ("a", "b"), "relation")
        rel = ImplicitRelation(lambda a, b: e.eval({"a": a, "b": b}), tuple(con["a_domain"]),
                               tuple(con["b_domain"]), e)
        branches = enumerate_branches(rel, con.get("a_samples", 101), con.get("b_samples", 401), cfg)
        xy = [(x, y) for x in _grid(doc, "x", "relation") for y in _grid(doc, "y", "relation")]
        pts, diag = [], {}
        for k, br in enumerate(branches):
            s = envelope.envelope_branch(None, br, xy, cfg)
            pts.extend(s.points)
            diag[f"branch_{k}"] = {"a_interval": list(br.a_interval),
                                   "skipped": len(s.diagnostics.get("skipped", []))}
        return envelope.SampledSurface(pts, "implicit relation", diag)
    if kind == "parametric":
        ea = _expr_in(con["expr"][0], ("theta",), "a(theta)").function("theta")
        eb = _expr_in(con["expr"][1], ("theta",), "b(theta)").function("theta")
        curve = ParametricCurve(lambda t: (ea(t), eb(t)), tuple(con["theta_domain"]),
                                tuple(con.get("excluded", ())), con.get("exclusion_radius", 1e-3),
                                con.get("period"))
        s_grid = doc["grid"].get("s", envelope.DEFAULT_S_GRID)
        return envelope.envelope_parametric_planes(None, curve, _grid(doc, "theta", "parametric"),
                                                   s_grid, cfg)
    ma = _expr_in(con["expr"][0], ("x", "y"), "m1(x, y)")
    mb = _expr_in(con["expr"][1], ("x", "y"), "m2(x, y)")

    def m(x, y):
        b = {"x": x, "y": y}
        return ma.eval(b), mb.eval(b)

    dom = tuple(tuple(v) for v in con["xy_domain"])
    (xlo, xhi), (ylo, yhi) = dom
    xy = [(x, y) for x in _grid(doc, "x", "inverse map") for y in _grid(doc, "y", "inverse map")]
    outside = [p for p in xy if not (xlo <= p[0] <= xhi and ylo <= p[1] <= yhi)]
    if outside:
        raise SpecError(f"grid point {outside[0]} lies outside xy_domain {dom}")
    return envelope.envelope_inverse_map(None, InverseMap(m, dom), xy, cfg)


def cmd_envelope(args):
    if args.spec:
        doc = load_spec(args.spec)
        cfg = DEFAULT.with_(**doc.get("tolerances", {}))
        cfg = _cfg_override(cfg, args)
        out = doc.get("output", {})
        csv_path = args.out or out.get("csv")
        json_path = args.json or out.get("json")
    else:
        doc = _spec_from_args(args)
        cfg = _cfg(args)
        csv_path, json_path = args.out, args.json
    surf = build_surface(doc, cfg)
    accepted = surf.accepted
    summary = {"source": surf.source, "points": len(surf.points), "accepted": len(accepted),
               "rejected": len(surf.points) - len(accepted),
               "skipped": {k: len(v) for k, v in surf.diagnostics.items() if isinstance(v, list)}}
    if json_path:
        io.atomic_write(json_path, io.dumps({"summary": summary, "points": io.surface_records(surf.points)}))
    _write_or_print(csv_path, io.surface_csv(surf.points))
    if csv_path:
        sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return 0 if accepted else 1


def _cfg_override(cfg, args):
    changes = {k: getattr(args, k) for k in ("fd_step", "root_tol", "residual_tol", "quad_panels")
               if getattr(args, k, None) is not None}
    try:
        return cfg.with_(**changes)
    except ValueError as exc:
        raise SpecError(str(exc)) from None


# ------------------------------------------------------------------- verify


def _read_points(path):
    try:
        return io.read_points(path)
    except (KeyError, ValueError) as exc:
        raise SpecError(f"{path}: {exc}") from None


def cmd_verify(args):
    cfg = _cfg(args)
    result = {}
    ok = True
    if args.implicit:
        if not args.points:
            raise SpecError("--implicit needs --points")
        level = verify.ImplicitLevelSet.from_expr(_expr_in(args.implicit, ("x", "y", "z"), "F"))
        pts = _read_points(args.points)
        if args.check in ("membership", "both"):
            rep = verify.implicit_membership(level, pts)
            tol = args.tol if args.tol is not None else 1e-8
            result["membership"] = dict(rep.to_dict(), tol=tol, passed=rep.passed(tol))
            ok &= rep.passed(tol)
        if args.check in ("clairaut", "both"):
            rep = verify.implicit_report(level, pts, cfg)
            tol = args.tol if args.tol is not None else 1e-7
            result["clairaut"] = dict(rep.to_dict(), tol=tol, passed=rep.passed(tol))
            ok &= rep.passed(tol)
    elif args.explicit:
        dom = (_interval(args.x_domain or "0.5:2"), _interval(args.y_domain or "0.5:2"))
        graph = verify.ExplicitGraph.from_expr(_expr_in(args.explicit, ("x", "y"), "h"), dom)
        tilt = None
        if args.tilt:
            k = _expr_in(args.tilt, ("a", "b"), "k(a, b)")

            def tilt(p, q):
                return k.eval({"a": p, "b": q})

        rep = verify.explicit_report(graph, verify.interior_grid(dom, args.grid), tilt, cfg)
        tol = args.tol if args.tol is not None else 1e-7
        result["clairaut"] = dict(rep.to_dict(), tol=tol, passed=rep.passed(tol))
        ok &= rep.passed(tol)
        if args.degree is not None:
            h = verify.homogeneity_check(graph, args.degree)
            result["homogeneity"] = {"degree": h.degree, "max_rel_error": h.max_rel_error,
                                     "n_checked": h.n_checked, "passed": h.passed()}
            ok &= h.passed()
    else:
        raise SpecError("give --implicit with --points, or --explicit")
    result["passed"] = bool(ok)
    _write_or_print(args.out, io.dumps(result))
    return 0 if ok else 1


# ----------------------------------------------------------------- classify


def cmd_classify(args):
    cfg = _cfg(args)
    fe = _expr_in(args.family, ("x", "y", "a"), "f(x, y, a)")

    def f(x, y, a):
        return fe.eval({"x": x, "y": y, "a": a})

    cands = []
    for text in args.at or ():
        v = _floats(text)
        if len(v) != 3:
            raise SpecError(f"--at {text!r} must be x,y,a")
        cands.append(((v[0], v[1]), v[2]))
    if args.candidates:
        import csv
        with open(args.candidates, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                try:
                    cands.append(((float(row["x"]), float(row["y"])), float(row["param"])))
                except KeyError:
                    raise SpecError(f"{args.candidates}: needs x, y, param columns") from None
    if not cands:
        raise SpecError("no candidates: use --at x,y,a or --candidates FILE")
    out = analysis.classify_locus(f, cands, cfg, args.window)
    _write_or_print(args.out, io.dumps([c.to_dict() for c in out]))
    if args.expect:
        return 0 if all(c.label.value == args.expect for c in out) else 1
    return 0


# ------------------------------------------------------------ cross-section


def cmd_cross_section(args):
    pts = _read_points(args.points)
    params = io.read_column(args.points, "param")
    if params is not None:
        pts = [envelope.EnvelopePoint(p, t, math.nan, math.nan) for p, t in zip(pts, params)]
    sec = envelope.cross_section_z1(pts, args.eps)
    _write_or_print(args.out, io.points2d_csv(sec.points, sec.params))
    summary = {"points": len(sec), "dropped": sec.dropped}
    if args.witness:
        w = analysis.detect_multivalued(sec.points, args.angle_tol)
        summary["witness"] = None if w is None else {
            "p": list(w.p), "q": list(w.q), "angle_gap": w.angle_gap, "radius_ratio": w.radius_ratio}
    if args.out:
        sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return 0


# ------------------------------------------------------------------ catalog


def _params(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise SpecError(f"--param {item!r} is not key=value")
        k, v = item.split("=", 1)
        if k == "alphas":
            out[k] = tuple(_floats(v))
        else:
            out[k] = v
    return out


def cmd_catalog(args):
    if args.list:
        for name in catalog.list_entries():
            sys.stdout.write(name + "\n")
        return 0
    cfg = _cfg(args)
    names = catalog.list_entries() if args.run_all else args.run
    if not names:
        raise SpecError("catalog needs --list, --run NAME or --run-all")
    params = _params(args.param)
    if params and len(names) != 1:
        raise SpecError("--param applies to a single --run entry")
    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR
    failed = 0
    for name in names:
        try:
            entry = catalog.get(name, **params)
        except TypeError as exc:
            raise SpecError(str(exc)) from None
        rep = entry.run(cfg)
        catalog.write_artifacts(rep, out_dir)
        n_ok = sum(c.passed for c in rep.checks)
        status = "PASS" if rep.passed else "FAIL"
        sys.stdout.write(f"{status} {name} ({n_ok}/{len(rep.checks)} checks)\n")
        for c in rep.failed():
            sys.stdout.write(f"    failed: {c.name}: {c.value:.6g} > {c.tol:.3g}\n")
        failed += not rep.passed
    return 1 if failed else 0


# ------------------------------------------------------------------- parser


def _tolerance_parent():
    p = _Parser(add_help=False)
    g = p.add_argument_group("tolerances")
    g.add_argument("--fd-step", type=float, help="relative finite-difference step (1e-6)")
    g.add_argument("--root-tol", type=float, help="root finder tolerance (1e-12)")
    g.add_argument("--residual-tol", type=float, help="acceptance tolerance on |f| (1e-8)")
    g.add_argument("--quad-panels", type=int, help="Simpson panels, even (400)")
    return p


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = _Parser(prog="clairaut", description="Envelopes of z = a x + b y and checks on them.",
                     epilog=GRAMMAR, formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    tol = _tolerance_parent()

    p = sub.add_parser("envelope", parents=[tol], help="sample the envelope of a constrained family",
                       epilog=GRAMMAR, formatter_class=fmt)
    p.add_argument("--spec", help="FamilySpec JSON file (see docs/family_spec.schema.json)")
    p.add_argument("--phi", help="b = phi(a)")
    p.add_argument("--relation", help="rel(a, b) = 0")
    p.add_argument("--param-a", help="a(theta)")
    p.add_argument("--param-b", help="b(theta)")
    p.add_argument("--map-a", help="a = m1(x, y)")
    p.add_argument("--map-b", help="b = m2(x, y)")
    p.add_argument("--a-range", help="lo:hi:count grid in a")
    p.add_argument("--y-range", help="lo:hi:count grid in y")
    p.add_argument("--x-range", help="lo:hi:count grid in x")
    p.add_argument("--theta-range", help="lo:hi:count grid in theta")
    p.add_argument("--s-grid", help="comma separated ray scales (-2,-1,-0.5,0.5,1,2)")
    p.add_argument("--a-domain", help="lo:hi for a (relation)")
    p.add_argument("--b-domain", help="lo:hi for b (relation)")
    p.add_argument("--branch-samples", type=int, default=101, help="a samples for branch enumeration")
    p.add_argument("--b-samples", type=int, default=401, help="b samples for branch enumeration")
    p.add_argument("--theta-domain", help="lo:hi for theta")
    p.add_argument("--exclude", help="comma separated excluded theta values")
    p.add_argument("--exclusion-radius", type=float, default=1e-3)
    p.add_argument("--period", type=float, help="period of theta, for exclusions")
    p.add_argument("--x-domain", help="lo:hi for x (inverse map)")
    p.add_argument("--y-domain", help="lo:hi for y (inverse map)")
    p.add_argument("--out", help="CSV output (stdout when absent)")
    p.add_argument("--json", help="JSON output")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("verify", parents=[tol], help="residual checks on a surface",
                       epilog=GRAMMAR, formatter_class=fmt)
    p.add_argument("--implicit", help="F(x, y, z) = 0")
    p.add_argument("--points", help="CSV with x, y, z columns")
    p.add_argument("--check", choices=("membership", "clairaut", "both"), default="membership")
    p.add_argument("--explicit", help="z = h(x, y)")
    p.add_argument("--x-domain", help="lo:hi (0.5:2)")
    p.add_argument("--y-domain", help="lo:hi (0.5:2)")
    p.add_argument("--grid", type=int, default=20, help="interior grid side (20)")
    p.add_argument("--tilt", help="k(a, b) of z = a x + b y + k(a, b)")
    p.add_argument("--degree", type=float, help="also check homogeneity of this degree")
    p.add_argument("--tol", type=float, help="pass threshold on max_abs")
    p.add_argument("--out", help="JSON output (stdout when absent)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[tol], help="label discriminant points of a curve family",
                       epilog=GRAMMAR, formatter_class=fmt)
    p.add_argument("--family", required=True, help="f(x, y, a)")
    p.add_argument("--at", action="append", help="candidate x,y,a (repeatable)")
    p.add_argument("--candidates", help="CSV with x, y, param columns")
    p.add_argument("--window", type=float, default=0.1)
    p.add_argument("--expect", choices=[lbl.value for lbl in analysis.Label],
                   help="exit 1 unless every label equals this")
    p.add_argument("--out", help="JSON output (stdout when absent)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("cross-section", help="rescale points to z = 1")
    p.add_argument("--points", required=True, help="CSV with x, y, z columns")
    p.add_argument("--eps", type=float, default=1e-12, help="drop points with |z| <= eps")
    p.add_argument("--witness", action="store_true", help="search for a multivalued witness")
    p.add_argument("--angle-tol", type=float, default=1e-3)
    p.add_argument("--out", help="CSV output (stdout when absent)")
    p.set_defaults(func=cmd_cross_section)

    p = sub.add_parser("catalog", parents=[tol], help="run the built-in examples")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true")
    g.add_argument("--run", action="append", metavar="NAME")
    g.add_argument("--run-all", action="store_true")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="entry parameter, e.g. H=1+t^2 for euler_generator")
    p.add_argument("--out-dir", help=f"artifact directory (${OUT_DIR_ENV} or {DEFAULT_OUT_DIR})")
    p.set_defaults(func=cmd_catalog)
    return parser


_NEGATIVE = re.compile(r"^-[0-9.]")


def _glue_negative_values(argv):
    """Rewrite '--opt -0.5:2' as '--opt=-0.5:2' so argparse keeps the value."""
    out = []
    for tok in argv:
        if out and _NEGATIVE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_negative_values(argv))
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required: envelope, verify, classify, cross-section, catalog")
        return args.func(args)
    except UsageError as exc:
        _emit_error("UsageError", exc)
        return 2
    except ParseError as exc:
        _emit_error(type(exc).__name__, exc, offset=exc.offset, expected=list(exc.expected))
        return 2
    except (SpecError, UnknownEntry, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, UnknownEntry) and exc.args else exc
        _emit_error(type(exc).__name__, msg)
        return 2
    except OSError as exc:
        _emit_error("OSError", exc)
        return 2
    except ClairautError as exc:
        _emit_error(type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
