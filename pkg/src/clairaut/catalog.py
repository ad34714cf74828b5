"""Named, runnable reproductions of the worked examples.

Each entry bundles a family, a constraint and an expected surface with a
battery of checks. ``run(name)`` executes the battery and returns a
:class:`Report`; ``write_artifacts`` stores its points (CSV) and check
records (JSON). Entries built on plane curves rather than planes
(``parabola_family``, ``goursat_quartic``) write their points with z = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import analysis, envelope, io, numerics, verify
from .envelope import EnvelopePoint, SampledSurface
from .errors import UnknownEntry, VerticalTangent
from .exprlang import BinOp, Call, Expr, Var, parse, substitute
from .families import (FunctionOfA, ImplicitRelation, InverseMap, ParametricCurve, PlaneFamily,
                       enumerate_branches)
from .numerics import DEFAULT, ToleranceConfig

SCALES = (0.5, 2.0, -1.0)
CLOSURE_POINTS = 100


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "value": self.value,
                "tol": self.tol, "detail": self.detail}


@dataclass
class Report:
    name: str
    checks: list
    points: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "n_points": len(self.points),
                "checks": [c.to_dict() for c in self.checks], "data": self.data}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    family: Any
    constraint: Any
    expected: Any
    notes: str
    battery: Callable = field(repr=False, compare=False)
    params: dict = field(default_factory=dict)

    def run(self, cfg: ToleranceConfig = DEFAULT) -> Report:
        report = Report(self.name, [])
        self.battery(self, report, cfg)
        return report


def _le(name, value, tol, detail=""):
    value = float(value)
    return Check(name, bool(value <= tol), value, float(tol), detail)


def _flag(name, ok, detail=""):
    return Check(name, bool(ok), 1.0 if ok else 0.0, 1.0, detail)


def _max(vals):
    vals = list(vals)
    return max(vals) if vals else math.inf


def _closure(surface: SampledSurface, cfg, scales=SCALES, n=CLOSURE_POINTS):
    """Worst ratio residual(s p) / tolerance over evenly strided accepted points."""
    pts = surface.accepted
    if not pts:
        return math.inf
    idx = np.unique(np.linspace(0, len(pts) - 1, min(n, len(pts))).round().astype(int))
    worst = 0.0
    for i in idx:
        pt = pts[int(i)]
        for s in scales:
            q = tuple(s * c for c in pt.p)
            fres, sres = surface.residuals(q, pt.param)
            m = max(1.0, abs(s))
            worst = max(worst, fres / (m * cfg.residual_tol), sres / (m * envelope.STATIONARITY_TOL))
    return worst


def _closure_check(surface, cfg):
    return _le("scaling closure s in {0.5, 2, -1}", _closure(surface, cfg), 1.0,
               "max residual(s p) / tolerance")


def _explicit_check(label, graph, cfg, tol=1e-7):
    rep = verify.explicit_report(graph, verify.interior_grid(graph.domain), cfg=cfg)
    ok = rep.passed(tol) and rep.n_evaluated == 400
    return Check(f"clairaut residual {label}", bool(ok), rep.max_abs, tol,
                 f"{rep.n_evaluated} interior points")


def _membership_check(label, level, points, tol=1e-8):
    rep = verify.implicit_membership(level, points)
    return Check(f"membership {label}", bool(rep.passed(tol)), rep.max_abs, tol,
                 f"{rep.n_evaluated} points")


def _implicit_check(label, level, points, cfg, tol=1e-7):
    rep = verify.implicit_report(level, points, cfg)
    vertical = sum(1 for _, why in rep.skipped if why.startswith("VerticalTangent"))
    other = rep.n_skipped - vertical
    ok = rep.passed(tol) and other == 0
    return Check(f"implicit clairaut residual {label}", bool(ok), rep.max_abs, tol,
                 f"{rep.n_evaluated} points, {vertical} near |F_z| <= 1e-6 skipped")


def _accepted_all(surface, label):
    n, k = len(surface.points), len(surface.accepted)
    return _flag(f"{label}: all points accepted", n > 0 and k == n, f"{k}/{n}")


def _curve_point(f, x, y, a, cfg):
    return EnvelopePoint((float(x), float(y), 0.0), float(a), abs(f(x, y, a)),
                         abs(numerics.diff_central(lambda t: f(x, y, t), a, cfg)))


# ------------------------------------------------------------- the spline

SPLINE_KNOTS = (0.0, 1.0, 2.0, 3.0, 4.0)
SPLINE_PIECES = (
    "((a-1)^2 - 1)^2",
    "0.5*((a-1)^2 - 1)^2 + 0.5",
    "0.5*((a-3)^2 - 1)^2 + 0.5",
    "((a-3)^2 - 1)^2",
)
SPLINE_INTEGRAL = 2.6
_PIECE_FNS = tuple(parse(s).function("a") for s in SPLINE_PIECES)


def spline_piece(k: int, a: float) -> float:
    return _PIECE_FNS[k](a)


def spline_phi_prime(a: float) -> float:
    """The bimodal piecewise quartic on [0, 4], zero outside."""
    if a < 0.0 or a > 4.0:
        return 0.0
    k = min(int(a), 3)
    return _PIECE_FNS[k](a)


class SplinePhi:
    """phi(a) = integral of the spline from 0 (so phi(0) = 0).

    Full pieces are integrated once; the partial piece [knot, a] is its own
    Simpson integral, so phi is smooth in a between knots.
    """

    def __init__(self, cfg: ToleranceConfig = DEFAULT):
        self.cfg = cfg
        self.piece_integrals = tuple(
            numerics.integrate(_PIECE_FNS[k], SPLINE_KNOTS[k], SPLINE_KNOTS[k + 1], cfg)
            for k in range(4))

    def __call__(self, a: float) -> float:
        a = float(a)
        if a <= 0.0:
            return 0.0
        if a >= 4.0:
            return sum(self.piece_integrals)
        k = min(int(a), 3)
        head = sum(self.piece_integrals[:k])
        if a == SPLINE_KNOTS[k]:
            return head
        return head + numerics.integrate(_PIECE_FNS[k], SPLINE_KNOTS[k], a, self.cfg)


def spline_constraint(cfg: ToleranceConfig = DEFAULT) -> FunctionOfA:
    return FunctionOfA(SplinePhi(cfg), spline_phi_prime, (0.0, 4.0), cfg)


# -------------------------------------------------------------- batteries


def _parabola(entry, rep, cfg):
    f = entry.family
    cs = np.linspace(-2.0, 2.0, 21)
    cands = [((-c, 0.0), c) for c in cs]
    labels = analysis.classify_locus(f, cands, cfg)
    n_env = sum(1 for c in labels if c.label is analysis.Label.ENVELOPE)
    rep.checks.append(_le("y = 0 classified Envelope", len(labels) - n_env, 0,
                          f"{n_env}/{len(labels)}"))
    # members and the envelope both satisfy y'^2 = 4 y
    worst = 0.0
    for c in cs:
        for x in np.linspace(-3.0, 3.0, 13):
            slope = numerics.diff_central(lambda t: (t + c) ** 2, x, cfg)
            worst = max(worst, abs(slope ** 2 - 4 * (x + c) ** 2))
    rep.checks.append(_le("members satisfy y'^2 = 4y", worst, 1e-6))
    rep.points = [_curve_point(f, x, y, a, cfg) for (x, y), a in cands]


def _hyperbola(entry, rep, cfg):
    f = entry.family
    rel = entry.constraint
    branches = enumerate_branches(rel, 120, 401, cfg)
    rep.checks.append(_le("relation ab = 1 has one branch", abs(len(branches) - 1), 0))
    xs = np.linspace(0.1, 10.0, 64)
    surf = envelope.envelope_branch(None, branches[0], [(x, 1.0) for x in xs], cfg)
    sec = envelope.cross_section_z1(surf.accepted)
    rep.checks.append(_le("accepted points", 64 - len(sec), 0, f"{len(sec)} on z = 1"))
    rep.checks.append(_le("|4xy - 1| on z = 1 slice", _max(abs(4 * x * y - 1) for x, y in sec), 1e-8))
    # brute force: the envelope of y = a - a^2 x is the upper boundary
    a_dense = np.linspace(0.0, 6.0, 60001)
    oracle = _max(abs(float(np.max(a_dense - a_dense ** 2 * x)) - 1 / (4 * x)) for x, _ in sec)
    rep.checks.append(_le("max over a of a - a^2 x vs 1/(4x)", oracle, 1e-4))
    # (x, y) = (1, 1) lands on the slice at (0.5, 0.5)
    pt = envelope.envelope_branch(None, branches[0], [(1.0, 1.0)], cfg).accepted
    x_half = pt[0].x / pt[0].z if pt else math.nan
    y_half = pt[0].y / pt[0].z if pt else math.nan
    rep.checks.append(_le("slice point (x, y) = (0.5, 0.5)",
                          abs(x_half - 0.5) + abs(y_half - 0.5) + abs(4 * x_half * y_half - 1), 1e-8))
    labels = analysis.classify_locus(f, [((x, 1 / (4 * x)), 1 / (2 * x)) for x in xs[::4]], cfg)
    bad = sum(1 for c in labels if c.label is not analysis.Label.ENVELOPE)
    rep.checks.append(_le("4xy = 1 classified Envelope", bad, 0))
    rep.checks.append(_closure_check(surf, cfg))
    rep.points = surf.points
    rep.data["cross_section"] = [list(p) for p in sec]


def _goursat(entry, rep, cfg):
    f = entry.family
    cands = [((a, 0.0), a) for a in np.linspace(-2, 2, 50)]
    cands += [((a, s), a) for s in (1.0, -1.0) for a in np.linspace(-2, 2, 25)]
    labels = analysis.classify_locus(f, cands, cfg)
    wrong = 0
    for c in labels:
        want = analysis.Label.SINGULAR_LOCUS if c.p[1] == 0.0 else analysis.Label.ENVELOPE
        wrong += c.label is not want
    rep.checks.append(_le(f"misclassified of {len(labels)}", wrong, 0))
    rep.points = [_curve_point(f, x, y, a, cfg) for (x, y), a in cands]
    rep.data["labels"] = [c.label.value for c in labels]


def _function_battery(entry, rep, cfg, a_grid, y_grid, target, label):
    surf = envelope.envelope_function_constraint(None, entry.constraint, a_grid, y_grid, cfg)
    rep.checks.append(_accepted_all(surf, "envelope"))
    err = _max(abs(p.z - target(p.x, p.y)) / (1 + abs(p.z)) for p in surf.accepted)
    rep.checks.append(_le(f"|z - {label}| / (1 + |z|)", err, 1e-8))
    rep.checks.append(_closure_check(surf, cfg))
    rep.points = surf.points
    return surf


def _witness(entry, surf):
    sec = envelope.cross_section_z1(surf.accepted)
    return analysis.detect_multivalued(sec.points, angle_tol=1e-3)


def _sqrt_xy(entry, rep, cfg):
    a_grid = np.linspace(0.5, 4.0, 32)
    y_grid = np.linspace(0.5, 4.0, 32)
    surf = _function_battery(entry, rep, cfg, a_grid, y_grid,
                             lambda x, y: 2 * math.sqrt(x * y), "2 sqrt(xy)")
    spot = envelope.characteristic_point(entry.constraint, 2.0, 4.0)
    rep.checks.append(_le("(a, y) = (2, 4) gives (1, 4, 4)",
                          max(abs(u - v) for u, v in zip(spot, (1.0, 4.0, 4.0))), 1e-12))
    rep.checks.append(_membership_check("z^2 - 4xy = 0", entry.expected["implicit"], surf.coords()))
    for lbl, g in entry.expected["explicit"].items():
        rep.checks.append(_explicit_check(lbl, g, cfg))
        rep.checks.append(_le(f"homogeneity degree 1 of {lbl}",
                              verify.homogeneity_check(g, 1.0).max_rel_error, 1e-9))
    inv = analysis.invertibility_check(entry.constraint.slope, (0.5, 4.0))
    rep.checks.append(_flag("phi' invertible on [0.5, 4]", inv))
    rep.checks.append(_flag("no multivalued witness", _witness(entry, surf) is None))
    rep.data["projective_curve"] = [list(v) for v in
                                    envelope.projective_curve(entry.constraint, [1.0, 2.0])]


def _power_alpha(entry, rep, cfg):
    for alpha, (c, g) in entry.params["members"].items():
        # a = phi'^-1 of -X for X = x/y in [0.25, 4]
        a_grid = [alpha * X ** (alpha - 1) for X in np.linspace(0.25, 4.0, 24)]
        surf = envelope.envelope_function_constraint(
            None, c, a_grid, np.linspace(0.5, 2.0, 8), cfg)
        rep.checks.append(_accepted_all(surf, f"alpha={alpha} envelope"))
        err = _max(abs(p.z - g(p.x, p.y)) / (1 + abs(p.z)) for p in surf.accepted)
        rep.checks.append(_le(f"alpha={alpha}: |z - x^a y^(1-a)| / (1 + |z|)", err, 1e-8))
        rep.checks.append(_explicit_check(f"x^{alpha} y^{1 - alpha:g}", g, cfg))
        rep.checks.append(_le(f"alpha={alpha}: homogeneity degree 1",
                              verify.homogeneity_check(g, 1.0).max_rel_error, 1e-9))
        rep.checks.append(_closure_check(surf, cfg))
        rep.points.extend(surf.points)


def _euler(entry, rep, cfg):
    g = entry.expected
    rep.checks.append(_explicit_check(g.name, g, cfg))
    rep.checks.append(_le("homogeneity degree 1",
                          verify.homogeneity_check(g, 1.0).max_rel_error, 1e-9))
    grid = verify.interior_grid(g.domain, 8)
    rep.points = [EnvelopePoint((x, y, g(x, y)), math.nan,
                                abs(verify.euler_residual(g, 1.0, (x, y), cfg)), 0.0)
                  for x, y in grid]


def _spline(entry, rep, cfg):
    total = numerics.integrate(spline_phi_prime, 0.0, 4.0, cfg.with_(quad_panels=400))
    rep.checks.append(_le("integral of phi' over [0, 4] - 2.6", abs(total - SPLINE_INTEGRAL), 1e-6))
    knot_err = 0.0
    for k, want in zip((1, 2, 3), (1.0, 0.5, 1.0)):
        knot_err = max(knot_err, abs(spline_piece(k - 1, k) - want), abs(spline_piece(k, k) - want))
    rep.checks.append(_le("knot values (1, 0.5, 1) from both pieces", knot_err, 0.0))
    piece = [sum(entry.constraint.phi.piece_integrals[:k + 1]) for k in range(4)]
    exact = np.cumsum([8 / 15, 23 / 30, 23 / 30, 8 / 15])
    rep.checks.append(_le("cumulative piece integrals", _max(abs(u - v) for u, v in zip(piece, exact)), 1e-9))
    rep.checks.append(_flag("phi' not invertible on [0, 4]",
                            not analysis.invertibility_check(spline_phi_prime, (0.0, 4.0))))
    a_grid = np.linspace(0.0, 4.0, 201)
    surf = envelope.envelope_function_constraint(None, entry.constraint, a_grid, (1.0, 2.0), cfg)
    rep.checks.append(_accepted_all(surf, "envelope"))
    w = _witness(entry, surf)
    rep.checks.append(_flag("multivalued witness on z = 1 slice", w is not None,
                            "" if w is None else f"radius ratio {w.radius_ratio:.6g}"))
    rep.checks.append(_closure_check(surf, cfg))
    rep.points = surf.points
    if w is not None:
        rep.data["witness"] = {"p": list(w.p), "q": list(w.q), "angle_gap": w.angle_gap,
                               "radius_ratio": w.radius_ratio}


def _circle(entry, rep, cfg):
    branches = enumerate_branches(entry.constraint, 41, 201, cfg)
    rep.checks.append(_le("two branches", abs(len(branches) - 2), 0))
    xs = np.linspace(-3.0, 3.0, 9)
    ys = np.linspace(0.5, 4.0, 8)
    grid = [(x, y) for x in xs for y in ys]
    level = entry.expected
    pts = []
    for k, br in enumerate(branches):
        surf = envelope.envelope_branch(None, br, grid, cfg)
        rep.checks.append(_flag(f"branch {k}: has accepted points", bool(surf.accepted)))
        rep.checks.append(_membership_check(f"branch {k} cloud", level, surf.coords()))
        rep.checks.append(_implicit_check(f"branch {k}", level, surf.coords(), cfg))
        rep.checks.append(_closure_check(surf, cfg))
        pts.extend(surf.points)
    up = [br for br in branches if br.crossing > 0]
    spot = envelope.envelope_branch(None, up[0], [(3.0, 4.0)], cfg).accepted if up else []
    z = max((p.z for p in spot), default=math.nan)
    rep.checks.append(_le("(3, 4) -> z = 12", abs(z - 12.0), 1e-10))
    rep.points = pts


def _cone_points(curve, thetas, cfg):
    return envelope.envelope_parametric_planes(None, curve, thetas, envelope.DEFAULT_S_GRID, cfg)


def _cone(entry, rep, cfg):
    curve = entry.constraint
    level = entry.expected["implicit"]
    thetas = np.linspace(-math.pi, math.pi, 65)[:-1] + math.pi / 128
    surf = _cone_points(curve, thetas, cfg)
    rep.checks.append(_accepted_all(surf, "envelope"))
    rep.checks.append(_membership_check("cone quadric", level, surf.coords()))
    rep.checks.append(_implicit_check("cone", level, surf.coords(), cfg))
    tangent, tried = 0, 0
    for theta in thetas[::2]:
        a, b = curve.g(theta)
        p = envelope.characteristic_direction(curve, theta, cfg)
        tried += 1
        try:
            tangent += bool(verify.tangency_check(level, a, b, p, cfg))
        except VerticalTangent:
            pass
    rep.checks.append(_le(f"tangency failures of {tried} angles", tried - tangent, 0))
    printed = entry.params["printed"]
    a0, b0 = printed.g(0.0)
    p0 = envelope.characteristic_direction(printed, 0.0, cfg)
    neg = verify.tangency_check(level, a0, b0, p0, cfg)
    neg2 = verify.tangency_check(level, a0, b0, (2.0, 1.0, 1.0), cfg)
    rep.checks.append(_flag("printed signs fail tangency at theta = 0", not neg and not neg2,
                            "erratum: stored signs are the corrected ones"))
    for lbl, g in entry.expected["explicit"].items():
        rep.checks.append(_explicit_check(lbl, g, cfg))
    rep.checks.append(_closure_check(surf, cfg))
    rep.points = surf.points
    rep.data["excluded_theta"] = list(curve.excluded)


def _chojnacki(entry, rep, cfg):
    m = entry.constraint
    g = entry.expected
    grid = [(x, y) for x in np.linspace(-1, 1, 21) for y in np.linspace(0.5, 2, 16)]
    surf = envelope.envelope_inverse_map(None, m, grid, cfg)
    recon = _max(abs(p.z - g(p.x, p.y)) for p in surf.points)
    rep.checks.append(_le("|m1 x + m2 y - x^3/y^2|", recon, 1e-10))
    rep.checks.append(_accepted_all(surf, "reconstruction"))
    rep.checks.append(_explicit_check("x^3/y^2", g, cfg))
    rep.checks.append(_le("homogeneity degree 1",
                          verify.homogeneity_check(g, 1.0).max_rel_error, 1e-9))

    def curve(t):
        return (3 * t * t, -2 * t ** 3)

    rep.checks.append(_flag("cusp at t = 0", analysis.detect_cusp(curve, 0.0, cfg)))
    others = [t for t in np.linspace(-2.0, 2.0, 22) if abs(t) >= 0.1]
    false_pos = sum(bool(analysis.detect_cusp(curve, t, cfg)) for t in others)
    rep.checks.append(_le(f"cusps flagged at {len(others)} t != 0", false_pos, 0))
    rep.checks.append(_closure_check(surf, cfg))
    rep.points = surf.points


def _neg_quadratic(entry, rep, cfg):
    a_grid = np.linspace(-2.0, 2.0, 21)
    y_grid = np.linspace(0.5, 2.0, 8)
    surf = _function_battery(entry, rep, cfg, a_grid, y_grid,
                             lambda x, y: x * x / (2 * y), "x^2/(2y)")
    g = entry.expected
    rep.checks.append(_explicit_check("x^2/(2y)", g, cfg))
    rep.checks.append(_le("homogeneity degree 1",
                          verify.homogeneity_check(g, 1.0).max_rel_error, 1e-9))
    rep.checks.append(_flag("phi' invertible", analysis.invertibility_check(entry.constraint.slope, (-2, 2))))
    rep.checks.append(_flag("no multivalued witness", _witness(entry, surf) is None))
    quad = entry.params["x2_plus_y2"]
    rep.checks.append(_flag("x^2 + y^2 fails degree 1",
                            not verify.homogeneity_check(quad, 1.0).passed()))
    rep.checks.append(_le("x^2 + y^2 passes degree 2",
                          verify.homogeneity_check(quad, 2.0).max_rel_error, 1e-9))


# -------------------------------------------------------------- registry

POS = ((0.5, 2.0), (0.5, 2.0))


def _graph(text, domain=POS):
    return verify.ExplicitGraph.from_expr(text, domain)


def _cone_curve(sign):
    def g(t):
        d = 1.0 + math.cos(t) + math.sin(t)
        return (sign * math.cos(t) / d, sign * math.sin(t) / d)

    return ParametricCurve(g, (-math.pi, math.pi), (math.pi, -math.pi / 2), 1e-3, 2 * math.pi)


def _power_member(alpha):
    phi = f"{1 - alpha!r}*(a/{alpha!r})^({alpha!r}/({alpha!r}-1))"
    c = FunctionOfA.from_expr(phi, (0.0, math.inf))
    return c, _graph(f"x^{alpha!r}*y^{1 - alpha!r}")


def _build(name, **params) -> CatalogEntry:
    origin = PlaneFamily()
    if name == "parabola_family":
        return CatalogEntry(name, lambda x, y, c: y - (x + c) ** 2, None, "y = 0",
                            "curve family y = (x + c)^2 of y'^2 = 4y; singular integral y = 0",
                            _parabola)
    if name == "hyperbola_envelope":
        return CatalogEntry(name, lambda x, y, a: a * a * x + y - a,
                            ImplicitRelation.from_expr("a*b - 1", (0.1, 10.0), (0.05, 20.0)),
                            "4xy = 1",
                            "curve family a^2 x + y - a = 0; the same curve is the z = 1 slice "
                            "of the envelope of planes with ab = 1", _hyperbola)
    if name == "goursat_quartic":
        return CatalogEntry(name, lambda x, y, a: y ** 4 - y ** 2 - (x - a) ** 2, None,
                            {"y=0": "SingularLocus", "y=1": "Envelope", "y=-1": "Envelope"},
                            "discriminant y^4 = y^2: y = 0 is a locus of singular points",
                            _goursat)
    if name == "sqrt_xy":
        return CatalogEntry(name, origin, FunctionOfA.from_expr("1/a", (0.0, math.inf)),
                            {"implicit": verify.ImplicitLevelSet.from_expr("z^2 - 4*x*y"),
                             "explicit": {"2 sqrt(xy)": _graph("2*sqrt(x*y)"),
                                          "sqrt(xy)": _graph("sqrt(x*y)")}},
                            "b = 1/a gives z = 2 sqrt(xy)", _sqrt_xy)
    if name == "power_alpha":
        alphas = tuple(params.get("alphas", (0.3, 0.5, 0.9)))
        if not all(0 < a < 1 for a in alphas):
            raise ValueError("alpha must lie in (0, 1)")
        members = {a: _power_member(a) for a in alphas}
        return CatalogEntry(name, origin, None, "x^alpha y^(1 - alpha)",
                            "phi(a) = (1 - alpha) (a / alpha)^(alpha / (alpha - 1)); "
                            "alpha defaults to 0.3, 0.5, 0.9", _power_alpha,
                            {"members": members, "alphas": alphas})
    if name == "euler_generator":
        H = params.get("H", "1 + t^2")
        t = parse(str(H))
        extra = set(t.free_vars) - {"t"}
        if extra:
            raise ValueError(f"H may only depend on t, found {sorted(extra)}")
        x, y = Var("x"), Var("y")
        root = BinOp("*", Call("sqrt", BinOp("*", x, y)), substitute(t.root, "t", BinOp("/", x, y)))
        return CatalogEntry(name, origin, None, _graph(Expr(root, ("x", "y"))),
                            f"z = sqrt(xy) H(x/y) with H(t) = {H}", _euler, {"H": str(H)})
    if name == "bimodal_spline":
        return CatalogEntry(name, origin, spline_constraint(), None,
                            "phi' is a bimodal quartic spline on [0, 4]; phi(0) = 0 fixes the "
                            "integration constant; cross-section checked by properties", _spline)
    if name == "circle_relation":
        return CatalogEntry(name, origin,
                            ImplicitRelation.from_expr("(a-1)^2 + (b-1)^2 - 1", (0.0, 2.0), (-0.5, 2.5)),
                            verify.ImplicitLevelSet.from_expr("z^2 - 2*x*z - 2*y*z + 2*x*y"),
                            "two branches b = 1 +- sqrt(1 - (a-1)^2) joined at folds a = 0, 2",
                            _circle)
    if name == "tilted_cone":
        return CatalogEntry(name, origin, _cone_curve(+1.0),
                            {"implicit": verify.ImplicitLevelSet.from_expr(
                                "x^2 + y^2 + z^2 - 2*x*z - 2*y*z"),
                             "explicit": {"x + y + sqrt(2xy)": _graph("x + y + sqrt(2*x*y)"),
                                          "x + y - sqrt(2xy)": _graph("x + y - sqrt(2*x*y)")}},
                            "erratum: a = +cos/(1 + cos + sin), b = +sin/(1 + cos + sin); the "
                            "negated signs are not tangent to the cone (checked); theta = pi and "
                            "-pi/2 excluded", _cone, {"printed": _cone_curve(-1.0)})
    if name == "chojnacki_cusp":
        def m(x, y):
            return (3 * x * x / (y * y), -2 * x ** 3 / y ** 3)

        return CatalogEntry(name, origin, InverseMap(m, ((-1.0, 1.0), (0.5, 2.0))),
                            _graph("x^3/y^2", ((-1.0, 1.0), (0.5, 2.0))),
                            "(a, b) = (3x^2/y^2, -2x^3/y^3); the curve (3t^2, -2t^3) has a cusp at 0",
                            _chojnacki)
    if name == "neg_quadratic":
        return CatalogEntry(name, origin, FunctionOfA.from_expr("-a^2/2"),
                            _graph("x^2/(2*y)", ((-2.0, 2.0), (0.5, 2.0))),
                            "phi(a) = -a^2/2 has invertible phi' and gives z = x^2/(2y)",
                            _neg_quadratic, {"x2_plus_y2": _graph("x^2 + y^2", ((-2.0, 2.0), (-2.0, 2.0)))})
    raise UnknownEntry(name)


NAMES = ("parabola_family", "hyperbola_envelope", "goursat_quartic", "sqrt_xy", "power_alpha",
         "euler_generator", "bimodal_spline", "circle_relation", "tilted_cone", "chojnacki_cusp",
         "neg_quadratic")


def list_entries() -> list[str]:
    return sorted(NAMES)


def get(name: str, **params) -> CatalogEntry:
    if name not in NAMES:
        raise UnknownEntry(name)
    return _build(name, **params)


def run(name: str, cfg: ToleranceConfig = DEFAULT, **params) -> Report:
    return get(name, **params).run(cfg)


def run_all(cfg: ToleranceConfig = DEFAULT) -> list[Report]:
    return [run(name, cfg) for name in list_entries()]


def write_artifacts(report: Report, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    csv_path = out / f"{report.name}.csv"
    json_path = out / f"{report.name}.json"
    io.atomic_write(csv_path, io.surface_csv(report.points, accepted_only=False))
    io.atomic_write(json_path, io.dumps(report.to_dict()))
    return csv_path, json_path
