"""Singular integrals as sampled envelopes of the plane family z = a x + b y.

Every constructor returns a :class:`SampledSurface` whose points carry two
independently computed residuals: the family residual |f| and the
stationarity residual |df/dparam| (central difference).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from . import numerics
from .errors import DegenerateDirection, DomainError, NoBracket, OutOfDomain
from .families import Branch, FunctionOfA, InverseMap, ParametricCurve, PlaneFamily
from .numerics import DEFAULT, ToleranceConfig

STATIONARITY_TOL = 1e-6
DEFAULT_S_GRID = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class EnvelopePoint:
    p: tuple
    param: float
    family_residual: float
    stationarity_residual: float
    accepted: bool = True
    note: str = ""

    @property
    def x(self):
        return self.p[0]

    @property
    def y(self):
        return self.p[1]

    @property
    def z(self):
        return self.p[2]


@dataclass
class SampledSurface:
    points: list
    source: str
    diagnostics: dict = field(default_factory=dict)
    # (p, param) -> (family residual, stationarity residual) for re-checking points
    residuals: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def accepted(self):
        return [pt for pt in self.points if pt.accepted]

    def coords(self, accepted_only=True):
        pts = self.accepted if accepted_only else self.points
        return [pt.p for pt in pts]


def _point(p, param, fres, sres, cfg, note=""):
    ok = fres <= cfg.residual_tol and sres <= STATIONARITY_TOL
    return EnvelopePoint(tuple(float(c) for c in p), float(param), float(fres), float(sres), ok, note)


def _require_origin_family(fam):
    if fam is not None and not fam.through_origin:
        raise ValueError("envelope construction requires a family without tilt")


def _skip(diag, key, where, exc):
    diag.setdefault(key, []).append({"at": where, "reason": str(exc)})


# ------------------------------------------------------------- b = phi(a)


def characteristic_point(c: FunctionOfA, a: float, y: float) -> tuple:
    """(x, y, z) = (-phi'(a) y, y, (phi(a) - a phi'(a)) y)."""
    dp = c.slope(a)
    return (-dp * y, y, (c.phi(a) - a * dp) * y)


def function_residuals(c: FunctionOfA, p, a, cfg=DEFAULT):
    x, y, z = p

    def f(t):
        return t * x + c.phi(t) * y - z

    return abs(f(a)), abs(numerics.diff_central(f, a, cfg))


def envelope_function_constraint(fam: Optional[PlaneFamily], c: FunctionOfA,
                                 a_grid: Sequence[float], y_grid: Sequence[float],
                                 cfg: ToleranceConfig = DEFAULT) -> SampledSurface:
    _require_origin_family(fam)
    if not len(a_grid) or not len(y_grid):
        raise ValueError("grids must be nonempty")
    pts = []
    for a in a_grid:
        a = float(a)
        for y in y_grid:
            p = characteristic_point(c, a, float(y))
            fres, sres = function_residuals(c, p, a, cfg)
            pts.append(_point(p, a, fres, sres, cfg))
    return SampledSurface(pts, "function constraint b = phi(a)",
                          residuals=lambda p, a: function_residuals(c, p, a, cfg))


def projective_curve(c: FunctionOfA, a_grid: Sequence[float]) -> list:
    """The (X, Z) = (x/y, z/y) trace of the envelope."""
    out = []
    for a in a_grid:
        a = float(a)
        dp = c.slope(a)
        out.append((-dp, c.phi(a) - a * dp))
    return out


def explicit_envelope(c: FunctionOfA, a_lo: float, a_hi: float, scan: int = 64,
                      cfg: ToleranceConfig = DEFAULT):
    """z = h(x, y) for an invertible phi': solve phi'(a) = -x/y, then z = a x + phi(a) y.

    Raises NoBracket where no stationary a exists in [a_lo, a_hi].
    """
    grid = [a_lo + (a_hi - a_lo) * i / scan for i in range(scan + 1)]

    def h(x, y):
        ratio = x / y
        roots = numerics.sign_change_roots(lambda a: c.slope(a) + ratio, grid, cfg)
        if not roots:
            raise NoBracket(f"no stationary a for x/y={ratio!r}")
        a = roots[0]
        return a * x + c.phi(a) * y

    return h


# ------------------------------------------------------ branches of rel = 0


def _fold_stationarity(br: Branch, fold, x, y, cfg):
    """x rel_b - y rel_a at a fold, normalised; zero when the plane is stationary there."""
    rel = br.relation.rel
    ra = numerics.diff_central(lambda t: rel(t, fold.b), fold.a, cfg)
    rb = numerics.diff_central(lambda t: rel(fold.a, t), fold.b, cfg)
    scale = math.hypot(ra, rb) * max(math.hypot(x, y), 1e-300)
    return abs(x * rb - y * ra) / scale


def envelope_branch(fam: Optional[PlaneFamily], br: Branch, xy_grid: Iterable,
                    cfg: ToleranceConfig = DEFAULT) -> SampledSurface:
    """Envelope points over ``xy_grid`` from one functional branch b = psi(a).

    For each (x, y) every stationary a of x + psi'(a) y on the branch is
    found (sign changes on the branch samples, then bracketed roots), so a
    non-convex branch may contribute several points. Fold end points, where
    psi' is unbounded, are tested with the equivalent gradient form
    x rel_b - y rel_a = 0.
    """
    _require_origin_family(fam)
    grid = [s.a for s in br.samples]
    slopes = [br.slope(a) for a in grid]
    pts = []
    diag = {}
    for x, y in xy_grid:
        x, y = float(x), float(y)

        def g(a):
            return x + br.slope(a) * y

        def f(a, z):
            return a * x + br.psi(a) * y - z

        try:
            roots = numerics.sign_change_roots(g, grid, cfg, [x + d * y for d in slopes])
        except (NoBracket, DomainError, OutOfDomain) as exc:
            _skip(diag, "skipped", (x, y), exc)
            continue
        found = []
        for a in roots:
            z = a * x + br.psi(a) * y
            fres = abs(f(a, z))
            sres = abs(g(a))
            found.append(_point((x, y, z), a, fres, sres, cfg))
        for fold in br.folds:
            if any(abs(pt.param - fold.a) <= 1e-9 * (1 + abs(fold.a)) for pt in found):
                continue
            sres = _fold_stationarity(br, fold, x, y, cfg)
            if sres <= cfg.residual_tol:
                z = fold.a * x + fold.b * y
                found.append(_point((x, y, z), fold.a, abs(fold.a * x + fold.b * y - z), sres,
                                    cfg, note="fold"))
        if not found:
            _skip(diag, "skipped", (x, y), NoBracket("no stationary a on this branch"))
        pts.extend(found)
    return SampledSurface(pts, "implicit relation branch", diag,
                          residuals=lambda p, a: branch_residuals(br, p, a, cfg))


def branch_residuals(br: Branch, p, a, cfg=DEFAULT):
    x, y, z = p
    fold = br.fold_at(a)
    if fold is not None:
        return abs(a * x + fold.b * y - z), _fold_stationarity(br, fold, x, y, cfg)
    return abs(a * x + br.psi(a) * y - z), abs(x + br.slope(a) * y)


# ------------------------------------------------------ (a, b) = g(theta)


def characteristic_direction(c: ParametricCurve, theta: float, cfg=DEFAULT) -> tuple:
    """Direction of the line where plane theta meets its neighbours.

    Solves a x + b y = z together with a' x + b' y = 0.
    """
    a, b = c.g(theta)
    da, db = c.velocity(theta, cfg)
    if math.hypot(da, db) <= 1e-10 * (1.0 + math.hypot(a, b)):
        raise DegenerateDirection(f"(a', b') vanishes at theta={theta!r}")
    return (-db, da, -db * a + da * b)


def parametric_residuals(c: ParametricCurve, p, theta, cfg=DEFAULT):
    x, y, z = p

    def f(t):
        a, b = c.g(t)
        return a * x + b * y - z

    return abs(f(theta)), abs(numerics.diff_central(f, theta, cfg))


def envelope_parametric_planes(fam: Optional[PlaneFamily], c: ParametricCurve,
                               theta_grid: Sequence[float],
                               s_grid: Sequence[float] = DEFAULT_S_GRID,
                               cfg: ToleranceConfig = DEFAULT) -> SampledSurface:
    _require_origin_family(fam)
    pts = []
    diag = {}
    for theta in theta_grid:
        theta = float(theta)
        if c.is_excluded(theta):
            _skip(diag, "excluded", theta, "excluded parameter")
            continue
        try:
            d = characteristic_direction(c, theta, cfg)
        except (DegenerateDirection, DomainError) as exc:
            _skip(diag, "degenerate", theta, exc)
            continue
        for s in s_grid:
            p = tuple(s * comp for comp in d)
            fres, sres = parametric_residuals(c, p, theta, cfg)
            pts.append(_point(p, theta, fres, sres, cfg))
    return SampledSurface(pts, "parametric plane family", diag,
                          residuals=lambda p, t: parametric_residuals(c, p, t, cfg))


# ------------------------------------------------------- (a, b) = m(x, y)


def envelope_inverse_map(fam: Optional[PlaneFamily], c: InverseMap, xy_grid: Iterable,
                         cfg: ToleranceConfig = DEFAULT) -> SampledSurface:
    """Graph samples of z = m1(x, y) x + m2(x, y) y.

    The stationarity column holds the tangency defect max(|h_x - m1|, |h_y - m2|)
    of the reconstructed surface h, by central differences; ``param`` is nan.
    """
    _require_origin_family(fam)

    def h(x, y):
        a, b = c.m(x, y)
        return a * x + b * y

    def residuals(p, _param=None):
        x, y, z = p
        a, b = c.m(x, y)
        hx, hy = numerics.gradient2(h, (x, y), cfg)
        return abs(a * x + b * y - z), max(abs(hx - a), abs(hy - b))

    pts = []
    diag = {}
    for x, y in xy_grid:
        x, y = float(x), float(y)
        try:
            a, b = c.m(x, y)
            z = a * x + b * y
            fres, sres = residuals((x, y, z))
        except DomainError as exc:
            _skip(diag, "skipped", (x, y), exc)
            continue
        pts.append(_point((x, y, z), math.nan, fres, sres, cfg))
    return SampledSurface(pts, "inverse map (a, b) = m(x, y)", diag, residuals)


# ----------------------------------------------------------- z = 1 slice


@dataclass
class CrossSection:
    points: list
    params: list
    dropped: int

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def cross_section_z1(s, eps: float = 1e-12) -> CrossSection:
    """Rescale each point along its ray to z = 1; points with |z| <= eps are dropped."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    pts = s.points if isinstance(s, SampledSurface) else list(s)
    out, params, dropped = [], [], 0
    for pt in pts:
        if isinstance(pt, EnvelopePoint):
            (x, y, z), param = pt.p, pt.param
        else:
            (x, y, z), param = pt, math.nan
        if abs(z) <= eps:
            dropped += 1
            continue
        out.append((x / z, y / z))
        params.append(param)
    return CrossSection(out, params, dropped)
