"""Checks on candidate integral surfaces.

Residuals of x z_x + y z_y = z (optionally with a tilt term), Euler's
identity for homogeneous functions, scaling homogeneity, tangency of member
planes and implicit-surface membership of point clouds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from . import numerics
from .errors import DomainError, NotOnSurface, OutOfDomain, VerticalTangent
from .exprlang import Expr, as_expr
from .numerics import DEFAULT, ToleranceConfig

VERTICAL_TOL = 1e-6
ANGLE_TOL = 1e-5


@dataclass(frozen=True)
class ExplicitGraph:
    """z = h(x, y) on the rectangle ((x_lo, x_hi), (y_lo, y_hi))."""
    h: Callable[[float, float], float]
    domain: tuple = ((-math.inf, math.inf), (-math.inf, math.inf))
    name: str = ""

    @classmethod
    def from_expr(cls, text, domain=((-math.inf, math.inf), (-math.inf, math.inf))):
        e = Expr(as_expr(text).root, ("x", "y"))

        def h(x, y):
            return e.eval({"x": x, "y": y})

        def grad(x, y):
            b = {"x": x, "y": y}
            return e.eval_d(b, "x").derivative, e.eval_d(b, "y").derivative

        h.grad = grad
        return cls(h, domain, str(text))

    def __call__(self, x, y):
        return self.h(x, y)

    def interior(self, x, y, margin=0.0):
        (xlo, xhi), (ylo, yhi) = self.domain
        return xlo + margin <= x <= xhi - margin and ylo + margin <= y <= yhi - margin


@dataclass(frozen=True)
class ImplicitLevelSet:
    """The relation F(x, y, z) = 0."""
    F: Callable[[float, float, float], float]
    name: str = ""

    @classmethod
    def from_expr(cls, text):
        e = Expr(as_expr(text).root, ("x", "y", "z"))

        def F(x, y, z):
            return e.eval({"x": x, "y": y, "z": z})

        def grad(x, y, z):
            b = {"x": x, "y": y, "z": z}
            return tuple(e.eval_d(b, v).derivative for v in ("x", "y", "z"))

        F.expr = e
        F.grad = grad
        return cls(F, str(text))

    def __call__(self, x, y, z):
        return self.F(x, y, z)


@dataclass(frozen=True)
class SampledCloud:
    points: tuple


Surface = Union[ExplicitGraph, ImplicitLevelSet, SampledCloud]


@dataclass
class ResidualReport:
    max_abs: float = 0.0
    mean_abs: float = 0.0
    n_evaluated: int = 0
    n_skipped: int = 0
    worst_point: Optional[tuple] = None
    skipped: list = field(default_factory=list, repr=False)

    def passed(self, tol):
        return self.n_evaluated > 0 and self.max_abs <= tol

    def to_dict(self):
        return {
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "n_evaluated": self.n_evaluated,
            "n_skipped": self.n_skipped,
            "worst_point": list(self.worst_point) if self.worst_point is not None else None,
        }


def _report(values, points, skipped):
    rep = ResidualReport(n_skipped=len(skipped), skipped=skipped)
    if values:
        arr = np.abs(np.asarray(values, dtype=float))
        i = int(np.argmax(arr))
        rep.max_abs = float(arr[i])
        rep.mean_abs = float(arr.mean())
        rep.n_evaluated = len(values)
        rep.worst_point = tuple(float(c) for c in points[i])
    return rep


def _partials(s: ExplicitGraph, x, y, cfg):
    if not s.interior(x, y, numerics.step(max(abs(x), abs(y)), cfg)):
        raise OutOfDomain(f"({x!r}, {y!r}) is not interior to {s.domain}")
    grad = getattr(s.h, "grad", None)
    if grad is not None:
        # exact partials for parsed expressions
        return grad(x, y)
    return numerics.gradient2(s.h, (x, y), cfg)


def clairaut_residual_explicit(s: ExplicitGraph, p, tilt=None, cfg: ToleranceConfig = DEFAULT) -> float:
    """x h_x + y h_y + k(h_x, h_y) - h at p, partials by central difference."""
    x, y = (float(c) for c in p)
    hx, hy = _partials(s, x, y, cfg)
    k = 0.0 if tilt is None else tilt(hx, hy)
    return x * hx + y * hy + k - s.h(x, y)


def euler_residual(s: ExplicitGraph, n: float, p, cfg: ToleranceConfig = DEFAULT) -> float:
    """x h_x + y h_y - n h; zero for h homogeneous of degree n."""
    x, y = (float(c) for c in p)
    hx, hy = _partials(s, x, y, cfg)
    return x * hx + y * hy - n * s.h(x, y)


def implicit_slopes(s: ImplicitLevelSet, p, cfg: ToleranceConfig = DEFAULT):
    """(z_x, z_y) = (-F_x / F_z, -F_y / F_z) by the implicit function theorem."""
    x, y, z = (float(c) for c in p)
    norm = math.sqrt(x * x + y * y + z * z)
    val = s.F(x, y, z)
    if abs(val) > cfg.residual_tol * (1.0 + norm):
        raise NotOnSurface(f"|F| = {abs(val):.3e} at {(x, y, z)}")
    grad = getattr(s.F, "grad", None)
    if grad is not None:
        fx, fy, fz = grad(x, y, z)
    else:
        fx, fy, fz = numerics.gradient3(s.F, (x, y, z), cfg)
    if abs(fz) <= VERTICAL_TOL:
        raise VerticalTangent(f"|F_z| = {abs(fz):.3e} at {(x, y, z)}")
    return -fx / fz, -fy / fz


def clairaut_residual_implicit(s: ImplicitLevelSet, p, cfg: ToleranceConfig = DEFAULT) -> float:
    x, y, z = (float(c) for c in p)
    zx, zy = implicit_slopes(s, p, cfg)
    return x * zx + y * zy - z


@dataclass(frozen=True)
class HomogeneityReport:
    degree: float
    max_rel_error: float
    worst: Optional[tuple]
    n_checked: int

    def passed(self, tol=1e-9):
        return self.max_rel_error <= tol


def _sample_domain(domain, samples):
    (xlo, xhi), (ylo, yhi) = domain
    side = max(2, math.ceil(math.sqrt(samples)))
    xs = np.linspace(xlo, xhi, side)
    ys = np.linspace(ylo, yhi, side)
    pts = [(float(x), float(y)) for x in xs for y in ys]
    return pts[:samples]


def homogeneity_check(s: ExplicitGraph, degree: float, samples: int = 100,
                      s_values: Sequence[float] = (0.5, 2.0, 3.0), points=None) -> HomogeneityReport:
    """max |h(sx, sy) - s^n h(x, y)| / (1 + |s^n h(x, y)|) over a domain grid."""
    pts = _sample_domain(s.domain, samples) if points is None else list(points)
    worst, worst_at = 0.0, None
    count = 0
    for x, y in pts:
        base = s.h(x, y)
        for sc in s_values:
            target = sc ** degree * base
            err = abs(s.h(sc * x, sc * y) - target) / (1.0 + abs(target))
            count += 1
            if err > worst or worst_at is None:
                worst, worst_at = err, (x, y, sc)
    return HomogeneityReport(degree, worst, worst_at, count)


@dataclass(frozen=True)
class TangencyResult:
    ok: bool
    plane_residual: float
    surface_residual: float
    angle: float

    def __bool__(self):
        return self.ok


def _angle(u, v):
    """Angle between two lines (direction sign ignored)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    cross = np.linalg.norm(np.cross(u, v))
    dot = abs(float(np.dot(u, v)))
    return math.atan2(cross, dot)


def tangency_check(surface: Surface, a: float, b: float, p, cfg: ToleranceConfig = DEFAULT) -> TangencyResult:
    """Is the plane z = a x + b y tangent to ``surface`` at p?

    Requires the point on the plane, on the surface, and the surface normal
    parallel to (a, b, -1) within 1e-5 rad.
    """
    x, y, z = (float(c) for c in p)
    norm = math.sqrt(x * x + y * y + z * z)
    plane_res = abs(a * x + b * y - z)
    if isinstance(surface, ExplicitGraph):
        surf_res = abs(surface.h(x, y) - z)
        on_surface = surf_res <= cfg.residual_tol * (1.0 + abs(z))
        hx, hy = numerics.gradient2(surface.h, (x, y), cfg)
        normal = (hx, hy, -1.0)
    elif isinstance(surface, ImplicitLevelSet):
        surf_res = abs(surface.F(x, y, z))
        on_surface = surf_res <= cfg.residual_tol * (1.0 + norm * norm)
        normal = numerics.gradient3(surface.F, (x, y, z), cfg)
        if abs(normal[2]) <= VERTICAL_TOL:
            raise VerticalTangent(f"|F_z| = {abs(normal[2]):.3e} at {(x, y, z)}")
    else:
        raise TypeError("tangency needs an explicit graph or an implicit level set")
    angle = _angle(normal, (a, b, -1.0))
    ok = plane_res <= cfg.residual_tol * (1.0 + norm) and on_surface and angle <= ANGLE_TOL
    return TangencyResult(bool(ok), plane_res, surf_res, angle)


def implicit_membership(s: ImplicitLevelSet, cloud: Iterable) -> ResidualReport:
    """|F(p)| / (1 + |p|^2) over a cloud; points where F fails to evaluate are skipped."""
    vals, pts, skipped = [], [], []
    for p in cloud:
        x, y, z = (float(c) for c in p)
        try:
            v = s.F(x, y, z)
        except DomainError as exc:
            skipped.append(((x, y, z), str(exc)))
            continue
        vals.append(v / (1.0 + x * x + y * y + z * z))
        pts.append((x, y, z))
    return _report(vals, pts, skipped)


def explicit_report(s: ExplicitGraph, grid: Iterable, tilt=None, cfg: ToleranceConfig = DEFAULT) -> ResidualReport:
    vals, pts, skipped = [], [], []
    for x, y in grid:
        try:
            vals.append(clairaut_residual_explicit(s, (x, y), tilt, cfg))
            pts.append((x, y))
        except (DomainError, OutOfDomain) as exc:
            skipped.append(((x, y), str(exc)))
    return _report(vals, pts, skipped)


def implicit_report(s: ImplicitLevelSet, cloud: Iterable, cfg: ToleranceConfig = DEFAULT) -> ResidualReport:
    """Clairaut residual over a cloud; vertical-tangent points count as skipped."""
    vals, pts, skipped = [], [], []
    for p in cloud:
        try:
            vals.append(clairaut_residual_implicit(s, p, cfg))
            pts.append(tuple(p))
        except (VerticalTangent, NotOnSurface, DomainError) as exc:
            skipped.append((tuple(p), f"{type(exc).__name__}: {exc}"))
    return _report(vals, pts, skipped)


def interior_grid(domain, n: int = 20, inset: float = 0.05):
    """n x n grid strictly inside a rectangle, inset by a fraction of each side."""
    (xlo, xhi), (ylo, yhi) = domain
    dx, dy = (xhi - xlo) * inset, (yhi - ylo) * inset
    xs = np.linspace(xlo + dx, xhi - dx, n)
    ys = np.linspace(ylo + dy, yhi - dy, n)
    return [(float(x), float(y)) for x in xs for y in ys]
