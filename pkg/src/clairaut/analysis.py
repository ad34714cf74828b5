"""Classification of envelope candidates, cusps, invertibility and multivaluedness."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from . import numerics
from .errors import CandidateNotOnFamily
from .numerics import DEFAULT, ToleranceConfig

GRAD_TOL = 1e-6
INDETERMINATE_TOL = 1e-4
CUSP_TOL = 1e-6


class Label(str, enum.Enum):
    ENVELOPE = "Envelope"
    SINGULAR_LOCUS = "SingularLocus"
    CUSP = "Cusp"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class ClassifiedPoint:
    p: tuple
    param: float
    label: Label
    grad_family: tuple
    relative_grad: float
    speed: Optional[float] = None

    def to_dict(self):
        return {
            "p": list(self.p),
            "param": self.param,
            "label": self.label.value,
            "grad_family": list(self.grad_family),
            "relative_grad": self.relative_grad,
            "speed": self.speed,
        }


def _window_scale(grad, x, y, radius, rings=(1.0, 0.5)):
    """Largest gradient norm on two rings of points around (x, y)."""
    best = 0.0
    for frac in rings:
        r = radius * frac
        for k in range(8):
            t = k * math.pi / 4
            gx, gy = grad(x + r * math.cos(t), y + r * math.sin(t))
            best = max(best, math.hypot(gx, gy))
    return best


def classify_locus(f: Callable[[float, float, float], float], candidates: Iterable,
                   cfg: ToleranceConfig = DEFAULT, window: float = 0.1) -> list[ClassifiedPoint]:
    """Label points of the discriminant set df/da = 0 of a curve family f(x, y, a).

    The gradient (f_x, f_y) is compared with the largest gradient seen on a
    small ring around the candidate: a ratio at most 1e-6 is a locus of
    singularities, at least 1e-4 an envelope, anything between is left
    Indeterminate. The ratio makes labels independent of the scale of f.
    """
    out = []
    for (x, y), a in candidates:
        x, y, a = float(x), float(y), float(a)

        def grad(px, py):
            return numerics.gradient2(lambda u, v: f(u, v, a), (px, py), cfg)

        g = grad(x, y)
        radius = window * (1.0 + math.hypot(x, y))
        scale = _window_scale(grad, x, y, radius)
        val = f(x, y, a)
        da = numerics.diff_central(lambda t: f(x, y, t), a, cfg)
        tol = cfg.residual_tol * (1.0 + scale)
        if abs(val) > tol or abs(da) > tol:
            raise CandidateNotOnFamily(
                f"candidate ({x}, {y}; a={a}) has |f|={abs(val):.3e}, |f_a|={abs(da):.3e}")
        gnorm = math.hypot(*g)
        rel = gnorm / scale if scale > 0 else math.nan
        if scale == 0.0:
            label = Label.INDETERMINATE
        elif rel <= GRAD_TOL:
            label = Label.SINGULAR_LOCUS
        elif rel >= INDETERMINATE_TOL:
            label = Label.ENVELOPE
        else:
            label = Label.INDETERMINATE
        out.append(ClassifiedPoint((x, y), a, label, tuple(g), rel))
    return out


@dataclass(frozen=True)
class CuspResult:
    is_cusp: bool
    speed: float
    window_max: float

    def __bool__(self):
        return self.is_cusp


def _speed(g, t, cfg):
    h = numerics.step(t, cfg)
    p1, p0 = g(t + h), g(t - h)
    return math.hypot((p1[0] - p0[0]) / (2 * h), (p1[1] - p0[1]) / (2 * h))


def detect_cusp(g: Callable[[float], tuple], t0: float, cfg: ToleranceConfig = DEFAULT,
                half_width: float = 0.1, samples: int = 20) -> CuspResult:
    """Vanishing velocity of a plane curve relative to the speed nearby.

    Cusp iff |g'(t0)| <= 1e-6 * max |g'| over [t0 - w, t0 + w] and that
    maximum is positive.
    """
    t0 = float(t0)
    speed = _speed(g, t0, cfg)
    w = half_width * (1.0 + abs(t0))
    peak = speed
    for k in range(-samples, samples + 1):
        peak = max(peak, _speed(g, t0 + w * k / samples, cfg))
    return CuspResult(bool(peak > 0 and speed <= CUSP_TOL * peak), speed, peak)


def invertibility_check(fp: Callable[[float], float], interval, n_samples: int = 401) -> bool:
    """Strict monotonicity of sampled values (every step beyond 1e-12, one direction)."""
    if n_samples < 3:
        raise ValueError("n_samples must be at least 3")
    lo, hi = interval
    vals = [fp(lo + (hi - lo) * i / (n_samples - 1)) for i in range(n_samples)]
    steps = [b - a for a, b in zip(vals, vals[1:])]
    return all(d > 1e-12 for d in steps) or all(d < -1e-12 for d in steps)


@dataclass(frozen=True)
class Witness:
    """Two cross-section points on one ray from the origin at different radii."""
    p: tuple
    q: tuple
    angle_gap: float
    radius_ratio: float
    i: int
    j: int


def detect_multivalued(points2d: Sequence, angle_tol: float = 1e-3,
                       radius_sep: float = 0.01) -> Optional[Witness]:
    """Find two points of the z = 1 slice on one ray at clearly different radii.

    Such a pair means z takes two values over the same (x, y): scaling
    either point onto the other's position yields distinct heights.
    """
    polar = []
    for i, (x, y) in enumerate(points2d):
        r = math.hypot(x, y)
        if r == 0.0 or not math.isfinite(r):
            continue
        polar.append((math.atan2(y, x), r, i))
    if len(polar) < 2:
        return None
    polar.sort()
    # wrap the start of the circle past +pi so rays near -pi meet those near +pi
    ext = polar + [(t + 2 * math.pi, r, i) for t, r, i in polar if t < -math.pi + angle_tol]
    best = None
    for k in range(len(polar)):
        t1, r1, i1 = ext[k]
        m = k + 1
        while m < len(ext) and ext[m][0] - t1 <= angle_tol:
            t2, r2, i2 = ext[m]
            ratio = r2 / r1
            if i2 != i1 and not (1 - radius_sep <= ratio <= 1 + radius_sep):
                gap = t2 - t1
                if best is None or gap < best.angle_gap:
                    best = Witness(tuple(points2d[i1]), tuple(points2d[i2]), gap, ratio, i1, i2)
            m += 1
    return best
