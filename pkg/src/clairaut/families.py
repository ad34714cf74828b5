"""The complete integral z = a x + b y (+ k(a, b)) and the ways (a, b) are coupled.

Four constraint kinds, from least to most general:

* :class:`FunctionOfA` -- b = phi(a)
* :class:`ImplicitRelation` -- rel(a, b) = 0, split into functional branches
* :class:`ParametricCurve` -- (a, b) = g(theta)
* :class:`InverseMap` -- (a, b) = m(x, y)
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import numerics
from .errors import ExcludedParameter, NoBracket, NoRoots, OutOfDomain
from .exprlang import Expr, as_expr
from .numerics import DEFAULT, ToleranceConfig

Interval = tuple


def _inside(t, interval, slack=0.0):
    lo, hi = interval
    return lo - slack <= t <= hi + slack


@dataclass(frozen=True)
class Plane:
    """The member plane z = a x + b y + offset."""
    a: float
    b: float
    offset: float = 0.0

    def __call__(self, x, y):
        return self.a * x + self.b * y + self.offset


@dataclass(frozen=True)
class PlaneFamily:
    """f(x, y, z, a, b) = a x + b y + k(a, b) - z; ``tilt`` None means k = 0."""
    tilt: Optional[Callable[[float, float], float]] = None

    @property
    def through_origin(self):
        return self.tilt is None

    def f(self, x, y, z, a, b):
        k = 0.0 if self.tilt is None else self.tilt(a, b)
        return a * x + b * y + k - z


def plane_at(fam: PlaneFamily, a: float, b: float) -> Plane:
    k = 0.0 if fam.tilt is None else float(fam.tilt(a, b))
    return Plane(float(a), float(b), k)


# ------------------------------------------------------------- constraints


@dataclass(frozen=True)
class FunctionOfA:
    phi: Callable[[float], float]
    phi_prime: Optional[Callable[[float], float]] = None
    domain: Interval = (-math.inf, math.inf)
    cfg: ToleranceConfig = DEFAULT

    @classmethod
    def from_expr(cls, text: Union[str, Expr], domain=(-math.inf, math.inf), cfg=DEFAULT):
        """phi from expression text in ``a``; phi' comes exactly from dual numbers."""
        e = as_expr(text)
        extra = set(e.free_vars) - {"a"}
        if extra:
            raise ValueError(f"phi may only depend on a, found {sorted(extra)}")
        fn = e.function("a")
        return cls(fn, fn.derivative, tuple(domain), cfg)

    def slope(self, a: float) -> float:
        if self.phi_prime is not None:
            return self.phi_prime(a)
        return numerics.diff_central(self.phi, a, self.cfg)

    def check_slope(self, samples: Sequence[float], rel_tol=1e-5):
        """Largest relative gap between phi_prime and the central difference of phi."""
        if self.phi_prime is None:
            return 0.0
        worst = 0.0
        for a in samples:
            exact = self.phi_prime(a)
            fd = numerics.diff_central(self.phi, a, self.cfg)
            worst = max(worst, abs(exact - fd) / (1.0 + abs(exact)))
        return worst


@dataclass(frozen=True)
class ImplicitRelation:
    rel: Callable[[float, float], float]
    a_domain: Interval
    b_domain: Interval
    expr: Optional[Expr] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_expr(cls, text, a_domain, b_domain):
        e = as_expr(text)
        extra = set(e.free_vars) - {"a", "b"}
        if extra:
            raise ValueError(f"relation may only depend on a and b, found {sorted(extra)}")
        e = Expr(e.root, ("a", "b"))

        def rel(a, b):
            return e.eval({"a": a, "b": b})

        return cls(rel, tuple(a_domain), tuple(b_domain), e)

    def section(self, a: float) -> Callable[[float], float]:
        """b -> rel(a, b); compiled when the relation came from an expression."""
        if self.expr is not None:
            return self.expr.function("b", a=a)
        return lambda b: self.rel(a, b)


@dataclass(frozen=True)
class ParametricCurve:
    g: Callable[[float], tuple]
    theta_domain: Interval
    excluded: tuple = ()
    exclusion_radius: float = 1e-3
    period: Optional[float] = None

    def is_excluded(self, theta: float) -> bool:
        for t0 in self.excluded:
            d = theta - t0
            if self.period:
                d = math.remainder(d, self.period)
            if abs(d) < self.exclusion_radius:
                return True
        return False

    def a_of(self, theta):
        return self.g(theta)[0]

    def b_of(self, theta):
        return self.g(theta)[1]

    def velocity(self, theta, cfg=DEFAULT):
        return (
            numerics.diff_central(self.a_of, theta, cfg),
            numerics.diff_central(self.b_of, theta, cfg),
        )


@dataclass(frozen=True)
class InverseMap:
    m: Callable[[float, float], tuple]
    xy_domain: tuple  # ((x_lo, x_hi), (y_lo, y_hi))


ConstraintCurve = Union[FunctionOfA, ImplicitRelation, ParametricCurve, InverseMap]


def resolve(c: ConstraintCurve, param) -> tuple[float, float]:
    """The coupled pair (a, b) for one parameter value of the constraint."""
    if isinstance(c, FunctionOfA):
        a = float(param)
        if not _inside(a, c.domain):
            raise OutOfDomain(f"a={a!r} outside {c.domain}")
        return a, float(c.phi(a))
    if isinstance(c, ParametricCurve):
        theta = float(param)
        if not _inside(theta, c.theta_domain):
            raise OutOfDomain(f"theta={theta!r} outside {c.theta_domain}")
        if c.is_excluded(theta):
            raise ExcludedParameter(f"theta={theta!r} is within {c.exclusion_radius} of an excluded point")
        a, b = c.g(theta)
        return float(a), float(b)
    if isinstance(c, InverseMap):
        x, y = (float(v) for v in param)
        (xlo, xhi), (ylo, yhi) = c.xy_domain
        if not (xlo <= x <= xhi and ylo <= y <= yhi):
            raise OutOfDomain(f"(x, y)=({x!r}, {y!r}) outside {c.xy_domain}")
        a, b = c.m(x, y)
        return float(a), float(b)
    if isinstance(c, ImplicitRelation):
        raise TypeError("an implicit relation resolves per branch; use enumerate_branches")
    raise TypeError(f"unknown constraint {type(c).__name__}")


# ----------------------------------------------------------------- branches


@dataclass
class _Sample:
    a: float
    b: float


@dataclass(frozen=True)
class Fold:
    """Where a branch ends by merging with another branch (rel_b = 0)."""
    a: float
    b: float


@dataclass
class Branch:
    """One functional sheet b = psi(a) of an implicit relation.

    ``samples`` are the threaded roots found on the enumeration grid (plus
    refined fold end points); ``crossing`` is the sign of rel_b along the
    branch and tells which way to search from an interpolated guess.
    """
    relation: ImplicitRelation
    samples: list
    crossing: int
    cfg: ToleranceConfig = DEFAULT
    folds: list = field(default_factory=list)
    _span: float = 1.0

    @property
    def a_interval(self) -> Interval:
        return (self.samples[0].a, self.samples[-1].a)

    def _guess(self, a):
        s = self.samples
        lo, hi = 0, len(s) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if s[mid].a <= a:
                lo = mid
            else:
                hi = mid
        s0, s1 = s[lo], s[hi]
        if s1.a == s0.a:
            return s0.b
        w = (a - s0.a) / (s1.a - s0.a)
        return s0.b + w * (s1.b - s0.b)

    def psi(self, a: float) -> float:
        lo_a, hi_a = self.a_interval
        if not (lo_a <= a <= hi_a):
            raise OutOfDomain(f"a={a!r} outside branch interval [{lo_a!r}, {hi_a!r}]")
        for fold in self.folds:
            if a == fold.a:
                return fold.b
        for smp in self.samples:
            if a == smp.a:
                return smp.b
        blo, bhi = self.relation.b_domain
        guess = min(max(self._guess(a), blo), bhi)
        r = self.relation.section(a)

        r0 = r(guess)
        if r0 == 0.0:
            return guess
        # below the root rel has sign -crossing, above it +crossing
        direction = 1.0 if (r0 < 0.0) == (self.crossing > 0) else -1.0
        stepb = 1e-3 * self._span
        prev = guess
        cfg = self.cfg.with_(root_tol=min(self.cfg.root_tol, 1e-15))
        while True:
            nxt = prev + direction * stepb
            nxt = min(max(nxt, blo), bhi)
            rn = r(nxt)
            if rn == 0.0:
                return nxt
            if (rn < 0.0) != (r0 < 0.0):
                return numerics.find_root(r, prev, nxt, cfg)
            if nxt in (blo, bhi):
                raise NoBracket(f"branch root lost at a={a!r}")
            prev = nxt
            stepb *= 2.0

    __call__ = psi

    def slope(self, a: float) -> float:
        """psi'(a) by central difference, one-sided within a step of either end."""
        lo_a, hi_a = self.a_interval
        h = numerics.step(a, self.cfg)
        if a - h < lo_a:
            return numerics.diff_onesided(self.psi, a, +1, self.cfg)
        if a + h > hi_a:
            return numerics.diff_onesided(self.psi, a, -1, self.cfg)
        return numerics.diff_central(self.psi, a, self.cfg)

    def fold_at(self, a):
        for fold in self.folds:
            if fold.a == a:
                return fold
        return None


def _thread(columns, a_grid):
    """Link per-a root lists into continuous chains by nearest neighbour.

    A link is refused when the jump exceeds 10x the larger of the median
    within-column root spacing and the chain's own previous step.
    """
    spacings = []
    for roots in columns:
        srt = sorted(roots)
        spacings.extend(b - a for a, b in zip(srt, srt[1:]))
    scale = statistics.median(spacings) if spacings else math.inf

    chains = []
    open_chains = []
    for i, roots in enumerate(columns):
        pairs = []
        for ci, chain in enumerate(open_chains):
            last_b = chain[-1][1]
            prev_step = abs(chain[-1][1] - chain[-2][1]) if len(chain) > 1 else 0.0
            cap = 10.0 * max(scale, prev_step)
            for ri, b in enumerate(roots):
                dist = abs(b - last_b)
                if dist <= cap:
                    pairs.append((dist, ci, ri))
        pairs.sort()
        used_c, claimed = set(), {}
        for dist, ci, ri in pairs:
            if ci in used_c or ri in claimed:
                continue
            used_c.add(ci)
            claimed[ri] = ci
        still_open = []
        for ci, chain in enumerate(open_chains):
            if ci in used_c:
                still_open.append(chain)
            else:
                chains.append(chain)
        for ri, b in enumerate(roots):
            if ri in claimed:
                open_chains[claimed[ri]].append((i, b))
            else:
                still_open.append([(i, b)])
        open_chains = still_open
    chains.extend(open_chains)
    chains.sort(key=lambda ch: (ch[0][0], ch[0][1]))
    return chains


def _refine_fold(rel, a_in, a_out, b1, b2, cfg):
    """Locate where two branches with roots b1, b2 at a_in merge before a_out."""
    lo_b, hi_b = min(b1, b2), max(b1, b2)
    mid = 0.5 * (lo_b + hi_b)
    a_f = a_in
    for _ in range(30):
        try:
            a_new = numerics.find_root(lambda a: rel(a, mid), a_in, a_out, cfg)
        except NoBracket:
            return None
        try:
            mid_new = numerics.find_root(
                lambda b: numerics.diff_central(lambda t: rel(a_new, t), b, cfg), lo_b, hi_b, cfg)
        except NoBracket:
            mid_new = mid
        done = abs(a_new - a_f) <= cfg.root_tol * (1 + abs(a_new)) and abs(mid_new - mid) <= 1e-12
        a_f, mid = a_new, mid_new
        if done:
            break
    return Fold(a_f, mid)


def enumerate_branches(c: ImplicitRelation, a_samples: int, b_samples: int = 401,
                       cfg: ToleranceConfig = DEFAULT) -> list[Branch]:
    """Split rel(a, b) = 0 into functional branches b = psi(a).

    Roots in b are located on each sampled a by sign-change scanning and
    bracketed root finding, threaded into chains by nearest neighbour (a jump
    larger than 10x the median root spacing starts a new chain), and chains
    that end inside the a-domain by merging pairwise get their common fold
    point refined.
    """
    if a_samples < 2:
        raise ValueError("a_samples must be at least 2")
    a_grid = [float(v) for v in np.linspace(c.a_domain[0], c.a_domain[1], a_samples)]
    b_grid = [float(v) for v in np.linspace(c.b_domain[0], c.b_domain[1], b_samples)]
    root_cfg = cfg.with_(root_tol=min(cfg.root_tol, 1e-15))
    columns = []
    for a in a_grid:
        columns.append(numerics.sign_change_roots(c.section(a), b_grid, root_cfg))
    if not any(columns):
        raise NoRoots("relation has no zero on the sampling grid")
    chains = _thread(columns, a_grid)

    span = c.b_domain[1] - c.b_domain[0]
    branches = []
    for chain in chains:
        samples = [_Sample(a_grid[i], b) for i, b in chain]
        mid = samples[len(samples) // 2]
        rb = numerics.diff_central(lambda t: c.rel(mid.a, t), mid.b, cfg)
        crossing = 1 if rb > 0 else -1
        branches.append(Branch(c, samples, crossing, cfg, [], span))

    # pair chain ends that stop (or start) at the same grid column
    n = len(a_grid)
    for end in ("tail", "head"):
        groups = {}
        for br, chain in zip(branches, chains):
            i = chain[-1][0] if end == "tail" else chain[0][0]
            if (end == "tail" and i < n - 1) or (end == "head" and i > 0):
                groups.setdefault(i, []).append(br)
        for i, members in groups.items():
            members.sort(key=lambda br: br.samples[-1].b if end == "tail" else br.samples[0].b)
            for b1, b2 in zip(members[::2], members[1::2]):
                s1 = b1.samples[-1] if end == "tail" else b1.samples[0]
                s2 = b2.samples[-1] if end == "tail" else b2.samples[0]
                a_out = a_grid[i + 1] if end == "tail" else a_grid[i - 1]
                fold = _refine_fold(c.rel, s1.a, a_out, s1.b, s2.b, root_cfg)
                if fold is None:
                    continue
                for br in (b1, b2):
                    br.folds.append(fold)
                    if end == "tail":
                        br.samples.append(_Sample(fold.a, fold.b))
                    else:
                        br.samples.insert(0, _Sample(fold.a, fold.b))
    return branches
