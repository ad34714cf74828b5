"""Shared numeric kernel: central differences, Simpson quadrature,
bracketing root finding and gradients of implicit surfaces.

Functions accept any ``float -> float`` callable. When handed an
:class:`~clairaut.exprlang.ExprFunction`, quadrature and root finding run
inside the tape kernel (compiled when available) instead of calling back
into Python per evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from . import _pykernels
from . import _tapefault as tf
from .errors import MaxIterations, NoBracket
from .exprlang import ExprFunction

MAX_ITER = 200


@dataclass(frozen=True)
class ToleranceConfig:
    fd_step: float = 1e-6
    root_tol: float = 1e-12
    residual_tol: float = 1e-8
    quad_panels: int = 400

    def __post_init__(self):
        for name in ("fd_step", "root_tol", "residual_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.quad_panels <= 0 or self.quad_panels % 2:
            raise ValueError("quad_panels must be a positive even integer")

    def with_(self, **changes) -> "ToleranceConfig":
        return replace(self, **changes)


DEFAULT = ToleranceConfig()


def step(a: float, cfg: ToleranceConfig = DEFAULT) -> float:
    return cfg.fd_step * (1.0 + abs(a))


def diff_central(f: Callable[[float], float], a: float, cfg: ToleranceConfig = DEFAULT) -> float:
    h = step(a, cfg)
    return (f(a + h) - f(a - h)) / (2.0 * h)


def diff_onesided(f, a, direction, cfg=DEFAULT):
    """Second-order one-sided difference; ``direction`` +1 looks right, -1 left."""
    h = direction * step(a, cfg)
    return (-3.0 * f(a) + 4.0 * f(a + h) - f(a + 2.0 * h)) / (2.0 * h)


def integrate(f: Callable[[float], float], a0: float, a1: float, cfg: ToleranceConfig = DEFAULT) -> float:
    """Composite Simpson rule on [a0, a1] with ``cfg.quad_panels`` panels."""
    if a1 < a0:
        raise ValueError("integrate requires a0 <= a1")
    if a0 == a1:
        return 0.0
    if isinstance(f, ExprFunction):
        tp = f.tape
        try:
            return float(f.kernels.simpson_tape(
                tp.ops, tp.args, tp.consts, f.values, f.index, a0, a1, cfg.quad_panels))
        except tf.TapeFault as exc:
            raise f.fault(exc) from None
    return _pykernels.simpson(f, a0, a1, cfg.quad_panels)


def find_root(f: Callable[[float], float], lo: float, hi: float, cfg: ToleranceConfig = DEFAULT) -> float:
    """Root of ``f`` inside the sign-change bracket [lo, hi].

    Bisection with secant acceleration; the result always lies in [lo, hi]
    and satisfies ``|f(r)| <= root_tol`` or has a final bracket no wider
    than ``root_tol * (1 + |r|)``.
    """
    if hi < lo:
        lo, hi = hi, lo
    try:
        if isinstance(f, ExprFunction):
            tp = f.tape
            try:
                return float(f.kernels.root_tape(
                    tp.ops, tp.args, tp.consts, f.values, f.index,
                    lo, hi, cfg.root_tol, MAX_ITER))
            except tf.TapeFault as exc:
                if exc.pc >= 0:
                    raise f.fault(exc) from None
                raise
        return _pykernels.bracket_root(f, lo, hi, cfg.root_tol, MAX_ITER)
    except tf.TapeFault as exc:
        if exc.reason == tf.BAD_BRACKET:
            raise NoBracket(f"no sign change on [{lo!r}, {hi!r}]") from None
        raise MaxIterations(f"no convergence on [{lo!r}, {hi!r}] after {MAX_ITER} iterations") from None


def sign_change_roots(f, grid: Sequence[float], cfg: ToleranceConfig = DEFAULT,
                      values: Optional[Sequence[float]] = None) -> list[float]:
    """All roots located by scanning ``grid`` for sign changes.

    Exact zeros on the grid count only when the sign actually crosses there,
    so tangential touches are not reported. ``values`` may carry f on the
    grid when the caller already has it.
    """
    if values is None:
        values = [f(t) for t in grid]
    roots = []
    n = len(grid)
    for i in range(n - 1):
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            prev = values[i - 1] if i > 0 else None
            if prev is not None and prev != 0.0 and fb != 0.0 and (prev < 0) != (fb < 0):
                roots.append(grid[i])
            continue
        if fb != 0.0 and (fa < 0) != (fb < 0):
            roots.append(find_root(f, grid[i], grid[i + 1], cfg))
    return roots


def gradient3(F, p: Sequence[float], cfg: ToleranceConfig = DEFAULT) -> tuple[float, float, float]:
    """Central-difference gradient of ``F(x, y, z)`` at ``p``."""
    x, y, z = (float(c) for c in p)
    return (
        diff_central(lambda t: F(t, y, z), x, cfg),
        diff_central(lambda t: F(x, t, z), y, cfg),
        diff_central(lambda t: F(x, y, t), z, cfg),
    )


def gradient2(F, p: Sequence[float], cfg: ToleranceConfig = DEFAULT) -> tuple[float, float]:
    x, y = (float(c) for c in p)
    return (
        diff_central(lambda t: F(t, y), x, cfg),
        diff_central(lambda t: F(x, t), y, cfg),
    )
