"""Pure-Python tape kernels.

Same entry points and semantics as the compiled ``_ckernels`` module; used
when the extension is not built or ``CLAIRAUT_PURE_PYTHON`` is set.
"""
import math

from ._tapefault import (
    ADD, BAD_BRACKET, CONST, COS, DERIV_UNDEFINED, DIV, DIV_ZERO, EXP, LN,
    LN_NONPOSITIVE, MUL, NEG, NEG_BASE_FRACTIONAL, NO_CONVERGENCE, NONFINITE,
    POW, SIN, SQRT, SQRT_NEGATIVE, SUB, VAR, ZERO_NEG_POWER, TapeFault,
)

_isfinite = math.isfinite


def _pow_value(u, v, pc):
    if u < 0.0 and not v.is_integer():
        raise TapeFault(pc, NEG_BASE_FRACTIONAL)
    if u == 0.0 and v < 0.0:
        raise TapeFault(pc, ZERO_NEG_POWER)
    try:
        return u ** v
    except OverflowError:
        raise TapeFault(pc, NONFINITE) from None


def eval_dual(ops, args, consts, values, seed):
    """Run the tape; returns (value, d value / d values[seed]).

    ``seed`` < 0 skips derivative propagation (derivative reported as 0).
    """
    vs = []
    ds = []
    push_v = vs.append
    push_d = ds.append
    track = seed >= 0
    for pc in range(len(ops)):
        op = ops[pc]
        if op == CONST:
            push_v(consts[args[pc]])
            push_d(0.0)
            continue
        if op == VAR:
            i = args[pc]
            push_v(float(values[i]))
            push_d(1.0 if i == seed else 0.0)
            continue
        if op >= SQRT or op == NEG:
            u = vs.pop()
            du = ds.pop()
            if op == NEG:
                r, d = -u, -du
            elif op == SQRT:
                if u < 0.0:
                    raise TapeFault(pc, SQRT_NEGATIVE)
                r = math.sqrt(u)
                if du == 0.0:
                    d = 0.0
                elif r == 0.0:
                    raise TapeFault(pc, DERIV_UNDEFINED)
                else:
                    d = du / (2.0 * r)
            elif op == SIN:
                r = math.sin(u)
                d = du * math.cos(u) if track else 0.0
            elif op == COS:
                r = math.cos(u)
                d = -du * math.sin(u) if track else 0.0
            elif op == LN:
                if u <= 0.0:
                    raise TapeFault(pc, LN_NONPOSITIVE)
                r = math.log(u)
                d = du / u
            else:
                try:
                    r = math.exp(u)
                except OverflowError:
                    raise TapeFault(pc, NONFINITE) from None
                d = du * r
        else:
            w = vs.pop()
            dw = ds.pop()
            u = vs.pop()
            du = ds.pop()
            if op == ADD:
                r, d = u + w, du + dw
            elif op == SUB:
                r, d = u - w, du - dw
            elif op == MUL:
                r = u * w
                d = du * w + u * dw
            elif op == DIV:
                if w == 0.0:
                    raise TapeFault(pc, DIV_ZERO)
                r = u / w
                d = (du - r * dw) / w
            else:
                r = _pow_value(u, w, pc)
                if dw == 0.0:
                    if du == 0.0:
                        d = 0.0
                    elif u == 0.0 and w < 1.0:
                        raise TapeFault(pc, DERIV_UNDEFINED)
                    else:
                        d = w * _pow_value(u, w - 1.0, pc) * du
                else:
                    if u <= 0.0:
                        raise TapeFault(pc, DERIV_UNDEFINED)
                    d = r * (dw * math.log(u) + w * du / u)
        if not (_isfinite(r) and _isfinite(d)):
            raise TapeFault(pc, NONFINITE)
        push_v(r)
        push_d(d)
    return vs[-1], ds[-1]


def eval_value(ops, args, consts, values):
    return eval_dual(ops, args, consts, values, -1)[0]


def eval_batch(ops, args, consts, points):
    """Evaluate the tape at every row of ``points`` (n x nvars)."""
    ops = list(ops)
    args = list(args)
    consts = list(consts)
    return [eval_dual(ops, args, consts, list(row), -1)[0] for row in points]


def _bound(ops, args, consts, values, var):
    ops = list(ops)
    args = list(args)
    consts = list(consts)
    buf = [float(v) for v in values]

    def f(t):
        if var >= 0:
            buf[var] = t
        return eval_dual(ops, args, consts, buf, -1)[0]

    return f


def simpson(f, a0, a1, panels):
    """Composite Simpson rule with an even number of panels."""
    h = (a1 - a0) / panels
    odd = 0.0
    even = 0.0
    for i in range(1, panels):
        if i % 2:
            odd += f(a0 + i * h)
        else:
            even += f(a0 + i * h)
    return h / 3.0 * (f(a0) + 4.0 * odd + 2.0 * even + f(a1))


def bracket_root(f, lo, hi, tol, maxiter):
    """Bisection safeguarded secant iteration on a sign-change bracket.

    A secant step is taken when it lands strictly inside the bracket and the
    previous step shrank the bracket by at least half; otherwise bisect.
    Returns a point of the final bracket.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise TapeFault(-1, BAD_BRACKET)
    width = hi - lo
    use_secant = True
    for _ in range(maxiter):
        c = lo + 0.5 * (hi - lo)
        if use_secant:
            s = hi - fhi * (hi - lo) / (fhi - flo)
            if lo < s < hi:
                c = s
        if c <= lo or c >= hi:
            return lo if abs(flo) <= abs(fhi) else hi
        fc = f(c)
        if fc == 0.0 or abs(fc) <= tol:
            return c
        if (fc < 0.0) == (flo < 0.0):
            lo, flo = c, fc
        else:
            hi, fhi = c, fc
        new_width = hi - lo
        if new_width <= tol * (1.0 + abs(c)):
            return lo if abs(flo) <= abs(fhi) else hi
        use_secant = new_width <= 0.5 * width
        width = new_width
    raise TapeFault(-1, NO_CONVERGENCE)


def simpson_tape(ops, args, consts, values, var, a0, a1, panels):
    return simpson(_bound(ops, args, consts, values, var), a0, a1, panels)


def root_tape(ops, args, consts, values, var, lo, hi, tol, maxiter):
    return bracket_root(_bound(ops, args, consts, values, var), lo, hi, tol, maxiter)
