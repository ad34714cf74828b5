# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tape kernels.

Mirrors ``_pykernels`` entry point for entry point; the Python module is the
reference and the test suite runs both against the same expectations.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, sin, cos, log, exp, pow, isfinite, floor, fabs
from libc.stdlib cimport malloc, free

from ._tapefault import TapeFault

cnp.import_array()

cdef enum:
    CONST = 0
    VAR = 1
    NEG = 2
    ADD = 3
    SUB = 4
    MUL = 5
    DIV = 6
    POW = 7
    SQRT = 8
    SIN = 9
    COS = 10
    LN = 11
    EXP = 12

cdef enum:
    SQRT_NEGATIVE = 1
    LN_NONPOSITIVE = 2
    DIV_ZERO = 3
    NEG_BASE_FRACTIONAL = 4
    ZERO_NEG_POWER = 5
    NONFINITE = 6
    DERIV_UNDEFINED = 7
    BAD_BRACKET = 8
    NO_CONVERGENCE = 9


cdef struct Tape:
    const int* ops
    const int* args
    const double* consts
    int n
    double* vs
    double* ds


cdef inline int _powv(double u, double v, double* out) nogil:
    if u < 0.0 and floor(v) != v:
        return NEG_BASE_FRACTIONAL
    if u == 0.0 and v < 0.0:
        return ZERO_NEG_POWER
    out[0] = pow(u, v)
    return 0


cdef int _run(Tape* t, const double* values, int seed, double* rv, double* rd, int* fault_pc) nogil:
    cdef int sp = 0
    cdef int pc, op, err
    cdef double u, du, w, dw, r, d, p
    cdef bint track = seed >= 0
    cdef double* vs = t.vs
    cdef double* ds = t.ds
    for pc in range(t.n):
        op = t.ops[pc]
        err = 0
        if op == CONST:
            vs[sp] = t.consts[t.args[pc]]
            ds[sp] = 0.0
            sp += 1
            continue
        if op == VAR:
            vs[sp] = values[t.args[pc]]
            ds[sp] = 1.0 if t.args[pc] == seed else 0.0
            sp += 1
            continue
        if op == NEG or op >= SQRT:
            sp -= 1
            u = vs[sp]
            du = ds[sp]
            if op == NEG:
                r = -u
                d = -du
            elif op == SQRT:
                if u < 0.0:
                    err = SQRT_NEGATIVE
                else:
                    r = sqrt(u)
                    if du == 0.0:
                        d = 0.0
                    elif r == 0.0:
                        err = DERIV_UNDEFINED
                    else:
                        d = du / (2.0 * r)
            elif op == SIN:
                r = sin(u)
                d = du * cos(u) if track else 0.0
            elif op == COS:
                r = cos(u)
                d = -du * sin(u) if track else 0.0
            elif op == LN:
                if u <= 0.0:
                    err = LN_NONPOSITIVE
                else:
                    r = log(u)
                    d = du / u
            else:
                r = exp(u)
                d = du * r
        else:
            sp -= 1
            w = vs[sp]
            dw = ds[sp]
            sp -= 1
            u = vs[sp]
            du = ds[sp]
            if op == ADD:
                r = u + w
                d = du + dw
            elif op == SUB:
                r = u - w
                d = du - dw
            elif op == MUL:
                r = u * w
                d = du * w + u * dw
            elif op == DIV:
                if w == 0.0:
                    err = DIV_ZERO
                else:
                    r = u / w
                    d = (du - r * dw) / w
            else:
                err = _powv(u, w, &r)
                if err == 0:
                    if dw == 0.0:
                        if du == 0.0:
                            d = 0.0
                        elif u == 0.0 and w < 1.0:
                            err = DERIV_UNDEFINED
                        else:
                            err = _powv(u, w - 1.0, &p)
                            d = w * p * du
                    elif u <= 0.0:
                        err = DERIV_UNDEFINED
                    else:
                        d = r * (dw * log(u) + w * du / u)
        if err == 0 and not (isfinite(r) and isfinite(d)):
            err = NONFINITE
        if err != 0:
            fault_pc[0] = pc
            return err
        vs[sp] = r
        ds[sp] = d
        sp += 1
    rv[0] = vs[sp - 1]
    rd[0] = ds[sp - 1]
    return 0


cdef class _Runner:
    """Owns the scratch stacks for one tape."""
    cdef Tape t
    cdef int[::1] ops_mv
    cdef int[::1] args_mv
    cdef double[::1] consts_mv
    cdef double[::1] buf

    def __cinit__(self, ops, args, consts, values):
        self.ops_mv = np.ascontiguousarray(ops, dtype=np.intc)
        self.args_mv = np.ascontiguousarray(args, dtype=np.intc)
        self.consts_mv = np.ascontiguousarray(consts, dtype=np.float64)
        if self.consts_mv.shape[0] == 0:
            self.consts_mv = np.zeros(1)
        self.buf = np.array(values, dtype=np.float64).reshape(-1)
        if self.buf.shape[0] == 0:
            self.buf = np.zeros(1)
        self.t.n = self.ops_mv.shape[0]
        self.t.ops = &self.ops_mv[0]
        self.t.args = &self.args_mv[0]
        self.t.consts = &self.consts_mv[0]
        self.t.vs = <double*> malloc(self.t.n * sizeof(double))
        self.t.ds = <double*> malloc(self.t.n * sizeof(double))
        if self.t.vs == NULL or self.t.ds == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.t.vs)
        free(self.t.ds)

    cdef int call(self, int var, double x, int seed, double* rv, double* rd, int* pc) nogil:
        if var >= 0:
            self.buf[var] = x
        return _run(&self.t, &self.buf[0], seed, rv, rd, pc)

    cdef double value(self, int var, double x) except? -1.0:
        cdef double rv, rd
        cdef int pc = -1
        cdef int err = self.call(var, x, -1, &rv, &rd, &pc)
        if err != 0:
            raise TapeFault(pc, err)
        return rv


def eval_dual(ops, args, consts, values, int seed):
    cdef _Runner run = _Runner(ops, args, consts, values)
    cdef double rv, rd
    cdef int pc = -1
    cdef int err = _run(&run.t, &run.buf[0], seed, &rv, &rd, &pc)
    if err != 0:
        raise TapeFault(pc, err)
    return rv, rd


def eval_value(ops, args, consts, values):
    return eval_dual(ops, args, consts, values, -1)[0]


def eval_batch(ops, args, consts, points):
    cdef double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef _Runner run = _Runner(ops, args, consts, np.zeros(max(pts.shape[1], 1)))
    cdef double rv, rd
    cdef int pc = -1
    cdef int err = 0
    for i in range(n):
        err = _run(&run.t, &pts[i, 0], -1, &rv, &rd, &pc)
        if err != 0:
            raise TapeFault(pc, err)
        out[i] = rv
    return out


def simpson_tape(ops, args, consts, values, int var, double a0, double a1, int panels):
    cdef _Runner run = _Runner(ops, args, consts, values)
    cdef double h = (a1 - a0) / panels
    cdef double odd = 0.0
    cdef double even = 0.0
    cdef int i
    for i in range(1, panels):
        if i % 2:
            odd += run.value(var, a0 + i * h)
        else:
            even += run.value(var, a0 + i * h)
    return h / 3.0 * (run.value(var, a0) + 4.0 * odd + 2.0 * even + run.value(var, a1))


def root_tape(ops, args, consts, values, int var, double lo, double hi, double tol, int maxiter):
    cdef _Runner run = _Runner(ops, args, consts, values)
    cdef double flo = run.value(var, lo)
    cdef double fhi = run.value(var, hi)
    cdef double c, s, fc, width, new_width
    cdef bint use_secant = True
    cdef int it
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise TapeFault(-1, BAD_BRACKET)
    width = hi - lo
    for it in range(maxiter):
        c = lo + 0.5 * (hi - lo)
        if use_secant:
            s = hi - fhi * (hi - lo) / (fhi - flo)
            if lo < s < hi:
                c = s
        if c <= lo or c >= hi:
            return lo if fabs(flo) <= fabs(fhi) else hi
        fc = run.value(var, c)
        if fc == 0.0 or fabs(fc) <= tol:
            return c
        if (fc < 0.0) == (flo < 0.0):
            lo = c
            flo = fc
        else:
            hi = c
            fhi = fc
        new_width = hi - lo
        if new_width <= tol * (1.0 + fabs(c)):
            return lo if fabs(flo) <= fabs(fhi) else hi
        use_secant = new_width <= 0.5 * width
        width = new_width
    raise TapeFault(-1, NO_CONVERGENCE)
