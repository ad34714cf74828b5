"""Scalar expression mini-language.

Grammar (whitespace insignificant, identifiers case-sensitive)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?          # right-associative
    atom  := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'

    FUNC  := sqrt | sin | cos | ln | exp

Parsed expressions compile to a flat postfix tape that is evaluated by the
kernel backend (compiled or pure Python), carrying one first derivative
alongside the value (forward-mode dual numbers).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Union

import numpy as np

from . import _backend
from . import _tapefault as tf
from .errors import ClairautError, DomainError, ParseError, UnknownFunction

FUNCTIONS = ("sqrt", "sin", "cos", "ln", "exp")

_FUNC_OPS = {"sqrt": tf.SQRT, "sin": tf.SIN, "cos": tf.COS, "ln": tf.LN, "exp": tf.EXP}
_BIN_OPS = {"+": tf.ADD, "-": tf.SUB, "*": tf.MUL, "/": tf.DIV, "^": tf.POW}


class UnboundVariable(ClairautError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# ---------------------------------------------------------------- tree nodes


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


def serialize(node: Node) -> str:
    """Fully parenthesised text that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{serialize(node.operand)})"
    if isinstance(node, BinOp):
        return f"({serialize(node.left)} {node.op} {serialize(node.right)})"
    return f"{node.func}({serialize(node.arg)})"


def substitute(node: Node, name: str, replacement: Node) -> Node:
    """Copy of ``node`` with every Var(name) replaced."""
    if isinstance(node, Var):
        return replacement if node.name == name else node
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, name, replacement))
    if isinstance(node, BinOp):
        return BinOp(node.op, substitute(node.left, name, replacement),
                     substitute(node.right, name, replacement))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, name, replacement))
    return node


# ------------------------------------------------------------------- lexing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


class _Tok(NamedTuple):
    kind: str  # 'num', 'ident', 'op', 'bad', 'end'
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos = 0
    byte = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            toks.append(_Tok("bad", source[pos], byte))
            break
        text = m.group()
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, text, byte))
        pos = m.end()
        byte += len(text.encode("utf-8"))
    else:
        toks.append(_Tok("end", "", byte))
        return toks
    return toks


# ------------------------------------------------------------------ parsing

_ATOM_START = ("number", "identifier", "'('", "'-'")


class _Parser:
    def __init__(self, source):
        self.toks = _tokenize(source)
        self.i = 0
        self.depth = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, expected):
        t = self.tok
        if t.kind == "end":
            what = "unexpected end of input"
        elif t.kind == "bad":
            what = f"unexpected character {t.text!r}"
        else:
            what = f"unexpected token {t.text!r}"
        raise ParseError(what, t.offset, expected)

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def follow_set(self):
        s = {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"}
        if self.depth:
            s.discard("end of input")
            s.add("')'")
        return s

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            self.fail(self.follow_set())
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            value = float(t.text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {t.text!r} overflows", t.offset)
            return Num(value)
        if t.kind == "ident":
            self.i += 1
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in FUNCTIONS:
                    raise UnknownFunction(t.text, t.offset)
                self.i += 1
                self.depth += 1
                arg = self.expr()
                self.depth -= 1
                if not self.accept(")"):
                    self.depth += 1
                    self.fail(self.follow_set() | {"')'"})
                return Call(t.text, arg)
            return Var(t.text)
        if self.accept("("):
            self.depth += 1
            node = self.expr()
            if not self.accept(")"):
                self.fail(self.follow_set())
            self.depth -= 1
            return node
        self.fail(_ATOM_START)


# -------------------------------------------------------------------- tape


class Tape(NamedTuple):
    ops: np.ndarray
    args: np.ndarray
    consts: np.ndarray
    nodes: tuple  # node that each instruction computes, for error messages


def _compile(root: Node, free_vars: tuple) -> Tape:
    index = {name: i for i, name in enumerate(free_vars)}
    ops, args, consts, nodes = [], [], [], []

    def emit(node):
        if isinstance(node, Num):
            ops.append(tf.CONST)
            args.append(len(consts))
            consts.append(node.value)
        elif isinstance(node, Var):
            ops.append(tf.VAR)
            args.append(index[node.name])
        elif isinstance(node, Neg):
            emit(node.operand)
            ops.append(tf.NEG)
            args.append(-1)
        elif isinstance(node, BinOp):
            emit(node.left)
            emit(node.right)
            ops.append(_BIN_OPS[node.op])
            args.append(-1)
        else:
            emit(node.arg)
            ops.append(_FUNC_OPS[node.func])
            args.append(-1)
        nodes.append(node)

    emit(root)
    return Tape(
        np.array(ops, dtype=np.intc),
        np.array(args, dtype=np.intc),
        np.array(consts, dtype=np.float64),
        tuple(nodes),
    )


def _collect_vars(node, out):
    if isinstance(node, Var):
        if node.name not in out:
            out.append(node.name)
    elif isinstance(node, Neg):
        _collect_vars(node.operand, out)
    elif isinstance(node, BinOp):
        _collect_vars(node.left, out)
        _collect_vars(node.right, out)
    elif isinstance(node, Call):
        _collect_vars(node.arg, out)
    return out


class DualValue(NamedTuple):
    value: float
    derivative: float


def _fault_to_error(tape, fault):
    node = tape.nodes[fault.pc] if 0 <= fault.pc < len(tape.nodes) else None
    reason = tf.REASONS.get(fault.reason, "evaluation failed")
    return DomainError(reason, serialize(node) if node is not None else None)


class Expr:
    """An immutable parsed expression.

    ``free_vars`` lists the variable names in order of first appearance.
    """

    __slots__ = ("root", "free_vars", "tape")

    def __init__(self, root: Node, free_vars=None):
        object.__setattr__(self, "root", root)
        used = _collect_vars(root, [])
        names = tuple(used)
        if free_vars is not None:
            # caller may widen the signature, e.g. F(x, y, z) that ignores y
            names = tuple(free_vars)
            missing = [v for v in used if v not in names]
            if missing:
                raise ValueError(f"free_vars lacks {missing}")
        object.__setattr__(self, "free_vars", names)
        object.__setattr__(self, "tape", _compile(root, names))

    def __setattr__(self, name, value):
        raise AttributeError("Expr is immutable")

    def __eq__(self, other):
        return isinstance(other, Expr) and self.root == other.root

    def __hash__(self):
        return hash(self.root)

    def __repr__(self):
        return f"Expr({serialize(self.root)!r})"

    def __str__(self):
        return serialize(self.root)

    def _values(self, bindings):
        try:
            return np.array([float(bindings[v]) for v in self.free_vars], dtype=np.float64)
        except KeyError as exc:
            raise UnboundVariable(f"no binding for variable {exc.args[0]!r}") from None

    def eval(self, bindings: Mapping[str, float], backend=None) -> float:
        k = _backend.kernels if backend is None else _backend.get(backend)
        t = self.tape
        try:
            return float(k.eval_value(t.ops, t.args, t.consts, self._values(bindings)))
        except tf.TapeFault as fault:
            raise _fault_to_error(t, fault) from None

    def eval_d(self, bindings: Mapping[str, float], seed: str, backend=None) -> DualValue:
        k = _backend.kernels if backend is None else _backend.get(backend)
        t = self.tape
        s = self.free_vars.index(seed) if seed in self.free_vars else -1
        try:
            v, d = k.eval_dual(t.ops, t.args, t.consts, self._values(bindings), s)
        except tf.TapeFault as fault:
            raise _fault_to_error(t, fault) from None
        return DualValue(float(v), float(d))

    def eval_many(self, points, backend=None) -> np.ndarray:
        """Evaluate at each row of ``points`` (columns in ``free_vars`` order)."""
        k = _backend.kernels if backend is None else _backend.get(backend)
        t = self.tape
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != len(self.free_vars):
            raise ValueError("points must have one column per free variable")
        try:
            return np.asarray(k.eval_batch(t.ops, t.args, t.consts, pts), dtype=np.float64)
        except tf.TapeFault as fault:
            raise _fault_to_error(t, fault) from None

    def function(self, var: str, backend=None, **fixed) -> "ExprFunction":
        return ExprFunction(self, var, fixed, backend)


class ExprFunction:
    """The expression as a real function of one variable, others held fixed.

    Instances are plain callables; ``numerics`` recognises them and runs
    quadrature and root finding inside the kernel.
    """

    def __init__(self, expr: Expr, var: str, fixed: Mapping[str, float], backend=None):
        self.expr = expr
        self.var = var
        self.kernels = _backend.kernels if backend is None else _backend.get(backend)
        self.index = expr.free_vars.index(var) if var in expr.free_vars else -1
        bind = dict(fixed)
        bind.setdefault(var, 0.0)
        self.values = expr._values(bind)

    @property
    def tape(self):
        return self.expr.tape

    def fault(self, exc):
        return _fault_to_error(self.expr.tape, exc)

    def __call__(self, t: float) -> float:
        vals = self.values.copy()
        if self.index >= 0:
            vals[self.index] = t
        tp = self.expr.tape
        try:
            return float(self.kernels.eval_value(tp.ops, tp.args, tp.consts, vals))
        except tf.TapeFault as exc:
            raise self.fault(exc) from None

    def derivative(self, t: float) -> float:
        """Exact first derivative with respect to the free variable."""
        vals = self.values.copy()
        if self.index >= 0:
            vals[self.index] = t
        tp = self.expr.tape
        try:
            return float(self.kernels.eval_dual(tp.ops, tp.args, tp.consts, vals, self.index)[1])
        except tf.TapeFault as exc:
            raise self.fault(exc) from None


def parse(source: str) -> Expr:
    """Parse ``source``; raises ParseError (or UnknownFunction) on bad input."""
    return Expr(_Parser(source).parse())


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    return e.eval(bindings)


def evaluate_d(e: Expr, bindings: Mapping[str, float], seed: str) -> DualValue:
    if seed not in e.free_vars:
        raise UnboundVariable(f"seed {seed!r} is not a free variable")
    return e.eval_d(bindings, seed)


def as_expr(obj) -> Expr:
    return obj if isinstance(obj, Expr) else parse(obj)
