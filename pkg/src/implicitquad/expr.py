"""Arithmetic expressions in x, y, z with forward-mode gradients.

Text is parsed by a small recursive-descent parser into an immutable AST.
The AST can be

* evaluated together with its gradient by walking the tree with dual
  numbers (:func:`eval_with_gradient`, the reference path), and
* flattened into a postfix :class:`Program` that the array kernels in
  :mod:`implicitquad.kernels` interpret, with numba or with numpy.

Precedence, loosest first: ``+ -``, ``* /``, unary minus, ``^`` (right
associative, so ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Tuple, Union

import numpy as np

from .errors import DimensionError, ExprSyntaxError, UnknownIdentifier

VARIABLES = ("x", "y", "z")
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh")

# postfix opcodes shared with the kernels
OP_CONST, OP_VAR, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POW, OP_NEG, OP_POWI = range(9)
OP_FUNC0 = 16
FUNC_OPCODES = {name: OP_FUNC0 + i for i, name in enumerate(FUNCTIONS)}
BINARY_OPCODES = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV, "^": OP_POW}


# --------------------------------------------------------------------- AST

@dataclass(frozen=True)
class Num:
    value: float
    name: str = ""


@dataclass(frozen=True)
class Var:
    index: int


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


# ------------------------------------------------------------------ parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_]\w*)"
    r"|(?P<op>\*\*|[-+*/^()]))"
)


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = len(text) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        value = m.group(kind)
        if value == "**":
            value = "^"
        tokens.append((kind, value, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, dim: int):
        self.tokens = tokenize(text)
        self.i = 0
        self.dim = dim

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value:
            found = "end of input" if kind == "end" else repr(v)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {v!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        kind, v, _ = self.peek()
        if kind == "op" and v == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and v == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, v, _ = self.peek()
        if kind == "op" and v == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, v, pos = self.take()
        if kind == "num":
            return Num(float(v))
        if kind == "ident":
            if v in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ExprSyntaxError(f"function {v!r} needs an argument", pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(v, arg)
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                raise UnknownIdentifier(v)
            if v in VARIABLES:
                index = VARIABLES.index(v)
                if index >= self.dim:
                    raise DimensionError(v, self.dim)
                return Var(index)
            if v in CONSTANTS:
                return Num(CONSTANTS[v], v)
            raise UnknownIdentifier(v)
        if kind == "op" and v == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(v)
        raise ExprSyntaxError(f"expected a value, found {found}", pos)


# ---------------------------------------------------------------- printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def to_text(node: Node) -> str:
    return _fmt(node, 0)


def _fmt(node: Node, parent: int) -> str:
    if isinstance(node, Num):
        s = node.name or repr(node.value)
        return s
    if isinstance(node, Var):
        return VARIABLES[node.index]
    if isinstance(node, Call):
        return f"{node.func}({_fmt(node.arg, 0)})"
    if isinstance(node, Neg):
        s = "-" + _fmt(node.operand, 3)
        return f"({s})" if parent >= 3 else s
    prec = _PREC[node.op]
    if node.op == "^":
        s = f"{_fmt(node.left, prec + 1)}^{_fmt(node.right, 3)}"
    else:
        # left-associative: the right operand needs strictly higher binding
        s = f"{_fmt(node.left, prec)} {node.op} {_fmt(node.right, prec + 1)}"
    return f"({s})" if prec < parent else s


# ------------------------------------------------------------- dual numbers

@dataclass
class DualValue:
    """Value of an expression and its partial derivatives at one point."""

    value: float
    partials: Tuple[float, ...]

    @property
    def domain_error(self) -> bool:
        return not (math.isfinite(self.value) and all(math.isfinite(p) for p in self.partials))


def _dual(node: Node, xs, zero):
    """Forward-mode evaluation; returns ``(value, grad)`` with grad ``(d, ...)``."""
    d = len(xs)
    if isinstance(node, Num):
        return zero + node.value, np.zeros((d,) + np.shape(zero))
    if isinstance(node, Var):
        g = np.zeros((d,) + np.shape(zero))
        g[node.index] = 1.0
        return zero + xs[node.index], g
    if isinstance(node, Neg):
        v, g = _dual(node.operand, xs, zero)
        return -v, -g
    if isinstance(node, Call):
        v, g = _dual(node.arg, xs, zero)
        fv, dv = _FUNC_RULES[node.func](v)
        return fv, dv * g
    a, ga = _dual(node.left, xs, zero)
    if node.op == "^" and isinstance(node.right, Num) and float(node.right.value).is_integer():
        n = node.right.value
        return a**n, (n * a ** (n - 1)) * ga if n != 0 else 0 * ga
    b, gb = _dual(node.right, xs, zero)
    if node.op == "+":
        return a + b, ga + gb
    if node.op == "-":
        return a - b, ga - gb
    if node.op == "*":
        return a * b, b * ga + a * gb
    if node.op == "/":
        return a / b, (ga * b - a * gb) / (b * b)
    v = np.power(a, b)
    g = (b * np.power(a, b - 1)) * ga
    if np.any(gb != 0):
        g = g + np.where(gb != 0, v * np.log(a) * gb, 0.0)
    return v, g


def _deriv_abs(v):
    return np.abs(v), np.sign(v)


_FUNC_RULES = {
    "sin": lambda v: (np.sin(v), np.cos(v)),
    "cos": lambda v: (np.cos(v), -np.sin(v)),
    "tan": lambda v: (np.tan(v), 1.0 / np.cos(v) ** 2),
    "exp": lambda v: (np.exp(v), np.exp(v)),
    "log": lambda v: (np.log(v), 1.0 / v),
    "sqrt": lambda v: (np.sqrt(v), 0.5 / np.sqrt(v)),
    "abs": _deriv_abs,
    "tanh": lambda v: (np.tanh(v), 1.0 - np.tanh(v) ** 2),
}


# ---------------------------------------------------------------- programs

@dataclass(frozen=True)
class Program:
    """Postfix form of an expression: parallel opcode/argument arrays."""

    ops: np.ndarray
    args: np.ndarray
    consts: np.ndarray
    dim: int
    depth: int


def compile_program(node: Node, dim: int) -> Program:
    ops, args, consts = [], [], []
    depth = [0, 0]

    def push(delta):
        depth[0] += delta
        depth[1] = max(depth[1], depth[0])

    def emit(n):
        if isinstance(n, Num):
            ops.append(OP_CONST)
            args.append(len(consts))
            consts.append(n.value)
            push(1)
        elif isinstance(n, Var):
            ops.append(OP_VAR)
            args.append(n.index)
            push(1)
        elif isinstance(n, Neg):
            emit(n.operand)
            ops.append(OP_NEG)
            args.append(0)
        elif isinstance(n, Call):
            emit(n.arg)
            ops.append(FUNC_OPCODES[n.func])
            args.append(0)
        elif (n.op == "^" and isinstance(n.right, Num)
              and float(n.right.value).is_integer() and abs(n.right.value) < 2**31):
            emit(n.left)
            ops.append(OP_POWI)
            args.append(int(n.right.value))
        else:
            emit(n.left)
            emit(n.right)
            ops.append(BINARY_OPCODES[n.op])
            args.append(0)
            push(-1)

    emit(node)
    return Program(
        ops=np.asarray(ops, dtype=np.int64),
        args=np.asarray(args, dtype=np.int64),
        consts=np.asarray(consts + [0.0], dtype=np.float64),
        dim=dim,
        depth=max(depth[1], 1),
    )


# -------------------------------------------------------------- public API

@dataclass(frozen=True)
class Expression:
    root: Node
    dim: int
    text: str = field(default="", compare=False)

    def __str__(self):
        return to_text(self.root)

    @cached_property
    def program(self) -> Program:
        return compile_program(self.root, self.dim)

    @cached_property
    def variables(self) -> frozenset:
        found = set()
        stack = [self.root]
        while stack:
            n = stack.pop()
            if isinstance(n, Var):
                found.add(n.index)
            elif isinstance(n, Neg):
                stack.append(n.operand)
            elif isinstance(n, Call):
                stack.append(n.arg)
            elif isinstance(n, BinOp):
                stack.extend((n.left, n.right))
        return frozenset(found)

    def dual(self, points):
        """Tree-walking value and gradient for an ``(N, d)`` array of points."""
        pts = np.asarray(points, dtype=float)
        xs = [pts[..., k] for k in range(self.dim)]
        with np.errstate(all="ignore"):
            v, g = _dual(self.root, xs, np.zeros(pts.shape[:-1]))
        return v, np.moveaxis(g, 0, -1)


def parse(text: str, dim: int) -> Expression:
    if dim not in (2, 3):
        raise ValueError("dimension must be 2 or 3")
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return Expression(_Parser(text, dim).parse(), dim, text)


def eval_with_gradient(expr: Expression, point) -> DualValue:
    p = np.asarray(point, dtype=float)
    if p.shape != (expr.dim,):
        raise ValueError(f"point must have {expr.dim} coordinates")
    v, g = expr.dual(p[None, :])
    return DualValue(float(v[0]), tuple(float(c) for c in g[0]))
